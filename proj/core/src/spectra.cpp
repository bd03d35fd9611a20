#include "fasc/spectra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "fasc/error.hpp"
#include "hashing.hpp"
#include <nlohmann/json.hpp>

namespace fasc {
namespace {

constexpr double kHashQuantum = 1e-9;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_real(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError("malformed number '" + std::string(field) + "' at line " +
                         std::to_string(line),
                     line);
  }
  if (!std::isfinite(v)) {
    throw ParseError("non-finite value at line " + std::to_string(line), line);
  }
  return v;
}

template <typename T>
T parse_integer(std::string_view field, std::size_t line) {
  T v{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError("malformed integer '" + std::string(field) + "' at line " +
                         std::to_string(line),
                     line);
  }
  return v;
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::optional<PolaritySplit> make_split(std::optional<std::size_t> index, std::size_t dim) {
  if (!index) return std::nullopt;
  if (*index == 0 || *index >= dim) {
    throw ParseError("split index " + std::to_string(*index) + " outside (0, " +
                     std::to_string(dim) + ")");
  }
  return PolaritySplit{*index};
}

bool entry_less(const Entry& a, const Entry& b) {
  if (a.dim != b.dim) return a.dim < b.dim;
  return a.value < b.value;
}

}  // namespace

std::vector<double> Spectrum::to_dense(std::size_t dim) const {
  std::vector<double> out(dim, 0.0);
  for (const auto& e : entries) out.at(e.dim) = e.value;
  return out;
}

Spectrum Spectrum::from_dense(SampleId id, std::span<const double> values) {
  Spectrum s;
  s.id = id;
  for (std::size_t d = 0; d < values.size(); ++d) {
    if (values[d] != 0.0) s.entries.push_back({static_cast<std::uint32_t>(d), values[d]});
  }
  return s;
}

void Dataset::validate() const {
  std::unordered_set<SampleId> ids;
  ids.reserve(spectra.size());
  for (const auto& s : spectra) {
    if (!ids.insert(s.id).second) {
      throw ParseError("duplicate sample id " + std::to_string(s.id));
    }
    for (std::size_t k = 0; k < s.entries.size(); ++k) {
      const auto& e = s.entries[k];
      if (e.dim >= dim) throw ParseError("dimension out of range in sample " + std::to_string(s.id));
      if (!std::isfinite(e.value) || e.value < 0.0) {
        throw ParseError("invalid intensity in sample " + std::to_string(s.id));
      }
      if (e.value == 0.0) throw ParseError("stored zero in sample " + std::to_string(s.id));
      if (k > 0 && s.entries[k - 1].dim >= e.dim) {
        throw ParseError("unsorted entries in sample " + std::to_string(s.id));
      }
    }
  }
  if (split && (split->index == 0 || split->index >= dim)) {
    throw ParseError("split index outside (0, D)");
  }
  if (labels) {
    if (labels->size() != spectra.size()) throw ParseError("label count mismatch");
    for (int l : *labels) {
      if (l < 0) throw ParseError("negative label");
    }
  }
}

Dataset load_dense_csv(const std::filesystem::path& path, std::optional<std::size_t> split_index) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("missing header row", 1);
  ++line_no;
  const auto header = split_fields(line);
  if (header.empty() || header.front() != "id") {
    throw ParseError("header must start with 'id'", 1);
  }
  const bool has_labels = header.size() >= 2 && header.back() == "label";
  const std::size_t width = header.size();
  const std::size_t dim = width - 1 - (has_labels ? 1 : 0);
  if (dim == 0) throw ParseError("header declares no feature columns", 1);

  Dataset data;
  data.dim = dim;
  data.split = make_split(split_index, dim);
  std::vector<int> labels;
  std::vector<double> row(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != width) {
      throw ParseError("row width mismatch at line " + std::to_string(line_no), line_no);
    }
    const auto id = parse_integer<SampleId>(fields[0], line_no);
    for (std::size_t d = 0; d < dim; ++d) {
      row[d] = parse_real(fields[d + 1], line_no);
      if (row[d] < 0.0) {
        throw ParseError("negative intensity at line " + std::to_string(line_no), line_no);
      }
    }
    data.spectra.push_back(Spectrum::from_dense(id, row));
    if (has_labels) labels.push_back(parse_integer<int>(fields.back(), line_no));
  }
  if (has_labels) data.labels = std::move(labels);
  data.validate();
  return data;
}

void write_dense_csv(const Dataset& data, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "id";
  for (std::size_t d = 0; d < data.dim; ++d) out << ",f" << d;
  if (data.labels) out << ",label";
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data.spectra[i];
    out << s.id;
    std::size_t k = 0;
    for (std::size_t d = 0; d < data.dim; ++d) {
      out << ',';
      if (k < s.entries.size() && s.entries[k].dim == d) {
        out << format_real(s.entries[k++].value);
      } else {
        out << '0';
      }
    }
    if (data.labels) out << ',' << (*data.labels)[i];
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::filesystem::path sidecar_path(const std::filesystem::path& triplets) {
  auto p = triplets;
  p += ".json";
  return p;
}

Dataset load_sparse_triplets(const std::filesystem::path& path, std::size_t dim,
                             std::optional<std::size_t> split_index) {
  auto in = open_input(path);
  Dataset data;
  data.dim = dim;
  data.split = make_split(split_index, dim);

  std::unordered_map<SampleId, std::size_t> slot;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (line_no == 1 && t.starts_with("sample_id")) continue;
    const auto fields = split_fields(t);
    if (fields.size() != 3) {
      throw ParseError("row width mismatch at line " + std::to_string(line_no), line_no);
    }
    const auto id = parse_integer<SampleId>(fields[0], line_no);
    const auto d = parse_integer<std::uint64_t>(fields[1], line_no);
    const double v = parse_real(fields[2], line_no);
    if (d >= dim) {
      throw ParseError("dimension out of range at line " + std::to_string(line_no), line_no);
    }
    if (v < 0.0) {
      throw ParseError("negative intensity at line " + std::to_string(line_no), line_no);
    }
    auto [it, fresh] = slot.try_emplace(id, data.spectra.size());
    if (fresh) data.spectra.push_back(Spectrum{id, {}});
    if (v != 0.0) {
      data.spectra[it->second].entries.push_back({static_cast<std::uint32_t>(d), v});
    }
  }
  for (auto& s : data.spectra) {
    std::sort(s.entries.begin(), s.entries.end(),
              [](const Entry& a, const Entry& b) { return a.dim < b.dim; });
    for (std::size_t k = 1; k < s.entries.size(); ++k) {
      if (s.entries[k - 1].dim == s.entries[k].dim) {
        throw ParseError("duplicate entry (sample " + std::to_string(s.id) + ", dim " +
                         std::to_string(s.entries[k].dim) + ")");
      }
    }
  }
  data.validate();
  return data;
}

Dataset load_sparse_triplets(const std::filesystem::path& path) {
  const auto meta_path = sidecar_path(path);
  auto in = open_input(meta_path);
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad sidecar " + meta_path.string() + ": " + e.what());
  }
  if (!meta.contains("D")) throw ParseError("sidecar lacks D");
  std::optional<std::size_t> split;
  if (meta.contains("split_index") && !meta["split_index"].is_null()) {
    split = meta["split_index"].get<std::size_t>();
  }
  auto data = load_sparse_triplets(path, meta["D"].get<std::size_t>(), split);
  if (meta.contains("N") && meta["N"].get<std::size_t>() != data.size()) {
    throw ParseError("sidecar N disagrees with triplet file");
  }
  return data;
}

void write_sparse_triplets(const Dataset& data, const std::filesystem::path& path) {
  {
    auto out = open_output(path);
    out << "sample_id,dim,intensity\n";
    for (const auto& s : data.spectra) {
      if (s.degenerate()) {
        out << s.id << ",0,0\n";
        continue;
      }
      for (const auto& e : s.entries) {
        out << s.id << ',' << e.dim << ',' << format_real(e.value) << '\n';
      }
    }
    if (!out) throw IoError("write failed: " + path.string());
  }
  nlohmann::json meta;
  meta["D"] = data.dim;
  meta["N"] = data.size();
  if (data.split) meta["split_index"] = data.split->index;
  auto out = open_output(sidecar_path(path));
  out << meta.dump() << '\n';
}

namespace {

std::uint32_t read_be32(std::istream& in, const char* what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw ParseError(std::string("truncated IDX header (") + what + ")");
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

}  // namespace

Dataset load_idx_images(const std::filesystem::path& images,
                        const std::optional<std::filesystem::path>& labels) {
  auto in = open_input(images);
  if (read_be32(in, "magic") != 0x00000803) throw ParseError("bad magic in " + images.string());
  const std::uint32_t count = read_be32(in, "count");
  const std::uint32_t rows = read_be32(in, "rows");
  const std::uint32_t cols = read_be32(in, "cols");
  Dataset data;
  data.dim = std::size_t{rows} * cols;
  if (data.dim == 0) throw ParseError("IDX image has zero pixels");
  data.spectra.reserve(count);
  std::vector<unsigned char> pixels(data.dim);
  std::vector<double> row(data.dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (!in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()))) {
      throw ParseError("truncated IDX payload at image " + std::to_string(i));
    }
    std::copy(pixels.begin(), pixels.end(), row.begin());
    data.spectra.push_back(Spectrum::from_dense(i, row));
  }
  if (labels) {
    auto lin = open_input(*labels);
    if (read_be32(lin, "magic") != 0x00000801) throw ParseError("bad magic in " + labels->string());
    const std::uint32_t n = read_be32(lin, "count");
    if (n != count) throw ParseError("count mismatch between images and labels");
    std::vector<unsigned char> raw(n);
    if (!lin.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n))) {
      throw ParseError("truncated IDX label payload");
    }
    data.labels = std::vector<int>(raw.begin(), raw.end());
  }
  return data;
}

std::vector<std::pair<SampleId, int>> load_labels_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::pair<SampleId, int>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || (line_no == 1 && t.starts_with("id"))) continue;
    const auto fields = split_fields(t);
    if (fields.size() != 2) {
      throw ParseError("row width mismatch at line " + std::to_string(line_no), line_no);
    }
    out.emplace_back(parse_integer<SampleId>(fields[0], line_no),
                     parse_integer<int>(fields[1], line_no));
  }
  return out;
}

void write_labels_csv(const Dataset& data, const std::filesystem::path& path) {
  if (!data.labels) throw InvariantError("dataset has no labels");
  auto out = open_output(path);
  out << "id,label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.spectra[i].id << ',' << (*data.labels)[i] << '\n';
  }
}

std::uint64_t content_hash(const Spectrum& s) {
  detail::Hasher h;
  for (const auto& e : s.entries) {
    h.add(e.dim);
    h.add_quantized(e.value, kHashQuantum);
  }
  return h.digest();
}

std::vector<std::size_t> canonical_order(const Dataset& data) {
  std::vector<std::uint64_t> keys(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) keys[i] = content_hash(data.spectra[i]);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    const auto& ea = data.spectra[a].entries;
    const auto& eb = data.spectra[b].entries;
    if (ea != eb) {
      return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end(), entry_less);
    }
    return data.spectra[a].id < data.spectra[b].id;
  });
  return order;
}

std::vector<SampleId> canonical_ids(const Dataset& data) {
  const auto order = canonical_order(data);
  std::vector<SampleId> ids;
  ids.reserve(order.size());
  for (auto pos : order) ids.push_back(data.spectra[pos].id);
  return ids;
}

}  // namespace fasc
