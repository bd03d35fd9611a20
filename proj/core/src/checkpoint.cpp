#include <bit>
#include <cstring>
#include <fstream>

#include "fasc/error.hpp"
#include "fasc/state.hpp"
#include <nlohmann/json.hpp>

namespace fasc {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is written in host order");

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto& st = ckpt.state;
  nlohmann::json header;
  header["format"] = "fasc-checkpoint";
  header["version"] = 1;
  header["t"] = st.iteration;
  header["K"] = st.clusters.size();
  header["D"] = ckpt.dim;
  header["N"] = st.assignments.size();
  header["kernel"] = ckpt.kernel;
  header["config"] = ckpt.config_json.empty() ? nlohmann::json::object()
                                              : nlohmann::json::parse(ckpt.config_json);
  std::vector<std::size_t> supports;
  std::vector<int> born;
  std::vector<bool> promoted, alive;
  for (const auto& c : st.clusters) {
    if (c.representative.size() != ckpt.dim) {
      throw InvariantError("representative dimension differs from checkpoint D");
    }
    supports.push_back(c.support);
    born.push_back(c.born_iteration);
    promoted.push_back(c.newly_promoted);
    alive.push_back(c.alive);
  }
  header["supports"] = supports;
  header["born"] = born;
  header["newly_promoted"] = promoted;
  header["alive"] = alive;
  header["ids"] = ckpt.ids;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << header.dump() << '\n';
  for (const auto& c : st.clusters) {
    out.write(reinterpret_cast<const char*>(c.representative.data()),
              static_cast<std::streamsize>(c.representative.size() * sizeof(double)));
  }
  for (int a : st.assignments) {
    const auto v = static_cast<std::int32_t>(a);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty checkpoint");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what(), 1);
  }
  if (header.value("format", "") != "fasc-checkpoint") throw ParseError("not a checkpoint");

  Checkpoint ckpt;
  ckpt.dim = header.at("D").get<std::size_t>();
  ckpt.kernel = header.at("kernel").get<std::string>();
  ckpt.config_json = header.at("config").dump();
  ckpt.ids = header.at("ids").get<std::vector<SampleId>>();
  auto& st = ckpt.state;
  st.iteration = header.at("t").get<int>();
  const auto k = header.at("K").get<std::size_t>();
  const auto n = header.at("N").get<std::size_t>();
  const auto supports = header.at("supports").get<std::vector<std::size_t>>();
  const auto born = header.at("born").get<std::vector<int>>();
  const auto promoted = header.at("newly_promoted").get<std::vector<bool>>();
  const auto alive = header.at("alive").get<std::vector<bool>>();
  if (supports.size() != k || born.size() != k || promoted.size() != k || alive.size() != k) {
    throw ParseError("checkpoint cluster arrays disagree with K");
  }
  st.clusters.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto& c = st.clusters[j];
    c.support = supports[j];
    c.born_iteration = born[j];
    c.newly_promoted = promoted[j];
    c.alive = alive[j];
    c.representative.resize(ckpt.dim);
    if (!in.read(reinterpret_cast<char*>(c.representative.data()),
                 static_cast<std::streamsize>(ckpt.dim * sizeof(double)))) {
      throw ParseError("truncated checkpoint representatives");
    }
  }
  st.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::int32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
      throw ParseError("truncated checkpoint assignments");
    }
    st.assignments[i] = v;
  }
  return ckpt;
}

}  // namespace fasc
