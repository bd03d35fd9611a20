#include "fasc_tools/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fasc/baselines.hpp"
#include "fasc/error.hpp"
#include "fasc/metrics.hpp"
#include "fasc/phase3.hpp"
#include "fasc/scaling.hpp"
#include "fasc/spectra.hpp"
#include "fasc/state.hpp"
#include "fasc/synthetic.hpp"

namespace fasc::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.3.0";

const std::map<std::string, std::string>& field_flags() {
  static const std::map<std::string, std::string> flags = {
      {"tau_intra", "--tau-intra"},       {"tau_inter", "--tau-inter"},
      {"min_support", "--z-min"},         {"k_max", "--k-max"},
      {"lambda", "--lambda"},             {"seed_budget", "--seed-budget"},
      {"batch_size", "--batch-size"},     {"max_iterations", "--max-iters"},
      {"tolerance", "--tol"},             {"workers", "--workers"},
      {"rule", "--rule"},                 {"phi", "--phi"},
      {"kernel", "--kernel"},             {"labels", "--labels"},
      {"k", "--k"},                       {"vigilance", "--vigilance"},
      {"eta", "--eta"},                   {"epochs", "--epochs"},
      {"sizes", "--sizes"},               {"repetitions", "--reps"},
      {"k_true", "--k-true"},             {"noise", "--noise"},
      {"dim", "--dim"},                   {"peaks", "--peaks"},
      {"format", "--format"},             {"state", "--state"},
      {"algo", "--algo"},                 {"split", "--split"},
  };
  return flags;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::size_t resolve_workers(std::size_t flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("FASC_WORKERS")) {
    std::size_t v = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v == 0) {
      throw ConfigError("workers", "FASC_WORKERS must be a positive integer");
    }
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Input options shared by every command that reads a dataset.
struct InputOptions {
  std::string path;
  std::string format = "dense";
  std::string labels;
  std::size_t dim = 0;
  std::size_t split = 0;

  void add(CLI::App* app) {
    app->add_option("--input", path, "Dataset file (IDX images for --format idx)")->required();
    app->add_option("--format", format, "dense | sparse | idx")
        ->check(CLI::IsMember({"dense", "sparse", "idx"}));
    app->add_option("--labels", labels, "Labels: IDX file for idx input, id,label CSV otherwise");
    app->add_option("--dim", dim, "Dimension for sparse input without a sidecar");
    app->add_option("--split", split, "Polarity split index (dual-cosine)");
  }

  std::optional<std::size_t> split_index() const {
    return split > 0 ? std::optional(split) : std::nullopt;
  }

  std::vector<fs::path> files() const {
    std::vector<fs::path> f{path};
    if (!labels.empty()) f.emplace_back(labels);
    return f;
  }

  Dataset load() const {
    Dataset data;
    if (format == "idx") {
      data = load_idx_images(path, labels.empty() ? std::nullopt : std::optional<fs::path>(labels));
      if (split > 0) data.split = PolaritySplit{split};
    } else {
      if (format == "dense") {
        data = load_dense_csv(path, split_index());
      } else if (dim > 0) {
        data = load_sparse_triplets(path, dim, split_index());
      } else {
        data = load_sparse_triplets(path);
        if (split > 0) data.split = PolaritySplit{split};
      }
      if (!labels.empty()) attach_labels(data);
    }
    data.validate();
    return data;
  }

  void attach_labels(Dataset& data) const {
    std::unordered_map<SampleId, int> by_id;
    for (const auto& [id, label] : load_labels_csv(labels)) by_id[id] = label;
    if (by_id.size() != data.size()) {
      throw ConfigError("labels", "label file has " + std::to_string(by_id.size()) +
                                      " rows for " + std::to_string(data.size()) + " samples");
    }
    std::vector<int> out;
    out.reserve(data.size());
    for (const auto& s : data.spectra) {
      const auto it = by_id.find(s.id);
      if (it == by_id.end()) throw ConfigError("labels", "no label for id " + std::to_string(s.id));
      out.push_back(it->second);
    }
    data.labels = std::move(out);
  }
};

// Engine flags shared by cluster and sweep.
struct EngineOptions {
  FascConfig config;
  std::string kernel = "cosine";
  std::string rule = "dass";
  std::string phi = "linear";
  std::size_t seed_budget = 0;
  std::size_t workers = 0;
  bool no_edits = false;
  bool no_cycle_guard = false;

  void add(CLI::App* app) {
    app->add_option("--kernel", kernel, "cosine | dual-cosine | sqeuclidean | manhattan");
    app->add_option("--tau-intra", config.tau_intra, "Admission threshold");
    app->add_option("--tau-inter", config.tau_inter, "Merge threshold");
    app->add_option("--k-max", config.capacity.k_max, "Maximum number of clusters");
    app->add_option("--z-min", config.min_support, "Minimum support before dissolution");
    app->add_option("--rule", rule, "sf | dass");
    app->add_option("--lambda", config.lambda, "Density weight for dass");
    app->add_option("--phi", phi, "linear | log | const");
    app->add_option("--seed-budget", seed_budget, "Initial seed count (0 = default)");
    app->add_option("--batch-size", config.batch_size, "Phase-1 batch size");
    app->add_option("--max-iters", config.max_iterations, "Iteration cap");
    app->add_option("--tol", config.tolerance, "Monitor tolerance");
    app->add_option("--workers", workers, "Phase-1 worker threads (default FASC_WORKERS or all cores)");
    app->add_flag("--no-structural-edits", no_edits, "Disable promotion, merging and dissolution");
    app->add_flag("--no-cycle-guard", no_cycle_guard, "Disable limit-cycle detection");
  }

  FascConfig resolve() {
    config.rule = parse_rule(rule);
    config.phi = parse_phi(phi);
    if (seed_budget > 0) config.seed_budget = seed_budget;
    config.workers = resolve_workers(workers);
    config.structural_edits = !no_edits;
    config.cycle_guard = !no_cycle_guard;
    return config;
  }
};

std::unique_ptr<Kernel> kernel_for(const std::string& name, const Dataset& data) {
  return make_kernel(name, data.split);
}

void write_assignments(const fs::path& path, const Dataset& data, std::span<const int> assignments) {
  auto out = open_output(path);
  out << "id,cluster_id\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.spectra[i].id << ',' << assignments[i] << '\n';
  }
}

void write_centroids(const fs::path& path, const ClusterState& state, std::size_t dim) {
  auto out = open_output(path);
  out << "cluster_id,support";
  for (std::size_t d = 0; d < dim; ++d) out << ",f" << d;
  out << '\n';
  for (std::size_t j = 0; j < state.clusters.size(); ++j) {
    const auto& c = state.clusters[j];
    out << j << ',' << c.support;
    for (double v : c.representative) out << ',' << fmt(v);
    out << '\n';
  }
}

std::vector<SampleId> ids_of(const Dataset& data) {
  std::vector<SampleId> ids;
  ids.reserve(data.size());
  for (const auto& s : data.spectra) ids.push_back(s.id);
  return ids;
}

json manifest(const std::string& command, const InputOptions& input, json config,
              const std::string& kernel, const std::vector<std::string>& outputs) {
  json m;
  m["tool"] = "fasc";
  m["version"] = kVersion;
  m["command"] = command;
  json in;
  in["path"] = input.path;
  in["format"] = input.format;
  if (!input.labels.empty()) in["labels"] = input.labels;
  if (input.split > 0) in["split"] = input.split;
  json digests = json::object();
  for (const auto& f : input.files()) digests[f.string()] = sha256_file(f);
  in["sha256"] = digests;
  m["input"] = in;
  m["kernel"] = kernel;
  m["config"] = std::move(config);
  m["outputs"] = outputs;
  return m;
}

int cmd_cluster(InputOptions& input, EngineOptions& engine, const std::string& out_dir,
                std::ostream& out) {
  auto config = engine.resolve();
  const auto data = input.load();
  const auto kernel = kernel_for(engine.kernel, data);
  config.validate(*kernel);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  auto trace = open_output(dir / "trace.jsonl");
  RunOptions options;
  options.on_iteration = [&trace](const TraceRecord& r) { trace << r.to_json() << '\n'; };
  const PreparedDataset prepared(data, *kernel);
  const auto result = run(prepared, config, options);
  trace.close();

  write_assignments(dir / "assignments.csv", data, result.state.assignments);
  write_centroids(dir / "centroids.csv", result.state, data.dim);
  std::vector<std::string> outputs = {"assignments.csv", "centroids.csv", "trace.jsonl",
                                      "summary.json", "state.ckpt", "manifest.json"};
  if (data.labels) {
    write_labels_csv(data, dir / "labels.csv");
    outputs.push_back("labels.csv");
  }

  Checkpoint ckpt;
  ckpt.state = result.state;
  ckpt.dim = data.dim;
  ckpt.kernel = std::string(kernel->name());
  ckpt.config_json = config_to_json(config);
  ckpt.ids = ids_of(data);
  save_checkpoint(ckpt, dir / "state.ckpt");

  json summary;
  summary["N"] = data.size();
  summary["K_active"] = result.state.active();
  summary["outliers"] = result.state.outliers();
  summary["termination"] = to_string(result.termination);
  if (result.termination == Termination::kLimitCycle) summary["period"] = result.period;
  summary["iterations"] = result.trace.size();
  summary["selected_iteration"] = result.selected_iteration;
  summary["objective"] = result.objective.value;
  summary["objective_kind"] = result.objective.minimize ? "lyapunov" : "psi";
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  write_text(dir / "manifest.json",
             manifest("cluster", input, json::parse(config_to_json(config)), ckpt.kernel, outputs)
                     .dump(2) +
                 "\n");

  out << "termination=" << to_string(result.termination) << " K_active=" << result.state.active()
      << " outliers=" << result.state.outliers() << " iterations=" << result.trace.size() << '\n';
  return 0;
}

std::vector<std::pair<SampleId, int>> load_assignments(const fs::path& path) {
  // Same two-column layout as the labels file.
  return load_labels_csv(path);
}

int cmd_evaluate(const std::string& assignments_path, const std::string& labels_path,
                 const std::string& state_path, std::optional<double> blending,
                 const std::string& kernel_name, std::size_t split, std::ostream& out) {
  const auto assignments = load_assignments(assignments_path);
  const auto labels = load_labels_csv(labels_path);
  std::unordered_map<SampleId, int> by_id;
  for (const auto& [id, label] : labels) by_id[id] = label;
  if (by_id.size() != assignments.size()) {
    throw ConfigError("labels", std::to_string(labels.size()) + " labels for " +
                                    std::to_string(assignments.size()) + " assignments");
  }
  std::vector<int> truth;
  std::vector<int> predicted;
  for (const auto& [id, cluster] : assignments) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ConfigError("labels", "no label for id " + std::to_string(id));
    truth.push_back(it->second);
    predicted.push_back(cluster);
  }
  auto report = evaluate_partition(truth, predicted);
  if (blending) {
    if (state_path.empty()) throw ConfigError("state", "--blending-threshold needs --state");
    const auto ckpt = load_checkpoint(state_path);
    const auto kernel = make_kernel(kernel_name.empty() ? ckpt.kernel : kernel_name,
                                    split > 0 ? std::optional(PolaritySplit{split}) : std::nullopt);
    report.blending = blending_pairs(ckpt.state, *kernel, *blending);
  }
  out << report.to_json() << '\n';
  return 0;
}

struct BaselineOptions {
  std::string algo;
  std::size_t k = 10;
  std::uint64_t seed = 0;
  int max_iterations = 100;
  double vigilance = 0.8;
  double eta = 0.5;
  std::size_t k_max = 50;
  int epochs = 1;
  std::optional<std::uint64_t> order_seed;
  std::size_t workers = 0;
};

int cmd_baseline(InputOptions& input, BaselineOptions& opts, const std::string& out_dir,
                 std::ostream& out, std::ostream& err) {
  if (opts.algo != "kmeans" && opts.algo != "art2a") {
    throw ConfigError("algo", "unknown algorithm '" + opts.algo + "'");
  }
  const auto data = input.load();
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  ClusterState state;
  json config;
  config["algo"] = opts.algo;
  std::string trace_text;
  if (opts.algo == "kmeans") {
    KMeansOptions km;
    km.k = opts.k;
    km.seed = opts.seed;
    km.max_iterations = opts.max_iterations;
    km.workers = resolve_workers(opts.workers);
    const auto result = spherical_kmeans(data, km);
    for (std::size_t j = 0; j < result.centroids.size(); ++j) {
      state.clusters.push_back({result.centroids[j], result.supports[j], 0, false, true});
    }
    state.assignments = result.assignments;
    state.iteration = result.iterations;
    for (std::size_t t = 0; t < result.changes_per_iteration.size(); ++t) {
      json r;
      r["t"] = t + 1;
      r["label_changes"] = result.changes_per_iteration[t];
      trace_text += r.dump() + "\n";
    }
    config["k"] = opts.k;
    config["seed"] = opts.seed;
    config["max_iterations"] = opts.max_iterations;
    out << "iterations=" << result.iterations << " objective=" << fmt(result.objective) << '\n';
  } else {
    Art2aOptions art;
    art.vigilance = opts.vigilance;
    art.eta = opts.eta;
    art.k_max = opts.k_max;
    art.epochs = opts.epochs;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (opts.order_seed) {
      std::mt19937_64 rng(*opts.order_seed);
      std::shuffle(order.begin(), order.end(), rng);
    }
    const auto result = art2a_run(data, order, art);
    for (std::size_t j = 0; j < result.prototypes.size(); ++j) {
      state.clusters.push_back({result.prototypes[j], result.supports[j], 0, false, true});
    }
    state.assignments = result.assignments;
    config["vigilance"] = opts.vigilance;
    config["eta"] = opts.eta;
    config["k_max"] = opts.k_max;
    config["epochs"] = opts.epochs;
    config["order_seed"] = opts.order_seed ? json(*opts.order_seed) : json(nullptr);
    if (result.skipped > 0) {
      err << "warning: " << result.skipped << " all-zero samples skipped by art2a\n";
    }
    out << "prototypes=" << result.prototypes.size() << " skipped=" << result.skipped << '\n';
  }

  write_assignments(dir / "assignments.csv", data, state.assignments);
  write_centroids(dir / "centroids.csv", state, data.dim);
  write_text(dir / "trace.jsonl", trace_text);
  std::vector<std::string> outputs = {"assignments.csv", "centroids.csv", "trace.jsonl",
                                      "summary.json", "state.ckpt", "manifest.json"};
  if (data.labels) {
    write_labels_csv(data, dir / "labels.csv");
    outputs.push_back("labels.csv");
  }
  Checkpoint ckpt;
  ckpt.state = state;
  ckpt.dim = data.dim;
  ckpt.kernel = "cosine";
  ckpt.config_json = config.dump();
  ckpt.ids = ids_of(data);
  save_checkpoint(ckpt, dir / "state.ckpt");

  json summary;
  summary["N"] = data.size();
  summary["K_active"] = state.active();
  summary["outliers"] = state.outliers();
  summary["termination"] = opts.algo == "kmeans" ? "settled" : "single_pass";
  summary["iterations"] = state.iteration;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  write_text(dir / "manifest.json",
             manifest("baseline", input, config, "cosine", outputs).dump(2) + "\n");
  return 0;
}

struct GeneratorOptions {
  SyntheticSpec spec;

  void add(CLI::App* app) {
    app->add_option("--n", spec.n, "Number of samples");
    app->add_option("--dim", spec.dim, "Dimension D");
    app->add_option("--k-true", spec.k_true, "Number of classes");
    app->add_option("--noise", spec.noise, "Relative peak jitter in [0, 1)");
    app->add_option("--seed", spec.seed, "Generator seed");
    app->add_option("--peaks", spec.peaks, "Peaks per class direction (per channel if --dual)");
    app->add_option("--background-peaks", spec.background_peaks, "Faint random peaks per sample");
    app->add_flag("--dual", spec.dual_polarity, "Split dimensions into two polarity channels");
  }
};

int cmd_sweep(const std::vector<std::size_t>& sizes, int reps, GeneratorOptions& gen,
              EngineOptions& engine, const std::string& out_dir, std::ostream& out) {
  SweepOptions sweep;
  sweep.sizes = sizes;
  sweep.repetitions = reps;
  sweep.data = gen.spec;
  sweep.kernel = engine.kernel;
  const auto config = engine.resolve();
  const auto report = scaling_sweep(sweep, config);
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "scaling.csv", report.to_csv());
  write_text(fs::path(out_dir) / "scaling.json", report.to_json() + "\n");
  out << report.to_csv();
  if (report.fit.valid) {
    out << "slope=" << fmt(report.fit.slope) << " intercept=" << fmt(report.fit.intercept)
        << " r2=" << fmt(report.fit.r2) << '\n';
  } else {
    out << "fit: insufficient points\n";
  }
  return 0;
}

int cmd_generate(GeneratorOptions& gen, const std::string& format, const std::string& path,
                 const std::string& labels_path, std::ostream& out) {
  const auto data = generate_synthetic(gen.spec);
  if (format == "dense") {
    write_dense_csv(data, path);
  } else {
    write_sparse_triplets(data, path);
  }
  if (!labels_path.empty()) write_labels_csv(data, labels_path);
  out << "wrote " << data.size() << " samples to " << path << '\n';
  return 0;
}

std::string describe(const ConfigError& e) {
  const auto& flags = field_flags();
  const auto it = flags.find(e.field());
  const std::string what = e.what();
  const std::string prefix = e.field() + ": ";
  const std::string detail = what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
  return (it != flags.end() ? it->second : e.field()) + ": " + detail;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"FASC clustering engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  InputOptions input;
  EngineOptions engine;
  std::string out_dir = "fasc-out";

  auto* cluster = app.add_subcommand("cluster", "Run the clustering engine");
  input.add(cluster);
  engine.add(cluster);
  cluster->add_option("--out-dir", out_dir, "Output directory");

  std::string assignments_path;
  std::string labels_path;
  std::string state_path;
  std::optional<double> blending;
  std::string eval_kernel;
  std::size_t eval_split = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Score assignments against labels");
  evaluate->add_option("--assignments", assignments_path, "id,cluster_id CSV")->required();
  evaluate->add_option("--labels", labels_path, "id,label CSV")->required();
  evaluate->add_option("--state", state_path, "Checkpoint for blending analysis");
  evaluate->add_option("--blending-threshold", blending, "Report centroid pairs at or above this");
  evaluate->add_option("--kernel", eval_kernel, "Kernel for blending (default: checkpoint's)");
  evaluate->add_option("--split", eval_split, "Polarity split for dual-cosine blending");

  BaselineOptions baseline_opts;
  InputOptions baseline_input;
  std::string baseline_out = "fasc-out";
  auto* baseline = app.add_subcommand("baseline", "Run spherical k-means or ART2A");
  baseline_input.add(baseline);
  baseline->add_option("--algo", baseline_opts.algo, "kmeans | art2a")->required();
  baseline->add_option("--k", baseline_opts.k, "k-means cluster count");
  baseline->add_option("--seed", baseline_opts.seed, "k-means seed");
  baseline->add_option("--max-iters", baseline_opts.max_iterations, "k-means iteration cap");
  baseline->add_option("--vigilance", baseline_opts.vigilance, "ART2A vigilance");
  baseline->add_option("--eta", baseline_opts.eta, "ART2A learning rate");
  baseline->add_option("--k-max", baseline_opts.k_max, "ART2A prototype budget");
  baseline->add_option("--epochs", baseline_opts.epochs, "ART2A passes");
  baseline->add_option("--order-seed", baseline_opts.order_seed,
                       "ART2A presentation order shuffle (default: file order)");
  baseline->add_option("--workers", baseline_opts.workers, "k-means worker threads");
  baseline->add_option("--out-dir", baseline_out, "Output directory");

  std::vector<std::size_t> sizes = {10000, 20000, 40000, 80000, 160000};
  int reps = 3;
  GeneratorOptions sweep_gen;
  EngineOptions sweep_engine;
  std::string sweep_out = "fasc-sweep";
  auto* sweep = app.add_subcommand("sweep", "Measure seconds per iteration against N");
  sweep->add_option("--sizes", sizes, "Comma-separated sizes")->delimiter(',');
  sweep->add_option("--reps", reps, "Repetitions per size");
  sweep_gen.add(sweep);
  sweep_engine.add(sweep);
  sweep->add_option("--out-dir", sweep_out, "Output directory");

  GeneratorOptions gen;
  std::string gen_format = "sparse";
  std::string gen_out;
  std::string gen_labels;
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
  gen.add(generate);
  generate->add_option("--format", gen_format, "dense | sparse")
      ->check(CLI::IsMember({"dense", "sparse"}));
  generate->add_option("--out", gen_out, "Output dataset path")->required();
  generate->add_option("--labels-out", gen_labels, "Optional id,label CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cluster->parsed()) return cmd_cluster(input, engine, out_dir, out);
    if (evaluate->parsed()) {
      return cmd_evaluate(assignments_path, labels_path, state_path, blending, eval_kernel,
                          eval_split, out);
    }
    if (baseline->parsed()) {
      return cmd_baseline(baseline_input, baseline_opts, baseline_out, out, err);
    }
    if (sweep->parsed()) return cmd_sweep(sizes, reps, sweep_gen, sweep_engine, sweep_out, out);
    if (generate->parsed()) return cmd_generate(gen, gen_format, gen_out, gen_labels, out);
  } catch (const ConfigError& e) {
    err << "error: " << describe(e) << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what();
    if (e.line() > 0) err << " (line " << e.line() << ")";
    err << '\n';
    return 3;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 4;
  }
  return 2;
}

}  // namespace fasc::cli
