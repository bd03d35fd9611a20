#include "fasc/scaling.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "fasc/error.hpp"
#include "fasc/phase3.hpp"
#include <nlohmann/json.hpp>

namespace fasc {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit fit;
  if (x.size() != y.size() || x.size() < 2) return fit;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r2 = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  fit.valid = true;
  return fit;
}

std::string ScalingReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "N,iters,total_s,s_per_iter\n";
  for (const auto& r : records) {
    out << r.n << ',' << r.iterations << ',' << r.total_seconds << ',' << r.seconds_per_iteration
        << '\n';
  }
  return out.str();
}

std::string ScalingReport::to_json() const {
  nlohmann::ordered_json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r2;
  j["fit_valid"] = fit.valid;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    rows.push_back({{"N", r.n},
                    {"iters", r.iterations},
                    {"total_s", r.total_seconds},
                    {"s_per_iter", r.seconds_per_iteration},
                    {"working_set_bytes", r.working_set_bytes}});
  }
  j["records"] = rows;
  return j.dump(2);
}

ScalingReport scaling_sweep(const SweepOptions& options, const FascConfig& config) {
  if (options.sizes.empty()) throw ConfigError("sizes", "at least one size is required");
  if (options.repetitions < 1) throw ConfigError("repetitions", "must be at least 1");
  for (std::size_t i = 0; i < options.sizes.size(); ++i) {
    if (i > 0 && options.sizes[i] <= options.sizes[i - 1]) {
      throw ConfigError("sizes", "must be strictly increasing");
    }
    if (options.sizes[i] < 10 * config.capacity.k_max) {
      throw ConfigError("sizes", "each size must be at least 10 * k_max");
    }
  }
  const auto kernel = make_kernel(
      options.kernel,
      options.data.dual_polarity ? std::optional(PolaritySplit{options.data.dim / 2}) : std::nullopt);

  ScalingReport report;
  std::vector<double> xs;
  std::vector<double> ys;
  for (auto n : options.sizes) {
    std::vector<ScalingRecord> reps;
    for (int r = 0; r < options.repetitions; ++r) {
      auto spec = options.data;
      spec.n = n;
      spec.seed = options.data.seed + static_cast<std::uint64_t>(r);
      const auto data = generate_synthetic(spec);
      const PreparedDataset prepared(data, *kernel);
      const auto result = run(prepared, config);
      const auto& secs = result.iteration_seconds;
      ScalingRecord rec;
      rec.n = n;
      rec.iterations = static_cast<int>(secs.size());
      rec.total_seconds = std::accumulate(secs.begin(), secs.end(), 0.0);
      const std::size_t skip = secs.size() > 1 ? 1 : 0;
      rec.seconds_per_iteration =
          std::accumulate(secs.begin() + static_cast<std::ptrdiff_t>(skip), secs.end(), 0.0) /
          static_cast<double>(secs.size() - skip);
      rec.working_set_bytes = result.peak_working_set_bytes;
      reps.push_back(rec);
    }
    std::sort(reps.begin(), reps.end(), [](const ScalingRecord& a, const ScalingRecord& b) {
      return a.seconds_per_iteration < b.seconds_per_iteration;
    });
    ScalingRecord median = reps[(reps.size() - 1) / 2];
    if (reps.size() % 2 == 0) {
      median.seconds_per_iteration = (reps[reps.size() / 2 - 1].seconds_per_iteration +
                                      reps[reps.size() / 2].seconds_per_iteration) /
                                     2.0;
    }
    report.records.push_back(median);
    xs.push_back(static_cast<double>(n));
    ys.push_back(median.seconds_per_iteration);
  }
  report.fit = fit_line(xs, ys);
  return report;
}

}  // namespace fasc
