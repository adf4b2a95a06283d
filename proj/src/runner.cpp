#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <cstring>
#include <system_error>
#include <thread>

#include <fmt/format.h>
#include "json.hpp"

#include "cvrelay/errors.hpp"
#include "cvrelay/scenario.hpp"
#include "cvrelay/teleport.hpp"

namespace cvrelay {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool wants(const Scenario& s, std::initializer_list<Observable> any) {
  return std::any_of(s.observables.begin(), s.observables.end(), [&](Observable o) {
    return std::find(any.begin(), any.end(), o) != any.end();
  });
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ResultRow evaluate_point(const Scenario& base, int index, const RunOptions& options) {
  Scenario s = base;
  double raw = 0.0;
  if (s.sweep) {
    raw = s.sweep->value(index);
    set_parameter(s, s.sweep->parameter, raw);
  }
  ResultRow row{base.sweep ? normalized_sweep_value(base, raw) : static_cast<double>(index),
                std::vector<double>(s.observables.size(), kNaN), "ok"};

  auto put = [&](Observable o, double v) {
    for (std::size_t i = 0; i < s.observables.size(); ++i) {
      if (s.observables[i] == o) row.values[i] = v;
    }
  };

  try {
    const auto stability = check_stability(s.entangler);
    put(Observable::stability_margin, stability.max_real_part / s.entangler.mech.omega_m);
    if (!stability.stable) {
      row.status = "unstable";
      return row;
    }
    const TwoModeGaussianState source(output_covariance(s.entangler));
    put(Observable::en_source, log_negativity(source.cov));

    TwoModeGaussianState channel = source;
    if (s.chain && wants(s, {Observable::en_swap, Observable::en_chain, Observable::fidelity,
                             Observable::fidelity_opt, Observable::bound})) {
      SwapChainConfig chain = SwapChainConfig::uniform(source, s.chain->links, s.chain->loss);
      chain.end_arms_lossy = s.chain->end_arms_lossy;
      chain.outcomes = s.chain->outcomes;
      if (options.seed) chain.outcomes.seed = *options.seed;
      chain.outcomes.seed = mix_seed(chain.outcomes.seed, static_cast<std::uint64_t>(index));
      const ChainResult result = concatenate_chain(chain);
      if (result.trace.size() > 1) put(Observable::en_swap, result.trace[1].log_neg);
      put(Observable::en_chain, log_negativity(result.state.cov));
      channel = result.state;
    }
    if (wants(s, {Observable::fidelity, Observable::fidelity_opt, Observable::bound})) {
      const FidelityReport report = optimize_over_rotations(channel);
      put(Observable::fidelity, report.fidelity);
      put(Observable::fidelity_opt, report.fidelity_optimized);
      put(Observable::bound, report.bound);
    }
  } catch (const NumericalError&) {
    std::fill(row.values.begin(), row.values.end(), kNaN);
    row.status = "error:numerical";
  } catch (const DomainError&) {
    std::fill(row.values.begin(), row.values.end(), kNaN);
    row.status = "error:domain";
  }
  return row;
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", v);
}

std::string render_csv(const Scenario& s, const std::vector<ResultRow>& rows) {
  std::string out;
  out += fmt::format("# cvrelay {}\n", tool_version());
  out += fmt::format("# scenario: {}\n", s.name);
  out += fmt::format("# scenario_hash: {:016x}\n", scenario_hash(s));
  out += sweep_column_name(s);
  for (const auto o : s.observables) out += fmt::format(",{}", observable_name(o));
  out += ",status\n";
  for (const auto& r : rows) {
    out += format_value(r.sweep_value);
    for (const double v : r.values) out += "," + format_value(v);
    out += "," + r.status + "\n";
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing: {}", path.string(), std::strerror(errno)));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

std::string observable_label(Observable o) {
  switch (o) {
    case Observable::en_source: return "log-negativity of the source";
    case Observable::en_swap: return "log-negativity after one swap";
    case Observable::en_chain: return "log-negativity at the chain end";
    case Observable::fidelity: return "teleportation fidelity";
    case Observable::fidelity_opt: return "teleportation fidelity, optimized over local rotations";
    case Observable::bound: return "fidelity bound 1/(1+exp(-E_N))";
    case Observable::stability_margin: return "largest drift eigenvalue real part / omega_m";
  }
  return "";
}

}  // namespace

std::vector<ResultRow> run_scenario(const Scenario& s, const RunOptions& options) {
  const int n = s.sweep ? s.sweep->points : 1;
  std::vector<ResultRow> rows(static_cast<std::size_t>(n));
  const int workers = std::clamp(options.workers, 1, std::max(1, n));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        rows[static_cast<std::size_t>(i)] = evaluate_point(s, i, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void emit_results(const Scenario& s, const std::vector<ResultRow>& rows, const std::filesystem::path& path,
                  OutputFormat format) {
  if (rows.empty()) throw DomainError("no result rows to write");
  for (const auto& r : rows) {
    if (r.values.size() != s.observables.size()) throw DomainError("result row does not match requested observables");
  }
  write_file(path, render_csv(s, rows));
  if (format == OutputFormat::plot_data) {
    nlohmann::ordered_json meta;
    meta["tool"] = "cvrelay";
    meta["version"] = tool_version();
    meta["scenario"] = s.name;
    meta["scenario_hash"] = fmt::format("{:016x}", scenario_hash(s));
    meta["data_file"] = path.filename().string();
    meta["x"] = {{"column", sweep_column_name(s)},
                 {"parameter", s.sweep ? s.sweep->parameter : std::string("point")},
                 {"label", s.sweep ? sweep_column_name(s) : std::string("point index")}};
    nlohmann::ordered_json series = nlohmann::ordered_json::array();
    for (const auto o : s.observables) {
      series.push_back({{"column", observable_name(o)}, {"label", observable_label(o)}});
    }
    meta["y"] = series;
    meta["status_column"] = "status";
    meta["rows"] = rows.size();
    std::filesystem::path meta_path = path;
    meta_path += ".meta.json";
    write_file(meta_path, meta.dump(2) + "\n");
  }
}

}  // namespace cvrelay
