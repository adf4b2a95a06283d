// cvrelay command-line front end.

#include <cstdlib>
#include <iostream>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "cvrelay/errors.hpp"
#include "cvrelay/scenario.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kIo = 3, kNumerical = 4 };

int default_workers() {
  if (const char* env = std::getenv("CVRELAY_WORKERS")) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(env, &used);
      if (used == std::string(env).size() && n >= 1) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "cvrelay: ignoring invalid CVRELAY_WORKERS='" << env << "'\n";
  }
  return 1;
}

int cmd_run(const std::string& config, const std::string& out, const std::string& format, int workers,
            std::optional<std::uint64_t> seed) {
  const auto scenario = cvrelay::load_scenario(config);
  const auto rows = cvrelay::run_scenario(scenario, {workers, seed});
  cvrelay::emit_results(scenario, rows, out,
                        format == "plot-data" ? cvrelay::OutputFormat::plot_data : cvrelay::OutputFormat::csv);
  std::size_t flagged = 0;
  for (const auto& r : rows) flagged += r.status != "ok";
  std::cout << fmt::format("{}: {} rows written to {} ({} flagged)\n", scenario.name, rows.size(), out, flagged);
  return kOk;
}

int cmd_stability(const std::string& config) {
  const auto s = cvrelay::load_scenario(config);
  const int n = s.sweep ? s.sweep->points : 1;
  int unstable = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    auto point = s;
    if (s.sweep) cvrelay::set_parameter(point, s.sweep->parameter, s.sweep->value(i));
    const auto r = cvrelay::check_stability(point.entangler);
    unstable += !r.stable;
    worst = std::max(worst, r.max_real_part / s.entangler.mech.omega_m);
  }
  const auto g = cvrelay::effective_couplings(s.entangler);
  const double wm = s.entangler.mech.omega_m;
  std::cout << fmt::format("scenario: {}\n", s.name);
  std::cout << fmt::format("G_a/omega_m = {:.6g}, G_b/omega_m = {:.6g}, n_th = {:.6g}\n", g.g_a / wm, g.g_b / wm,
                           s.entangler.mech.thermal_phonons());
  std::cout << fmt::format("points: {}, unstable: {}, largest drift eigenvalue real part / omega_m: {:.6g}\n", n,
                           unstable, worst);
  std::cout << (unstable == 0 ? "stable\n" : "unstable\n");
  return kOk;
}

int cmd_validate(const std::string& config) {
  const auto s = cvrelay::load_scenario(config);
  std::cout << fmt::format("{}: valid (hash {:016x})\n", s.name, cvrelay::scenario_hash(s));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optomechanical entanglement relay simulator"};
  app.set_version_flag("--version", cvrelay::tool_version());
  app.require_subcommand(1);

  std::string config, out, format = "csv";
  int workers = default_workers();
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Evaluate a scenario and write results");
  run->add_option("--config", config, "Scenario file")->required();
  run->add_option("--out", out, "Output file")->required();
  run->add_option("--format", format, "csv or plot-data")->check(CLI::IsMember({"csv", "plot-data"}));
  run->add_option("--workers", workers, "Worker threads (default: CVRELAY_WORKERS or 1)")->check(CLI::PositiveNumber);
  auto* seed_opt = run->add_option("--seed", seed, "Seed for sampled Bell outcomes");

  auto* stability = app.add_subcommand("stability", "Report drift-matrix stability over the sweep");
  stability->add_option("--config", config, "Scenario file")->required();

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario");
  validate->add_option("--config", config, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      return cmd_run(config, out, format, workers,
                     *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt);
    }
    if (*stability) return cmd_stability(config);
    return cmd_validate(config);
  } catch (const cvrelay::ConfigError& e) {
    std::cerr << "cvrelay: config error: " << e.what() << "\n";
    return kConfig;
  } catch (const cvrelay::IoError& e) {
    std::cerr << "cvrelay: I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const cvrelay::NumericalError& e) {
    std::cerr << "cvrelay: numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const cvrelay::DomainError& e) {
    std::cerr << "cvrelay: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "cvrelay: internal error: " << e.what() << "\n";
    return kNumerical;
  }
}
