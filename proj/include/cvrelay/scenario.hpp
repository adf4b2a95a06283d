#pragma once

// Scenario files, sweep execution and result output.
//
// Format: `[section.path]` headers followed by `key = value` lines; `#` starts
// a comment. Values carry unit suffixes (`10 MHz`, `4.2 K`, `300 /omega_m`).
// A bare number is taken in SI base units.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvrelay/entangler.hpp"
#include "cvrelay/relay.hpp"

namespace cvrelay {

enum class Observable { en_source, en_swap, en_chain, fidelity, fidelity_opt, bound, stability_margin };

std::string_view observable_name(Observable o);

struct SweepSpec {
  std::string parameter;  // dotted path, e.g. entangler.filter_a.center
  double min = 0.0;       // SI units of the swept field
  double max = 0.0;
  int points = 0;

  double value(int index) const;
};

struct ChainSpec {
  int links = 1;
  LossParams loss;
  bool end_arms_lossy = false;
  OutcomePolicy outcomes;
};

struct Scenario {
  std::string name;
  EntanglerConfig entangler;
  std::optional<ChainSpec> chain;
  std::optional<SweepSpec> sweep;
  std::vector<Observable> observables;
};

bool operator==(const Scenario& x, const Scenario& y);

/// Throws ConfigError (with line and column) on syntax, unknown or duplicate
/// keys, and on validation failures (naming the field).
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
void validate(const Scenario& s);

/// SI-unit form that parses back into an equal Scenario.
std::string canonical_text(const Scenario& s);
/// FNV-1a 64 of canonical_text.
std::uint64_t scenario_hash(const Scenario& s);

/// Numeric fields addressable by a sweep.
std::vector<std::string> sweepable_parameters();
void set_parameter(Scenario& s, std::string_view path, double value);
double get_parameter(const Scenario& s, std::string_view path);

struct ResultRow {
  double sweep_value;           // normalized (frequencies / omega_m, times * omega_m)
  std::vector<double> values;   // one per requested observable
  std::string status;           // ok | unstable | error:numerical | error:domain
};

struct RunOptions {
  int workers = 1;
  std::optional<std::uint64_t> seed;
};

std::vector<ResultRow> run_scenario(const Scenario& s, const RunOptions& options = {});

/// Sweep value as reported in output: frequencies / omega_m, times * omega_m.
double normalized_sweep_value(const Scenario& s, double value);

/// Heading of the first CSV column.
std::string sweep_column_name(const Scenario& s);

enum class OutputFormat { csv, plot_data };

/// Writes rows as CSV; plot_data also writes `<path>.meta.json`. Throws
/// IoError on failure and DomainError for empty input (no file is created).
void emit_results(const Scenario& s, const std::vector<ResultRow>& rows, const std::filesystem::path& path,
                  OutputFormat format = OutputFormat::csv);

std::string tool_version();

}  // namespace cvrelay
