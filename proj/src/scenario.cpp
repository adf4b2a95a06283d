#include "cvrelay/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "cvrelay/constants.hpp"
#include "cvrelay/errors.hpp"

namespace cvrelay {

namespace {

enum class Kind { frequency, time, length, mass, power, temperature, dimensionless, attenuation, distance_km };

struct NumericField {
  std::string_view path;
  Kind kind;
  std::function<std::optional<double>(const Scenario&)> get;
  std::function<void(Scenario&, double)> set;
};

ChainSpec& chain_of(Scenario& s) {
  if (!s.chain) s.chain.emplace();
  return *s.chain;
}

template <class Get>
std::optional<double> if_chain(const Scenario& s, Get g) {
  if (!s.chain) return std::nullopt;
  return g(*s.chain);
}

#define CVRELAY_ENTANGLER_FIELD(path, kind, member)                                  \
  NumericField {                                                                    \
    path, kind, [](const Scenario& s) -> std::optional<double> { return s.entangler.member; }, \
        [](Scenario& s, double v) { s.entangler.member = v; }                       \
  }

const std::vector<NumericField>& numeric_fields() {
  static const std::vector<NumericField> fields = {
      CVRELAY_ENTANGLER_FIELD("entangler.cavity_length", Kind::length, cavity_length),
      CVRELAY_ENTANGLER_FIELD("entangler.mech.omega_m", Kind::frequency, mech.omega_m),
      CVRELAY_ENTANGLER_FIELD("entangler.mech.Q_m", Kind::dimensionless, mech.q_factor),
      CVRELAY_ENTANGLER_FIELD("entangler.mech.mass", Kind::mass, mech.mass),
      CVRELAY_ENTANGLER_FIELD("entangler.mech.temperature", Kind::temperature, mech.temperature),
      CVRELAY_ENTANGLER_FIELD("entangler.mode_a.wavelength", Kind::length, mode_a.wavelength),
      CVRELAY_ENTANGLER_FIELD("entangler.mode_a.kappa", Kind::frequency, mode_a.kappa),
      CVRELAY_ENTANGLER_FIELD("entangler.mode_a.detuning", Kind::frequency, mode_a.detuning),
      CVRELAY_ENTANGLER_FIELD("entangler.mode_a.power", Kind::power, mode_a.power),
      {"entangler.mode_a.coupling", Kind::frequency,
       [](const Scenario& s) { return s.entangler.mode_a.coupling_override; },
       [](Scenario& s, double v) { s.entangler.mode_a.coupling_override = v; }},
      CVRELAY_ENTANGLER_FIELD("entangler.mode_b.wavelength", Kind::length, mode_b.wavelength),
      CVRELAY_ENTANGLER_FIELD("entangler.mode_b.kappa", Kind::frequency, mode_b.kappa),
      CVRELAY_ENTANGLER_FIELD("entangler.mode_b.detuning", Kind::frequency, mode_b.detuning),
      CVRELAY_ENTANGLER_FIELD("entangler.mode_b.power", Kind::power, mode_b.power),
      {"entangler.mode_b.coupling", Kind::frequency,
       [](const Scenario& s) { return s.entangler.mode_b.coupling_override; },
       [](Scenario& s, double v) { s.entangler.mode_b.coupling_override = v; }},
      CVRELAY_ENTANGLER_FIELD("entangler.filter_a.center", Kind::frequency, filter_a.center),
      CVRELAY_ENTANGLER_FIELD("entangler.filter_a.duration", Kind::time, filter_a.duration),
      CVRELAY_ENTANGLER_FIELD("entangler.filter_b.center", Kind::frequency, filter_b.center),
      CVRELAY_ENTANGLER_FIELD("entangler.filter_b.duration", Kind::time, filter_b.duration),
      {"chain.eta0", Kind::dimensionless,
       [](const Scenario& s) { return if_chain(s, [](const ChainSpec& c) { return c.loss.eta0; }); },
       [](Scenario& s, double v) { chain_of(s).loss.eta0 = v; }},
      {"chain.alpha", Kind::attenuation,
       [](const Scenario& s) { return if_chain(s, [](const ChainSpec& c) { return c.loss.alpha; }); },
       [](Scenario& s, double v) { chain_of(s).loss.alpha = v; }},
      {"chain.length", Kind::distance_km,
       [](const Scenario& s) { return if_chain(s, [](const ChainSpec& c) { return c.loss.length_km; }); },
       [](Scenario& s, double v) { chain_of(s).loss.length_km = v; }},
  };
  return fields;
}

#undef CVRELAY_ENTANGLER_FIELD

const NumericField* find_numeric(std::string_view path) {
  for (const auto& f : numeric_fields()) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

constexpr std::array<std::string_view, 12> kOtherKeys = {
    "name",       "entangler.standard_signs", "chain.links",  "chain.loss_law", "chain.end_arms_lossy",
    "chain.outcomes", "chain.seed",           "sweep.parameter", "sweep.min",   "sweep.max",
    "sweep.points", "output.observables"};

bool known_key(std::string_view key) {
  return find_numeric(key) != nullptr || std::find(kOtherKeys.begin(), kOtherKeys.end(), key) != kOtherKeys.end();
}

constexpr std::array<std::pair<Observable, std::string_view>, 7> kObservables = {{
    {Observable::en_source, "en_source"},
    {Observable::en_swap, "en_swap"},
    {Observable::en_chain, "en_chain"},
    {Observable::fidelity, "fidelity"},
    {Observable::fidelity_opt, "fidelity_opt"},
    {Observable::bound, "bound"},
    {Observable::stability_margin, "stability_margin"},
}};

struct Entry {
  std::string value;
  int line;
  int column;  // of the value
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || (c == '.' && i > 0 && i + 1 < s.size());
    if (!ok) return false;
  }
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view text) { parse(text); }

  const std::map<std::string, Entry, std::less<>>& entries() const { return entries_; }

 private:
  void parse(std::string_view text) {
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line_no;
      if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      const std::string_view line = trim(raw);
      if (line.empty()) continue;
      const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError(fmt::format("line {}: unterminated section header", line_no), "", line_no, indent);
        const std::string_view name = trim(line.substr(1, line.size() - 2));
        if (!valid_identifier(name)) {
          throw ConfigError(fmt::format("line {}: invalid section name '{}'", line_no, name), "", line_no, indent + 1);
        }
        section = std::string(name);
        continue;
      }
      const auto eq = raw.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError(fmt::format("line {}, column {}: expected 'key = value'", line_no, indent), "", line_no, indent);
      }
      const std::string_view key = trim(raw.substr(0, eq));
      const std::string_view value = trim(raw.substr(eq + 1));
      if (!valid_identifier(key)) {
        throw ConfigError(fmt::format("line {}, column {}: invalid key '{}'", line_no, indent, key), "", line_no, indent);
      }
      const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
      if (!known_key(full)) {
        throw ConfigError(fmt::format("line {}, column {}: unknown key '{}'", line_no, indent, full), full, line_no,
                          indent);
      }
      if (entries_.count(full)) {
        throw ConfigError(fmt::format("line {}, column {}: duplicate key '{}' (first set on line {})", line_no, indent,
                                      full, entries_.at(full).line),
                          full, line_no, indent);
      }
      const auto value_col = value.empty() ? static_cast<int>(eq) + 2
                                           : static_cast<int>(raw.find_first_not_of(" \t", eq + 1)) + 1;
      if (value.empty()) {
        throw ConfigError(fmt::format("line {}, column {}: missing value for '{}'", line_no, value_col, full), full,
                          line_no, value_col);
      }
      entries_[full] = Entry{std::string(value), line_no, value_col};
    }
  }

  std::map<std::string, Entry, std::less<>> entries_;
};

[[noreturn]] void value_error(const std::string& key, const Entry& e, std::string_view what) {
  throw ConfigError(fmt::format("line {}, column {}: {}: {}", e.line, e.column, key, what), key, e.line, e.column);
}

double parse_number(const std::string& key, const Entry& e, std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) value_error(key, e, fmt::format("'{}' is not a finite number", text));
  return v;
}

struct UnitScale {
  std::string_view unit;
  double scale;
};

double parse_quantity(const std::string& key, const Entry& e, Kind kind, double omega_m, LossLaw law) {
  const std::string_view text = e.value;
  const auto space = text.find_first_of(" \t");
  const std::string_view num = text.substr(0, space);
  const std::string_view unit = space == std::string_view::npos ? std::string_view{} : trim(text.substr(space));
  const double v = parse_number(key, e, num);

  auto lookup = [&](std::initializer_list<UnitScale> table, std::string_view expected) {
    for (const auto& u : table) {
      if (u.unit == unit) return v * u.scale;
    }
    value_error(key, e, fmt::format("unit '{}' not accepted here (expected {})", unit, expected));
  };

  const double two_pi = 2.0 * constants::pi;
  switch (kind) {
    case Kind::dimensionless:
      if (!unit.empty()) value_error(key, e, fmt::format("dimensionless value takes no unit, got '{}'", unit));
      return v;
    case Kind::frequency:
      if (unit == "omega_m") {
        if (!(omega_m > 0)) value_error(key, e, "'omega_m' unit needs a positive entangler.mech.omega_m");
        return v * omega_m;
      }
      return lookup({{"rad/s", 1.0}, {"Hz", two_pi}, {"kHz", two_pi * 1e3}, {"MHz", two_pi * 1e6}, {"GHz", two_pi * 1e9}},
                    "rad/s, Hz, kHz, MHz, GHz or omega_m");
    case Kind::time:
      if (unit == "/omega_m") {
        if (!(omega_m > 0)) value_error(key, e, "'/omega_m' unit needs a positive entangler.mech.omega_m");
        return v / omega_m;
      }
      return lookup({{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}}, "s, ms, us, ns, ps or /omega_m");
    case Kind::length:
      return lookup({{"m", 1.0}, {"km", 1e3}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}}, "m, km, mm, um or nm");
    case Kind::distance_km:
      return lookup({{"km", 1.0}, {"m", 1e-3}}, "km or m");
    case Kind::mass:
      return lookup({{"kg", 1.0}, {"g", 1e-3}, {"mg", 1e-6}, {"ug", 1e-9}, {"ng", 1e-12}, {"pg", 1e-15}},
                    "kg, g, mg, ug, ng or pg");
    case Kind::power:
      return lookup({{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}, {"nW", 1e-9}}, "W, mW, uW or nW");
    case Kind::temperature:
      return lookup({{"K", 1.0}, {"mK", 1e-3}}, "K or mK");
    case Kind::attenuation:
      if (law == LossLaw::decibel) return lookup({{"dB/km", 1.0}}, "dB/km for loss_law = decibel");
      return lookup({{"1/km", 1.0}}, "1/km for loss_law = exponential");
  }
  return v;
}

std::string_view canonical_unit(Kind kind, LossLaw law) {
  switch (kind) {
    case Kind::frequency: return "rad/s";
    case Kind::time: return "s";
    case Kind::length: return "m";
    case Kind::distance_km: return "km";
    case Kind::mass: return "kg";
    case Kind::power: return "W";
    case Kind::temperature: return "K";
    case Kind::attenuation: return law == LossLaw::decibel ? "dB/km" : "1/km";
    case Kind::dimensionless: return "";
  }
  return "";
}

bool parse_bool(const std::string& key, const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  value_error(key, e, fmt::format("expected true or false, got '{}'", e.value));
}

long long parse_integer(const std::string& key, const Entry& e) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc{} || ptr != e.value.data() + e.value.size()) value_error(key, e, fmt::format("'{}' is not an integer", e.value));
  return v;
}

std::string parse_string(const std::string& key, const Entry& e) {
  std::string_view v = e.value;
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  if (v.find('"') != std::string_view::npos) value_error(key, e, "embedded quotes are not supported");
  return std::string(v);
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

Kind kind_of(std::string_view path) {
  const NumericField* f = find_numeric(path);
  return f ? f->kind : Kind::dimensionless;
}

const std::array<std::string_view, 17> kRequired = {
    "name",
    "entangler.cavity_length",
    "entangler.mech.omega_m",
    "entangler.mech.Q_m",
    "entangler.mech.mass",
    "entangler.mech.temperature",
    "entangler.mode_a.wavelength",
    "entangler.mode_a.kappa",
    "entangler.mode_a.detuning",
    "entangler.mode_a.power",
    "entangler.mode_b.wavelength",
    "entangler.mode_b.kappa",
    "entangler.mode_b.detuning",
    "entangler.mode_b.power",
    "entangler.filter_a.center",
    "entangler.filter_a.duration",
    "output.observables",
};

}  // namespace

std::string_view observable_name(Observable o) {
  for (const auto& [obs, name] : kObservables) {
    if (obs == o) return name;
  }
  return "?";
}

double SweepSpec::value(int index) const {
  if (points <= 1) return min;
  if (index == points - 1) return max;
  return min + (max - min) * static_cast<double>(index) / static_cast<double>(points - 1);
}

bool operator==(const Scenario& x, const Scenario& y) { return canonical_text(x) == canonical_text(y); }

std::vector<std::string> sweepable_parameters() {
  std::vector<std::string> out;
  for (const auto& f : numeric_fields()) out.emplace_back(f.path);
  return out;
}

void set_parameter(Scenario& s, std::string_view path, double value) {
  const NumericField* f = find_numeric(path);
  if (!f) throw ConfigError(fmt::format("'{}' is not a numeric scenario field", path), std::string(path));
  f->set(s, value);
}

double get_parameter(const Scenario& s, std::string_view path) {
  const NumericField* f = find_numeric(path);
  if (!f) throw ConfigError(fmt::format("'{}' is not a numeric scenario field", path), std::string(path));
  const auto v = f->get(s);
  if (!v) throw ConfigError(fmt::format("'{}' is not set", path), std::string(path));
  return *v;
}

void validate(const Scenario& s) {
  try {
    s.entangler.validate();
    if (s.chain) s.chain->loss.validate();
  } catch (const DomainError& e) {
    const std::string what = e.what();
    throw ConfigError("invalid value for " + what, what.substr(0, what.find(':')));
  }
  if (s.chain && s.chain->links < 1) throw ConfigError("invalid value for chain.links: must be at least 1", "chain.links");
  if (s.sweep) {
    const auto& sw = *s.sweep;
    const NumericField* f = find_numeric(sw.parameter);
    if (!f) {
      throw ConfigError(fmt::format("invalid value for sweep.parameter: '{}' is not a sweepable field", sw.parameter),
                        "sweep.parameter");
    }
    if (!f->get(s) && sw.parameter.rfind("chain.", 0) == 0) {
      throw ConfigError("invalid value for sweep.parameter: sweeping a chain field needs a [chain] section",
                        "sweep.parameter");
    }
    if (sw.points < 2) throw ConfigError("invalid value for sweep.points: must be at least 2", "sweep.points");
    if (!(sw.max > sw.min)) throw ConfigError("invalid value for sweep.max: must exceed sweep.min", "sweep.max");
    // Every sweep endpoint must itself be a valid configuration.
    for (double v : {sw.min, sw.max}) {
      Scenario probe = s;
      probe.sweep.reset();
      f->set(probe, v);
      try {
        probe.entangler.validate();
        if (probe.chain) probe.chain->loss.validate();
      } catch (const DomainError& e) {
        throw ConfigError(fmt::format("invalid sweep range for {}: {}", sw.parameter, e.what()), "sweep.min");
      }
    }
  }
  if (s.observables.empty()) throw ConfigError("invalid value for output.observables: empty list", "output.observables");
  for (std::size_t i = 0; i < s.observables.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (s.observables[i] == s.observables[j]) {
        throw ConfigError(fmt::format("invalid value for output.observables: '{}' listed twice",
                                      observable_name(s.observables[i])),
                          "output.observables");
      }
    }
    const Observable o = s.observables[i];
    if ((o == Observable::en_swap || o == Observable::en_chain) && !s.chain) {
      throw ConfigError(fmt::format("invalid value for output.observables: '{}' needs a [chain] section", observable_name(o)),
                        "output.observables");
    }
    if (o == Observable::en_swap && s.chain->links < 2) {
      throw ConfigError("invalid value for output.observables: 'en_swap' needs chain.links >= 2", "output.observables");
    }
  }
}

Scenario parse_scenario(std::string_view text) {
  const Parser parser(text);
  const auto& entries = parser.entries();

  for (std::string_view key : kRequired) {
    if (!entries.count(key)) throw ConfigError(fmt::format("missing required key '{}'", key), std::string(key));
  }
  const bool has_filter_b = entries.count("entangler.filter_b.center") && entries.count("entangler.filter_b.duration");
  if (!has_filter_b) {
    const char* missing = entries.count("entangler.filter_b.center") ? "entangler.filter_b.duration"
                                                                     : "entangler.filter_b.center";
    throw ConfigError(fmt::format("missing required key '{}'", missing), missing);
  }

  Scenario s;
  s.name = parse_string("name", entries.at("name"));

  const auto& wm_entry = entries.at("entangler.mech.omega_m");
  if (trim(wm_entry.value).find("omega_m") != std::string_view::npos) {
    value_error("entangler.mech.omega_m", wm_entry, "cannot be given in units of itself");
  }
  const double omega_m = parse_quantity("entangler.mech.omega_m", wm_entry, Kind::frequency, 0.0, LossLaw::decibel);

  const bool has_chain = std::any_of(entries.begin(), entries.end(),
                                     [](const auto& kv) { return kv.first.rfind("chain.", 0) == 0; });
  LossLaw law = LossLaw::decibel;
  if (has_chain) {
    ChainSpec& c = chain_of(s);
    if (!entries.count("chain.links")) throw ConfigError("missing required key 'chain.links'", "chain.links");
    const auto links = parse_integer("chain.links", entries.at("chain.links"));
    if (links < 1 || links > 1000) value_error("chain.links", entries.at("chain.links"), "must lie in [1, 1000]");
    c.links = static_cast<int>(links);
    if (auto it = entries.find("chain.loss_law"); it != entries.end()) {
      if (it->second.value == "decibel") {
        law = LossLaw::decibel;
      } else if (it->second.value == "exponential") {
        law = LossLaw::exponential;
      } else {
        value_error("chain.loss_law", it->second, "expected decibel or exponential");
      }
    }
    c.loss.law = law;
    if (auto it = entries.find("chain.end_arms_lossy"); it != entries.end()) {
      c.end_arms_lossy = parse_bool("chain.end_arms_lossy", it->second);
    }
    if (auto it = entries.find("chain.outcomes"); it != entries.end()) {
      if (it->second.value == "zero") {
        c.outcomes.kind = OutcomePolicy::Kind::fixed_zero;
      } else if (it->second.value == "sampled") {
        c.outcomes.kind = OutcomePolicy::Kind::sampled;
      } else {
        value_error("chain.outcomes", it->second, "expected zero or sampled");
      }
    }
    if (auto it = entries.find("chain.seed"); it != entries.end()) {
      const auto& e = it->second;
      std::uint64_t seed = 0;
      const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), seed);
      if (ec != std::errc{} || ptr != e.value.data() + e.value.size()) value_error("chain.seed", e, "expected an unsigned integer");
      c.outcomes.seed = seed;
    }
  }

  for (const auto& f : numeric_fields()) {
    const auto it = entries.find(f.path);
    if (it == entries.end()) continue;
    const std::string key(f.path);
    f.set(s, parse_quantity(key, it->second, f.kind, omega_m, law));
  }

  const bool has_sweep = std::any_of(entries.begin(), entries.end(),
                                     [](const auto& kv) { return kv.first.rfind("sweep.", 0) == 0; });
  if (has_sweep) {
    for (std::string_view k : {"sweep.parameter", "sweep.min", "sweep.max", "sweep.points"}) {
      if (!entries.count(k)) throw ConfigError(fmt::format("missing required key '{}'", k), std::string(k));
    }
    SweepSpec sw;
    const auto& pe = entries.at("sweep.parameter");
    sw.parameter = parse_string("sweep.parameter", pe);
    if (!find_numeric(sw.parameter)) value_error("sweep.parameter", pe, fmt::format("'{}' is not a sweepable field", sw.parameter));
    const Kind kind = kind_of(sw.parameter);
    sw.min = parse_quantity("sweep.min", entries.at("sweep.min"), kind, omega_m, law);
    sw.max = parse_quantity("sweep.max", entries.at("sweep.max"), kind, omega_m, law);
    const auto points = parse_integer("sweep.points", entries.at("sweep.points"));
    if (points < 2 || points > 1000000) value_error("sweep.points", entries.at("sweep.points"), "must lie in [2, 1000000]");
    sw.points = static_cast<int>(points);
    s.sweep = sw;
  }

  const auto& oe = entries.at("output.observables");
  std::string_view rest = oe.value;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto match = std::find_if(kObservables.begin(), kObservables.end(),
                                    [&](const auto& p) { return p.second == item; });
    if (match == kObservables.end()) value_error("output.observables", oe, fmt::format("unknown observable '{}'", item));
    s.observables.push_back(match->first);
  }

  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open scenario file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error reading scenario file '{}'", path.string()));
  return parse_scenario(buf.str());
}

std::string canonical_text(const Scenario& s) {
  const LossLaw law = s.chain ? s.chain->loss.law : LossLaw::decibel;
  std::string out = fmt::format("name = \"{}\"\n", s.name);
  out += fmt::format("entangler.standard_signs = {}\n", s.entangler.standard_signs ? "true" : "false");
  for (const auto& f : numeric_fields()) {
    const auto v = f.get(s);
    if (!v) continue;
    const std::string_view unit = canonical_unit(f.kind, law);
    out += fmt::format("{} = {}{}{}\n", f.path, format_double(*v), unit.empty() ? "" : " ", unit);
  }
  if (s.chain) {
    const auto& c = *s.chain;
    out += fmt::format("chain.links = {}\n", c.links);
    out += fmt::format("chain.loss_law = {}\n", c.loss.law == LossLaw::decibel ? "decibel" : "exponential");
    out += fmt::format("chain.end_arms_lossy = {}\n", c.end_arms_lossy ? "true" : "false");
    out += fmt::format("chain.outcomes = {}\n", c.outcomes.kind == OutcomePolicy::Kind::sampled ? "sampled" : "zero");
    out += fmt::format("chain.seed = {}\n", c.outcomes.seed);
  }
  if (s.sweep) {
    const auto& sw = *s.sweep;
    const std::string_view unit = canonical_unit(kind_of(sw.parameter), law);
    const std::string sep = unit.empty() ? "" : " ";
    out += fmt::format("sweep.parameter = {}\n", sw.parameter);
    out += fmt::format("sweep.min = {}{}{}\n", format_double(sw.min), sep, unit);
    out += fmt::format("sweep.max = {}{}{}\n", format_double(sw.max), sep, unit);
    out += fmt::format("sweep.points = {}\n", sw.points);
  }
  std::string obs;
  for (const auto o : s.observables) {
    if (!obs.empty()) obs += ", ";
    obs += observable_name(o);
  }
  out += fmt::format("output.observables = {}\n", obs);
  return out;
}

std::uint64_t scenario_hash(const Scenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : canonical_text(s)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string sweep_column_name(const Scenario& s) {
  if (!s.sweep) return "point";
  const auto& p = s.sweep->parameter;
  switch (kind_of(p)) {
    case Kind::frequency: return p + "/omega_m";
    case Kind::time: return p + "*omega_m";
    case Kind::dimensionless: return p;
    default: {
      const LossLaw law = s.chain ? s.chain->loss.law : LossLaw::decibel;
      return fmt::format("{} [{}]", p, canonical_unit(kind_of(p), law));
    }
  }
}

double normalized_sweep_value(const Scenario& s, double v) {
  if (!s.sweep) return v;
  switch (kind_of(s.sweep->parameter)) {
    case Kind::frequency: return v / s.entangler.mech.omega_m;
    case Kind::time: return v * s.entangler.mech.omega_m;
    default: return v;
  }
}

std::string tool_version() { return CVRELAY_VERSION; }

}  // namespace cvrelay
