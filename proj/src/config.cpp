#include "nsch/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "nsch/errors.hpp"

namespace nsch::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw std::invalid_argument("expected a number, got '" + s + "'");
  return v;
}

template <class I>
I parse_int(const std::string& s) {
  I v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <class E>
struct EnumNames {
  std::vector<std::pair<E, std::string>> names;
  E parse(const std::string& s) const {
    std::string all;
    for (const auto& [e, n] : names) {
      if (n == s) return e;
      all += (all.empty() ? "" : ", ") + n;
    }
    throw std::invalid_argument("expected one of " + all + ", got '" + s + "'");
  }
  std::string print(E v) const {
    for (const auto& [e, n] : names)
      if (e == v) return n;
    return "?";
  }
};

const EnumNames<constitutive::MixingKind> kMixing{
    {{constitutive::MixingKind::Tanh, "tanh"}, {constitutive::MixingKind::Linear, "linear"}}};
const EnumNames<constitutive::WellKind> kWell{{{constitutive::WellKind::SmoothedDoubleWell, "double_well"},
                                               {constitutive::WellKind::Quadratic, "quadratic"}}};
const EnumNames<noise::AlphaRule> kAlpha{{{noise::AlphaRule::Geometric, "geometric"}, {noise::AlphaRule::List, "list"}}};
const EnumNames<noise::SigmaFamily> kSigma{{{noise::SigmaFamily::Sin, "sin"},
                                            {noise::SigmaFamily::Constant, "constant"},
                                            {noise::SigmaFamily::Linear, "linear"},
                                            {noise::SigmaFamily::Zero, "zero"}}};

struct Key {
  std::string section;
  std::string name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <class T>
Key num_key(std::string section, std::string name, std::function<T&(RunConfig&)> ref) {
  Key k{std::move(section), std::move(name), nullptr, nullptr};
  k.get = [ref](const RunConfig& c) {
    T& v = ref(const_cast<RunConfig&>(c));
    if constexpr (std::is_same_v<T, double>)
      return fmt(v);
    else
      return std::to_string(v);
  };
  k.set = [ref](RunConfig& c, const std::string& s) {
    if constexpr (std::is_same_v<T, double>)
      ref(c) = parse_double(s);
    else
      ref(c) = parse_int<T>(s);
  };
  return k;
}

#define NUM(section, name, T, expr) \
  num_key<T>(section, name, [](RunConfig& c) -> T& { return expr; })

template <class E>
Key enum_key(std::string section, std::string name, const EnumNames<E>& names, std::function<E&(RunConfig&)> ref) {
  return {std::move(section), std::move(name),
          [&names, ref](const RunConfig& c) { return names.print(ref(const_cast<RunConfig&>(c))); },
          [&names, ref](RunConfig& c, const std::string& s) { ref(c) = names.parse(s); }};
}

Key bool_key(std::string section, std::string name, std::function<bool&(RunConfig&)> ref) {
  return {std::move(section), std::move(name),
          [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); },
          [ref](RunConfig& c, const std::string& s) { ref(c) = parse_bool(s); }};
}

Key string_key(std::string section, std::string name, std::function<std::string&(RunConfig&)> ref) {
  return {std::move(section), std::move(name), [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); },
          [ref](RunConfig& c, const std::string& s) {
            if (s.empty()) throw std::invalid_argument("value must not be empty");
            ref(c) = s;
          }};
}

Key double_list_key(std::string section, std::string name, std::function<std::vector<double>&(RunConfig&)> ref) {
  return {std::move(section), std::move(name),
          [ref](const RunConfig& c) {
            std::string s;
            for (double v : ref(const_cast<RunConfig&>(c))) s += (s.empty() ? "" : ", ") + fmt(v);
            return s;
          },
          [ref](RunConfig& c, const std::string& s) {
            std::vector<double> v;
            for (const auto& item : split_list(s)) v.push_back(parse_double(item));
            ref(c) = v;
          }};
}

Key int_list_key(std::string section, std::string name, std::function<std::vector<int>&(RunConfig&)> ref) {
  return {std::move(section), std::move(name),
          [ref](const RunConfig& c) {
            std::string s;
            for (int v : ref(const_cast<RunConfig&>(c))) s += (s.empty() ? "" : ", ") + std::to_string(v);
            return s;
          },
          [ref](RunConfig& c, const std::string& s) {
            std::vector<int> v;
            for (const auto& item : split_list(s)) v.push_back(parse_int<int>(item));
            ref(c) = v;
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> k = [] {
    std::vector<Key> v;
    v.push_back(NUM("grid", "dim", int, c.ensemble.dim));
    v.push_back(NUM("grid", "modes", int, c.ensemble.modes));

    v.push_back(NUM("scheme", "eps", double, c.ensemble.params.eps));
    v.push_back(NUM("scheme", "alpha_exp", double, c.ensemble.params.alpha_exp));
    v.push_back(NUM("scheme", "R", double, c.ensemble.params.R));
    v.push_back(NUM("scheme", "m", int, c.ensemble.params.m));
    v.push_back(NUM("scheme", "n", int, c.ensemble.params.n));
    v.push_back(NUM("scheme", "dt", double, c.ensemble.params.dt));
    v.push_back(NUM("scheme", "cfl", double, c.ensemble.params.cfl));
    v.push_back(NUM("scheme", "saturation_fraction", double, c.ensemble.params.saturation_fraction));
    v.push_back(bool_key("scheme", "freeze_flow", [](RunConfig& c) -> bool& { return c.ensemble.params.freeze_flow; }));

    v.push_back(NUM("viscosity", "nu_shear", double, c.ensemble.params.visc.nu_shear));
    v.push_back(NUM("viscosity", "nu_bulk", double, c.ensemble.params.visc.nu_bulk));

    v.push_back(NUM("free_energy", "a", double, c.ensemble.params.fspec.a));
    v.push_back(NUM("free_energy", "gamma", double, c.ensemble.params.fspec.gamma));
    v.push_back(enum_key<constitutive::MixingKind>(
        "free_energy", "mixing", kMixing, [](RunConfig& c) -> auto& { return c.ensemble.params.fspec.mixing; }));
    v.push_back(NUM("free_energy", "h0", double, c.ensemble.params.fspec.h0));
    v.push_back(enum_key<constitutive::WellKind>("free_energy", "well", kWell,
                                                 [](RunConfig& c) -> auto& { return c.ensemble.params.fspec.well; }));
    v.push_back(NUM("free_energy", "lambda", double, c.ensemble.params.fspec.lambda));
    v.push_back(NUM("free_energy", "blend_threshold", double, c.ensemble.params.fspec.blend_threshold));
    v.push_back(NUM("free_energy", "blend_width", double, c.ensemble.params.fspec.blend_width));
    v.push_back(NUM("free_energy", "rho_min", double, c.ensemble.params.fspec.rho_min));
    v.push_back(NUM("free_energy", "derivative_bound", double, c.ensemble.params.fspec.derivative_bound));

    v.push_back(NUM("noise", "K", int, c.ensemble.params.noise.K));
    v.push_back(enum_key<noise::AlphaRule>("noise", "alpha_rule", kAlpha,
                                           [](RunConfig& c) -> auto& { return c.ensemble.params.noise.rule; }));
    v.push_back(NUM("noise", "alpha0", double, c.ensemble.params.noise.alpha0));
    v.push_back(NUM("noise", "alpha_ratio", double, c.ensemble.params.noise.ratio));
    v.push_back(double_list_key("noise", "alpha_list",
                                [](RunConfig& c) -> auto& { return c.ensemble.params.noise.alpha_list; }));
    v.push_back(enum_key<noise::SigmaFamily>("noise", "sigma", kSigma,
                                             [](RunConfig& c) -> auto& { return c.ensemble.params.noise.family; }));
    v.push_back(NUM("noise", "seed", std::uint64_t, c.ensemble.params.noise.seed));

    v.push_back(NUM("initial", "mass", double, c.ensemble.initial.mass));
    v.push_back(NUM("initial", "rho_amplitude", double, c.ensemble.initial.rho_amplitude));
    v.push_back(NUM("initial", "rho_modes", int, c.ensemble.initial.rho_modes));
    v.push_back(NUM("initial", "u_amplitude", double, c.ensemble.initial.u_amplitude));
    v.push_back(NUM("initial", "u_modes", int, c.ensemble.initial.u_modes));
    v.push_back(NUM("initial", "c_mean", double, c.ensemble.initial.c_mean));
    v.push_back(NUM("initial", "c_amplitude", double, c.ensemble.initial.c_amplitude));
    v.push_back(NUM("initial", "c_modes", int, c.ensemble.initial.c_modes));
    v.push_back(NUM("initial", "seed", std::uint64_t, c.ensemble.initial.seed));

    v.push_back(NUM("run", "steps", long, c.ensemble.steps));
    v.push_back(NUM("run", "snapshot_stride", long, c.ensemble.snapshot_stride));
    v.push_back(NUM("run", "checkpoint_stride", long, c.checkpoint_stride));

    v.push_back(NUM("ensemble", "paths", long, c.ensemble.paths));
    v.push_back(int_list_key("ensemble", "betas", [](RunConfig& c) -> auto& { return c.ensemble.betas; }));
    v.push_back(bool_key("ensemble", "vary_initial", [](RunConfig& c) -> bool& { return c.ensemble.vary_initial; }));

    v.push_back(string_key("sweep", "parameter", [](RunConfig& c) -> auto& { return c.sweep.parameter; }));
    v.push_back(double_list_key("sweep", "values", [](RunConfig& c) -> auto& { return c.sweep.values; }));

    v.push_back(string_key("output", "directory", [](RunConfig& c) -> auto& { return c.output.directory; }));
    v.push_back(string_key("output", "ledger", [](RunConfig& c) -> auto& { return c.output.ledger; }));
    v.push_back(string_key("output", "report", [](RunConfig& c) -> auto& { return c.output.report; }));
    v.push_back(string_key("output", "trend_table", [](RunConfig& c) -> auto& { return c.output.trend_table; }));
    return v;
  }();
  return k;
}

#undef NUM

}  // namespace

void set_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.ensemble.params.noise.seed = seed;
  cfg.ensemble.base_seed = seed;
}

RunConfig parse_unchecked(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> sections;
  for (const auto& k : keys()) sections.insert(k.section);

  std::vector<std::string> errors;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + "unterminated section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) errors.push_back(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string name = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      errors.push_back(where + "key '" + name + "' outside any section");
      continue;
    }
    const Key* key = nullptr;
    for (const auto& k : keys())
      if (k.section == section && k.name == name) key = &k;
    if (!key) {
      if (sections.count(section)) errors.push_back(where + "unknown key '" + name + "' in [" + section + "]");
      continue;
    }
    if (!seen.insert({section, name}).second) errors.push_back(where + "duplicate key '" + name + "'");
    try {
      key->set(cfg, value);
    } catch (const std::exception& e) {
      errors.push_back(where + section + "." + name + ": " + e.what());
    }
  }
  if (!errors.empty()) throw ConfigError(errors);
  cfg.ensemble.base_seed = cfg.ensemble.params.noise.seed;
  return cfg;
}

std::vector<std::string> validate(const RunConfig& cfg) {
  auto out = ensemble::validate(cfg.ensemble);
  if (cfg.ensemble.base_seed != cfg.ensemble.params.noise.seed)
    out.push_back("ensemble base seed must equal noise.seed");
  if (cfg.checkpoint_stride < 1) out.push_back("checkpoint_stride must be at least 1");
  try {
    (void)ensemble::parse_sweep_parameter(cfg.sweep.parameter);
  } catch (const std::invalid_argument& e) {
    out.push_back(e.what());
  }
  for (double v : cfg.sweep.values)
    if (!std::isfinite(v)) {
      out.push_back("sweep values must be finite");
      break;
    }
  return out;
}

RunConfig parse(const std::string& text) {
  RunConfig cfg = parse_unchecked(text);
  if (auto problems = validate(cfg); !problems.empty()) throw ConfigError(problems);
  return cfg;
}

RunConfig load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError({"cannot open config file " + path});
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string print(const RunConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) os << '\n';
      section = k.section;
      os << '[' << section << "]\n";
    }
    os << k.name << " = " << k.get(cfg) << '\n';
  }
  return os.str();
}

}  // namespace nsch::config
