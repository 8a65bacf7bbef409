#include "maxreg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "maxreg/error.hpp"
#include "maxreg/report.hpp"

namespace maxreg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || v.empty()) throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || v.empty()) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ConfigError(key, "integer out of range");
  }
  return static_cast<int>(x);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(trim(item));
  return out;
}

std::optional<double> to_auto_double(const std::string& key, const std::string& v) {
  if (v == "auto") return std::nullopt;
  return to_double(key, v);
}

std::string auto_str(const std::optional<double>& v) { return v ? format_number(*v) : "auto"; }

template <class T, class F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += fmt(xs[i]);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"variant",
       [](auto& c, auto&, auto& v) {
         if (v == "both") {
           c.variants = {Variant::nonsymmetric, Variant::symmetric};
         } else {
           c.variants = {parse_variant(v)};
         }
       }},
      {"weight_exp", [](auto& c, auto& k, auto& v) { c.weight_exp = to_double(k, v); }},
      {"phase_exp", [](auto& c, auto& k, auto& v) { c.phase_exp = to_double(k, v); }},
      {"profile_exp", [](auto& c, auto& k, auto& v) { c.profile_exp = to_double(k, v); }},
      {"phase_scale", [](auto& c, auto& k, auto& v) { c.phase_scale = to_double(k, v); }},
      {"profile_scale", [](auto& c, auto& k, auto& v) { c.profile_scale = to_double(k, v); }},
      {"shift_d", [](auto& c, auto& k, auto& v) { c.shift_d = to_auto_double(k, v); }},
      {"alpha", [](auto& c, auto& k, auto& v) { c.alpha = to_auto_double(k, v); }},
      {"M", [](auto& c, auto& k, auto& v) { c.M = to_auto_double(k, v); }},
      {"k_term", [](auto& c, auto& k, auto& v) { c.k_term = to_auto_double(k, v); }},
      {"horizon_T", [](auto& c, auto& k, auto& v) { c.horizon_T = to_double(k, v); }},
      {"mass_model",
       [](auto& c, auto& k, auto& v) {
         if (v == "lumped") {
           c.mass_model = MassModel::lumped;
         } else if (v == "consistent") {
           c.mass_model = MassModel::consistent;
         } else {
           throw ConfigError(k, "expected 'lumped' or 'consistent', got '" + v + "'");
         }
       }},
      {"eps_sweep",
       [](auto& c, auto& k, auto& v) {
         c.eps_sweep.clear();
         for (const auto& s : split_list(v)) c.eps_sweep.push_back(to_double(k, s));
       }},
      {"n_cells", [](auto& c, auto& k, auto& v) { c.n_cells = to_int(k, v); }},
      {"gamma", [](auto& c, auto& k, auto& v) { c.gamma = to_double(k, v); }},
      {"solver_cells", [](auto& c, auto& k, auto& v) { c.solver_cells = to_int(k, v); }},
      {"solver_min_eps", [](auto& c, auto& k, auto& v) { c.solver_min_eps = to_double(k, v); }},
      {"form_epsilon", [](auto& c, auto& k, auto& v) { c.form_epsilon = to_double(k, v); }},
      {"form_cells", [](auto& c, auto& k, auto& v) { c.form_cells = to_int(k, v); }},
      {"rayleigh_samples", [](auto& c, auto& k, auto& v) { c.rayleigh_samples = to_int(k, v); }},
      {"holder_deltas", [](auto& c, auto& k, auto& v) { c.holder_deltas = to_int(k, v); }},
      {"holder_bases", [](auto& c, auto& k, auto& v) { c.holder_bases = to_int(k, v); }},
      {"extension_trials", [](auto& c, auto& k, auto& v) { c.extension_trials = to_int(k, v); }},
      {"extension_dofs", [](auto& c, auto& k, auto& v) { c.extension_dofs = to_int(k, v); }},
      {"theta", [](auto& c, auto& k, auto& v) { c.theta = to_double(k, v); }},
      {"energy_eps",
       [](auto& c, auto& k, auto& v) {
         c.energy_eps.clear();
         for (const auto& s : split_list(v)) c.energy_eps.push_back(to_double(k, s));
       }},
      {"convergence_epsilon", [](auto& c, auto& k, auto& v) { c.convergence_epsilon = to_double(k, v); }},
      {"convergence_cells", [](auto& c, auto& k, auto& v) { c.convergence_cells = to_int(k, v); }},
      {"convergence_levels", [](auto& c, auto& k, auto& v) { c.convergence_levels = to_int(k, v); }},
      {"residual_epsilon", [](auto& c, auto& k, auto& v) { c.residual_epsilon = to_double(k, v); }},
      {"residual_cells",
       [](auto& c, auto& k, auto& v) {
         c.residual_cells.clear();
         for (const auto& s : split_list(v)) c.residual_cells.push_back(to_int(k, s));
       }},
      {"residual_steps", [](auto& c, auto& k, auto& v) { c.residual_steps = to_int(k, v); }},
      {"residual_tests", [](auto& c, auto& k, auto& v) { c.residual_tests = to_int(k, v); }},
      {"seed",
       [](auto& c, auto& k, auto& v) {
         const long long s = to_integer(k, v);
         if (s < 0) throw ConfigError(k, "must be >= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"out_dir", [](auto& c, auto&, auto& v) { c.out_dir = v; }},
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& msg) {
  if (!ok) throw ConfigError(key, msg);
}

bool decreasing_in_unit(const std::vector<double>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0 && xs[i] < 1.0)) return false;
    if (i && !(xs[i] < xs[i - 1])) return false;
  }
  return true;
}

}  // namespace

void ExperimentConfig::validate() const {
  require(!variants.empty(), "variant", "at least one variant required");
  require(weight_exp >= 0.0, "weight_exp", "must be >= 0");
  require(phase_exp >= 0.0, "phase_exp", "must be >= 0");
  require(profile_exp >= 0.0, "profile_exp", "must be >= 0");
  require(phase_scale >= 0.0, "phase_scale", "must be >= 0");
  require(profile_scale > 0.0, "profile_scale", "must be > 0");
  require(!shift_d || std::abs(*shift_d) > 1.0, "shift_d", "|shift_d| must exceed 1");
  require(!alpha || *alpha > 0.0, "alpha", "must be > 0");
  require(!M || *M > 0.0, "M", "must be > 0");
  require(!k_term || *k_term >= 0.0, "k_term", "must be >= 0");
  require(horizon_T > 0.0 && std::isfinite(horizon_T), "horizon_T", "must be > 0");
  require(decreasing_in_unit(eps_sweep), "eps_sweep", "values must lie in (0,1) and decrease");
  require(n_cells >= 2, "n_cells", "must be >= 2");
  require(gamma >= 1.0, "gamma", "must be >= 1");
  require(solver_cells >= 2, "solver_cells", "must be >= 2");
  require(solver_min_eps > 0.0, "solver_min_eps", "must be > 0");
  require(form_epsilon > 0.0 && form_epsilon < 1.0, "form_epsilon", "must lie in (0,1)");
  require(form_cells >= 2, "form_cells", "must be >= 2");
  require(rayleigh_samples >= 1, "rayleigh_samples", "must be >= 1");
  require(holder_deltas >= 2, "holder_deltas", "must be >= 2");
  require(holder_bases >= 1, "holder_bases", "must be >= 1");
  require(holder_deltas * holder_bases >= 20, "holder_bases", "need >= 20 Hoelder pairs in total");
  require(extension_trials >= 1, "extension_trials", "must be >= 1");
  require(extension_dofs >= 3, "extension_dofs", "must be >= 3");
  require(theta >= 0.5 && theta <= 1.0, "theta", "must lie in [0.5, 1] for unconditional stability");
  require(decreasing_in_unit(energy_eps), "energy_eps", "values must lie in (0,1) and decrease");
  require(convergence_epsilon > 0.0 && convergence_epsilon < 1.0, "convergence_epsilon", "must lie in (0,1)");
  require(convergence_cells >= 2, "convergence_cells", "must be >= 2");
  require(convergence_levels >= 2, "convergence_levels", "must be >= 2");
  require(residual_epsilon > 0.0 && residual_epsilon < 1.0, "residual_epsilon", "must lie in (0,1)");
  require(!residual_cells.empty(), "residual_cells", "at least one level required");
  for (std::size_t i = 0; i < residual_cells.size(); ++i) {
    require(residual_cells[i] >= 2 && (i == 0 || residual_cells[i] > residual_cells[i - 1]), "residual_cells",
            "levels must be >= 2 and increasing");
  }
  require(residual_steps >= 2, "residual_steps", "must be >= 2");
  require(residual_tests >= 1, "residual_tests", "must be >= 1");
}

CounterexampleSpec ExperimentConfig::spec(Variant v) const {
  CounterexampleSpec s;
  s.variant = v;
  s.weight_exp = weight_exp;
  s.phase_exp = phase_exp;
  s.profile_exp = profile_exp;
  s.phase_scale = phase_scale;
  s.profile_scale = profile_scale;
  s.shift_d = v == Variant::symmetric ? shift_d : std::nullopt;
  s.horizon_T = horizon_T;
  s.alpha = alpha;
  s.M = M;
  s.k_term = v == Variant::symmetric ? k_term : std::nullopt;
  return s;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  auto num = [](double x) { return format_number(x); };
  auto integer = [](long long x) { return std::to_string(x); };
  std::string variant = variants.size() == 2 ? "both" : to_string(variants.front());
  return {
      {"variant", variant},
      {"weight_exp", num(weight_exp)},
      {"phase_exp", num(phase_exp)},
      {"profile_exp", num(profile_exp)},
      {"phase_scale", num(phase_scale)},
      {"profile_scale", num(profile_scale)},
      {"shift_d", auto_str(shift_d)},
      {"alpha", auto_str(alpha)},
      {"M", auto_str(M)},
      {"k_term", auto_str(k_term)},
      {"horizon_T", num(horizon_T)},
      {"mass_model", mass_model == MassModel::lumped ? "lumped" : "consistent"},
      {"eps_sweep", join(eps_sweep, num)},
      {"n_cells", integer(n_cells)},
      {"gamma", num(gamma)},
      {"solver_cells", integer(solver_cells)},
      {"solver_min_eps", num(solver_min_eps)},
      {"form_epsilon", num(form_epsilon)},
      {"form_cells", integer(form_cells)},
      {"rayleigh_samples", integer(rayleigh_samples)},
      {"holder_deltas", integer(holder_deltas)},
      {"holder_bases", integer(holder_bases)},
      {"extension_trials", integer(extension_trials)},
      {"extension_dofs", integer(extension_dofs)},
      {"theta", num(theta)},
      {"energy_eps", join(energy_eps, num)},
      {"convergence_epsilon", num(convergence_epsilon)},
      {"convergence_cells", integer(convergence_cells)},
      {"convergence_levels", integer(convergence_levels)},
      {"residual_epsilon", num(residual_epsilon)},
      {"residual_cells", join(residual_cells, integer)},
      {"residual_steps", integer(residual_steps)},
      {"residual_tests", integer(residual_tests)},
      {"seed", std::to_string(seed)},
  };
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  int lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown config key");
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace maxreg
