#include "vicsek/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "vicsek/errors.hpp"

namespace vicsek {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) out.push_back(trim(cur));
  return out;
}

class ErrorList {
 public:
  void add(const std::string& msg) { msgs_.push_back(msg); }
  bool empty() const { return msgs_.empty(); }
  [[noreturn]] void raise(const std::string& what) const {
    std::string all = what + ":";
    for (const auto& m : msgs_) all += "\n  - " + m;
    throw ConfigError(all);
  }

 private:
  std::vector<std::string> msgs_;
};

// Typed readers: each returns nullopt and records an error message on failure.
std::optional<double> as_double(const std::string& key, const std::string& v, ErrorList& e) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  e.add(key + ": expected a real number, got '" + v + "'");
  return std::nullopt;
}

std::optional<std::uint64_t> as_u64(const std::string& key, const std::string& v, ErrorList& e) {
  try {
    if (!v.empty() && v[0] != '-') {
      std::size_t used = 0;
      const std::uint64_t x = std::stoull(v, &used);
      if (used == v.size()) return x;
    }
  } catch (const std::exception&) {
  }
  e.add(key + ": expected a nonnegative integer, got '" + v + "'");
  return std::nullopt;
}

}  // namespace

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::simulate: return "simulate";
    case Experiment::couple: return "couple";
    case Experiment::homogeneous: return "homogeneous";
    case Experiment::analyze: return "analyze";
    case Experiment::sweep: return "sweep";
  }
  return "unknown";
}

Kernel RunConfig::kernel() const {
  switch (kernel_kind) {
    case KernelKind::constant: return Kernel::constant(kappa);
    case KernelKind::gaussian: return Kernel::gaussian(kappa, ell);
    case KernelKind::mollified_tophat: return Kernel::mollified_tophat(kappa, ell);
  }
  throw ConfigError("unknown kernel kind");
}

StepParams RunConfig::step_params() const { return StepParams{dt, scheme}; }

void RunConfig::validate() const {
  ErrorList e;
  if (d != 2 && d != 3) e.add("d: must be 2 or 3");
  if (n < 1) e.add("n: must be at least 1");
  if (m_multiplier < 8) e.add("m_multiplier: must be at least 8 (reference ensemble bias)");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) e.add("kappa: must be finite and >= 0");
  if (!(ell > 0.0) || !std::isfinite(ell)) e.add("ell: must be finite and > 0");
  if (!(dt > 0.0) || !(dt <= 0.1)) e.add("dt: must lie in (0, 0.1]");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) e.add("t: must be finite and >= 0");
  if (record_every < 1) e.add("record_every: must be at least 1");
  try {
    position.validate();
  } catch (const ConfigError& err) {
    e.add(err.what());
  }
  if (d == 2 || d == 3) {
    try {
      orientation.validate(d);
    } catch (const ConfigError& err) {
      e.add(err.what());
    }
  }

  if (experiment == Experiment::couple) {
    if (n_grid.size() < 4) e.add("n_grid: need at least 4 grid points for a rate fit");
    const std::set<std::size_t> distinct(n_grid.begin(), n_grid.end());
    if (distinct.size() != n_grid.size()) e.add("n_grid: grid points must be distinct");
    for (std::size_t g : n_grid)
      if (g < 2) {
        e.add("n_grid: every N must be at least 2");
        break;
      }
    if (replicas < 8) e.add("replicas: must be at least 8");
  }
  if (experiment == Experiment::homogeneous) {
    if (d != 2) e.add("homogeneous: spectral solver exists for d=2 only");
    if (k_max < 4) e.add("k_max: must be at least 4");
    if (!(dt <= 1e-2)) e.add("dt: homogeneous runs need dt <= 1e-2");
    if (!(j0 >= 0.0) || !(j0 <= 0.5)) e.add("j0: initial perturbation must lie in [0, 0.5]");
    if (kernel_kind != KernelKind::constant)
      e.add("homogeneous: the space-homogeneous model uses the constant kernel");
  }
  if (experiment == Experiment::analyze && input.empty())
    e.add("input: analyze needs a trajectory record file");
  if (experiment == Experiment::sweep) {
    if (sweep_parameter != "kappa" && sweep_parameter != "n" && sweep_parameter != "seed")
      e.add("sweep_parameter: must be one of kappa, n, seed");
    if (sweep_values.empty()) e.add("sweep_values: must list at least one value");
    const std::set<double> distinct(sweep_values.begin(), sweep_values.end());
    if (distinct.size() != sweep_values.size()) e.add("sweep_values: values must be distinct");
    if (sweep_parameter == "n" || sweep_parameter == "seed")
      for (double v : sweep_values)
        if (!(v >= (sweep_parameter == "n" ? 1.0 : 0.0)) || v != std::floor(v)) {
          e.add("sweep_values: " + sweep_parameter + " values must be nonnegative integers");
          break;
        }
    if (sweep_experiment != Experiment::simulate && sweep_experiment != Experiment::couple &&
        sweep_experiment != Experiment::homogeneous)
      e.add("sweep_experiment: must be simulate, couple, or homogeneous");
    // Each grid point must itself be a valid run of the swept experiment, so
    // apply every swept value the way run_sweep will and validate the result.
    for (double v : sweep_values) {
      RunConfig point = *this;
      point.experiment = sweep_experiment;
      if (sweep_parameter == "kappa")
        point.kappa = v;
      else if (sweep_parameter == "n")
        point.n = v == std::floor(v) && v >= 1.0 ? static_cast<std::size_t>(v) : point.n;
      else if (sweep_parameter == "seed")
        point.seed = v == std::floor(v) && v >= 0.0 ? static_cast<std::uint64_t>(v) : point.seed;
      try {
        point.validate();
      } catch (const ConfigError& err) {
        e.add("swept run invalid at " + sweep_parameter + "=" + fmt_double(v) + ": " + err.what());
        break;  // one bad point is enough; avoid repeating the same message per value
      }
    }
  }
  if (!e.empty()) e.raise("invalid configuration");
}

std::string RunConfig::canonical_text() const {
  // Alphabetical by key; doubles in %.17g so the digest survives re-parsing.
  std::string s;
  s += "d=" + std::to_string(d) + "\n";
  s += "dt=" + fmt_double(dt) + "\n";
  s += "ell=" + fmt_double(ell) + "\n";
  s += "kappa=" + fmt_double(kappa) + "\n";
  s += "kernel=" + std::string(kernel_name(kernel_kind)) + "\n";
  s += "m_multiplier=" + std::to_string(m_multiplier) + "\n";
  s += "n=" + std::to_string(n) + "\n";
  s += "orientation_law=" +
       std::string(orientation.kind == OrientationLaw::Kind::uniform ? "uniform" : "vmf") + "\n";
  s += "position_law=gaussian\n";
  s += "position_mean=" + fmt_double(position.mean) + "\n";
  s += "position_sd=" + fmt_double(position.sd) + "\n";
  s += "record_every=" + std::to_string(record_every) + "\n";
  s += "scheme=" + std::string(scheme_name(scheme)) + "\n";
  s += "seed=" + std::to_string(seed) + "\n";
  s += "t=" + fmt_double(horizon) + "\n";
  s += "vmf_kappa=" + fmt_double(orientation.kappa) + "\n";
  s += "vmf_mu_x=" + fmt_double(orientation.mu[0]) + "\n";
  s += "vmf_mu_y=" + fmt_double(orientation.mu[1]) + "\n";
  s += "vmf_mu_z=" + fmt_double(orientation.mu[2]) + "\n";
  return s;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t RunConfig::config_hash() const { return fnv1a64(canonical_text()); }

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  ErrorList errors;
  std::map<std::string, std::string> kv;

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      errors.add("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      errors.add("line " + std::to_string(lineno) + ": empty key or value");
      continue;
    }
    if (!kv.emplace(key, value).second)
      errors.add("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }

  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("experiment")) {
    if (*v == "simulate") cfg.experiment = Experiment::simulate;
    else if (*v == "couple") cfg.experiment = Experiment::couple;
    else if (*v == "homogeneous") cfg.experiment = Experiment::homogeneous;
    else if (*v == "analyze") cfg.experiment = Experiment::analyze;
    else if (*v == "sweep") cfg.experiment = Experiment::sweep;
    else errors.add("experiment: unknown value '" + *v +
                    "' (simulate | couple | homogeneous | analyze | sweep)");
  }
  if (auto v = take("d"))
    if (auto x = as_u64("d", *v, errors)) cfg.d = (*x <= 16) ? static_cast<int>(*x) : -1;
  if (auto v = take("n"))
    if (auto x = as_u64("n", *v, errors)) cfg.n = *x;
  if (auto v = take("m_multiplier"))
    if (auto x = as_u64("m_multiplier", *v, errors)) cfg.m_multiplier = *x;
  if (auto v = take("kernel")) {
    if (*v == "constant") cfg.kernel_kind = KernelKind::constant;
    else if (*v == "gaussian") cfg.kernel_kind = KernelKind::gaussian;
    else if (*v == "tophat" || *v == "mollified_tophat")
      cfg.kernel_kind = KernelKind::mollified_tophat;
    else
      errors.add("kernel: unknown variant '" + *v +
                 "' — only the bounded Lipschitz family is admissible "
                 "(constant | gaussian | tophat)");
  }
  if (auto v = take("kappa"))
    if (auto x = as_double("kappa", *v, errors)) cfg.kappa = *x;
  if (auto v = take("ell"))
    if (auto x = as_double("ell", *v, errors)) cfg.ell = *x;
  if (auto v = take("scheme")) {
    if (*v == "stratonovich_project") cfg.scheme = StepScheme::stratonovich_project;
    else if (*v == "ito_correction_renorm") cfg.scheme = StepScheme::ito_correction_renorm;
    else errors.add("scheme: unknown value '" + *v +
                    "' (stratonovich_project | ito_correction_renorm)");
  }
  if (auto v = take("dt"))
    if (auto x = as_double("dt", *v, errors)) cfg.dt = *x;
  if (auto v = take("t"))
    if (auto x = as_double("t", *v, errors)) cfg.horizon = *x;
  if (auto v = take("seed"))
    if (auto x = as_u64("seed", *v, errors)) cfg.seed = *x;
  if (auto v = take("record_every"))
    if (auto x = as_u64("record_every", *v, errors)) cfg.record_every = *x;
  if (auto v = take("position_law"))
    if (*v != "gaussian")
      errors.add("position_law: unknown law '" + *v +
                 "' — initial positions must have finite second moment (gaussian)");
  if (auto v = take("position_mean"))
    if (auto x = as_double("position_mean", *v, errors)) cfg.position.mean = *x;
  if (auto v = take("position_sd"))
    if (auto x = as_double("position_sd", *v, errors)) cfg.position.sd = *x;
  if (auto v = take("orientation_law")) {
    if (*v == "uniform") cfg.orientation.kind = OrientationLaw::Kind::uniform;
    else if (*v == "vmf") cfg.orientation.kind = OrientationLaw::Kind::vmf;
    else errors.add("orientation_law: unknown value '" + *v + "' (uniform | vmf)");
  }
  if (auto v = take("vmf_kappa"))
    if (auto x = as_double("vmf_kappa", *v, errors)) cfg.orientation.kappa = *x;
  if (auto v = take("vmf_mu_x"))
    if (auto x = as_double("vmf_mu_x", *v, errors)) cfg.orientation.mu[0] = *x;
  if (auto v = take("vmf_mu_y"))
    if (auto x = as_double("vmf_mu_y", *v, errors)) cfg.orientation.mu[1] = *x;
  if (auto v = take("vmf_mu_z"))
    if (auto x = as_double("vmf_mu_z", *v, errors)) cfg.orientation.mu[2] = *x;
  if (auto v = take("n_grid")) {
    cfg.n_grid.clear();
    for (const auto& part : split_commas(*v))
      if (auto x = as_u64("n_grid", part, errors)) cfg.n_grid.push_back(*x);
  }
  if (auto v = take("replicas"))
    if (auto x = as_u64("replicas", *v, errors)) cfg.replicas = *x;
  if (auto v = take("k_max")) {
    if (auto x = as_u64("k_max", *v, errors)) {
      if (*x > 4096) errors.add("k_max: unreasonably large (cap 4096)");
      else cfg.k_max = static_cast<int>(*x);
    }
  }
  if (auto v = take("j0"))
    if (auto x = as_double("j0", *v, errors)) cfg.j0 = *x;
  if (auto v = take("input")) cfg.input = *v;
  if (auto v = take("sweep_parameter")) cfg.sweep_parameter = *v;
  if (auto v = take("sweep_experiment")) {
    if (*v == "simulate") cfg.sweep_experiment = Experiment::simulate;
    else if (*v == "couple") cfg.sweep_experiment = Experiment::couple;
    else if (*v == "homogeneous") cfg.sweep_experiment = Experiment::homogeneous;
    else errors.add("sweep_experiment: unknown value '" + *v +
                    "' (simulate | couple | homogeneous)");
  }
  if (auto v = take("sweep_values")) {
    cfg.sweep_values.clear();
    for (const auto& part : split_commas(*v))
      if (auto x = as_double("sweep_values", part, errors)) cfg.sweep_values.push_back(*x);
  }

  for (const auto& [key, value] : kv) errors.add("unknown key '" + key + "'");
  if (!errors.empty()) errors.raise("invalid configuration");

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading config file: " + path);
  return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::string s;
  s += "experiment=" + experiment_name(cfg.experiment) + "\n";
  s += cfg.canonical_text();
  s += "replicas=" + std::to_string(cfg.replicas) + "\n";
  std::string grid;
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i)
    grid += (i ? "," : "") + std::to_string(cfg.n_grid[i]);
  s += "n_grid=" + grid + "\n";
  s += "k_max=" + std::to_string(cfg.k_max) + "\n";
  s += "j0=" + fmt_double(cfg.j0) + "\n";
  if (!cfg.input.empty()) s += "input=" + cfg.input + "\n";
  if (!cfg.sweep_parameter.empty()) {
    s += "sweep_parameter=" + cfg.sweep_parameter + "\n";
    s += "sweep_experiment=" + experiment_name(cfg.sweep_experiment) + "\n";
    std::string vals;
    for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i)
      vals += (i ? "," : "") + fmt_double(cfg.sweep_values[i]);
    s += "sweep_values=" + vals + "\n";
  }
  return s;
}

}  // namespace vicsek
