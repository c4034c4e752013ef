#include "sphparisi/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sphparisi/rng.hpp"

namespace sphparisi {

using nlohmann::json;

namespace {

std::string kind(const json& j) { return j.type_name(); }

template <class T>
T convert(const json& j, const std::string& path) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) throw ConfigError(path + ": expected boolean, got " + kind(j));
    return j.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.is_string()) throw ConfigError(path + ": expected string, got " + kind(j));
    return j.get<std::string>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!j.is_number_unsigned()) throw ConfigError(path + ": expected unsigned integer, got " + kind(j));
    return j.get<std::uint64_t>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) throw ConfigError(path + ": expected integer, got " + kind(j));
    return j.get<T>();
  } else {
    if (!j.is_number()) throw ConfigError(path + ": expected number, got " + kind(j));
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path + ": must be finite");
    return v;
  }
}

template <class T>
std::vector<T> convert_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected array, got " + kind(j));
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(convert<T>(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Object view that records which keys were read; finish() rejects the rest.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected object, got " + kind(j_));
  }

  const json* child(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& required(const char* key) {
    const json* c = child(key);
    if (!c) throw ConfigError(where() + ": missing required field '" + key + "'");
    return *c;
  }
  template <class T>
  T get(const char* key, T fallback) {
    const json* c = child(key);
    return c ? convert<T>(*c, sub(key)) : fallback;
  }
  template <class T>
  T require(const char* key) {
    return convert<T>(required(key), sub(key));
  }
  [[nodiscard]] std::string sub(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(where() + ": unknown field '" + it.key() + "'");
    }
  }

 private:
  [[nodiscard]] std::string where() const { return path_.empty() ? "config" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

GibbsOptions parse_gibbs(const json* j, const std::string& path) {
  GibbsOptions g;
  if (!j) return g;
  Fields f(*j, path);
  g.steps = f.get<long>("steps", g.steps);
  g.burn_in = f.get<long>("burn_in", g.burn_in);
  g.thin = f.get<long>("thin", g.thin);
  g.initial_step = f.get<double>("initial_step", g.initial_step);
  g.window = f.get<long>("window", g.window);
  f.finish();
  check(g.steps >= 1 && g.burn_in >= 0 && g.thin >= 1 && g.window >= 1 && g.initial_step > 0.0,
        path + ": steps, thin, window and initial_step must be positive, burn_in nonnegative");
  return g;
}

PerturbationSpec parse_perturbation(const json* j, const std::string& path, std::uint64_t seed) {
  PerturbationSpec p;
  p.seed = derive_seed(seed, {0x7e27});
  if (!j) return p;
  Fields f(*j, path);
  p.enabled = f.get<bool>("enabled", true);
  const int p_max = f.get<int>("p_max", 4);
  if (const json* u = f.child("u")) {
    p.u = convert_array<double>(*u, f.sub("u"));
  } else {
    p.u.assign(static_cast<std::size_t>(std::max(0, p_max)), 1.5);
  }
  p.seed = f.get<std::uint64_t>("seed", p.seed);
  f.finish();
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return p;
}

std::vector<PhiSpec> parse_phi(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected array");
  std::vector<PhiSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string here = path + "[" + std::to_string(i) + "]";
    Fields f(j[i], here);
    PhiSpec s;
    s.p = f.get<int>("p", 1);
    s.n = f.get<int>("n", 2);
    check(s.p >= 1 && s.n >= 2, here + ": need p >= 1 and n >= 2");
    if (const json* mono = f.child("monomial")) {
      if (!mono->is_array()) throw ConfigError(here + ".monomial: expected array of [l, l', power]");
      for (std::size_t t = 0; t < mono->size(); ++t) {
        const auto fac = convert_array<int>((*mono)[t], here + ".monomial[" + std::to_string(t) + "]");
        check(fac.size() == 3, here + ".monomial[" + std::to_string(t) + "]: expected [l, l', power]");
        check(fac[0] >= 1 && fac[1] >= 1 && fac[0] <= s.n && fac[1] <= s.n && fac[0] != fac[1] && fac[2] >= 0,
              here + ".monomial[" + std::to_string(t) + "]: needs 1 <= l != l' <= n and power >= 0");
        s.monomial.push_back({fac[0], fac[1], fac[2]});
      }
    }
    f.finish();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

Mixture mixture_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected array of {\"p\", \"beta\"}");
  std::vector<MixtureTerm> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Fields f(j[i], path + "[" + std::to_string(i) + "]");
    terms.push_back({f.require<int>("p"), f.require<double>("beta")});
    f.finish();
  }
  try {
    return Mixture(std::move(terms));
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json mixture_to_json(const Mixture& mix) {
  json out = json::array();
  for (const auto& t : mix.terms()) out.push_back({{"p", t.p}, {"beta", t.beta}});
  return out;
}

FunctionalOrderParameter order_parameter_from_json(const json& j, const std::string& path) {
  Fields f(j, path);
  FunctionalOrderParameter op;
  op.k = f.require<int>("k");
  op.m = convert_array<double>(f.required("m"), f.sub("m"));
  op.q = convert_array<double>(f.required("q"), f.sub("q"));
  f.finish();
  if (auto v = validate(op)) throw ConfigError(path + "." + v->describe());
  return op;
}

json order_parameter_to_json(const FunctionalOrderParameter& f) { return {{"k", f.k}, {"m", f.m}, {"q", f.q}}; }

SolveConfig parse_solve_config(const json& j) {
  Fields f(j, "");
  SolveConfig c;
  c.mixture = mixture_from_json(f.required("mixture"));
  c.k_max = f.get<int>("k_max", c.k_max);
  check(c.k_max >= 1, "k_max: must be >= 1");
  c.seed = f.get<std::uint64_t>("seed", c.seed);
  c.optimizer.seed = c.seed;
  if (const json* o = f.child("optimizer")) {
    Fields of(*o, "optimizer");
    c.optimizer.restarts = of.get<int>("restarts", c.optimizer.restarts);
    c.optimizer.tol = of.get<double>("tol", c.optimizer.tol);
    c.optimizer.max_iter = of.get<int>("max_iter", c.optimizer.max_iter);
    of.finish();
    check(c.optimizer.restarts >= 1 && c.optimizer.max_iter >= 1 && c.optimizer.tol >= 0.0,
          "optimizer: restarts and max_iter must be >= 1, tol >= 0");
  }
  if (const json* op = f.child("order_parameter")) c.order_parameter = order_parameter_from_json(*op);
  f.finish();
  return c;
}

FiniteMRunConfig parse_finite_m_config(const json& j) {
  Fields f(j, "");
  FiniteMRunConfig c;
  c.mixture = mixture_from_json(f.required("mixture"));
  c.order_parameter = order_parameter_from_json(f.required("order_parameter"));
  c.M_values = convert_array<int>(f.required("M"), "M");
  check(!c.M_values.empty(), "M: needs at least one value");
  for (int m : c.M_values) check(m >= 1, "M: every value must be >= 1");
  if (const json* q = f.child("quadrature")) {
    Fields qf(*q, "quadrature");
    auto& cfg = c.quadrature;
    cfg.r_grid_size = qf.get<int>("r_grid_size", cfg.r_grid_size);
    cfg.r_max_sigmas = qf.get<double>("r_max_sigmas", cfg.r_max_sigmas);
    cfg.radial_nodes = qf.get<int>("radial_nodes", cfg.radial_nodes);
    cfg.scan_points = qf.get<int>("scan_points", cfg.scan_points);
    cfg.max_k = qf.get<int>("max_k", cfg.max_k);
    qf.finish();
    try {
      cfg.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("quadrature: ") + e.what());
    }
  }
  f.finish();
  return c;
}

SimulateConfig parse_simulate_config(const json& j) {
  Fields f(j, "");
  SimulateConfig c;
  const auto mode = f.require<std::string>("mode");
  if (mode == "free-energy") {
    c.mode = SimulateMode::free_energy;
  } else if (mode == "gg-stats") {
    c.mode = SimulateMode::gg_stats;
  } else if (mode == "ass-bracket") {
    c.mode = SimulateMode::ass_bracket;
  } else if (mode == "cavity-check") {
    c.mode = SimulateMode::cavity_check;
  } else {
    throw ConfigError("mode: expected one of free-energy, gg-stats, ass-bracket, cavity-check; got '" + mode + "'");
  }
  c.mixture = mixture_from_json(f.required("mixture"));
  c.N = f.require<int>("N");
  check(c.N >= 1, "N: must be >= 1");
  c.M = f.get<int>("M", c.M);
  check(c.M >= 0, "M: must be >= 0");
  c.seed = f.get<std::uint64_t>("seed", c.seed);

  switch (c.mode) {
    case SimulateMode::free_energy:
      c.n_config = f.get<long>("n_config", c.n_config);
      c.n_disorder = f.get<int>("n_disorder", c.n_disorder);
      c.annealed = f.get<bool>("annealed", c.annealed);
      check(c.n_config >= 1 && c.n_disorder >= 1, "n_config and n_disorder must be >= 1");
      break;
    case SimulateMode::gg_stats: {
      c.gibbs = parse_gibbs(f.child("gibbs"), "gibbs");
      c.perturbation = parse_perturbation(f.child("perturbation"), "perturbation", c.seed);
      c.chains = f.get<int>("chains", c.chains);
      c.eta = f.get<double>("eta", c.eta);
      c.resamples = f.get<int>("resamples", c.resamples);
      c.dump_chains = f.get<bool>("dump_chains", c.dump_chains);
      if (const json* p = f.child("phi")) {
        c.phi = parse_phi(*p, "phi");
      } else {
        c.phi = {PhiSpec{1, 2, {}}};
      }
      int needed = 3;
      for (const auto& s : c.phi) needed = std::max(needed, s.n + 1);
      if (c.chains < needed) {
        throw ConfigError("chains: insufficient replicas, " + std::to_string(needed) + " independent chains needed, " +
                          std::to_string(c.chains) + " configured");
      }
      check(c.resamples >= 2, "resamples: must be >= 2");
      break;
    }
    case SimulateMode::ass_bracket: {
      check(c.M >= 1, "M: ass-bracket needs M >= 1");
      c.ass.gibbs = parse_gibbs(f.child("gibbs"), "gibbs");
      if (const json* p = f.child("perturbation")) c.ass.perturbation = parse_perturbation(p, "perturbation", c.seed);
      c.ass.n_disorder = f.get<int>("n_disorder", c.ass.n_disorder);
      c.ass.n_gauss = f.get<int>("n_gauss", c.ass.n_gauss);
      c.ass.n_rep = f.get<int>("n_rep", c.ass.n_rep);
      c.ass.delta = f.get<double>("delta", c.ass.delta);
      check(c.ass.n_disorder >= 1 && c.ass.n_gauss >= 1 && c.ass.n_rep >= 1 && c.ass.delta > 0.0,
            "ass-bracket: n_disorder, n_gauss, n_rep must be >= 1 and delta > 0");
      break;
    }
    case SimulateMode::cavity_check:
      check(c.M >= 1, "M: cavity-check needs M >= 1");
      c.configs = f.get<int>("configs", c.configs);
      check(c.configs >= 1, "configs: must be >= 1");
      break;
  }
  f.finish();
  return c;
}

std::string mode_name(SimulateMode mode) {
  switch (mode) {
    case SimulateMode::free_energy: return "free-energy";
    case SimulateMode::gg_stats: return "gg-stats";
    case SimulateMode::ass_bracket: return "ass-bracket";
    case SimulateMode::cavity_check: return "cavity-check";
  }
  return "";
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace sphparisi
