#include "sphparisi/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "sphparisi/chain_io.hpp"
#include "sphparisi/config.hpp"
#include "sphparisi/error.hpp"
#include "sphparisi/finite_m.hpp"
#include "sphparisi/optimizer.hpp"
#include "sphparisi/parisi.hpp"
#include "sphparisi/rng.hpp"
#include "sphparisi/simulator.hpp"
#include "sphparisi/sphere.hpp"

namespace sphparisi {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json load_config(const CliOptions& opts, bool takes_seed) {
  json j = load_json_file(opts.config.string());
  if (takes_seed && opts.seed && j.is_object()) j["seed"] = *opts.seed;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Maps the error taxonomy onto exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InsufficientReplicasError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ResourceGuardError& e) {
    err << "resource guard: " << e.what() << "\n";
    return kExitResource;
  } catch (const ConvergenceError& e) {
    err << "no convergence: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitResource;
  }
}

void apply_threads(const CliOptions& opts) {
  if (opts.threads > 0) omp_set_num_threads(opts.threads);
}

class CsvReport {
 public:
  CsvReport(int N, int M, std::uint64_t seed) : N_(N), M_(M), seed_(seed) {
    text_ << "quantity,value,stderr,N,M,seed,wall_time\n";
  }
  void row(const std::string& quantity, double value, double std_error, double wall) {
    emit(quantity, value, number(std_error), wall);
  }
  void exact(const std::string& quantity, double value, double wall) { emit(quantity, value, "exact", wall); }
  [[nodiscard]] std::string str() const { return text_.str(); }

 private:
  void emit(const std::string& quantity, double value, const std::string& err, double wall) {
    char w[32];
    std::snprintf(w, sizeof w, "%.3f", wall);
    text_ << quantity << ',' << number(value) << ',' << err << ',' << N_ << ',' << M_ << ',' << seed_ << ',' << w
          << '\n';
  }
  std::ostringstream text_;
  int N_, M_;
  std::uint64_t seed_;
};

std::string phi_name(const PhiSpec& s) {
  std::string name = "phi_p" + std::to_string(s.p) + "_n" + std::to_string(s.n) + "_f";
  if (s.monomial.empty()) return name + "1";
  for (std::size_t i = 0; i < s.monomial.size(); ++i) {
    const auto& f = s.monomial[i];
    if (i) name += "*";
    name += "R" + std::to_string(f.first) + std::to_string(f.second) + "^" + std::to_string(f.power);
  }
  return name;
}

}  // namespace

int run_solve(const CliOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    apply_threads(opts);
    const auto cfg = parse_solve_config(load_config(opts, true));
    const auto t0 = Clock::now();
    const auto res = optimize(cfg.mixture, cfg.k_max, cfg.optimizer);
    const auto eval = infimum_over_b(cfg.mixture, res.best);
    json out;
    out["value"] = res.value;
    out["order_parameter"] = order_parameter_to_json(res.best);
    out["b_star"] = eval.b_star;
    out["per_k"] = json::array();
    for (const auto& [k, v] : res.per_k_values) out["per_k"].push_back({{"k", k}, {"value", v}});
    out["converged"] = res.converged;
    out["mixture"] = mixture_to_json(cfg.mixture);
    out["seed"] = cfg.seed;
    if (cfg.order_parameter) {
      out["provided"] = {{"order_parameter", order_parameter_to_json(*cfg.order_parameter)},
                         {"value", parisi_value(cfg.mixture, *cfg.order_parameter)}};
    }
    out["wall_time_seconds"] = seconds_since(t0);
    write_text(opts.out / "solve.json", out.dump(2) + "\n");
    log << "inf P = " << number(res.value) << " at k = " << res.best.k << " (";
    for (std::size_t i = 0; i < res.per_k_values.size(); ++i) {
      log << (i ? ", " : "") << "k=" << res.per_k_values[i].first << ": " << number(res.per_k_values[i].second);
    }
    log << ")" << (res.converged ? "" : " [not converged]") << "\n";
    if (!res.converged) err << "optimizer did not converge; best-so-far written\n";
    return res.converged ? kExitOk : kExitResource;
  });
}

int run_finite_m(const CliOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    apply_threads(opts);
    const auto cfg = parse_finite_m_config(load_config(opts, false));
    const auto t0 = Clock::now();
    const double reference = parisi_value(cfg.mixture, cfg.order_parameter);
    json out;
    out["mixture"] = mixture_to_json(cfg.mixture);
    out["order_parameter"] = order_parameter_to_json(cfg.order_parameter);
    out["parisi_value"] = reference;
    out["rows"] = json::array();
    int code = kExitOk;
    for (int M : cfg.M_values) {
      FiniteMConfig q = cfg.quadrature;
      q.M = M;
      try {
        const auto r = pm_value(cfg.mixture, cfg.order_parameter, q);
        json row{{"M", M}, {"pm", r.pm}, {"error_estimate", r.error_estimate}, {"x0", r.x0},
                 {"gap_to_parisi", std::abs(r.pm - reference)}};
        if (!r.warning.empty()) row["warning"] = r.warning;
        out["rows"].push_back(row);
        log << "M = " << M << ": pm = " << number(r.pm) << " +- " << number(r.error_estimate) << "\n";
      } catch (const ResourceGuardError& e) {
        out["rows"].push_back({{"M", M}, {"error", e.what()}});
        err << "resource guard at M = " << M << ": " << e.what() << "\n";
        code = kExitResource;
      }
    }
    out["wall_time_seconds"] = seconds_since(t0);
    write_text(opts.out / "finite_m.json", out.dump(2) + "\n");
    log << "P(x) = " << number(reference) << "\n";
    return code;
  });
}

int run_simulate(const CliOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    apply_threads(opts);
    const auto cfg = parse_simulate_config(load_config(opts, true));
    CsvReport csv(cfg.N, cfg.M, cfg.seed);
    std::vector<std::string> warnings;
    const auto t0 = Clock::now();

    switch (cfg.mode) {
      case SimulateMode::free_energy: {
        const int scaling = cfg.M > 0 ? cfg.M + cfg.N : cfg.N;
        const auto fe = free_energy_mc(cfg.mixture, cfg.N, cfg.n_config, cfg.n_disorder, cfg.seed, scaling);
        const double wall = seconds_since(t0);
        if (cfg.mixture.empty()) {
          csv.exact("free_energy", fe.value, wall);
        } else {
          csv.row("free_energy", fe.value, fe.std_error, wall);
        }
        if (cfg.annealed) {
          csv.row("annealed_Z", fe.annealed, fe.annealed_std_error, wall);
          csv.exact("annealed_Z_target", std::exp(0.5 * cfg.N * cfg.mixture.xi(1.0)), wall);
        }
        warnings = fe.warnings;
        break;
      }
      case SimulateMode::gg_stats: {
        const Disorder d = sample_disorder(cfg.mixture, cfg.N, derive_seed(cfg.seed, {0}));
        const Perturbation pert(cfg.perturbation, cfg.N);
        const auto chains = gibbs_chains(d, pert, cfg.gibbs, cfg.chains, derive_seed(cfg.seed, {1}));
        OverlapOptions oo;
        oo.eta = cfg.eta >= 0.0 ? cfg.eta : 3.0 / std::sqrt(static_cast<double>(cfg.N));
        oo.resamples = cfg.resamples;
        oo.seed = derive_seed(cfg.seed, {2});
        const auto report = overlap_statistics(chains, cfg.phi, oo);
        const double wall = seconds_since(t0);
        for (const auto& phi : report.phi) csv.row(phi_name(phi.spec), phi.signed_value, phi.std_error, wall);
        csv.row("overlap_mean", report.overlap_mean.value, report.overlap_mean.std_error, wall);
        csv.row("overlap_second_moment", report.overlap_second_moment.value, report.overlap_second_moment.std_error,
                wall);
        csv.row("ultrametric_violation_rate", report.ultrametric_violation.value,
                report.ultrametric_violation.std_error, wall);
        csv.exact("eta", oo.eta, wall);
        for (std::size_t c = 0; c < chains.size(); ++c) {
          csv.exact("acceptance_rate_chain" + std::to_string(c), chains[c].acceptance_rate, wall);
          if (!chains[c].warning.empty()) warnings.push_back("chain " + std::to_string(c) + ": " + chains[c].warning);
          if (cfg.dump_chains) {
            write_chain_dump(opts.out / ("chain_" + std::to_string(c) + ".bin"),
                             {chains[c].count(), static_cast<std::uint64_t>(chains[c].n), chains[c].samples});
          }
        }
        break;
      }
      case SimulateMode::ass_bracket: {
        const auto b = ass_bracket_estimate(cfg.mixture, cfg.M, cfg.N, cfg.ass, cfg.seed);
        const double wall = seconds_since(t0);
        csv.row("term_z", b.term_z, b.term_z_std_error, wall);
        csv.row("term_y", b.term_y, b.term_y_std_error, wall);
        csv.exact("ass_correction", b.correction, wall);
        csv.row("ass_lower_bound", b.bound, b.std_error, wall);
        warnings = b.warnings;
        break;
      }
      case SimulateMode::cavity_check: {
        const int total = cfg.M + cfg.N;
        const Disorder d = sample_disorder(cfg.mixture, total, derive_seed(cfg.seed, {0}));
        const auto rho = sample_sphere(total, cfg.configs, derive_seed(cfg.seed, {1}));
        double worst = 0.0;
        RunningMoments gamma_sq;
        for (int c = 0; c < cfg.configs; ++c) {
          const auto x = std::span<const double>(rho).subspan(static_cast<std::size_t>(c * total),
                                                               static_cast<std::size_t>(total));
          const auto t = cavity_decompose(d, cfg.M, x);
          double sum = t.h_mn + t.gamma, scale = std::abs(t.h_mn) + std::abs(t.gamma);
          for (int i = 0; i < cfg.M; ++i) {
            const double term = x[static_cast<std::size_t>(cfg.N + i)] * t.z[static_cast<std::size_t>(i)];
            sum += term;
            scale += std::abs(term);
          }
          worst = std::max(worst, std::abs(sum - t.full) / std::max({std::abs(t.full), scale, 1e-300}));
          gamma_sq.add(t.gamma * t.gamma);
        }
        const double wall = seconds_since(t0);
        csv.exact("max_relative_identity_error", worst, wall);
        const auto g = gamma_sq.mean_estimate();
        csv.row("gamma_sq_mean", g.value, g.std_error, wall);
        break;
      }
    }
    write_text(opts.out / "simulate.csv", csv.str());
    log << "simulate " << mode_name(cfg.mode) << ": wrote " << (opts.out / "simulate.csv").string() << "\n";
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    if (!warnings.empty() && opts.strict) return kExitHealth;
    return kExitOk;
  });
}

}  // namespace sphparisi
