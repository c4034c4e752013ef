#include "sphparisi/simulator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "sphparisi/error.hpp"
#include "sphparisi/finite_m.hpp"
#include "sphparisi/numerics.hpp"
#include "sphparisi/rng.hpp"
#include "sphparisi/sphere.hpp"

namespace sphparisi {

namespace {

constexpr long kConfigBatch = 1024;
constexpr double kJitter = 1e-10;

std::size_t tensor_entries(int N, int p, std::size_t cap) {
  std::size_t e = 1;
  for (int i = 0; i < p; ++i) {
    if (e > cap / static_cast<std::size_t>(N)) return cap + 1;
    e *= static_cast<std::size_t>(N);
  }
  return e;
}

double clamp_overlap(double r) { return std::clamp(r, -1.0, 1.0); }

void check_tensor_guard(const Mixture& mix, int N, std::size_t guard) {
  std::size_t total = 0;
  for (const auto& t : mix.terms()) {
    const std::size_t e = tensor_entries(N, t.p, guard);
    total += e;
    if (e > guard || total > guard) {
      throw ResourceGuardError("disorder memory guard: N = " + std::to_string(N) + ", p = " + std::to_string(t.p) +
                               " needs more than " + std::to_string(guard) + " coupling entries");
    }
  }
}

}  // namespace

Disorder sample_disorder(const Mixture& mix, int N, std::uint64_t seed, std::size_t guard) {
  if (N < 1) throw DomainError("sample_disorder: N must be >= 1");
  check_tensor_guard(mix, N, guard);
  Disorder d{N, mix, seed, {}};
  for (const auto& t : mix.terms()) {
    CouplingTensor ct{t.p, t.beta, std::vector<double>(tensor_entries(N, t.p, guard))};
    const auto count = static_cast<std::ptrdiff_t>(ct.g.size());
    const auto stream = static_cast<std::uint64_t>(t.p);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      ct.g[static_cast<std::size_t>(i)] = counter_normal(seed, stream, static_cast<std::uint64_t>(i));
    }
    d.tensors.push_back(std::move(ct));
  }
  return d;
}

double hamiltonian(const Disorder& d, std::span<const double> sigma, int scaling_total) {
  if (sigma.size() != static_cast<std::size_t>(d.n)) {
    throw DomainError("hamiltonian: configuration has " + std::to_string(sigma.size()) + " entries, disorder has " +
                      std::to_string(d.n));
  }
  if (scaling_total < d.n) throw DomainError("hamiltonian: scaling_total must be >= N");
  CompensatedSum norm;
  for (double v : sigma) norm.add(v * v);
  if (std::abs(norm.value() - d.n) > 1e-8 * d.n) throw DomainError("hamiltonian: ||sigma||^2 differs from N");
  double out = 0.0;
  kernels::serial::batch_energy(d.tensors, d.n, scaling_total, sigma, std::span<double>(&out, 1));
  return out;
}

PerturbationSpec PerturbationSpec::uniform(int p_max, double value, std::uint64_t seed) {
  return {std::vector<double>(static_cast<std::size_t>(std::max(0, p_max)), value), true, seed};
}

void PerturbationSpec::validate() const {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 1.0 && u[i] <= 2.0)) {
      throw DomainError("perturbation: u_" + std::to_string(i + 1) + " must lie in [1, 2]");
    }
  }
}

Perturbation::Perturbation(const PerturbationSpec& spec, int N, PerturbationVariant variant, int M,
                           std::size_t guard) {
  spec.validate();
  if (!spec.enabled || spec.u.empty()) return;
  if (M < 0) throw DomainError("perturbation: M must be >= 0");
  std::vector<MixtureTerm> terms;
  for (std::size_t i = 0; i < spec.u.size(); ++i) {
    const int p = static_cast<int>(i) + 1;
    terms.push_back({p, spec.u[i] / std::ldexp(1.0, p)});
  }
  enabled_ = true;
  couplings_ = sample_disorder(Mixture(std::move(terms)), N, spec.seed, guard);
  scaling_total_ = variant == PerturbationVariant::plain ? N : M + N;
  scale_ = std::pow(static_cast<double>(scaling_total_), -0.125);
}

double Perturbation::energy(std::span<const double> sigma) const {
  if (!enabled_) return 0.0;
  return scale_ * hamiltonian(couplings_, sigma, scaling_total_);
}

FreeEnergyEstimate free_energy_mc(const Mixture& mix, int N, long n_config, int n_disorder, std::uint64_t seed,
                                  int scaling_total) {
  if (N < 1 || n_config < 1 || n_disorder < 1) {
    throw std::invalid_argument("free_energy_mc: N, n_config and n_disorder must be >= 1");
  }
  const int scaling = scaling_total == 0 ? N : scaling_total;
  FreeEnergyEstimate out;
  out.caveat = "E log Zhat <= log E Z: the estimate is biased downward when exp H is heavy-tailed under lambda_N";
  out.log_z.assign(static_cast<std::size_t>(n_disorder), 0.0);
  std::vector<double> z_hat(static_cast<std::size_t>(n_disorder), 1.0);
  std::vector<double> ess(static_cast<std::size_t>(n_disorder), static_cast<double>(n_config));
  // worker threads must not throw
  check_tensor_guard(mix, N, kDefaultTensorGuard);

  if (mix.xi(1.0) > 0.0) {
    const auto n = static_cast<std::size_t>(N);
#pragma omp parallel for schedule(dynamic)
    for (int di = 0; di < n_disorder; ++di) {
      const auto du = static_cast<std::uint64_t>(di);
      const Disorder d = sample_disorder(mix, N, derive_seed(seed, {0, du}));
      Rng rng(derive_seed(seed, {1, du}));
      std::vector<double> configs, energies;
      StreamingLogSumExp lse;
      for (long done = 0; done < n_config;) {
        const long batch = std::min(kConfigBatch, n_config - done);
        configs.resize(static_cast<std::size_t>(batch) * n);
        energies.resize(static_cast<std::size_t>(batch));
        for (long c = 0; c < batch; ++c) {
          auto row = std::span<double>(configs).subspan(static_cast<std::size_t>(c) * n, n);
          for (double& v : row) v = rng.normal();
          project_to_sphere(row);
        }
        kernels::serial::batch_energy(d.tensors, N, scaling, configs, energies);
        for (double e : energies) lse.add(e);
        done += batch;
      }
      const double log_mean = lse.value() - std::log(static_cast<double>(n_config));
      out.log_z[static_cast<std::size_t>(di)] = log_mean / N;
      z_hat[static_cast<std::size_t>(di)] = std::exp(log_mean);
      ess[static_cast<std::size_t>(di)] = lse.effective_sample_size();
    }
  }

  const auto q = mean_estimate(out.log_z);
  out.value = q.value;
  out.std_error = block_bootstrap_error(out.log_z, 1, 1, 500, derive_seed(seed, {2}),
                                        [](std::span<const double> v) { return mean_estimate(v).value; });
  const auto a = mean_estimate(z_hat);
  out.annealed = a.value;
  out.annealed_std_error = a.std_error;
  out.min_effective_samples = *std::min_element(ess.begin(), ess.end());
  if (out.min_effective_samples < 100.0) {
    out.warnings.push_back("effective sample size of the exp-weights fell to " +
                           std::to_string(out.min_effective_samples) + " (< 100)");
  }
  return out;
}

GibbsChain gibbs_mcmc(const Disorder& d, const Perturbation& pert, const GibbsOptions& opts, std::uint64_t seed) {
  if (opts.steps < 1 || opts.burn_in < 0 || opts.thin < 1 || opts.window < 1 || !(opts.initial_step > 0.0)) {
    throw std::invalid_argument("gibbs_mcmc: steps, thin, window and initial_step must be positive");
  }
  const int scaling = opts.scaling_total == 0 ? d.n : opts.scaling_total;
  const auto n = static_cast<std::size_t>(d.n);
  GibbsChain chain;
  chain.n = d.n;
  chain.seed = seed;
  Rng rng(seed);
  std::vector<double> sigma(n), proposal(n);
  for (double& v : sigma) v = rng.normal();
  project_to_sphere(sigma);
  auto energy = [&](std::span<const double> x) { return hamiltonian(d, x, scaling) + pert.energy(x); };
  double e = energy(sigma);
  double step = opts.initial_step;
  long window_accepts = 0, measured_accepts = 0;
  const long total = opts.burn_in + opts.steps;
  for (long t = 0; t < total; ++t) {
    for (std::size_t i = 0; i < n; ++i) proposal[i] = sigma[i] + step * rng.normal();
    project_to_sphere(proposal);
    const double e_new = energy(proposal);
    if (std::log(rng.uniform()) < e_new - e) {
      sigma.swap(proposal);
      e = e_new;
      ++window_accepts;
      if (t >= opts.burn_in) ++measured_accepts;
    }
    if ((t + 1) % opts.window == 0) {
      const double rate = static_cast<double>(window_accepts) / static_cast<double>(opts.window);
      chain.window_acceptance.push_back(rate);
      chain.step_trace.push_back(step);
      window_accepts = 0;
      if (t < opts.burn_in && (rate < 0.3 || rate > 0.5)) step = std::clamp(step * std::exp(2.0 * (rate - 0.4)), 1e-4, 10.0);
    }
    if (t >= opts.burn_in && (t - opts.burn_in + 1) % opts.thin == 0) {
      chain.samples.insert(chain.samples.end(), sigma.begin(), sigma.end());
      chain.energies.push_back(e);
    }
  }
  chain.step_size = step;
  chain.acceptance_rate = static_cast<double>(measured_accepts) / static_cast<double>(opts.steps);
  if (chain.acceptance_rate < 0.15 || chain.acceptance_rate > 0.7) {
    std::ostringstream msg;
    msg << "acceptance rate " << chain.acceptance_rate << " outside [0.15, 0.7]";
    chain.warning = msg.str();
  }
  return chain;
}

std::vector<GibbsChain> gibbs_chains(const Disorder& d, const Perturbation& pert, const GibbsOptions& opts,
                                     int count, std::uint64_t seed) {
  std::vector<GibbsChain> chains(static_cast<std::size_t>(std::max(0, count)));
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < count; ++c) {
    chains[static_cast<std::size_t>(c)] = gibbs_mcmc(d, pert, opts, derive_seed(seed, {static_cast<std::uint64_t>(c)}));
  }
  return chains;
}

double overlap(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw DomainError("overlap: configurations differ in length");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value() / static_cast<double>(a.size());
}

StatReport overlap_statistics(std::span<const GibbsChain> chains, std::span<const PhiSpec> specs,
                              const OverlapOptions& opts) {
  int replicas = 3;
  for (const auto& s : specs) {
    if (s.n < 2 || s.p < 1) throw std::invalid_argument("overlap_statistics: need n >= 2 and p >= 1");
    for (const auto& f : s.monomial) {
      if (f.first < 1 || f.second < 1 || f.first > s.n || f.second > s.n || f.first == f.second || f.power < 0) {
        throw std::invalid_argument("overlap_statistics: monomial factor outside R_{l,l'}, l != l' <= n");
      }
    }
    replicas = std::max(replicas, s.n + 1);
  }
  const auto C = static_cast<int>(chains.size());
  if (C < replicas) {
    throw InsufficientReplicasError("overlap_statistics: " + std::to_string(replicas) + " independent chains needed, " +
                                    std::to_string(C) + " given");
  }
  std::size_t T = chains[0].count();
  for (const auto& c : chains) {
    if (c.n != chains[0].n) throw std::invalid_argument("overlap_statistics: chains differ in N");
    T = std::min(T, c.count());
  }
  if (T < 2) throw InsufficientReplicasError("overlap_statistics: chains hold fewer than two samples");

  // per tuple: 4 columns per spec, then R_12, R_12^2, violation indicator
  const std::size_t width = 4 * specs.size() + 3;
  std::vector<double> rows;
  rows.reserve(T * static_cast<std::size_t>(C) * width);
  const auto R = static_cast<std::size_t>(replicas);
  std::vector<double> ov(R * R, 1.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (int s = 0; s < C; ++s) {
      for (std::size_t a = 0; a < R; ++a) {
        for (std::size_t b = a + 1; b < R; ++b) {
          const auto& ca = chains[static_cast<std::size_t>((s + static_cast<int>(a)) % C)];
          const auto& cb = chains[static_cast<std::size_t>((s + static_cast<int>(b)) % C)];
          ov[a * R + b] = ov[b * R + a] = overlap(ca.sample(t), cb.sample(t));
        }
      }
      auto r = [&](int a, int b) { return ov[static_cast<std::size_t>(a - 1) * R + static_cast<std::size_t>(b - 1)]; };
      for (const auto& spec : specs) {
        double f = 1.0;
        for (const auto& fac : spec.monomial) f *= std::pow(r(fac.first, fac.second), fac.power);
        double tail = 0.0;
        for (int l = 2; l <= spec.n; ++l) tail += f * std::pow(r(1, l), spec.p);
        rows.push_back(f * std::pow(r(1, spec.n + 1), spec.p));
        rows.push_back(f);
        rows.push_back(std::pow(r(1, 2), spec.p));
        rows.push_back(tail);
      }
      rows.push_back(r(1, 2));
      rows.push_back(r(1, 2) * r(1, 2));
      rows.push_back(r(1, 2) < std::min(r(1, 3), r(2, 3)) - opts.eta ? 1.0 : 0.0);
    }
  }

  const std::size_t nrows = rows.size() / width;
  auto column_mean = [width](std::span<const double> data, std::size_t col) {
    CompensatedSum s;
    const std::size_t count = data.size() / width;
    for (std::size_t i = 0; i < count; ++i) s.add(data[i * width + col]);
    return s.value() / static_cast<double>(count);
  };
  const std::size_t block_t =
      opts.block > 0 ? opts.block : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(T))));
  const std::size_t block = block_t * static_cast<std::size_t>(C);
  std::uint64_t stream = 0;
  auto with_error = [&](const std::function<double(std::span<const double>)>& stat) {
    return Estimate{stat(rows), block_bootstrap_error(rows, width, block, opts.resamples,
                                                      derive_seed(opts.seed, {stream++}), stat)};
  };

  StatReport report;
  report.tuples = nrows;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const double inv_n = 1.0 / specs[k].n;
    const auto est = with_error([&, k, inv_n](std::span<const double> data) {
      return column_mean(data, 4 * k) - inv_n * column_mean(data, 4 * k + 1) * column_mean(data, 4 * k + 2) -
             inv_n * column_mean(data, 4 * k + 3);
    });
    report.phi.push_back({specs[k], est.value, std::abs(est.value), est.std_error});
  }
  const std::size_t base = 4 * specs.size();
  report.overlap_mean = with_error([&](std::span<const double> d) { return column_mean(d, base); });
  report.overlap_second_moment = with_error([&](std::span<const double> d) { return column_mean(d, base + 1); });
  report.ultrametric_violation = with_error([&](std::span<const double> d) { return column_mean(d, base + 2); });
  return report;
}

CavityTerms cavity_decompose(const Disorder& d_full, int M, std::span<const double> rho) {
  if (M < 1 || M >= d_full.n) throw DomainError("cavity_decompose: need 1 <= M < number of sites");
  const int total = d_full.n, N = total - M;
  CavityTerms out;
  out.full = hamiltonian(d_full, rho, total);  // also validates rho
  out.z.assign(static_cast<std::size_t>(M), 0.0);
  for (const auto& t : d_full.tensors) {
    if (t.p >= 5) {
      throw ResourceGuardError("cavity_decompose: tuple classification for p = " + std::to_string(t.p) +
                               " is O(N^p); limited to p <= 4");
    }
  }
  CompensatedSum h, gamma;
  std::vector<CompensatedSum> z(static_cast<std::size_t>(M));
  std::vector<int> digit;
  for (const auto& t : d_full.tensors) {
    const double pref = t.beta * std::pow(static_cast<double>(total), -0.5 * (t.p - 1));
    digit.assign(static_cast<std::size_t>(t.p), 0);
    for (std::size_t idx = 0; idx < t.g.size(); ++idx) {
      int cavity = 0, which = -1;
      double sigma_part = 1.0, eps_part = 1.0;
      for (int dgt : digit) {
        if (dgt >= N) {
          ++cavity;
          which = dgt - N;
          eps_part *= rho[static_cast<std::size_t>(dgt)];
        } else {
          sigma_part *= rho[static_cast<std::size_t>(dgt)];
        }
      }
      const double c = pref * t.g[idx];
      if (cavity == 0) {
        h.add(c * sigma_part);
      } else if (cavity == 1) {
        z[static_cast<std::size_t>(which)].add(c * sigma_part);
      } else {
        gamma.add(c * sigma_part * eps_part);
      }
      // odometer, last index fastest
      for (int pos = t.p - 1; pos >= 0; --pos) {
        if (++digit[static_cast<std::size_t>(pos)] < total) break;
        digit[static_cast<std::size_t>(pos)] = 0;
      }
    }
  }
  out.h_mn = h.value();
  for (std::size_t i = 0; i < z.size(); ++i) out.z[i] = z[i].value();
  out.gamma = gamma.value();
  return out;
}

namespace {

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& cov, const char* name) {
  Eigen::MatrixXd jittered = cov;
  jittered.diagonal().array() += kJitter;
  Eigen::LLT<Eigen::MatrixXd> llt(jittered);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    std::ostringstream msg;
    msg << "ass_bracket_estimate: " << name << " covariance is not positive definite (eigenvalues "
        << ev.minCoeff() << " .. " << ev.maxCoeff() << ", condition number "
        << std::abs(ev.maxCoeff()) / std::max(std::abs(ev.minCoeff()), 1e-300) << ")";
    throw ConvergenceError(msg.str());
  }
  return llt.matrixL();
}

}  // namespace

AssBracket ass_bracket_estimate(const Mixture& mix, int M, int N, const AssOptions& opts, std::uint64_t seed) {
  if (M < 1 || N < 1) throw DomainError("ass_bracket_estimate: M and N must be >= 1");
  if (opts.n_disorder < 1 || opts.n_gauss < 1 || opts.n_rep < 1) {
    throw std::invalid_argument("ass_bracket_estimate: n_disorder, n_gauss and n_rep must be >= 1");
  }
  AssBracket out;
  out.correction = ass_correction({M, opts.delta}, mix);
  if (mix.xi_prime(1.0) == 0.0) {
    out.bound = out.correction;
    return out;
  }
  const auto reps = static_cast<std::size_t>(opts.n_rep);
  const double root_m = std::sqrt(static_cast<double>(M));
  RunningMoments combined, zs, ys;
  for (int di = 0; di < opts.n_disorder; ++di) {
    const auto du = static_cast<std::uint64_t>(di);
    const Disorder d = sample_disorder(mix, N, derive_seed(seed, {0, du}));
    PerturbationSpec ps = opts.perturbation;
    ps.seed = derive_seed(opts.perturbation.seed, {du});
    const Perturbation pert(ps, N, PerturbationVariant::cavity, M);
    GibbsOptions g = opts.gibbs;
    g.scaling_total = M + N;
    g.steps = static_cast<long>(opts.n_rep) * g.thin;
    const auto chain = gibbs_mcmc(d, pert, g, derive_seed(seed, {1, du}));
    if (!chain.warning.empty()) out.warnings.push_back("disorder " + std::to_string(di) + ": " + chain.warning);

    Eigen::MatrixXd cz(reps, reps), cy(reps, reps);
    for (std::size_t a = 0; a < reps; ++a) {
      for (std::size_t b = a; b < reps; ++b) {
        const double r = clamp_overlap(overlap(chain.sample(a), chain.sample(b)));
        cz(a, b) = cz(b, a) = mix.xi_prime(r);
        cy(a, b) = cy(b, a) = mix.theta(r);
      }
    }
    const Eigen::MatrixXd lz = cholesky_factor(cz, "xi'(R)");
    const Eigen::MatrixXd ly = cholesky_factor(cy, "theta(R)");

    std::vector<double> tz(static_cast<std::size_t>(opts.n_gauss)), ty(tz.size());
#pragma omp parallel for schedule(dynamic)
    for (int gi = 0; gi < opts.n_gauss; ++gi) {
      Rng rng(derive_seed(seed, {2, du, static_cast<std::uint64_t>(gi)}));
      Eigen::VectorXd w(static_cast<Eigen::Index>(reps)), norm_sq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(reps));
      for (int i = 0; i < M; ++i) {
        for (auto& v : w) v = rng.normal();
        norm_sq += (lz * w).cwiseAbs2();
      }
      for (auto& v : w) v = rng.normal();
      const Eigen::VectorXd y = ly * w;
      std::vector<double> lam(reps), yy(reps);
      for (std::size_t a = 0; a < reps; ++a) {
        lam[a] = spherical_logmgf(M, std::sqrt(norm_sq(static_cast<Eigen::Index>(a))));
        yy[a] = root_m * y(static_cast<Eigen::Index>(a));
      }
      const double log_reps = std::log(static_cast<double>(reps));
      tz[static_cast<std::size_t>(gi)] = log_sum_exp(lam) - log_reps;
      ty[static_cast<std::size_t>(gi)] = log_sum_exp(yy) - log_reps;
    }
    const double mz = mean_estimate(tz).value, my = mean_estimate(ty).value;
    zs.add(mz);
    ys.add(my);
    combined.add((mz - my) / M);
  }
  out.term_z = zs.mean();
  out.term_y = ys.mean();
  out.term_z_std_error = zs.mean_estimate().std_error;
  out.term_y_std_error = ys.mean_estimate().std_error;
  out.std_error = combined.mean_estimate().std_error;
  out.bound = combined.mean() + out.correction;
  return out;
}

}  // namespace sphparisi
