#include "sphparisi/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sphparisi/error.hpp"
#include "sphparisi/nelder_mead.hpp"
#include "sphparisi/parisi.hpp"
#include "sphparisi/rng.hpp"

namespace sphparisi {

namespace {

double fold_unit(double y) {
  const double t = std::fmod(std::abs(y), 2.0);
  return t <= 1.0 ? t : 2.0 - t;
}

double stick(double prev, double u) { return std::min(1.0, prev + (1.0 - prev) * u); }

double unstick(double prev, double cur) {
  if (prev >= 1.0) return 0.0;
  return std::clamp((cur - prev) / (1.0 - prev), 0.0, 1.0);
}

double radical_inverse(unsigned base, unsigned index) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * (index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double safe_value(const Mixture& mix, const FunctionalOrderParameter& f) {
  try {
    return parisi_value(mix, f);
  } catch (const ConvergenceError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Lower value wins; exact ties go to the lexicographically smaller (q, m).
bool better(double va, const FunctionalOrderParameter& a, double vb, const FunctionalOrderParameter& b) {
  if (va != vb) return va < vb;
  if (a.q != b.q) return a.q < b.q;
  return a.m < b.m;
}

struct Candidate {
  FunctionalOrderParameter f;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
};

Candidate local_search(const Mixture& mix, int k, std::vector<double> start, const OptimizerOptions& opts) {
  auto objective = [&](const std::vector<double>& y) { return safe_value(mix, decode_order_parameter(k, y)); };
  auto first = nelder_mead(objective, start, 0.1, opts.max_iter, opts.simplex_ftol, opts.simplex_xtol);
  // polish from a fresh small simplex; guards against premature collapse
  auto second = nelder_mead(objective, first.x, 0.01, opts.max_iter, opts.simplex_ftol, opts.simplex_xtol);
  const auto& best = second.value <= first.value ? second : first;
  Candidate c;
  c.f = decode_order_parameter(k, best.x);
  c.value = safe_value(mix, c.f);
  c.converged = first.converged && second.converged;
  return c;
}

}  // namespace

FunctionalOrderParameter decode_order_parameter(int k, const std::vector<double>& coords) {
  if (k < 1) throw std::invalid_argument("decode_order_parameter: k must be >= 1");
  if (coords.size() != static_cast<std::size_t>(2 * k - 1)) {
    throw std::invalid_argument("decode_order_parameter: expected 2k - 1 coordinates");
  }
  FunctionalOrderParameter f;
  f.k = k;
  f.q.assign(static_cast<std::size_t>(k) + 2, 0.0);
  f.m.assign(static_cast<std::size_t>(k) + 1, 0.0);
  for (int l = 1; l <= k; ++l) {
    f.q[l] = stick(f.q[l - 1], fold_unit(coords[static_cast<std::size_t>(l - 1)]));
  }
  f.q[static_cast<std::size_t>(k) + 1] = 1.0;
  for (int l = 1; l < k; ++l) {
    f.m[l] = stick(f.m[l - 1], fold_unit(coords[static_cast<std::size_t>(k + l - 1)]));
  }
  f.m[static_cast<std::size_t>(k)] = 1.0;
  return f;
}

std::vector<double> encode_order_parameter(const FunctionalOrderParameter& f) {
  require_valid(f);
  std::vector<double> y;
  y.reserve(static_cast<std::size_t>(2 * f.k - 1));
  for (int l = 1; l <= f.k; ++l) y.push_back(unstick(f.q[l - 1], f.q[l]));
  for (int l = 1; l < f.k; ++l) y.push_back(unstick(f.m[l - 1], f.m[l]));
  return y;
}

FunctionalOrderParameter split_level(const FunctionalOrderParameter& f, int level) {
  require_valid(f);
  if (level < 1 || level > f.k) throw std::invalid_argument("split_level: level out of range");
  FunctionalOrderParameter g = f;
  const auto at = static_cast<std::size_t>(level);
  // new level l+1 sits at q_l with m_l; level l keeps an empty interval
  g.q.insert(g.q.begin() + static_cast<std::ptrdiff_t>(at) + 1, f.q[at]);
  g.m.insert(g.m.begin() + static_cast<std::ptrdiff_t>(at) + 1, f.m[at]);
  g.k = f.k + 1;
  return g;
}

KOptimum optimize_at_k(const Mixture& mix, int k, const OptimizerOptions& opts,
                       const std::vector<FunctionalOrderParameter>& warm_starts) {
  if (k < 1) throw std::invalid_argument("optimize_at_k: k must be >= 1");
  const int dim = 2 * k - 1;
  if (dim > static_cast<int>(std::size(kPrimes))) throw std::invalid_argument("optimize_at_k: k too large");

  std::vector<std::vector<double>> starts;
  for (const auto& w : warm_starts) {
    if (w.k != k) throw std::invalid_argument("optimize_at_k: warm start has wrong k");
    starts.push_back(encode_order_parameter(w));
  }
  Rng shift_rng(derive_seed(opts.seed, {static_cast<std::uint64_t>(k)}));
  std::vector<double> shift(static_cast<std::size_t>(dim));
  for (auto& s : shift) s = shift_rng.uniform();
  for (int r = 0; r < opts.restarts; ++r) {
    std::vector<double> y(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
      const double h = radical_inverse(kPrimes[j], static_cast<unsigned>(r + 1)) + shift[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(j)] = h - std::floor(h);
    }
    starts.push_back(std::move(y));
  }

  std::vector<Candidate> results(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(starts.size()); ++i) {
    results[static_cast<std::size_t>(i)] = local_search(mix, k, starts[static_cast<std::size_t>(i)], opts);
  }

  KOptimum out;
  out.value = std::numeric_limits<double>::infinity();
  out.converged = false;
  bool any = false;
  for (const auto& c : results) {
    if (!any || better(c.value, c.f, out.value, out.best)) {
      out.best = c.f;
      out.value = c.value;
      out.converged = c.converged;
      any = true;
    }
  }
  // warm starts are feasible points; never report worse than them
  for (const auto& w : warm_starts) {
    const double v = safe_value(mix, w);
    if (better(v, w, out.value, out.best)) {
      out.best = w;
      out.value = v;
    }
  }
  if (!std::isfinite(out.value)) throw ConvergenceError("optimize_at_k: no finite candidate");
  return out;
}

OptimizationResult optimize(const Mixture& mix, int k_max, const OptimizerOptions& opts) {
  if (k_max < 1) throw std::invalid_argument("optimize: k_max must be >= 1");
  OptimizationResult res;
  KOptimum cur = optimize_at_k(mix, 1, opts);
  res.best = cur.best;
  res.value = cur.value;
  res.converged = cur.converged;
  res.per_k_values.emplace_back(1, cur.value);
  res.restarts_used = opts.restarts;

  for (int k = 2; k <= k_max; ++k) {
    // probe every split with small moves of the new coordinates
    std::vector<FunctionalOrderParameter> warm;
    FunctionalOrderParameter best_probe;
    double best_probe_value = std::numeric_limits<double>::infinity();
    for (int l = 1; l <= cur.best.k; ++l) {
      const auto embedded = split_level(cur.best, l);
      warm.push_back(embedded);
      const auto base = encode_order_parameter(embedded);
      for (std::size_t j = 0; j < base.size(); ++j) {
        for (double eps : {0.05, -0.05}) {
          auto y = base;
          y[j] += eps;
          const auto cand = decode_order_parameter(k, y);
          const double v = safe_value(mix, cand);
          if (better(v, cand, best_probe_value, best_probe)) {
            best_probe_value = v;
            best_probe = cand;
          }
        }
      }
    }
    if (std::isfinite(best_probe_value)) warm.push_back(best_probe);

    KOptimum next = optimize_at_k(mix, k, opts, warm);
    res.restarts_used += opts.restarts + static_cast<int>(warm.size());
    res.converged = res.converged && next.converged;
    const double improvement = cur.value - next.value;
    res.per_k_values.emplace_back(k, next.value);
    if (next.value < res.value) {
      res.value = next.value;
      res.best = next.best;
    }
    cur = std::move(next);
    if (improvement < opts.tol) break;
  }
  return res;
}

}  // namespace sphparisi
