#include "sphparisi/rsb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sphparisi/error.hpp"

namespace sphparisi {

FunctionalOrderParameter FunctionalOrderParameter::replica_symmetric(double q1) {
  return {1, {0.0, 1.0}, {0.0, q1, 1.0}};
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << field << "[" << index << "]: " << constraint;
  return os.str();
}

std::optional<Violation> validate(const FunctionalOrderParameter& f) {
  if (f.k < 1) return Violation{"k", 0, "k must be >= 1"};
  const auto k = static_cast<std::size_t>(f.k);
  if (f.m.size() != k + 1) return Violation{"m", 0, "m must have k + 1 entries"};
  if (f.q.size() != k + 2) return Violation{"q", 0, "q must have k + 2 entries"};
  for (std::size_t i = 0; i < f.m.size(); ++i) {
    if (!std::isfinite(f.m[i])) return Violation{"m", static_cast<int>(i), "m must be finite"};
  }
  for (std::size_t i = 0; i < f.q.size(); ++i) {
    if (!std::isfinite(f.q[i])) return Violation{"q", static_cast<int>(i), "q must be finite"};
  }
  if (f.m.front() != 0.0) return Violation{"m", 0, "m_0 must equal 0"};
  for (std::size_t i = 1; i < f.m.size(); ++i) {
    if (f.m[i] < f.m[i - 1]) return Violation{"m", static_cast<int>(i), "m not nondecreasing"};
  }
  if (f.m.back() != 1.0) return Violation{"m", f.k, "m_k must equal 1"};
  if (f.q.front() != 0.0) return Violation{"q", 0, "q_0 must equal 0"};
  for (std::size_t i = 1; i < f.q.size(); ++i) {
    if (f.q[i] < f.q[i - 1]) return Violation{"q", static_cast<int>(i), "q not nondecreasing"};
  }
  if (f.q.back() != 1.0) return Violation{"q", f.k + 1, "q_{k+1} must equal 1"};
  return std::nullopt;
}

void require_valid(const FunctionalOrderParameter& f) {
  if (auto v = validate(f)) throw std::invalid_argument("invalid order parameter: " + v->describe());
}

double evaluate_cdf(const FunctionalOrderParameter& f, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("evaluate_cdf: t outside [0, 1]");
  if (t == 1.0) return 1.0;
  // largest l in [0, k] with q_l <= t; q_{k+1} = 1 > t bounds it
  int level = 0;
  for (int l = 0; l <= f.k; ++l) {
    if (f.q[static_cast<std::size_t>(l)] <= t) level = l;
  }
  return f.m[static_cast<std::size_t>(level)];
}

double l1_distance(const FunctionalOrderParameter& a, const FunctionalOrderParameter& b) {
  require_valid(a);
  require_valid(b);
  std::vector<double> cuts;
  cuts.reserve(a.q.size() + b.q.size());
  cuts.insert(cuts.end(), a.q.begin(), a.q.end());
  cuts.insert(cuts.end(), b.q.begin(), b.q.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double width = cuts[i + 1] - lo;
    // both step functions are constant on [lo, hi)
    total += width * std::abs(evaluate_cdf(a, lo) - evaluate_cdf(b, lo));
  }
  return total;
}

double hk_map(int k, double q) {
  if (k < 1) throw std::invalid_argument("hk_map: k must be >= 1");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("hk_map: q outside [0, 1]");
  if (q == 1.0) return 1.0;
  const double j = std::min(std::floor(q * (k + 1)), static_cast<double>(k));
  return j / k;
}

FunctionalOrderParameter discretize_hk(const FunctionalOrderParameter& f, int k) {
  require_valid(f);
  FunctionalOrderParameter out;
  out.m = {0.0};
  out.q = {0.0};
  for (int l = 1; l <= f.k; ++l) {
    const double q = hk_map(k, f.q[static_cast<std::size_t>(l)]);
    const double m = f.m[static_cast<std::size_t>(l)];
    if (out.m.size() > 1 && out.q.back() == q) {
      out.m.back() = std::max(out.m.back(), m);
    } else {
      out.q.push_back(q);
      out.m.push_back(m);
    }
  }
  out.q.push_back(1.0);
  out.k = static_cast<int>(out.m.size()) - 1;
  return out;
}

}  // namespace sphparisi
