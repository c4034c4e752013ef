#include "sphparisi/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sphparisi {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, double step, int max_iter, double ftol,
                             double xtol) {
  const std::size_t n = x0.size();
  NelderMeadResult out;
  if (n == 0) {
    out.x = x0;
    out.value = f(x0);
    out.converged = true;
    return out;
  }

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> p2(n + 1);
    std::vector<double> v2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      p2[i] = std::move(pts[order[i]]);
      v2[i] = vals[order[i]];
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(pts[i][j] - pts[0][j]));
    }
    return d;
  };
  auto along = [&](const std::vector<double>& centroid, const std::vector<double>& worst, double t) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (worst[j] - centroid[j]);
    return x;
  };

  sort_simplex();
  int it = 0;
  for (; it < max_iter; ++it) {
    const double spread = vals[n] - vals[0];
    if (spread <= ftol && diameter() <= xtol) {
      out.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);
    }
    const auto xr = along(centroid, pts[n], -1.0);
    const double fr = f(xr);
    if (fr < vals[0]) {
      const auto xe = along(centroid, pts[n], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe;
        vals[n] = fe;
      } else {
        pts[n] = xr;
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      pts[n] = xr;
      vals[n] = fr;
    } else {
      const bool outside = fr < vals[n];
      const auto xc = along(centroid, pts[n], outside ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : vals[n])) {
        pts[n] = xc;
        vals[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
          vals[i] = f(pts[i]);
        }
      }
    }
    sort_simplex();
  }
  out.iterations = it;
  out.x = pts[0];
  out.value = vals[0];
  return out;
}

}  // namespace sphparisi
