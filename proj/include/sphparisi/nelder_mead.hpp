#pragma once

#include <functional>
#include <vector>

namespace sphparisi {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Unconstrained downhill simplex (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
// Stops when the spread of simplex values is <= ftol and its diameter is <= xtol.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, double step, int max_iter, double ftol,
                             double xtol);

}  // namespace sphparisi
