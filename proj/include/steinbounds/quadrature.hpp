#pragma once

#include <functional>
#include <vector>

namespace steinbounds {

struct quad_result {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

struct quad_options {
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  int max_panels = 4000;
  // Initial panel boundaries (interior break points, e.g. at integrand kinks).
  std::vector<double> breaks{};
};

// Adaptive Gauss-Kronrod (G7,K15) on [a,b]. Throws convergence_error if the
// tolerance is unreachable within the panel budget.
quad_result integrate(const std::function<double(double)>& f, double a, double b,
                      const quad_options& opt = {});

}  // namespace steinbounds
