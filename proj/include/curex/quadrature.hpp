#pragma once

#include <functional>

#include "curex/errors.hpp"

namespace curex {

// Adaptive Simpson integration of f over [a, b] to the given absolute
// tolerance; throws QuadratureFailure when the refinement depth is exhausted.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tolerance, int max_depth = 60);

}  // namespace curex
