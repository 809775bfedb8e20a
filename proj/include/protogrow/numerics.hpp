#pragma once

#include <functional>

#include "protogrow/matrix.hpp"

namespace protogrow::la {

/// Central-difference gradient of f at x with step h.
Vector finite_diff(const std::function<double(const Vector&)>& f, const Vector& x, double h);

/// Central-difference scalar derivative.
double finite_diff_scalar(const std::function<double(double)>& f, double x, double h);

/// Spearman rank correlation; ties get average ranks.
double spearman(const Vector& xs, const Vector& ys);

}  // namespace protogrow::la
