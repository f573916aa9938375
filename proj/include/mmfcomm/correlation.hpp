#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>

#include "mmfcomm/error.hpp"

namespace mmfcomm {

// Sample Pearson correlation. Returns nullopt when either input is constant,
// since the coefficient is undefined there.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw GeometryError("pearson: length mismatch");
  if (x.size() < 2) throw GeometryError("pearson: need at least two samples");
  // exact check; a rounded mean would leave a tiny spurious variance
  auto constant = [](std::span<const double> v) {
    for (double e : v) if (e != v[0]) return false;
    return true;
  };
  if (constant(x) || constant(y)) return std::nullopt;
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::fmax(-1.0, std::fmin(1.0, r));
}

}  // namespace mmfcomm
