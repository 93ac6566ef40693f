#pragma once

// Shared scalar quadrature helpers (internal to the library).

#include <cmath>

#include "jspec/jacobi_core.hpp"

namespace jspec::detail {

inline const GaussRule& gauss16() {
  static const GaussRule r = gauss_legendre(16);
  return r;
}

/// Composite 16-point Gauss–Legendre on [a, b] with `panels` equal panels.
template <class F>
auto composite_gl(F&& f, double a, double b, int panels) -> decltype(f(a)) {
  const GaussRule& g = gauss16();
  const double h = (b - a) / panels;
  decltype(f(a)) acc{};
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) acc += 0.5 * h * g.weights[i] * f(lo + 0.5 * h * (g.nodes[i] + 1.0));
  }
  return acc;
}

/// ∫_0^b f by panels [b·10^{-k-1}, b·10^{-k}], k < levels; the remainder near 0 is dropped.
template <class F>
auto graded_to_zero(F&& f, double b, int levels = 18) -> decltype(f(b)) {
  decltype(f(b)) acc{};
  double hi = b;
  for (int k = 0; k < levels; ++k) {
    const double lo = 0.1 * hi;
    acc += composite_gl(f, lo, hi, 2);
    hi = lo;
  }
  return acc;
}

}  // namespace jspec::detail
