#pragma once

// Macdonald functions K0 and K1 for real positive argument.
// Series for x <= 2, Steed's continued fraction for 2 < x <= 25 and the
// asymptotic expansion beyond.

namespace layerspec::num {

/// K_order(x), order 0 or 1. Throws Error(domain) for x <= 0 or other orders.
/// Returns 0 where the value underflows (see bessel_k_underflows).
double bessel_k(int order, double x);

/// e^x K_order(x); finite for every x > 0.
double bessel_k_scaled(int order, double x);

struct BesselK01 {
  double k0 = 0.0;
  double k1 = 0.0;
};

/// Both scaled values in one evaluation.
BesselK01 bessel_k01_scaled(double x);

/// True when K_order(x) is below the smallest normal double.
bool bessel_k_underflows(int order, double x) noexcept;

}  // namespace layerspec::num
