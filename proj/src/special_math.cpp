#include "evcore/special_math.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "evcore/error.hpp"

namespace evcore {
namespace {

void require_positive(double x, const char* fn) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError(std::string(fn) + ": argument must be positive and finite, got " +
                      std::to_string(x));
  }
}

// Stirling series, accurate to ~1e-16 relative for z >= 10.
double stirling_ln_gamma(double z) {
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double series = 1.0 / 156.0;
  series = series * inv2 - 691.0 / 360360.0;
  series = series * inv2 + 1.0 / 1188.0;
  series = series * inv2 - 1.0 / 1680.0;
  series = series * inv2 + 1.0 / 1260.0;
  series = series * inv2 - 1.0 / 360.0;
  series = series * inv2 + 1.0 / 12.0;
  series *= inv;
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

}  // namespace

double ln_gamma(double x) {
  require_positive(x, "ln_gamma");
  if (x >= 10.0) return stirling_ln_gamma(x);
  // Shift up with Gamma(x) = Gamma(x + n) / (x (x+1) ... (x+n-1)).
  double product = 1.0;
  double z = x;
  while (z < 10.0) {
    product *= z;
    z += 1.0;
  }
  return stirling_ln_gamma(z) - std::log(product);
}

double digamma(double x) {
  require_positive(x, "digamma");
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // ln x - 1/(2x) - sum B_2k / (2k x^2k), six terms.
  double series = -1.0 / 132.0;
  series = series * inv2 + 1.0 / 240.0;
  series = series * inv2 - 1.0 / 252.0;
  series = series * inv2 + 1.0 / 120.0;
  series = series * inv2 - 1.0 / 12.0;
  series *= inv2;
  return shift + std::log(x) - 0.5 * inv + series;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  double shift = 0.0;
  while (x < 10.0) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 7.0 / 6.0;
  series = series * inv2 - 691.0 / 2730.0;
  series = series * inv2 + 5.0 / 66.0;
  series = series * inv2 - 1.0 / 30.0;
  series = series * inv2 + 1.0 / 42.0;
  series = series * inv2 - 1.0 / 30.0;
  series = series * inv2 + 1.0 / 6.0;
  series *= inv2 * inv;
  return shift + inv + 0.5 * inv2 + series;
}

}  // namespace evcore
