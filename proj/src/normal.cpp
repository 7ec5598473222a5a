#include "colep/normal.hpp"

#include <cmath>

#include "colep/types.hpp"

namespace colep {

namespace {
constexpr double kSaturation = 8.0;
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Pi = 2.5066282746310005024;

// Acklam's rational approximation for the probit function (|rel err| ~ 1e-9),
// refined below with Halley steps against the erfc-based CDF.
double probit_seed(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}
}  // namespace

double normal_cdf(double x) {
  if (std::isnan(x)) throw NumericError("normal_cdf: NaN argument");
  if (x <= -kSaturation) return 0.0;
  if (x >= kSaturation) return 1.0;
  return 0.5 * std::erfc(-x / kSqrt2);
}

double normal_quantile(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0)
    throw NumericError("normal_quantile: argument outside [0,1]");
  if (p <= 0.0) return -kSaturation;
  if (p >= 1.0) return kSaturation;

  double x = probit_seed(p);
  for (int it = 0; it < 2; ++it) {
    double e = 0.5 * std::erfc(-x / kSqrt2) - p;
    double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  if (x < -kSaturation) x = -kSaturation;
  if (x > kSaturation) x = kSaturation;
  return x;
}

}  // namespace colep
