#include "modcont/cutoff.hpp"

#include <stdexcept>

namespace modcont {

namespace {

// S(t) = t⁵(126 − 420t + 540t² − 315t³ + 70t⁴) and its derivatives.
double S(double t) { return t * t * t * t * t * (126 + t * (-420 + t * (540 + t * (-315 + t * 70)))); }
double S1(double t) {
  // 630 t⁴ (1 − t)⁴
  const double u = t * (1 - t);
  return 630 * u * u * u * u;
}
double S2(double t) {
  const double u = t * (1 - t);
  return 2520 * u * u * u * (1 - 2 * t);
}

}  // namespace

CutoffSpec::CutoffSpec(double rho_) : rho(rho_) {
  if (!(rho > 0.0)) throw std::invalid_argument("CutoffSpec: rho must be positive");
}

double CutoffSpec::value(double r) const {
  if (r <= 0.5 * rho) return 1.0;
  if (r >= rho) return 0.0;
  return 1.0 - S(2 * r / rho - 1);
}

double CutoffSpec::d1(double r) const {
  if (r <= 0.5 * rho || r >= rho) return 0.0;
  return -S1(2 * r / rho - 1) * 2 / rho;
}

double CutoffSpec::d2(double r) const {
  if (r <= 0.5 * rho || r >= rho) return 0.0;
  return -S2(2 * r / rho - 1) * 4 / (rho * rho);
}

}  // namespace modcont
