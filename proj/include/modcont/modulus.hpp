#pragma once

// Empirical moduli of continuity of sampled fields and the semi-norms built
// on them.
//
// Pairs of lattice points are enumerated by offset d: for each d in a half
// space, max_x |f(x + d) − f(x)| is a single sweep over the lattice. Offsets
// are binned by |d|·h into bins of width h/2; a bin is represented by the
// largest |d|·h it contains, so the running maximum over bins equals the sup
// over |x − y| ≤ r exactly at every representative radius.

#include <functional>
#include <string>
#include <vector>

#include "modcont/field.hpp"
#include "modcont/oscillation.hpp"

namespace modcont {

/// Non-decreasing step curve: value at r is the sup over pairs at distance
/// at most r, known at the listed radii.
struct ModulusCurve {
  std::vector<double> radii;
  std::vector<double> values;

  std::size_t size() const { return radii.size(); }
  /// Value at the largest listed radius ≤ r (0 below the first radius).
  double at(double r) const;
  void check_monotone() const;
};

struct ModulusOptions {
  /// Maximum number of lattice steps along any axis.
  int offset_cap = 96;
};

struct RadiusWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// [4h, max_radius/2].
RadiusWindow default_window(double h, double max_radius);

ModulusCurve empirical_oscillation(const SampledField& field, double max_radius,
                                   ModulusOptions opt = {});

/// Same curve from every pair of lattice points. Quadratic cost; intended
/// as an oracle on small grids.
ModulusCurve all_pairs_oscillation(const SampledField& field, double max_radius);

struct SeminormReport {
  double seminorm = 0.0;
  ModulusCurve per_radius_ratio;
  double argmax_radius = 0.0;
};

using Gauge = std::function<double(double)>;

/// sup over window bins of curve(r)/gauge(r).
SeminormReport seminorm(const ModulusCurve& curve, const Gauge& gauge, RadiusWindow window);
SeminormReport seminorm(const ModulusCurve& curve, const OscillationSpec& spec,
                        RadiusWindow window);
SeminormReport seminorm(const SampledField& field, const OscillationSpec& spec,
                        RadiusWindow window, ModulusOptions opt = {});

/// max |f| + [f]_ω.
double norm(const SampledField& field, const OscillationSpec& spec, RadiusWindow window,
            ModulusOptions opt = {});

/// ∫₀ᴿ ω_f(r)/r dr split at the grid spacing. `resolved` is the trapezoid
/// rule over [h, R] on the bin radii. Below h the lattice carries no
/// information; `unresolved` is ω_f(h), the value the integral takes when
/// ω_f is linear on [0, h] as it is for the piecewise-linear interpolant.
struct DiniEstimate {
  double resolved = 0.0;
  double unresolved = 0.0;
  double total() const { return resolved + unresolved; }
};

DiniEstimate dini_of_curve(const ModulusCurve& curve, double h, double R);
DiniEstimate dini_seminorm(const SampledField& field, double R, ModulusOptions opt = {});

struct PointwiseOscillation {
  Index center{};
  ModulusCurve curve;
};

/// ω_f(x; r) = sup over lattice y with |x − y| ≤ r of |f(x) − f(y)|, on the
/// same bin radii as empirical_oscillation.
PointwiseOscillation pointwise_oscillation(const SampledField& field, const Index& center,
                                           double max_radius, ModulusOptions opt = {});

struct PointwiseDini {
  double value = 0.0;  // sup over lattice points of the resolved integral
  Index argmax{};
};

/// sup_x ∫ ω_f(x; r)/r dr with the same quadrature as dini_seminorm, so the
/// result never exceeds dini_seminorm(field, R).resolved.
PointwiseDini pointwise_dini_seminorm(const SampledField& field, double R,
                                      ModulusOptions opt = {});

/// log ω ≈ λ log r − α log log(1/r) + c by least squares.
struct FamilyFit {
  Family family = Family::holog;
  double lambda = 0.0;
  double alpha = 0.0;
  double constant = 0.0;
  double residual = 0.0;  // RMS in log ω
  bool degenerate = false;  // λ and α both indistinguishable from 0
};

FamilyFit fit_family(const ModulusCurve& curve);

/// Two-column CSV "radius,value".
void write_curve_csv(const ModulusCurve& curve, const std::string& path,
                     const std::string& value_name = "value");

}  // namespace modcont
