#pragma once

namespace modcont {

/// Radial bump ψ: 1 on [0, ρ/2], 0 on [ρ, ∞), and on the transition the
/// degree-9 smoothstep 1 − S(t), t = 2r/ρ − 1, whose first four derivatives
/// vanish at both ends (C⁴).
struct CutoffSpec {
  double rho = 1.0;

  explicit CutoffSpec(double rho_);

  double value(double r) const;
  double d1(double r) const;  // dψ/dr
  double d2(double r) const;  // d²ψ/dr²
};

}  // namespace modcont
