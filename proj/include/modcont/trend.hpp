#pragma once

#include <functional>
#include <vector>

namespace modcont {

enum class RatioTrend { to_zero, bounded, to_infinity };

const char* to_string(RatioTrend t);

/// Asymptotic behaviour of a positive ratio q(r) as r → 0, read off the
/// log-log slope s = d log q / d log L with L = log(1/r), sampled at
/// L_max/8, L_max/4, L_max/2, L_max.
///
/// A ratio with a finite positive limit has q = c(1 + a/L + ...), so s
/// halves with every doubling of L. Powers of L keep s constant and powers
/// of r make it grow. The ratio is classified bounded when the last slope
/// has shrunk to at most 0.6 of the previous one (plus 0.01 absolute slack),
/// otherwise by the sign of the last slope.
struct TrendReport {
  RatioTrend trend = RatioTrend::bounded;
  std::vector<double> L;      // probe points, ascending
  std::vector<double> ratio;  // q at e^{-L}
  double prev_slope = 0.0;
  double last_slope = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  /// q strictly monotone over a 16-point probe of [L_max/8, L_max].
  bool monotone_decreasing = false;
  bool monotone_increasing = false;
};

TrendReport classify_ratio_trend(const std::function<double(double L)>& ratio_at_log,
                                 double L_max);

}  // namespace modcont
