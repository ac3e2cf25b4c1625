#include "modcont/trend.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace modcont {

const char* to_string(RatioTrend t) {
  switch (t) {
    case RatioTrend::to_zero: return "to_zero";
    case RatioTrend::bounded: return "bounded";
    case RatioTrend::to_infinity: return "to_infinity";
  }
  return "?";
}

TrendReport classify_ratio_trend(const std::function<double(double)>& ratio_at_log,
                                 double L_max) {
  if (!(L_max > 0.0)) throw std::invalid_argument("classify_ratio_trend: L_max must be > 0");
  TrendReport rep;
  for (int j = 3; j >= 0; --j) {
    const double L = L_max / std::ldexp(1.0, j);
    const double q = ratio_at_log(L);
    if (!(q > 0.0) || !std::isfinite(q))
      throw std::domain_error("classify_ratio_trend: ratio must be finite and positive");
    rep.L.push_back(L);
    rep.ratio.push_back(q);
  }
  const double ln2 = std::log(2.0);
  auto slope = [&](int j) { return std::log(rep.ratio[j + 1] / rep.ratio[j]) / ln2; };
  rep.prev_slope = slope(1);
  rep.last_slope = slope(2);
  rep.min_ratio = *std::min_element(rep.ratio.begin(), rep.ratio.end());
  rep.max_ratio = *std::max_element(rep.ratio.begin(), rep.ratio.end());

  if (std::abs(rep.last_slope) <= 0.6 * std::abs(rep.prev_slope) + 0.01)
    rep.trend = RatioTrend::bounded;
  else
    rep.trend = rep.last_slope < 0.0 ? RatioTrend::to_zero : RatioTrend::to_infinity;

  constexpr int kDense = 16;
  bool dec = true, inc = true;
  double prev = ratio_at_log(L_max / 8.0);
  for (int k = 1; k < kDense; ++k) {
    const double L = L_max / 8.0 * std::pow(8.0, double(k) / (kDense - 1));
    const double q = ratio_at_log(L);
    dec = dec && q < prev;
    inc = inc && q > prev;
    prev = q;
  }
  rep.monotone_decreasing = dec;
  rep.monotone_increasing = inc;
  return rep;
}

}  // namespace modcont
