#ifndef BTQ_ASYMPTOTICS_HPP
#define BTQ_ASYMPTOTICS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace btq {

// One measured value of one experiment at one tensor power.
struct ExperimentRecord {
  std::string experiment;
  std::map<std::string, std::string> params;
  long p = 0;
  double value = 0.0;
};

// value ~ amplitude * p^{-rate}; residual is the max absolute log deviation
// over the points used.
struct RateFit {
  double amplitude = 0.0;
  double rate = 0.0;
  double residual = 0.0;
  long p_min = 0;
  long p_max = 0;
  bool dropped_smallest = false;
};

namespace detail {

struct LogFit {
  double slope = 0.0, intercept = 0.0, max_abs_res = 0.0;
};

inline LogFit log_least_squares(const std::vector<std::pair<long, double>>& pts) {
  const int n = static_cast<int>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [p, v] : pts) {
    double x = std::log(static_cast<double>(p)), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  LogFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  for (const auto& [p, v] : pts) {
    double x = std::log(static_cast<double>(p));
    f.max_abs_res = std::max(f.max_abs_res,
                             std::abs(std::log(v) - (f.intercept + f.slope * x)));
  }
  return f;
}

}  // namespace detail

// Log-log least squares with a preasymptotic guard: the smallest p is
// excluded when its deviation from the trend fitted to the remaining points
// exceeds 3x their own scatter (a leave-one-out outlier test, reported in
// dropped_smallest). Requires >= 4 positive values at distinct powers, and
// >= 5 for the guard to be allowed to drop one.
inline RateFit fit_power_law(const std::vector<ExperimentRecord>& records) {
  std::vector<std::pair<long, double>> pts;
  for (const auto& r : records) {
    if (!(r.value > 0.0)) throw std::invalid_argument("power-law fit needs positive values");
    pts.emplace_back(r.p, r.value);
  }
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].first == pts[i - 1].first)
      throw std::invalid_argument("duplicate p in power-law fit");
  if (pts.size() < 4) throw std::invalid_argument("power-law fit needs at least 4 points");

  bool dropped = false;
  if (pts.size() >= 5) {
    std::vector<std::pair<long, double>> rest(pts.begin() + 1, pts.end());
    detail::LogFit trend = detail::log_least_squares(rest);
    double x0 = std::log(static_cast<double>(pts[0].first));
    double dev = std::abs(std::log(pts[0].second) - (trend.intercept + trend.slope * x0));
    if (dev > 3.0 * trend.max_abs_res) {
      pts.erase(pts.begin());
      dropped = true;
    }
  }

  detail::LogFit f = detail::log_least_squares(pts);
  RateFit out;
  out.amplitude = std::exp(f.intercept);
  out.rate = -f.slope;
  out.residual = f.max_abs_res;
  out.p_min = pts.front().first;
  out.p_max = pts.back().first;
  out.dropped_smallest = dropped;
  return out;
}

// One elimination pass of the leading 1/p^order term on a doubling grid;
// returns the last (largest-p) refined value.
inline double richardson_extrapolate(const std::vector<ExperimentRecord>& records, int order) {
  if (order < 1) throw std::invalid_argument("order must be >= 1");
  std::vector<std::pair<long, double>> pts;
  for (const auto& r : records) pts.emplace_back(r.p, r.value);
  std::sort(pts.begin(), pts.end());
  if (static_cast<int>(pts.size()) < order + 2)
    throw std::invalid_argument("richardson extrapolation needs at least order+2 points");
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].first != 2 * pts[i - 1].first)
      throw std::invalid_argument("richardson extrapolation needs a doubling grid");
  const double w = std::pow(2.0, order);
  double last = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    last = (w * pts[i].second - pts[i - 1].second) / (w - 1.0);
  return last;
}

}  // namespace btq

#endif
