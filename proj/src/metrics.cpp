#include "dpm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/QR>
#include <fmt/format.h>

#include "dpm/error.hpp"

namespace dpm {

namespace {

struct Basis {
  int first;  // index of the first of four active control values
  double b[4];
  double db[4];  // derivative w.r.t. the normalised parameter
};

Basis basis_at(double t, double t0, double t1, int knots) {
  const int intervals = knots - 1;
  const double h = (t1 - t0) / intervals;
  const double s = (t - t0) / h;
  const int i = std::clamp(static_cast<int>(std::floor(s)), 0, intervals - 1);
  const double u = s - i;
  const double u2 = u * u, u3 = u2 * u;
  Basis out;
  out.first = i;
  out.b[0] = (1.0 - u) * (1.0 - u) * (1.0 - u) / 6.0;
  out.b[1] = (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0;
  out.b[2] = (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0;
  out.b[3] = u3 / 6.0;
  out.db[0] = -(1.0 - u) * (1.0 - u) / 2.0;
  out.db[1] = (9.0 * u2 - 12.0 * u) / 6.0;
  out.db[2] = (-9.0 * u2 + 6.0 * u + 3.0) / 6.0;
  out.db[3] = u2 / 2.0;
  return out;
}

}  // namespace

CubicBSpline::CubicBSpline(double t0, double t1, Eigen::VectorXd coefficients)
    : t0_(t0), t1_(t1), coefficients_(std::move(coefficients)) {
  if (!(t1 > t0)) throw InvalidArgument("spline range must be non-empty");
  if (coefficients_.size() < 6) throw InvalidArgument("spline needs at least 4 knots");
}

CubicBSpline CubicBSpline::fit(std::span<const double> t, std::span<const double> values,
                               double t0, double t1, int knot_count) {
  if (t.size() != values.size()) throw InvalidArgument("spline fit: size mismatch");
  if (knot_count < 4) throw InvalidArgument("spline fit: knot count must be >= 4");
  const int m = knot_count + 2;
  if (static_cast<int>(t.size()) < m) throw InvalidArgument("spline fit: too few samples");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t.size()), m);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(t.size()));
  for (std::size_t r = 0; r < t.size(); ++r) {
    const Basis b = basis_at(t[r], t0, t1, knot_count);
    for (int k = 0; k < 4; ++k) a(static_cast<Eigen::Index>(r), b.first + k) = b.b[k];
    rhs(static_cast<Eigen::Index>(r)) = values[r];
  }
  Eigen::VectorXd coeffs = a.colPivHouseholderQr().solve(rhs);
  return CubicBSpline(t0, t1, std::move(coeffs));
}

double CubicBSpline::operator()(double t) const {
  const Basis b = basis_at(t, t0_, t1_, knot_count());
  double v = 0.0;
  for (int k = 0; k < 4; ++k) v += b.b[k] * coefficients_(b.first + k);
  return v;
}

double CubicBSpline::derivative(double t) const {
  const Basis b = basis_at(t, t0_, t1_, knot_count());
  const double h = (t1_ - t0_) / (knot_count() - 1);
  double v = 0.0;
  for (int k = 0; k < 4; ++k) v += b.db[k] * coefficients_(b.first + k);
  return v / h;
}

Vec2 SplineFit::evaluate(std::size_t landmark, double t) const {
  return {x.at(landmark)(t), y.at(landmark)(t)};
}

Vec2 SplineFit::velocity(std::size_t landmark, double t) const {
  return {x.at(landmark).derivative(t), y.at(landmark).derivative(t)};
}

SplineFit fit_ideal_spline(std::span<const LandmarkSet> traces, int knot_count) {
  if (traces.size() < 8) {
    throw InvalidArgument(fmt::format("spline fit needs >= 8 samples, got {}", traces.size()));
  }
  const std::size_t landmarks = traces.front().size();
  for (const auto& s : traces) {
    if (s.size() != landmarks) throw InvalidArgument("spline fit: landmark count varies");
  }
  for (std::size_t k = 1; k < traces.size(); ++k) {
    if (!(traces[k].timestamp > traces[k - 1].timestamp)) {
      throw InvalidArgument("spline fit: timestamps must increase");
    }
  }
  SplineFit fit;
  fit.knot_count = knot_count > 0 ? knot_count
                                  : std::clamp(static_cast<int>(traces.size()) / 10, 4, 64);
  const double t0 = traces.front().timestamp;
  const double t1 = traces.back().timestamp;
  fit.sample_rate_hz = static_cast<double>(traces.size() - 1) / (t1 - t0);

  std::vector<double> t(traces.size()), vx(traces.size()), vy(traces.size());
  for (std::size_t k = 0; k < traces.size(); ++k) t[k] = traces[k].timestamp;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (std::size_t l = 0; l < landmarks; ++l) {
    for (std::size_t k = 0; k < traces.size(); ++k) {
      vx[k] = traces[k].points[l].x();
      vy[k] = traces[k].points[l].y();
    }
    fit.x.push_back(CubicBSpline::fit(t, vx, t0, t1, fit.knot_count));
    fit.y.push_back(CubicBSpline::fit(t, vy, t0, t1, fit.knot_count));
    for (std::size_t k = 0; k < traces.size(); ++k) {
      const double e = (fit.evaluate(l, t[k]) - traces[k].points[l]).norm();
      sum_sq += e * e;
      ++count;
      fit.max_residual_px = std::max(fit.max_residual_px, e);
    }
  }
  fit.rms_residual_px = std::sqrt(sum_sq / static_cast<double>(count));
  return fit;
}

double distance_to_curve(const SplineFit& fit, std::size_t landmark, const Vec2& point,
                         double hint_time, double window_s) {
  const double lo = std::max(fit.t0(), hint_time - window_s);
  const double hi = std::min(fit.t1(), hint_time + window_s);
  const double step = 1.0 / (10.0 * fit.sample_rate_hz);
  auto dist2 = [&](double t) { return (fit.evaluate(landmark, t) - point).squaredNorm(); };

  double best_t = std::clamp(hint_time, fit.t0(), fit.t1());
  double best = dist2(best_t);
  const int samples = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
  for (int k = 0; k <= samples; ++k) {
    const double t = std::min(hi, lo + k * step);
    const double d = dist2(t);
    if (d < best) {
      best = d;
      best_t = t;
    }
  }
  // Golden-section search on the bracket around the best sample.
  double a = std::max(fit.t0(), best_t - step);
  double b = std::min(fit.t1(), best_t + step);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = dist2(c), fd = dist2(d);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = dist2(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = dist2(d);
    }
  }
  best = std::min({best, fc, fd, dist2(0.5 * (a + b))});
  return std::sqrt(best);
}

double mask_iou(const Mask& a, const Mask& b) {
  if (!a.same_shape(b)) throw InvalidArgument("mask_iou: masks differ in size");
  const std::uint8_t* pa = a.pixels().data();
  const std::uint8_t* pb = b.pixels().data();
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const unsigned x = pa[i] != 0, y = pb[i] != 0;
    inter += x & y;
    uni += x | y;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<LandmarkSet> corrected_traces(std::span<const FrameLog> frames) {
  std::vector<LandmarkSet> out;
  for (const auto& f : frames) {
    bool finite = !f.corrected.empty();
    for (const auto& p : f.corrected) finite = finite && p.allFinite();
    if (!finite) continue;
    LandmarkSet s;
    s.points = f.corrected;
    s.timestamp = f.present_time;
    s.kind = LandmarkKind::kEstimated;
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

MetricsReport build_report(std::span<const FrameLog> frames, const SplineFit* ideal) {
  MetricsReport report;
  std::vector<double> means;
  double iou_sum = 0.0, fill_sum = 0.0;
  double iou_min = std::numeric_limits<double>::infinity();
  for (const auto& f : frames) {
    if (!std::isfinite(f.mean_error)) continue;
    FrameMetrics m;
    m.tick = f.tick;
    m.time = f.present_time;
    std::vector<double> errors(f.corrected.size());
    for (std::size_t i = 0; i < errors.size(); ++i) {
      errors[i] = ideal ? distance_to_curve(*ideal, i, f.corrected[i], f.present_time)
                        : f.errors[i];
    }
    double sum = 0.0;
    m.max_error = 0.0;
    for (double e : errors) {
      sum += e;
      m.max_error = std::max(m.max_error, e);
    }
    m.mean_error = sum / static_cast<double>(errors.size());
    m.median_error = median_of(errors);
    if (ideal) {
      const double t = std::clamp(f.present_time, ideal->t0(), ideal->t1());
      double v = 0.0;
      for (std::size_t i = 0; i < ideal->landmark_count(); ++i) v += std::abs(ideal->velocity(i, t).x());
      m.mean_abs_velocity_x = v / static_cast<double>(ideal->landmark_count());
    }
    if (std::isfinite(f.iou_final)) {
      report.summary.has_images = true;
      m.iou = f.iou_final;
      m.fill_ratio = f.fill_ratio;
      iou_sum += m.iou;
      fill_sum += m.fill_ratio;
      iou_min = std::min(iou_min, m.iou);
    }
    means.push_back(m.mean_error);
    report.frames.push_back(m);
  }
  RunSummary& s = report.summary;
  s.frames = report.frames.size();
  if (s.frames == 0) throw InvalidArgument("metrics: no frame has a finite error");
  double total = 0.0;
  for (double e : means) total += e;
  s.mean_error = total / static_cast<double>(s.frames);
  s.median_error = median_of(means);
  s.p95_error = quantile_of(means, 0.95);
  s.max_error = *std::max_element(means.begin(), means.end());
  if (s.has_images) {
    s.mean_iou = iou_sum / static_cast<double>(s.frames);
    s.min_iou = iou_min;
    s.mean_fill_ratio = fill_sum / static_cast<double>(s.frames);
  }
  return report;
}

void write_report_csv(const std::filesystem::path& path, const MetricsReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "tick,time,mean_error,median_error,max_error,mean_abs_velocity_x,iou,fill_ratio\n";
  for (const auto& m : report.frames) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},", m.tick, m.time, m.mean_error,
                       m.median_error, m.max_error, m.mean_abs_velocity_x);
    if (report.summary.has_images) {
      out << fmt::format("{:.17g},{:.17g}", m.iou, m.fill_ratio);
    } else {
      out << ",";
    }
    out << "\n";
  }
}

std::string summary_text(const RunSummary& s) {
  std::string out = fmt::format(
      "frames: {}\nmean_error_px: {:.6f}\nmedian_error_px: {:.6f}\np95_error_px: {:.6f}\n"
      "max_error_px: {:.6f}\n",
      s.frames, s.mean_error, s.median_error, s.p95_error, s.max_error);
  if (s.has_images) {
    out += fmt::format("mean_iou: {:.6f}\nmin_iou: {:.6f}\nmean_fill_ratio: {:.6f}\n", s.mean_iou,
                       s.min_iou, s.mean_fill_ratio);
  }
  return out;
}

}  // namespace dpm
