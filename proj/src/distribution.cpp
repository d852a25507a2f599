#include "tsn/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "tsn/errors.hpp"

namespace tsn::sim {

namespace {
// Standard normal 75th percentile.
constexpr double kZ75 = 0.6744897501960817;
}  // namespace

std::string to_string(DistributionKind k) {
  switch (k) {
    case DistributionKind::constant:
      return "constant";
    case DistributionKind::uniform:
      return "uniform";
    case DistributionKind::shifted_lognormal:
      return "shifted-lognormal";
  }
  return "?";
}

DistributionKind parse_distribution_kind(std::string_view name) {
  if (name == "constant") return DistributionKind::constant;
  if (name == "uniform") return DistributionKind::uniform;
  if (name == "shifted-lognormal") return DistributionKind::shifted_lognormal;
  throw ParseError("unknown distribution kind '" + std::string(name) + "'");
}

Distribution Distribution::constant(TimeNs value) {
  Distribution d;
  d.kind = DistributionKind::constant;
  d.median = value;
  return d;
}

Distribution Distribution::uniform(TimeNs median, TimeNs iqr) {
  Distribution d;
  d.kind = DistributionKind::uniform;
  d.median = median;
  d.iqr = iqr;
  return d;
}

Distribution Distribution::lognormal(TimeNs median, TimeNs iqr, double shape, TimeNs cap) {
  Distribution d;
  d.kind = DistributionKind::shifted_lognormal;
  d.median = median;
  d.iqr = iqr;
  d.shape = shape;
  d.cap = cap;
  return d;
}

Distribution Distribution::with_outliers(double prob, double scale) const {
  Distribution d = *this;
  d.outlier_prob = prob;
  d.outlier_scale = scale;
  return d;
}

void validate(const Distribution& d) {
  if (d.median < TimeNs{0}) throw InvalidArgument("distribution median must be >= 0");
  if (d.iqr < TimeNs{0}) throw InvalidArgument("distribution iqr must be >= 0");
  if (!(d.outlier_prob >= 0.0 && d.outlier_prob <= 1.0)) {
    throw InvalidArgument("distribution outlier_prob must be in [0, 1]");
  }
  if (!(d.outlier_scale >= 0.0)) throw InvalidArgument("distribution outlier_scale must be >= 0");
  if (d.cap < TimeNs{0}) throw InvalidArgument("distribution cap must be >= 0");
  if (d.kind == DistributionKind::shifted_lognormal && !(d.shape > 0.0)) {
    throw InvalidArgument("lognormal shape must be > 0");
  }
  if (d.kind == DistributionKind::uniform && d.iqr > d.median) {
    throw InvalidArgument("uniform distribution would reach below zero (iqr > median)");
  }
  if (d.cap > TimeNs{0} && d.cap < d.median) throw InvalidArgument("distribution cap below its median");
}

Variate draw_variate(Rng& rng) {
  Variate v;
  v.normal = rng.normal();
  v.uniform = rng.uniform();
  v.outlier = rng.uniform();
  return v;
}

LognormalFit fit_lognormal(const Distribution& d) {
  const double iqr = static_cast<double>(d.iqr.count());
  const double scale = iqr / (2.0 * std::sinh(kZ75 * d.shape));
  return {static_cast<double>(d.median.count()) - scale, scale};
}

double base_quantile_ns(const Distribution& d, double p, double z_p) {
  const double median = static_cast<double>(d.median.count());
  const double iqr = static_cast<double>(d.iqr.count());
  double x = median;
  switch (d.kind) {
    case DistributionKind::constant:
      return median;
    case DistributionKind::uniform:
      return median - iqr + 2.0 * iqr * p;
    case DistributionKind::shifted_lognormal: {
      const auto fit = fit_lognormal(d);
      x = std::max(0.0, fit.shift_ns + fit.scale_ns * std::exp(d.shape * z_p));
      if (d.cap > TimeNs{0}) x = std::min(x, static_cast<double>(d.cap.count()));
      return x;
    }
  }
  return x;
}

TimeNs transform(const Distribution& d, const Variate& v) {
  double x = 0.0;
  switch (d.kind) {
    case DistributionKind::constant:
      x = static_cast<double>(d.median.count());
      break;
    case DistributionKind::uniform:
      x = base_quantile_ns(d, v.uniform, 0.0);
      break;
    case DistributionKind::shifted_lognormal:
      x = base_quantile_ns(d, 0.5, v.normal);
      break;
  }
  if (v.outlier < d.outlier_prob) x *= d.outlier_scale;
  return TimeNs{std::llround(std::max(0.0, x))};
}

}  // namespace tsn::sim
