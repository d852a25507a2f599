#pragma once

#include <string>
#include <string_view>

#include "tsn/rng.hpp"
#include "tsn/time.hpp"

namespace tsn::sim {

enum class DistributionKind { constant, uniform, shifted_lognormal };

std::string to_string(DistributionKind k);
DistributionKind parse_distribution_kind(std::string_view name);

/// A non-negative delay law described the way the measurements are reported:
/// by median and inter-quartile range.
///
/// - constant: always `median`.
/// - uniform: on [median - iqr, median + iqr] (whose IQR is `iqr`).
/// - shifted_lognormal: shift + scale * exp(shape * Z). `shape` is the log
///   standard deviation; scale and shift are fitted so the law's median and
///   IQR equal the configured ones. Samples are clamped at zero and, when
///   `cap` > 0, clipped at `cap`.
///
/// With probability `outlier_prob` a sample is multiplied by `outlier_scale`
/// (applied after clipping).
struct Distribution {
  DistributionKind kind = DistributionKind::constant;
  TimeNs median{0};
  TimeNs iqr{0};
  double shape = 0.5;
  TimeNs cap{0};
  double outlier_prob = 0.0;
  double outlier_scale = 1.0;

  static Distribution constant(TimeNs value);
  static Distribution uniform(TimeNs median, TimeNs iqr);
  static Distribution lognormal(TimeNs median, TimeNs iqr, double shape = 0.5, TimeNs cap = TimeNs{0});

  Distribution with_outliers(double prob, double scale) const;

  bool operator==(const Distribution&) const = default;
};

/// Throws InvalidArgument when an invariant is broken.
void validate(const Distribution& d);

/// The random inputs consumed by one draw. Every draw consumes exactly one
/// Variate regardless of the distribution kind, so switching kinds never
/// shifts a substream.
struct Variate {
  double normal = 0.0;
  double uniform = 0.0;
  double outlier = 1.0;
};

Variate draw_variate(Rng& rng);

/// Maps a variate through the law. Monotone in `normal` (and in `uniform`
/// for the uniform kind).
TimeNs transform(const Distribution& d, const Variate& v);

inline TimeNs sample(const Distribution& d, Rng& rng) { return transform(d, draw_variate(rng)); }

/// Base-law quantile at probability p in (0, 1), without outliers. Uses the
/// caller-provided standard normal quantile z_p for the lognormal kind.
double base_quantile_ns(const Distribution& d, double p, double z_p);

struct LognormalFit {
  double shift_ns;
  double scale_ns;
};

LognormalFit fit_lognormal(const Distribution& d);

}  // namespace tsn::sim
