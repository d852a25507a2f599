#pragma once

// Latency figures and statistics derived from frame timestamps.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsn/trace.hpp"

namespace tsn::prof {

enum class Figure { send_l, br1_l, br2_l, arr_l, e2e, e2e_nic };

inline constexpr std::array<Figure, 6> kAllFigures = {Figure::send_l, Figure::br1_l, Figure::br2_l,
                                                     Figure::arr_l,  Figure::e2e,   Figure::e2e_nic};

/// "sendL", "br1L", "br2L", "arrL", "e2e", "e2e_nic".
std::string to_string(Figure f);
Figure parse_figure(std::string_view name);

struct LatencyFigures {
  std::array<std::optional<TimeNs>, kAllFigures.size()> values{};

  const std::optional<TimeNs>& operator[](Figure f) const { return values[static_cast<std::size_t>(f)]; }
  std::optional<TimeNs>& operator[](Figure f) { return values[static_cast<std::size_t>(f)]; }
};

/// sendL = T2-T1, br1L = T3-T2, br2L = T4-T3, arrL = T5-T4, e2e = T5-T1,
/// e2e_nic = T4-T1. Figures whose points are missing are omitted. Throws
/// NonMonotonic if present timestamps are out of order.
LatencyFigures latencies(const TimestampRecord& r);

struct StatSummary {
  std::size_t count = 0;
  TimeNs min{0}, q1{0}, median{0}, q3{0}, max{0};
  TimeNs mean{0}, stddev{0};
  std::vector<TimeNs> outliers;

  TimeNs iqr() const { return q3 - q1; }
  TimeNs range() const { return max - min; }
};

/// Quartiles by linear interpolation between closest ranks (rounded to the
/// nearest ns); outliers lie outside [q1 - 1.5 IQR, q3 + 1.5 IQR]. Sample
/// standard deviation. Throws EmptySeries.
StatSummary summarize(std::span<const TimeNs> series);

struct Jitter {
  TimeNs range{0};
  TimeNs iqr{0};
  TimeNs stddev{0};
  bool insufficient_samples = false;
};

/// All zeros and flagged when fewer than two samples.
Jitter jitter(std::span<const TimeNs> series);

/// Collects one figure over a set of records, optionally for one stream.
std::vector<TimeNs> series_of(std::span<const TimestampRecord> records, Figure f,
                              std::optional<int> stream_id = std::nullopt);

struct CharacterizationReport {
  std::string profile;
  std::uint64_t seed = 0;
  std::size_t frames = 0;
  sim::ProbeConfig probes;
  std::map<Figure, StatSummary> figures;
  std::map<Figure, Jitter> jitter;
  /// Largest gap between a scheduled release and T1.
  TimeNs talker_error_bound{0};
  /// Spread of e2e_nic - br1L - br2L (the part not spent in bridges).
  TimeNs residual_range{0};
  std::optional<TimeNs> intrinsic_jitter;
  bool insufficient_samples = false;
  /// Closed-loop check of the measured br1L median against the injected model.
  TimeNs expected_br1l_median{0};
  bool calibration_ok = false;
  TraceSet trace;
};

inline constexpr std::size_t kMinCharacterizationFrames = 100;

/// talker error + sum of bridge-latency ranges + residual range, rounded up
/// to the next 100 us.
TimeNs intrinsic_jitter_bound(TimeNs talker_error, std::span<const TimeNs> bridge_ranges, TimeNs residual_range);

/// Applies intrinsic_jitter_bound to a characterization. Throws
/// InsufficientSamples below 100 frames or without bridge timestamps.
TimeNs estimate_intrinsic_jitter(const CharacterizationReport& report);

/// A frame's reserved window at one port, in absolute time.
struct AssignedWindow {
  TimeNs open{0};
  TimeNs close{0};
};

/// Window reserved for frame (stream, seq) at `port`, or nullopt when the
/// schedule holds none.
std::optional<AssignedWindow> assigned_window(const Schedule& s, const StreamSpec& stream, const PortId& port,
                                              std::int64_t seq);

struct PassThrough {
  int stream_id = 0;
  std::int64_t seq = 0;
  TimeNs open_offset{0};      // transmission start - window open
  TimeNs complete_offset{0};  // transmission finish - window open
  TimeNs width{0};
  bool within = false;        // 0 <= open_offset and complete_offset <= width
};

/// Per-frame pass-through offsets at `port`. Throws UnknownPort.
std::vector<PassThrough> pass_through(const TraceSet& traces, const Schedule& s, const PortId& port);

}  // namespace tsn::prof
