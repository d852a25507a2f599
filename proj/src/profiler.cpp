#include "tsn/profiler.hpp"

#include <algorithm>
#include <cmath>

#include "tsn/errors.hpp"

namespace tsn::prof {

using sim::ProbePoint;

std::string to_string(Figure f) {
  switch (f) {
    case Figure::send_l:
      return "sendL";
    case Figure::br1_l:
      return "br1L";
    case Figure::br2_l:
      return "br2L";
    case Figure::arr_l:
      return "arrL";
    case Figure::e2e:
      return "e2e";
    case Figure::e2e_nic:
      return "e2e_nic";
  }
  return "?";
}

Figure parse_figure(std::string_view name) {
  for (auto f : kAllFigures) {
    if (to_string(f) == name) return f;
  }
  throw ParseError("unknown latency figure '" + std::string(name) + "'");
}

LatencyFigures latencies(const TimestampRecord& r) {
  // Present points must be non-decreasing in T order.
  std::optional<TimeNs> last;
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    if (!r.t[i]) continue;
    if (last && *r.t[i] < *last) {
      throw NonMonotonic("stream " + std::to_string(r.stream_id) + " seq " + std::to_string(r.seq) +
                         ": T" + std::to_string(i + 1) + " precedes an earlier timestamp");
    }
    last = r.t[i];
  }
  LatencyFigures out;
  auto diff = [&](ProbePoint later, ProbePoint earlier) -> std::optional<TimeNs> {
    if (r.at(later) && r.at(earlier)) return *r.at(later) - *r.at(earlier);
    return std::nullopt;
  };
  out[Figure::send_l] = diff(ProbePoint::t2, ProbePoint::t1);
  out[Figure::br1_l] = diff(ProbePoint::t3, ProbePoint::t2);
  out[Figure::br2_l] = diff(ProbePoint::t4, ProbePoint::t3);
  out[Figure::arr_l] = diff(ProbePoint::t5, ProbePoint::t4);
  out[Figure::e2e] = diff(ProbePoint::t5, ProbePoint::t1);
  out[Figure::e2e_nic] = diff(ProbePoint::t4, ProbePoint::t1);
  return out;
}

namespace {

double quantile_sorted(const std::vector<std::int64_t>& xs, double p) {
  const double h = p * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= xs.size()) return static_cast<double>(xs.back());
  const double frac = h - static_cast<double>(lo);
  return static_cast<double>(xs[lo]) + frac * static_cast<double>(xs[lo + 1] - xs[lo]);
}

TimeNs round_ns(double v) { return TimeNs{std::llround(v)}; }

}  // namespace

StatSummary summarize(std::span<const TimeNs> series) {
  if (series.empty()) throw EmptySeries("cannot summarize an empty series");
  std::vector<std::int64_t> xs;
  xs.reserve(series.size());
  for (auto t : series) xs.push_back(t.count());
  std::sort(xs.begin(), xs.end());

  StatSummary s;
  s.count = xs.size();
  s.min = TimeNs{xs.front()};
  s.max = TimeNs{xs.back()};
  s.q1 = round_ns(quantile_sorted(xs, 0.25));
  s.median = round_ns(quantile_sorted(xs, 0.5));
  s.q3 = round_ns(quantile_sorted(xs, 0.75));

  long double sum = 0;
  for (auto x : xs) sum += x;
  const long double mean = sum / static_cast<long double>(xs.size());
  s.mean = TimeNs{std::llround(static_cast<double>(mean))};
  if (xs.size() > 1) {
    long double sq = 0;
    for (auto x : xs) sq += (x - mean) * (x - mean);
    s.stddev = round_ns(std::sqrt(static_cast<double>(sq / static_cast<long double>(xs.size() - 1))));
  }

  const double iqr = static_cast<double>((s.q3 - s.q1).count());
  const double lo_fence = static_cast<double>(s.q1.count()) - 1.5 * iqr;
  const double hi_fence = static_cast<double>(s.q3.count()) + 1.5 * iqr;
  for (auto x : xs) {
    if (static_cast<double>(x) < lo_fence || static_cast<double>(x) > hi_fence) s.outliers.push_back(TimeNs{x});
  }
  return s;
}

Jitter jitter(std::span<const TimeNs> series) {
  Jitter j;
  if (series.size() < 2) {
    j.insufficient_samples = true;
    return j;
  }
  const auto s = summarize(series);
  j.range = s.range();
  j.iqr = s.iqr();
  j.stddev = s.stddev;
  return j;
}

std::vector<TimeNs> series_of(std::span<const TimestampRecord> records, Figure f, std::optional<int> stream_id) {
  std::vector<TimeNs> out;
  for (const auto& r : records) {
    if (stream_id && r.stream_id != *stream_id) continue;
    if (auto v = latencies(r)[f]) out.push_back(*v);
  }
  return out;
}

TimeNs intrinsic_jitter_bound(TimeNs talker_error, std::span<const TimeNs> bridge_ranges, TimeNs residual_range) {
  TimeNs total = talker_error + residual_range;
  for (auto r : bridge_ranges) total += r;
  return ceil_to(total, 100 * kMicrosecond);
}

TimeNs estimate_intrinsic_jitter(const CharacterizationReport& report) {
  if (report.frames < kMinCharacterizationFrames) {
    throw InsufficientSamples("intrinsic jitter needs at least " + std::to_string(kMinCharacterizationFrames) +
                              " frames, got " + std::to_string(report.frames));
  }
  std::vector<TimeNs> bridge_ranges;
  for (auto f : {Figure::br1_l, Figure::br2_l}) {
    auto it = report.jitter.find(f);
    if (it == report.jitter.end() || it->second.insufficient_samples) {
      throw InsufficientSamples("intrinsic jitter needs " + to_string(f) + " samples (bridge probes enabled)");
    }
    bridge_ranges.push_back(it->second.range);
  }
  return intrinsic_jitter_bound(report.talker_error_bound, bridge_ranges, report.residual_range);
}

std::optional<AssignedWindow> assigned_window(const Schedule& s, const StreamSpec& stream, const PortId& port,
                                              std::int64_t seq) {
  auto it = s.windows.find(port);
  if (it == s.windows.end() || stream.period <= TimeNs{0} || s.cycle_time <= TimeNs{0}) return std::nullopt;
  const std::int64_t per_cycle = s.cycle_time / stream.period;
  if (per_cycle <= 0) return std::nullopt;
  const auto instance = static_cast<int>(seq % per_cycle);
  const std::int64_t cycle = seq / per_cycle;
  for (const auto& w : it->second) {
    if (w.stream_id == stream.id && w.instance == instance) {
      const TimeNs base = s.instant_zero + cycle * s.cycle_time;
      return AssignedWindow{base + w.open, base + w.close};
    }
  }
  return std::nullopt;
}

std::vector<PassThrough> pass_through(const TraceSet& traces, const Schedule& s, const PortId& port) {
  if (!s.windows.count(port)) throw UnknownPort("schedule has no windows for port '" + port + "'");
  std::vector<PassThrough> out;
  for (const auto& tx : traces.transmissions) {
    if (tx.port != port) continue;
    const StreamSpec* stream = find_stream(traces.meta.streams, tx.stream_id);
    if (!stream) continue;
    auto w = assigned_window(s, *stream, port, tx.seq);
    if (!w) continue;
    PassThrough p;
    p.stream_id = tx.stream_id;
    p.seq = tx.seq;
    p.open_offset = tx.start - w->open;
    p.complete_offset = tx.finish - w->open;
    p.width = w->close - w->open;
    p.within = p.open_offset >= TimeNs{0} && p.complete_offset <= p.width;
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const PassThrough& a, const PassThrough& b) {
    return std::tie(a.stream_id, a.seq) < std::tie(b.stream_id, b.seq);
  });
  return out;
}

}  // namespace tsn::prof
