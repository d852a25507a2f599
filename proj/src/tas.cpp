#include "tsn/tas.hpp"

#include <algorithm>

#include "tsn/errors.hpp"

namespace tsn::tas {

namespace {

TimeNs phase_of(const GateControlList& gcl, TimeNs t) {
  if (t < gcl.base_time()) {
    throw TimeBeforeBase("time " + std::to_string(t.count()) + "ns precedes gate base time " +
                         std::to_string(gcl.base_time().count()) + "ns");
  }
  return (t - gcl.base_time()) % gcl.cycle_time();
}

using Windows = detail::ClassWindows;

Windows class_windows(const GateControlList& gcl, int cls) {
  Windows w;
  const auto bit = static_cast<std::uint8_t>(1u << cls);
  TimeNs at{0};
  for (const auto& e : gcl.entries()) {
    if (e.gate_mask & bit) {
      if (!w.intervals.empty() && w.intervals.back().close == at) {
        w.intervals.back().close = at + e.duration;
      } else {
        w.intervals.push_back({at, at + e.duration});
      }
    }
    at += e.duration;
  }
  const TimeNs cycle = gcl.cycle_time();
  if (w.intervals.size() == 1 && w.intervals[0].open == TimeNs{0} && w.intervals[0].close == cycle) {
    w.always_open = true;
    return w;
  }
  // An interval open at the end of the cycle continues into the next one.
  if (w.intervals.size() > 1 && w.intervals.front().open == TimeNs{0} &&
      w.intervals.back().close == cycle) {
    w.intervals.back().close = cycle + w.intervals.front().close;
    w.intervals.erase(w.intervals.begin());
  }
  return w;
}

// Earliest start >= t such that [start, start + duration) lies inside one
// contiguous open interval, searching one cycle ahead.
std::optional<std::pair<TimeNs, OpenInterval>> fit(const GateControlList& gcl, const Windows& w, TimeNs t,
                                                   TimeNs duration) {
  if (w.always_open) return std::pair{t, OpenInterval{gcl.base_time(), kForever}};
  if (w.intervals.empty()) return std::nullopt;
  const TimeNs cycle = gcl.cycle_time();
  const TimeNs cycle_start = t - phase_of(gcl, t);
  for (int c = -1; c <= 1; ++c) {
    const TimeNs shift = cycle_start + c * cycle;
    for (const auto& iv : w.intervals) {
      const TimeNs open = shift + iv.open;
      const TimeNs close = shift + iv.close;
      if (close <= t) continue;
      const TimeNs start = std::max(t, open);
      if (start + duration <= close) {
        return std::pair{start, OpenInterval{std::max(open, gcl.base_time()), close}};
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::uint8_t gate_state_at(const GateControlList& gcl, TimeNs t) {
  TimeNs phase = phase_of(gcl, t);
  for (const auto& e : gcl.entries()) {
    if (phase < e.duration) return e.gate_mask;
    phase -= e.duration;
  }
  return gcl.entries().back().gate_mask;  // unreachable: durations sum to the cycle
}

std::optional<OpenInterval> open_interval_at(const GateControlList& gcl, int cls, TimeNs t) {
  if (cls < 0 || cls >= kNumTrafficClasses) throw InvalidArgument("traffic class outside [0, 7]");
  if (!(gate_state_at(gcl, t) & (1u << cls))) return std::nullopt;
  auto found = fit(gcl, class_windows(gcl, cls), t, TimeNs{0});
  if (!found || found->first != t) return std::nullopt;
  return found->second;
}

EgressPort::EgressPort(PortId id, GateControlList gcl, std::int64_t rate_bps,
                       std::optional<std::size_t> queue_capacity)
    : id_(std::move(id)), gcl_(std::move(gcl)), rate_bps_(rate_bps), capacity_(queue_capacity) {
  if (rate_bps_ <= 0) throw InvalidArgument("port " + id_ + ": link rate must be > 0");
  for (int c = 0; c < kNumTrafficClasses; ++c) {
    windows_[static_cast<std::size_t>(c)] = class_windows(gcl_, c);
  }
}

void EgressPort::enqueue(const Frame& frame, TimeNs /*t*/) {
  if (frame.traffic_class < 0 || frame.traffic_class >= kNumTrafficClasses) {
    throw InvalidArgument("port " + id_ + ": traffic class outside [0, 7]");
  }
  auto& q = queues_[static_cast<std::size_t>(frame.traffic_class)];
  if (capacity_ && q.size() >= *capacity_) {
    throw QueueOverflow("port " + id_ + ": queue " + std::to_string(frame.traffic_class) + " full");
  }
  q.push_back(frame);
}

bool EgressPort::empty() const {
  return std::all_of(queues_.begin(), queues_.end(), [](const auto& q) { return q.empty(); });
}

std::optional<Transmission> EgressPort::peek_transmission(TimeNs t) const {
  std::optional<Transmission> best;
  // Highest class first so that on equal start times it is kept (strict priority).
  for (int c = kNumTrafficClasses - 1; c >= 0; --c) {
    const auto& q = queues_[static_cast<std::size_t>(c)];
    if (q.empty()) continue;
    const Frame& head = q.front();
    const TimeNs tx = transmission_time(head.size, rate_bps_);
    auto found = fit(gcl_, windows_[static_cast<std::size_t>(c)], t, tx);
    if (!found) continue;
    if (!best || found->first < best->start) {
      best = Transmission{head, found->first, found->first + tx, found->second};
    }
  }
  return best;
}

std::optional<Transmission> EgressPort::next_transmission(TimeNs t) {
  auto tx = peek_transmission(t);
  if (tx) queues_[static_cast<std::size_t>(tx->frame.traffic_class)].pop_front();
  return tx;
}

}  // namespace tsn::tas
