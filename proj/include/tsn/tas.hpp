#pragma once

// Per-egress-port IEEE 802.1Qbv time-aware shaper: eight gated FIFO queues
// driven by a cyclic gate program, strict-priority and length-aware
// (non-preemptive) transmission selection.

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "tsn/model.hpp"

namespace tsn::tas {

/// Gate mask active at `t`; bit k set means the class-k gate is open.
/// Entry intervals are half-open. Throws TimeBeforeBase.
std::uint8_t gate_state_at(const GateControlList& gcl, TimeNs t);

/// An absolute open interval [open, close). `close == kForever` for a gate
/// that never closes.
struct OpenInterval {
  TimeNs open{0};
  TimeNs close{0};

  bool operator==(const OpenInterval&) const = default;
};

inline constexpr TimeNs kForever = TimeNs::max();

/// Maximal contiguous open interval of class `cls` containing `t`, if its
/// gate is open at `t`. The open edge is clamped to the base time.
std::optional<OpenInterval> open_interval_at(const GateControlList& gcl, int cls, TimeNs t);

namespace detail {
struct ClassWindows {
  bool always_open = false;
  // Maximal open intervals as phase offsets from the cycle start; the last
  // one may extend past the cycle when it wraps into the next.
  std::vector<OpenInterval> intervals;
};
}  // namespace detail

struct Transmission {
  Frame frame;
  TimeNs start{0};
  TimeNs finish{0};
  OpenInterval window;
};

class EgressPort {
 public:
  EgressPort(PortId id, GateControlList gcl, std::int64_t rate_bps,
             std::optional<std::size_t> queue_capacity = std::nullopt);

  const PortId& id() const { return id_; }
  const GateControlList& gcl() const { return gcl_; }
  std::int64_t rate_bps() const { return rate_bps_; }

  /// Appends to queue[frame.traffic_class]. Throws InvalidArgument on a bad
  /// class, QueueOverflow when the configured capacity is exceeded.
  void enqueue(const Frame& frame, TimeNs t);

  /// Earliest transmission starting at or after `t` given current queue
  /// contents, without dequeuing.
  std::optional<Transmission> peek_transmission(TimeNs t) const;

  /// As peek_transmission, and removes the selected frame from its queue.
  std::optional<Transmission> next_transmission(TimeNs t);

  std::size_t queue_length(int cls) const { return queues_.at(static_cast<std::size_t>(cls)).size(); }
  bool empty() const;

 private:
  PortId id_;
  GateControlList gcl_;
  std::int64_t rate_bps_;
  std::optional<std::size_t> capacity_;
  std::array<std::deque<Frame>, kNumTrafficClasses> queues_;
  std::array<detail::ClassWindows, kNumTrafficClasses> windows_;
};

}  // namespace tsn::tas
