#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "tsn/time.hpp"

namespace tsn::sim {

/// Discrete-event calendar. Events run in (time, phase, insertion order);
/// arrivals at an instant are all handled before any transmit decision at
/// that instant.
class EventQueue {
 public:
  enum class Phase : int { arrival = 0, transmit = 1 };

  void schedule(TimeNs at, Phase phase, std::function<void()> action);

  /// Runs events with time <= horizon. Returns the number executed.
  std::size_t run_until(TimeNs horizon);
  std::size_t run_all() { return run_until(TimeNs::max()); }

  TimeNs now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  std::size_t pending() const { return heap_.size(); }

 private:
  struct Event {
    TimeNs at;
    int phase;
    std::uint64_t seq;
    std::function<void()> action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return a.at > b.at;
      if (a.phase != b.phase) return a.phase > b.phase;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  TimeNs now_{0};
};

}  // namespace tsn::sim
