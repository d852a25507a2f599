#pragma once

// Deterministic discrete-event simulation of the TSN data path:
// talker -> bridges (residence + time-aware shaper) -> listener, with
// timestamp probes at T1..T5.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsn/event_queue.hpp"
#include "tsn/latency_model.hpp"
#include "tsn/model.hpp"
#include "tsn/profiler.hpp"
#include "tsn/tas.hpp"
#include "tsn/trace.hpp"

namespace tsn::sim {

/// Adds `extra_delay` to one frame's residence at the first bridge on its
/// path, to provoke a missed gate window.
struct FaultInjection {
  int stream_id = 0;
  std::int64_t seq = 0;
  TimeNs extra_delay{0};
};

struct RunOptions {
  std::string profile_name;
  std::optional<FaultInjection> fault;
  /// Keep running past the horizon until every frame is delivered or stuck.
  bool drain = false;
  std::optional<std::size_t> queue_capacity;
};

/// Releases frames at instant_zero + offset + k * period for every release
/// before instant_zero + duration and simulates up to that horizon.
/// Identical inputs produce identical TraceSets.
/// Throws ScheduleIncomplete, DurationTooShort, InvalidArgument.
TraceSet run(const Topology& topology, const std::vector<StreamSpec>& streams, const Schedule& schedule,
             const LatencyModel& lm, const ProbeConfig& probes, TimeNs duration, std::uint64_t seed,
             const RunOptions& options = {});

/// One run per seed on up to `threads` worker threads; results are in seed
/// order and do not depend on the thread count.
std::vector<TraceSet> run_seeds(const Topology& topology, const std::vector<StreamSpec>& streams,
                                const Schedule& schedule, const LatencyModel& lm, const ProbeConfig& probes,
                                TimeNs duration, std::span<const std::uint64_t> seeds, unsigned threads,
                                const RunOptions& options = {});

struct ScheduledRelease {
  int stream_id = 0;
  std::int64_t seq = 0;
  TimeNs at{0};
};

/// Lower-level entry point with explicit release instants.
TraceSet simulate(const Topology& topology, const std::vector<StreamSpec>& streams, const Schedule& schedule,
                  const LatencyModel& lm, const ProbeConfig& probes, std::span<const ScheduledRelease> releases,
                  TimeNs horizon, std::uint64_t seed, const RunOptions& options = {});

struct PortArrival {
  Frame frame;
  TimeNs at{0};
};

/// Drives a single egress port through the event loop. Returns the
/// transmissions in start order; frames that never fit stay untransmitted.
std::vector<tas::Transmission> simulate_port(const GateControlList& gcl, std::int64_t rate_bps,
                                             std::span<const PortArrival> arrivals);

struct CharacterizationOptions {
  std::size_t frames = 1000;
  std::uint64_t seed = 1;
  ProbeConfig probes = ProbeConfig::defaults();
  int frame_size = 1500;
  std::int64_t link_rate_bps = 1'000'000'000;
  TimeNs min_spacing = kMillisecond;
  TimeNs max_spacing = 2 * kMillisecond;
};

/// Talker -> B1 -> B2 -> listener chain with all gates open, `frames`
/// frames at random spacing. Throws InvalidArgument when frames == 0.
prof::CharacterizationReport characterize(const PlatformProfile& profile, const CharacterizationOptions& options);

/// The chain used by characterize().
Topology characterization_topology(std::int64_t link_rate_bps);

}  // namespace tsn::sim
