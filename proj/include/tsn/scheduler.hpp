#pragma once

// Gate schedule synthesis and checking. Windows are placed greedily in
// rate-monotonic order; check_schedule() is the source of truth for
// feasibility.

#include <map>
#include <string>
#include <vector>

#include "tsn/model.hpp"
#include "tsn/trace.hpp"

namespace tsn::sched {

struct LinkParams {
  std::int64_t rate_bps = 1'000'000'000;
  TimeNs propagation{0};
};

struct NetworkParams {
  /// Keyed by egress port.
  std::map<PortId, LinkParams> links;
  TimeNs bridge_latency_bound{0};
  TimeNs intrinsic_jitter = 500 * kMicrosecond;

  /// Rate and propagation of every link, in both directions.
  static NetworkParams from_topology(const Topology& t, TimeNs bridge_latency_bound,
                                     TimeNs intrinsic_jitter = 500 * kMicrosecond);

  /// Throws InvalidArgument for an unknown port.
  const LinkParams& at(const PortId& port) const;
};

/// GCL boundary granularity.
inline constexpr TimeNs kQuantum = kMicrosecond;

/// Window width for a frame of `size` bytes on `port`: transmission time
/// plus twice the intrinsic jitter, rounded up to kQuantum.
TimeNs window_width(const StreamSpec& s, const PortId& port, const NetworkParams& p);

/// Offsets, per-port windows and GCLs over one hyperperiod. Streams without
/// paths are routed. Throws Infeasible, InvalidArgument.
Schedule synthesize(std::vector<StreamSpec> streams, const Topology& t, const NetworkParams& p);

struct Violation {
  /// 'a' overlap, 'b' deadline, 'c' width, 's' structure.
  char check = 's';
  PortId port;
  int stream_id = -1;
  int instance = -1;
  std::string message;
};

struct LatencyBound {
  int stream_id = 0;
  int instance = 0;
  TimeNs worst{0};
  TimeNs deadline{0};
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  std::vector<LatencyBound> bounds;

  bool ok() const { return violations.empty(); }
  bool has(char check) const;
};

/// Worst-case e2e.nic of one instance: close of its window at the last
/// bridge plus the last link's propagation, minus the release. Streams
/// without bridges: transmission + propagation + intrinsic jitter. Throws
/// InvalidArgument when the schedule lacks the stream.
TimeNs worst_case_latency(const Schedule& s, const StreamSpec& stream, int instance, const NetworkParams& p);

/// (a) no two windows overlap on a port (modulo the cycle), (b) worst-case
/// latency <= deadline for every instance, (c) width >= tx + 2 jitter, plus
/// structural checks (cycle, offsets, window counts, gate program
/// agreement, causal hop order).
FeasibilityReport check_schedule(const Schedule& s, const std::vector<StreamSpec>& streams, const NetworkParams& p);

struct FrameIssue {
  /// 'i' deadline, 'w' outside window.
  char check = 'i';
  int stream_id = 0;
  std::int64_t seq = 0;
  PortId port;
  std::string message;
};

struct StreamResult {
  int stream_id = 0;
  std::size_t frames = 0;
  TimeNs worst_e2e_nic{0};
  TimeNs deadline{0};
  TimeNs jitter{0};  // max - min of e2e.nic
  TimeNs jitter_bound{0};
  std::size_t late_frames = 0;
  std::size_t window_misses = 0;

  TimeNs margin() const { return deadline - worst_e2e_nic; }
  bool deadline_ok() const { return late_frames == 0; }
  bool windows_ok() const { return window_misses == 0; }
  bool jitter_ok() const { return jitter <= jitter_bound; }
  bool ok() const { return deadline_ok() && windows_ok() && jitter_ok(); }
};

struct TraceValidationReport {
  std::vector<StreamResult> streams;
  std::vector<FrameIssue> issues;
  std::int64_t in_flight = 0;

  bool ok() const;
};

/// (i) e2e.nic <= deadline per frame, (ii) every transmission at a gated
/// port lies inside the instance's window, (iii) e2e.nic range per stream
/// <= jitter bound. Throws TraceMismatch when the trace ran under another
/// schedule.
TraceValidationReport validate_against_trace(const Schedule& s, const std::vector<StreamSpec>& streams,
                                             const TraceSet& traces);

}  // namespace tsn::sched
