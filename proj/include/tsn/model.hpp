#pragma once

// Domain types for the emulated network: topology, streams, frames and gate
// schedules, plus routing and period arithmetic.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsn/time.hpp"

namespace tsn {

using NodeId = std::string;

/// Egress port identifier, "<node>:<neighbor>".
using PortId = std::string;

PortId make_port_id(const NodeId& node, const NodeId& neighbor);

/// Splits a port id back into (node, neighbor). Throws InvalidArgument.
std::pair<NodeId, NodeId> split_port_id(const PortId& port);

inline constexpr int kNumTrafficClasses = 8;

struct LinkSpec {
  NodeId endpoint_a;
  NodeId endpoint_b;
  std::int64_t rate_bps = 1'000'000'000;
  TimeNs propagation_delay{0};

  bool joins(const NodeId& x, const NodeId& y) const {
    return (endpoint_a == x && endpoint_b == y) || (endpoint_a == y && endpoint_b == x);
  }
};

struct Topology {
  std::vector<NodeId> hosts;
  std::vector<NodeId> bridges;
  std::vector<LinkSpec> links;

  bool is_host(const NodeId& id) const;
  bool is_bridge(const NodeId& id) const;
  bool has_node(const NodeId& id) const { return is_host(id) || is_bridge(id); }

  /// Link joining x and y, or nullptr.
  const LinkSpec* find_link(const NodeId& x, const NodeId& y) const;

  /// Neighbors of `id` in ascending id order.
  std::vector<NodeId> neighbors(const NodeId& id) const;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  void add(std::string v) { violations.push_back(std::move(v)); }
};

ValidationReport validate_topology(const Topology& t);

/// One hop on a stream path. The listener's hop has an empty egress port.
struct Hop {
  NodeId node;
  PortId egress_port;

  bool operator==(const Hop&) const = default;
};

struct StreamSpec {
  int id = 0;
  NodeId talker;
  NodeId listener;
  TimeNs period{0};
  TimeNs deadline{0};
  TimeNs jitter_bound{0};
  int frame_size = 1500;  // bytes incl. Ethernet overhead
  int traffic_class = 0;
  std::vector<Hop> path;

  /// Bridges traversed, in path order.
  std::vector<NodeId> bridges() const;
};

inline constexpr int kMinFrameSize = 64;
inline constexpr int kMaxFrameSize = 1522;

/// Checks the stream against its invariants and against `t` (path present,
/// starting at the talker, ending at the listener, link-consistent).
ValidationReport validate_stream(const StreamSpec& s, const Topology& t,
                                 bool allow_deadline_beyond_period = false);

struct Frame {
  int stream_id = 0;
  std::int64_t seq = 0;
  int size = 0;
  int traffic_class = 0;
  TimeNs release_time{0};
};

struct GateEntry {
  std::uint8_t gate_mask = 0;
  TimeNs duration{0};

  bool operator==(const GateEntry&) const = default;
};

/// The cyclic 802.1Qbv gate program of one egress port. Construction
/// enforces: entries non-empty, every duration > 0, durations sum to the
/// cycle time.
class GateControlList {
 public:
  GateControlList(TimeNs base_time, TimeNs cycle_time, std::vector<GateEntry> entries);

  /// Cycle time taken as the sum of the entry durations.
  GateControlList(TimeNs base_time, std::vector<GateEntry> entries);

  static GateControlList always_open(TimeNs base_time = TimeNs{0},
                                     TimeNs cycle_time = kMillisecond);

  TimeNs base_time() const { return base_time_; }
  TimeNs cycle_time() const { return cycle_time_; }
  const std::vector<GateEntry>& entries() const { return entries_; }

  bool operator==(const GateControlList&) const = default;

 private:
  TimeNs base_time_;
  TimeNs cycle_time_;
  std::vector<GateEntry> entries_;
};

/// A gate window reserved for one instance of a stream at one port. Times
/// are relative to the start of the hyperperiod cycle the instance belongs
/// to and may extend past the cycle end.
struct WindowReservation {
  int stream_id = 0;
  int instance = 0;
  int traffic_class = 0;
  TimeNs open{0};
  TimeNs close{0};

  TimeNs width() const { return close - open; }
  bool operator==(const WindowReservation&) const = default;
};

struct Schedule {
  TimeNs instant_zero{0};
  TimeNs cycle_time{0};
  std::map<int, TimeNs> offsets;
  std::map<PortId, GateControlList> gcls;
  std::map<PortId, std::vector<WindowReservation>> windows;

  /// Stable content hash (hex) used to tie traces to the schedule they ran
  /// under.
  std::string fingerprint() const;
};

/// Offsets below period, a GCL on every bridge egress port of every stream
/// path, GCL cycles equal to the schedule cycle.
ValidationReport validate_schedule(const Schedule& s, const std::vector<StreamSpec>& streams,
                                   const Topology& t);

/// Shortest hop-count path from talker to listener through bridges; ties go
/// to the lexicographically smallest node sequence. Throws NoRoute.
std::vector<NodeId> route(const Topology& t, const NodeId& talker, const NodeId& listener);

/// Turns a node sequence into hops with egress ports.
std::vector<Hop> make_path(const std::vector<NodeId>& nodes);

/// Fills in missing paths by routing.
void resolve_paths(std::vector<StreamSpec>& streams, const Topology& t);

/// Least common multiple of the stream periods. Throws Overflow, InvalidArgument.
TimeNs hyperperiod(const std::vector<StreamSpec>& streams);
TimeNs hyperperiod(const std::vector<TimeNs>& periods);

/// ceil(size * 8 * 1e9 / rate) nanoseconds.
TimeNs transmission_time(std::int64_t size_bytes, std::int64_t rate_bps);

const StreamSpec* find_stream(const std::vector<StreamSpec>& streams, int id);

}  // namespace tsn
