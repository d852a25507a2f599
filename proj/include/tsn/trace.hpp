#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsn/latency_model.hpp"
#include "tsn/model.hpp"

namespace tsn {

/// Timestamps T1..T5 of one frame; absent points were not probed.
struct TimestampRecord {
  int stream_id = 0;
  std::int64_t seq = 0;
  std::array<std::optional<TimeNs>, sim::kNumProbePoints> t{};
  std::array<sim::ProbeMethod, sim::kNumProbePoints> method{};
  /// Scheduled release (before talker error); not exported.
  TimeNs release{0};

  const std::optional<TimeNs>& at(sim::ProbePoint p) const { return t[static_cast<std::size_t>(p)]; }
  std::optional<TimeNs>& at(sim::ProbePoint p) { return t[static_cast<std::size_t>(p)]; }
};

/// One frame leaving one egress port.
struct PortTransmission {
  PortId port;
  int stream_id = 0;
  std::int64_t seq = 0;
  int traffic_class = 0;
  TimeNs start{0};
  TimeNs finish{0};
  /// Contiguous open interval of the frame's class gate the transmission
  /// started in.
  TimeNs gate_open{0};
  TimeNs gate_close{0};
};

struct RunMetadata {
  std::uint64_t seed = 0;
  std::string profile;
  sim::ProbeConfig probes = sim::ProbeConfig::defaults();
  TimeNs instant_zero{0};
  TimeNs duration{0};
  std::string schedule_fingerprint;
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t in_flight = 0;
  std::vector<StreamSpec> streams;
};

/// Result of one simulation run. Records are ordered by (stream_id, seq);
/// transmissions by (start, port).
struct TraceSet {
  RunMetadata meta;
  std::vector<TimestampRecord> records;
  std::vector<PortTransmission> transmissions;
};

}  // namespace tsn
