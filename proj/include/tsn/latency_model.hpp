#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tsn/distribution.hpp"
#include "tsn/model.hpp"

namespace tsn::sim {

/// Timestamp reading methods: M1.x read an OS clock from user space at the
/// end stations, M2.x read the kernel receive timestamp through an
/// AF_INET (M2.1) or AF_PACKET (M2.2) socket, M3 reads a monotonic clock from
/// an XDP program.
enum class ProbeMethod { m1_1, m1_2, m2_1, m2_2, m3 };

std::string to_string(ProbeMethod m);
ProbeMethod parse_probe_method(std::string_view name);

/// T1 send at talker, T2 arrival at the first bridge, T3 arrival at the last
/// bridge, T4 arrival at the listener NIC, T5 arrival at the listener
/// application.
enum class ProbePoint { t1 = 0, t2, t3, t4, t5 };

inline constexpr std::size_t kNumProbePoints = 5;

std::string to_string(ProbePoint p);
ProbePoint parse_probe_point(std::string_view name);

struct ProbeSetting {
  bool enabled = true;
  ProbeMethod method = ProbeMethod::m1_1;

  bool operator==(const ProbeSetting&) const = default;
};

struct ProbeConfig {
  std::array<ProbeSetting, kNumProbePoints> points;

  /// T1/T5 M1.1, T2/T3 M2.2, T4 M2.1, all enabled.
  static ProbeConfig defaults();

  const ProbeSetting& at(ProbePoint p) const { return points[static_cast<std::size_t>(p)]; }
  ProbeSetting& at(ProbePoint p) { return points[static_cast<std::size_t>(p)]; }

  ProbeConfig without_bridge_probes() const;
  ProbeConfig with_bridge_method(ProbeMethod m) const;

  /// Short label such as "T2/T3=M2.2 T4=M2.1" used to group runs.
  std::string label() const;

  bool operator==(const ProbeConfig&) const = default;
};

/// Throws InvalidArgument if a point carries a method it cannot use.
void validate(const ProbeConfig& probes);

struct LatencyModel {
  Distribution talker_send;        // scheduled release -> T1
  Distribution talker_stack;       // T1 -> frame handed to the talker NIC
  Distribution bridge_residence;   // ingress -> egress queue, excluding TAS queuing
  Distribution listener_delivery;  // T4 -> T5 (after any T4 probe cost)
  std::map<ProbeMethod, Distribution> probe_overhead;
  std::map<NodeId, Distribution> bridge_overrides;

  const Distribution& residence_at(const NodeId& bridge) const;

  /// Zero overhead for methods without an entry.
  Distribution overhead_of(ProbeMethod m) const;

  static LatencyModel zero();

  bool operator==(const LatencyModel&) const = default;
};

void validate(const LatencyModel& lm);

struct PlatformProfile {
  std::string name;  // C1, C2, C3
  int allocation = 0;  // C3 core allocation variant (1-3), 0 otherwise
  LatencyModel model;
};

/// Built-in presets. C1: preemptible kernel without RT tuning; C2:
/// PREEMPT_RT tuned for real time; C3: industrial PC with TCC enabled, with
/// core allocation 1, 2 (default) or 3. Throws InvalidArgument.
PlatformProfile builtin_profile(std::string_view name, int allocation = 0);

}  // namespace tsn::sim
