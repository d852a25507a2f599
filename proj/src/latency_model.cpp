#include "tsn/latency_model.hpp"

#include "tsn/errors.hpp"

namespace tsn::sim {

std::string to_string(ProbeMethod m) {
  switch (m) {
    case ProbeMethod::m1_1:
      return "M1.1";
    case ProbeMethod::m1_2:
      return "M1.2";
    case ProbeMethod::m2_1:
      return "M2.1";
    case ProbeMethod::m2_2:
      return "M2.2";
    case ProbeMethod::m3:
      return "M3";
  }
  return "?";
}

ProbeMethod parse_probe_method(std::string_view name) {
  if (name == "M1.1") return ProbeMethod::m1_1;
  if (name == "M1.2") return ProbeMethod::m1_2;
  if (name == "M2.1") return ProbeMethod::m2_1;
  if (name == "M2.2") return ProbeMethod::m2_2;
  if (name == "M3") return ProbeMethod::m3;
  throw ParseError("unknown probe method '" + std::string(name) + "'");
}

std::string to_string(ProbePoint p) { return "T" + std::to_string(static_cast<int>(p) + 1); }

ProbePoint parse_probe_point(std::string_view name) {
  if (name.size() == 2 && name[0] == 'T' && name[1] >= '1' && name[1] <= '5') {
    return static_cast<ProbePoint>(name[1] - '1');
  }
  throw ParseError("unknown timestamp point '" + std::string(name) + "'");
}

ProbeConfig ProbeConfig::defaults() {
  ProbeConfig c;
  c.at(ProbePoint::t1) = {true, ProbeMethod::m1_1};
  c.at(ProbePoint::t2) = {true, ProbeMethod::m2_2};
  c.at(ProbePoint::t3) = {true, ProbeMethod::m2_2};
  c.at(ProbePoint::t4) = {true, ProbeMethod::m2_1};
  c.at(ProbePoint::t5) = {true, ProbeMethod::m1_1};
  return c;
}

ProbeConfig ProbeConfig::without_bridge_probes() const {
  ProbeConfig c = *this;
  c.at(ProbePoint::t2).enabled = false;
  c.at(ProbePoint::t3).enabled = false;
  return c;
}

ProbeConfig ProbeConfig::with_bridge_method(ProbeMethod m) const {
  ProbeConfig c = *this;
  c.at(ProbePoint::t2).method = m;
  c.at(ProbePoint::t3).method = m;
  return c;
}

std::string ProbeConfig::label() const {
  auto one = [&](ProbePoint p) {
    const auto& s = at(p);
    return s.enabled ? to_string(s.method) : std::string("off");
  };
  const std::string t2 = one(ProbePoint::t2);
  const std::string t3 = one(ProbePoint::t3);
  std::string bridges = t2 == t3 ? "T2/T3=" + t2 : "T2=" + t2 + " T3=" + t3;
  return bridges + " T4=" + one(ProbePoint::t4);
}

void validate(const ProbeConfig& probes) {
  auto is_m1 = [](ProbeMethod m) { return m == ProbeMethod::m1_1 || m == ProbeMethod::m1_2; };
  for (std::size_t i = 0; i < kNumProbePoints; ++i) {
    const auto p = static_cast<ProbePoint>(i);
    const auto m = probes.points[i].method;
    bool ok = true;
    switch (p) {
      case ProbePoint::t1:
      case ProbePoint::t5:
        ok = is_m1(m);
        break;
      case ProbePoint::t2:
      case ProbePoint::t3:
        ok = m == ProbeMethod::m2_2 || m == ProbeMethod::m3;
        break;
      case ProbePoint::t4:
        ok = m == ProbeMethod::m2_1 || m == ProbeMethod::m3;
        break;
    }
    if (!ok) throw InvalidArgument(to_string(p) + " cannot use method " + to_string(m));
  }
}

const Distribution& LatencyModel::residence_at(const NodeId& bridge) const {
  auto it = bridge_overrides.find(bridge);
  return it == bridge_overrides.end() ? bridge_residence : it->second;
}

Distribution LatencyModel::overhead_of(ProbeMethod m) const {
  auto it = probe_overhead.find(m);
  return it == probe_overhead.end() ? Distribution::constant(TimeNs{0}) : it->second;
}

LatencyModel LatencyModel::zero() {
  const auto z = Distribution::constant(TimeNs{0});
  LatencyModel lm{z, z, z, z, {}, {}};
  return lm;
}

void validate(const LatencyModel& lm) {
  validate(lm.talker_send);
  validate(lm.talker_stack);
  validate(lm.bridge_residence);
  validate(lm.listener_delivery);
  for (const auto& [m, d] : lm.probe_overhead) validate(d);
  for (const auto& [b, d] : lm.bridge_overrides) validate(d);
}

namespace {

constexpr TimeNs ns(std::int64_t v) { return TimeNs{v}; }
constexpr TimeNs us(std::int64_t v) { return TimeNs{v * 1000}; }

// PREEMPT_RT with real-time tuning. Bridge residence is bounded (cap) so
// that its spread over a 1000-frame campaign sits near 200 us per bridge;
// the talker misses its scheduled instant by at most 80 ns.
LatencyModel c2_model() {
  LatencyModel lm;
  lm.talker_send = Distribution::uniform(ns(40), ns(40));
  lm.talker_stack = Distribution::lognormal(us(8), us(2), 0.5, us(13));
  lm.bridge_residence = Distribution::lognormal(us(110), us(50), 0.5, us(250));
  lm.listener_delivery = Distribution::lognormal(us(20), us(6), 0.5).with_outliers(0.005, 3.0);
  lm.probe_overhead[ProbeMethod::m1_1] = Distribution::constant(ns(0));
  lm.probe_overhead[ProbeMethod::m1_2] = Distribution::constant(ns(0));
  lm.probe_overhead[ProbeMethod::m2_1] = Distribution::lognormal(us(5), us(3), 0.5, us(15));
  lm.probe_overhead[ProbeMethod::m2_2] = Distribution::lognormal(us(5), us(3), 0.5, us(15));
  // XDP: lower and tighter, but with rare large outliers.
  lm.probe_overhead[ProbeMethod::m3] = Distribution::lognormal(us(4), us(1), 0.5, us(8)).with_outliers(0.002, 4.0);
  return lm;
}

// Preemptible kernel, no RT tuning: slower and with outliers everywhere.
LatencyModel c1_model() {
  LatencyModel lm;
  lm.talker_send = Distribution::uniform(ns(100), ns(100));
  lm.talker_stack = Distribution::lognormal(us(15), us(5), 0.5).with_outliers(0.01, 3.0);
  lm.bridge_residence = Distribution::lognormal(us(200), us(80), 0.5).with_outliers(0.01, 3.0);
  lm.listener_delivery = Distribution::lognormal(us(35), us(12), 0.5).with_outliers(0.01, 3.0);
  lm.probe_overhead[ProbeMethod::m1_1] = Distribution::constant(ns(0));
  lm.probe_overhead[ProbeMethod::m1_2] = Distribution::constant(ns(0));
  lm.probe_overhead[ProbeMethod::m2_1] = Distribution::lognormal(us(8), us(5), 0.5);
  lm.probe_overhead[ProbeMethod::m2_2] = Distribution::lognormal(us(8), us(5), 0.5);
  lm.probe_overhead[ProbeMethod::m3] = Distribution::lognormal(us(6), us(2), 0.5).with_outliers(0.005, 4.0);
  return lm;
}

// TCC-enabled industrial PC. Allocation 2 has no extreme outliers; the other
// allocations add them to the bridge and listener processes.
LatencyModel c3_model(int allocation) {
  LatencyModel lm;
  lm.talker_send = Distribution::uniform(ns(30), ns(30));
  lm.talker_stack = Distribution::lognormal(us(5), us(1), 0.5, us(8));
  lm.bridge_residence = Distribution::lognormal(us(40), us(12), 0.5, us(90));
  lm.listener_delivery = Distribution::lognormal(us(10), us(3), 0.5);
  lm.probe_overhead[ProbeMethod::m1_1] = Distribution::constant(ns(0));
  lm.probe_overhead[ProbeMethod::m1_2] = Distribution::constant(ns(0));
  lm.probe_overhead[ProbeMethod::m2_1] = Distribution::lognormal(us(4), us(2), 0.5, us(10));
  lm.probe_overhead[ProbeMethod::m2_2] = Distribution::lognormal(us(4), us(2), 0.5, us(10));
  lm.probe_overhead[ProbeMethod::m3] = Distribution::lognormal(us(3), us(1), 0.5, us(6)).with_outliers(0.002, 4.0);
  if (allocation == 1) {
    lm.bridge_residence = lm.bridge_residence.with_outliers(0.01, 4.0);
    lm.listener_delivery = lm.listener_delivery.with_outliers(0.01, 4.0);
  } else if (allocation == 3) {
    lm.bridge_residence = lm.bridge_residence.with_outliers(0.005, 5.0);
    lm.listener_delivery = lm.listener_delivery.with_outliers(0.02, 3.0);
  }
  return lm;
}

}  // namespace

PlatformProfile builtin_profile(std::string_view name, int allocation) {
  if (name == "C1") {
    if (allocation != 0) throw InvalidArgument("core allocation applies to C3 only");
    return {"C1", 0, c1_model()};
  }
  if (name == "C2") {
    if (allocation != 0) throw InvalidArgument("core allocation applies to C3 only");
    return {"C2", 0, c2_model()};
  }
  if (name == "C3") {
    const int a = allocation == 0 ? 2 : allocation;
    if (a < 1 || a > 3) throw InvalidArgument("C3 core allocation must be 1, 2 or 3");
    return {"C3", a, c3_model(a)};
  }
  throw InvalidArgument("unknown platform profile '" + std::string(name) + "'");
}

}  // namespace tsn::sim
