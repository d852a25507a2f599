#include <doctest.h>

#include <algorithm>
#include <bit>
#include <random>
#include <set>

#include "oracles.hpp"
#include "tsn/engine.hpp"
#include "tsn/errors.hpp"
#include "tsn/scheduler.hpp"

using namespace tsn;
using sched::NetworkParams;

namespace {

constexpr TimeNs us(std::int64_t v) { return v * kMicrosecond; }

struct Fixture {
  oracle::UseCase u = oracle::load_usecase();
  NetworkParams p = oracle::usecase_params(u.topology);
  Schedule s = sched::synthesize(u.streams, u.topology, p);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

Topology star(int hosts) {
  Topology t;
  t.bridges = {"B1"};
  for (int i = 1; i <= hosts; ++i) {
    t.hosts.push_back("h" + std::to_string(i));
    t.links.push_back({"h" + std::to_string(i), "B1", 1'000'000'000, TimeNs{0}});
  }
  return t;
}

StreamSpec stream(int id, const NodeId& from, const NodeId& to, TimeNs period, int cls, int size = 1500) {
  StreamSpec s;
  s.id = id;
  s.talker = from;
  s.listener = to;
  s.period = period;
  s.deadline = period;
  s.jitter_bound = period;
  s.frame_size = size;
  s.traffic_class = cls;
  return s;
}

std::size_t windows_of(const Schedule& s, const PortId& port, int stream_id) {
  const auto& w = s.windows.at(port);
  return static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [&](const auto& x) { return x.stream_id == stream_id; }));
}

}  // namespace

TEST_CASE("use case is feasible with 6 / 3 / 2 windows per port") {
  const auto& f = fixture();
  CHECK(f.s.cycle_time == 60 * kMillisecond);
  for (const auto& st : f.u.streams) {
    const std::size_t expected = static_cast<std::size_t>(f.s.cycle_time / st.period);
    for (const auto& hop : st.path) {
      if (!f.u.topology.is_bridge(hop.node)) continue;
      CHECK(windows_of(f.s, hop.egress_port, st.id) == expected);
    }
  }
  const auto rep = sched::check_schedule(f.s, f.u.streams, f.p);
  for (const auto& v : rep.violations) MESSAGE(v.message);
  CHECK(rep.ok());
  CHECK(rep.bounds.size() == 11);
  for (const auto& b : rep.bounds) CHECK(b.worst <= b.deadline);
}

TEST_CASE("GCLs exist only on bridge egress ports and span the hyperperiod") {
  const auto& f = fixture();
  CHECK(f.s.gcls.size() == 2);
  CHECK(f.s.gcls.count("B1:B2") == 1);
  CHECK(f.s.gcls.count("B2:h3") == 1);
  for (const auto& [port, gcl] : f.s.gcls) CHECK(gcl.cycle_time() == f.s.cycle_time);
}

TEST_CASE("boundaries are quantized to 1 us and scheduled classes are exclusive") {
  const auto& f = fixture();
  std::uint8_t scheduled = 0;
  for (const auto& st : f.u.streams) scheduled |= static_cast<std::uint8_t>(1u << st.traffic_class);
  for (const auto& [port, gcl] : f.s.gcls) {
    for (const auto& e : gcl.entries()) {
      CHECK(e.duration % sched::kQuantum == TimeNs{0});
      CHECK(std::popcount(static_cast<unsigned>(e.gate_mask & scheduled)) <= 1);
    }
  }
  for (const auto& [port, ws] : f.s.windows) {
    for (const auto& w : ws) {
      CHECK(w.open % sched::kQuantum == TimeNs{0});
      CHECK(w.close % sched::kQuantum == TimeNs{0});
    }
  }
  for (const auto& [id, off] : f.s.offsets) CHECK(off % sched::kQuantum == TimeNs{0});
}

TEST_CASE("single stream, one bridge, zero jitter and latency: window equals transmission time") {
  const auto t = star(2);
  std::vector<StreamSpec> streams{stream(0, "h1", "h2", kMillisecond, 5)};
  const auto p = NetworkParams::from_topology(t, TimeNs{0}, TimeNs{0});
  const auto s = sched::synthesize(streams, t, p);
  CHECK(s.offsets.at(0) == TimeNs{0});
  REQUIRE(s.windows.at("B1:h2").size() == 1);
  CHECK(s.windows.at("B1:h2").front().width() == us(12));
  resolve_paths(streams, t);
  CHECK(sched::check_schedule(s, streams, p).ok());
}

TEST_CASE("overload on one port is infeasible") {
  const auto t = star(3);
  const std::vector<StreamSpec> streams{stream(0, "h1", "h3", us(12), 4), stream(1, "h2", "h3", us(12), 4)};
  const auto p = NetworkParams::from_topology(t, TimeNs{0}, TimeNs{0});
  CHECK_THROWS_AS(sched::synthesize(streams, t, p), Infeasible);
}

TEST_CASE("invalid stream sets are rejected") {
  const auto t = star(2);
  auto bad = stream(0, "h1", "h2", kMillisecond, 9);
  CHECK_THROWS_AS(sched::synthesize({bad}, t, NetworkParams::from_topology(t, TimeNs{0})), InvalidArgument);
  CHECK_THROWS_AS(sched::synthesize({}, t, NetworkParams::from_topology(t, TimeNs{0})), InvalidArgument);
}

TEST_CASE("overlapping windows are reported as (a)") {
  const auto& f = fixture();
  auto s = f.s;
  auto& ws = s.windows.at("B1:B2");
  auto a = std::find_if(ws.begin(), ws.end(), [](const auto& w) { return w.stream_id == 0; });
  auto b = std::find_if(ws.begin(), ws.end(), [](const auto& w) { return w.stream_id == 1; });
  const TimeNs shift = a->open + us(10) - b->open;
  b->open += shift;
  b->close += shift;
  const auto rep = sched::check_schedule(s, f.u.streams, f.p);
  CHECK(rep.has('a'));
  bool named = false;
  for (const auto& v : rep.violations) {
    if (v.check == 'a') named |= v.port == "B1:B2" && v.message.find("overlap") != std::string::npos;
  }
  CHECK(named);
}

TEST_CASE("a window narrower than tx + 2J is reported as (c)") {
  const auto& f = fixture();
  auto s = f.s;
  auto& w = s.windows.at("B2:h3").front();
  w.close = w.open + us(11);
  const auto rep = sched::check_schedule(s, f.u.streams, f.p);
  CHECK(rep.has('c'));
  CHECK_FALSE(rep.has('a'));
}

TEST_CASE("a tight deadline is reported as (b)") {
  const auto& f = fixture();
  auto streams = f.u.streams;
  streams[0].deadline = us(500);
  const auto rep = sched::check_schedule(f.s, streams, f.p);
  CHECK(rep.has('b'));
}

TEST_CASE("worst-case latency follows the last window close") {
  const auto& f = fixture();
  const auto& st = f.u.streams[2];
  const auto& ws = f.s.windows.at("B2:h3");
  const auto w = std::find_if(ws.begin(), ws.end(), [&](const auto& x) { return x.stream_id == st.id && x.instance == 0; });
  const TimeNs release = f.s.instant_zero + f.s.offsets.at(st.id);
  CHECK(sched::worst_case_latency(f.s, st, 0, f.p) == w->close - release);
}

TEST_CASE("trace validation: clean run, injected fault, zero jitter bound, foreign schedule") {
  const auto& f = fixture();
  const auto lm = sim::builtin_profile("C2").model;
  const auto probes = sim::ProbeConfig::defaults();
  const auto clean = sim::run(f.u.topology, f.u.streams, f.s, lm, probes, 180 * kMillisecond, 42);
  const auto ok = sched::validate_against_trace(f.s, f.u.streams, clean);
  CHECK(ok.ok());
  REQUIRE(ok.streams.size() == 3);
  CHECK(ok.streams[0].margin() >= 9 * kMillisecond);

  sim::RunOptions opts;
  opts.fault = sim::FaultInjection{0, 3, 2 * kMillisecond};
  const auto faulty = sim::run(f.u.topology, f.u.streams, f.s, lm, probes, 180 * kMillisecond, 42, opts);
  const auto bad = sched::validate_against_trace(f.s, f.u.streams, faulty);
  CHECK_FALSE(bad.ok());
  std::set<std::pair<int, std::int64_t>> missed;
  for (const auto& i : bad.issues) {
    if (i.check == 'w') missed.insert({i.stream_id, i.seq});
  }
  CHECK(missed == std::set<std::pair<int, std::int64_t>>{{0, 3}});

  auto strict = f.u.streams;
  for (auto& st : strict) st.jitter_bound = TimeNs{0};
  const auto jit = sched::validate_against_trace(f.s, strict, clean);
  CHECK_FALSE(jit.ok());
  for (const auto& r : jit.streams) {
    CHECK_FALSE(r.jitter_ok());
    CHECK(r.deadline_ok());
    CHECK(r.windows_ok());
  }

  auto foreign = clean;
  foreign.meta.schedule_fingerprint = "0000000000000000";
  CHECK_THROWS_AS(sched::validate_against_trace(f.s, f.u.streams, foreign), TraceMismatch);
}

TEST_CASE("random stream sets: synthesized schedules check out and survive worst-case replay") {
  std::mt19937_64 rng(31);
  const auto t = oracle::soundness_topology();
  const auto p = NetworkParams::from_topology(t, us(50), us(20));
  int feasible = 0;
  for (int i = 0; i < 40; ++i) {
    const auto streams = oracle::random_streams(rng, t);
    Schedule s;
    try {
      s = sched::synthesize(streams, t, p);
    } catch (const Infeasible&) {
      continue;
    }
    ++feasible;
    CAPTURE(i);
    const auto rep = sched::check_schedule(s, streams, p);
    for (const auto& v : rep.violations) MESSAGE(v.message);
    CHECK(rep.ok());
    const auto replay = oracle::worst_case_replay(t, streams, s, p);
    INFO(replay.failure);
    CHECK(replay.ok);
  }
  CHECK(feasible >= 30);
}
