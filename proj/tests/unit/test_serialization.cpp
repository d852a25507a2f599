#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "tsn/engine.hpp"
#include "tsn/errors.hpp"
#include "tsn/scheduler.hpp"
#include "tsn/serialization.hpp"
#include "tsn/svg.hpp"
#include "tsn/trace_io.hpp"

using namespace tsn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& leaf) {
  auto p = fs::temp_directory_path() / ("tsn-serialization-test-" + leaf);
  fs::remove_all(p);
  return p;
}

struct Fixture {
  oracle::UseCase u = oracle::load_usecase();
  Schedule s = sched::synthesize(u.streams, u.topology, oracle::usecase_params(u.topology));
  TraceSet ts = sim::run(u.topology, u.streams, s, sim::builtin_profile("C2").model, sim::ProbeConfig::defaults(),
                         60 * kMillisecond, 5, {.profile_name = "C2"});
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("topology and streams round trip") {
  const auto& u = fixture().u;
  const auto t = io::topology_from_json(io::to_json(u.topology));
  CHECK(io::dump(io::to_json(t)) == io::dump(io::to_json(u.topology)));
  const auto streams = io::streams_from_json(io::streams_to_json(u.streams));
  REQUIRE(streams.size() == u.streams.size());
  for (std::size_t i = 0; i < streams.size(); ++i) {
    CHECK(streams[i].id == u.streams[i].id);
    CHECK(streams[i].period == u.streams[i].period);
    CHECK(streams[i].path == u.streams[i].path);
    CHECK(io::dump(io::to_json(streams[i])) == io::dump(io::to_json(u.streams[i])));
  }
}

TEST_CASE("streams accept a node list path and suffixed durations") {
  const auto j = io::Json::parse(R"({"streams":[{"id":7,"talker":"h1","listener":"h3","period":"10ms",
    "deadline":"10ms","jitter_bound":"1ms","frame_size":1500,"traffic_class":3,"path":["h1","B1","B2","h3"]}]})");
  const auto s = io::streams_from_json(j);
  REQUIRE(s.size() == 1);
  CHECK(s[0].period == 10 * kMillisecond);
  CHECK(s[0].jitter_bound == kMillisecond);
  REQUIRE(s[0].path.size() == 4);
  CHECK(s[0].path[1].egress_port == "B1:B2");
  const auto bare = io::streams_from_json(j.at("streams"));
  CHECK(bare.size() == 1);
}

TEST_CASE("schedule round trip keeps the fingerprint") {
  const auto& s = fixture().s;
  const auto back = io::schedule_from_json(io::to_json(s));
  CHECK(back.fingerprint() == s.fingerprint());
  CHECK(back.gcls == s.gcls);
  CHECK(back.windows == s.windows);
  CHECK(back.offsets == s.offsets);
  CHECK(s.fingerprint().size() == 16);
  auto other = s;
  other.offsets.begin()->second += kMicrosecond;
  CHECK(other.fingerprint() != s.fingerprint());
}

TEST_CASE("latency models and profiles round trip") {
  for (const char* name : {"C1", "C2", "C3"}) {
    const auto p = sim::builtin_profile(name);
    const auto back = io::profile_from_json(io::to_json(p));
    CHECK(back.name == p.name);
    CHECK(back.allocation == p.allocation);
    CHECK(back.model == p.model);
  }
  const auto d = sim::Distribution::lognormal(TimeNs{1234}, TimeNs{56}, 0.7, TimeNs{9999}).with_outliers(0.01, 4.0);
  CHECK(io::distribution_from_json(io::to_json(d)) == d);
}

TEST_CASE("shipped profiles equal the built-in presets") {
  for (const char* name : {"C1", "C2", "C3"}) {
    const auto shipped =
        io::profile_from_json(io::read_json_file(oracle::usecase_dir() / "profiles" / (std::string(name) + ".json")));
    CHECK(shipped.model == sim::builtin_profile(name).model);
  }
}

TEST_CASE("probe configuration round trip") {
  const auto p = sim::ProbeConfig::defaults().with_bridge_method(sim::ProbeMethod::m3).without_bridge_probes();
  CHECK(io::probe_config_from_json(io::to_json(p)) == p);
  CHECK_THROWS_AS(io::probe_config_from_json(io::Json::parse(R"({"T1":{"enabled":true,"method":"M3"}})")),
                  InvalidArgument);
}

TEST_CASE("malformed input raises ParseError") {
  const auto dir = scratch("malformed");
  io::write_text_file(dir / "bad.json", "{\"hosts\": [");
  CHECK_THROWS_AS(io::read_json_file(dir / "bad.json"), ParseError);
  CHECK_THROWS_AS(io::read_json_file(dir / "missing.json"), InvalidArgument);
  CHECK_THROWS_AS(io::topology_from_json(io::Json::parse(R"({"hosts": 3})")), ParseError);
  CHECK_THROWS_AS(io::streams_from_json(io::Json::parse(R"({"streams":[{"id":1}]})")), ParseError);
  CHECK_THROWS_AS(io::schedule_from_json(io::Json::parse(R"({"cycle_time":"soon"})")), ParseError);
  CHECK_THROWS_AS(io::parse_traces_csv(""), ParseError);
  CHECK_THROWS_AS(io::parse_traces_csv("a,b,c\n"), ParseError);
  fs::remove_all(dir);
}

TEST_CASE("trace CSV round trip") {
  const auto& ts = fixture().ts;
  const auto text = io::traces_csv(ts.records);
  CHECK(text.rfind("stream_id,seq,T1,T2,T3,T4,T5,sendL,br1L,br2L,arrL,e2e,e2e_nic\n", 0) == 0);
  const auto back = io::parse_traces_csv(text);
  REQUIRE(back.size() == ts.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].stream_id == ts.records[i].stream_id);
    CHECK(back[i].seq == ts.records[i].seq);
    CHECK(back[i].t == ts.records[i].t);
  }
  CHECK(io::traces_csv(back) == text);
  const auto tx = io::transmissions_csv(ts.transmissions);
  CHECK(io::transmissions_csv(io::parse_transmissions_csv(tx)) == tx);
}

TEST_CASE("trace sets save and load with metadata") {
  const auto& f = fixture();
  const auto dir = scratch("traceset");
  io::save_trace_set(dir, f.ts);
  CHECK(fs::exists(dir / "traces.csv"));
  CHECK(fs::exists(dir / "transmissions.csv"));
  CHECK(fs::exists(dir / "metadata.json"));
  const auto back = io::load_trace_set(dir);
  CHECK(back.meta.seed == 5);
  CHECK(back.meta.profile == "C2");
  CHECK(back.meta.schedule_fingerprint == f.s.fingerprint());
  CHECK(back.meta.probes == f.ts.meta.probes);
  CHECK(back.meta.streams.size() == 3);
  CHECK(back.records.size() == f.ts.records.size());
  CHECK(back.records.front().method == f.ts.records.front().method);
  CHECK(io::load_trace_set(dir / "traces.csv").records.size() == f.ts.records.size());
  CHECK(sched::validate_against_trace(f.s, f.u.streams, back).ok());
  fs::remove_all(dir);
}

TEST_CASE("GCL timeline lists every entry per cycle") {
  const GateControlList g(TimeNs{0}, kMillisecond, {{0b00001000, 300 * kMicrosecond}, {0b11110111, 700 * kMicrosecond}});
  const auto csv = io::gcl_timeline_csv(g, 2);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("00001000") != std::string::npos);
  CHECK(csv.find("11110111") != std::string::npos);
}

TEST_CASE("SVG box plots are self-contained and escaped") {
  const auto s = prof::summarize(std::vector<TimeNs>{TimeNs{10}, TimeNs{20}, TimeNs{30}, TimeNs{1000}});
  const auto svg = svg::box_plot("e2e <nic> & more", {{"C1", s}, {"C2 \"rt\"", s}});
  CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("e2e &lt;nic&gt; &amp; more") != std::string::npos);
  CHECK(svg.find("href") == std::string::npos);
  CHECK(svg.find("<script") == std::string::npos);
  CHECK(svg::escape("a<b>&\"") == "a&lt;b&gt;&amp;&quot;");
}

TEST_CASE("documented schema examples load") {
  const auto dir = oracle::source_dir() / "docs" / "schema" / "examples";
  const auto t = io::topology_from_json(io::read_json_file(dir / "topology.json"));
  CHECK(validate_topology(t).ok());
  auto streams = io::streams_from_json(io::read_json_file(dir / "streams.json"));
  resolve_paths(streams, t);
  const auto s = io::schedule_from_json(io::read_json_file(dir / "schedule.json"));
  CHECK(validate_schedule(s, streams, t).ok());
  CHECK_NOTHROW(sim::validate(io::profile_from_json(io::read_json_file(dir / "latency-model.json")).model));
  CHECK_NOTHROW(io::probe_config_from_json(io::read_json_file(dir / "probe-config.json")));
  const auto meta = io::run_metadata_from_json(io::read_json_file(dir / "metadata.json"));
  CHECK(meta.schedule_fingerprint == s.fingerprint());
}
