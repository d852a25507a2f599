#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tsn/errors.hpp"
#include "tsn/model.hpp"

using namespace tsn;

TEST_CASE("durations parse with unit suffixes") {
  CHECK(parse_duration("500us") == TimeNs{500'000});
  CHECK(parse_duration("10ms") == TimeNs{10'000'000});
  CHECK(parse_duration("7ns") == TimeNs{7});
  CHECK(parse_duration("2s") == TimeNs{2'000'000'000});
  CHECK(parse_duration("1200") == TimeNs{1200});
  CHECK_THROWS_AS(parse_duration("ten ms"), ParseError);
  CHECK_THROWS_AS(parse_duration(""), ParseError);
  CHECK(format_duration(TimeNs{500'000}) == "500us");
  CHECK(format_duration(TimeNs{60'000'000}) == "60ms");
  CHECK(format_duration(TimeNs{12'345}) == "12345ns");
}

TEST_CASE("use-case topology validates") {
  const auto u = oracle::load_usecase();
  CHECK(u.topology.hosts.size() == 4);
  CHECK(u.topology.bridges.size() == 2);
  CHECK(u.topology.links.size() == 5);
  CHECK(validate_topology(u.topology).ok());
}

TEST_CASE("topology violations are reported") {
  Topology empty;
  auto r = validate_topology(empty);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations.front().find("no nodes") != std::string::npos);

  auto t = oracle::load_usecase().topology;
  t.links.push_back({"h1", "h9", 1'000'000'000, TimeNs{0}});
  r = validate_topology(t);
  REQUIRE_FALSE(r.ok());
  bool dangling = false;
  for (const auto& v : r.violations) dangling |= v.find("dangling link") != std::string::npos;
  CHECK(dangling);

  Topology split;
  split.hosts = {"a", "b"};
  split.bridges = {"X", "Y"};
  split.links = {{"a", "X", 1'000'000'000, TimeNs{0}}, {"b", "Y", 1'000'000'000, TimeNs{0}}};
  r = validate_topology(split);
  bool disconnected = false;
  for (const auto& v : r.violations) disconnected |= v.find("disconnected") != std::string::npos;
  CHECK(disconnected);

  Topology dup;
  dup.hosts = {"a", "a"};
  dup.bridges = {"X"};
  dup.links = {{"a", "X", 1'000'000'000, TimeNs{0}}};
  CHECK_FALSE(validate_topology(dup).ok());
}

TEST_CASE("route follows the shortest path through bridges") {
  const auto t = oracle::load_usecase().topology;
  CHECK(route(t, "h1", "h3") == std::vector<NodeId>{"h1", "B1", "B2", "h3"});
  CHECK(route(t, "h4", "h3") == std::vector<NodeId>{"h4", "B2", "h3"});
  CHECK_THROWS_AS(route(t, "h1", "h1"), NoRoute);
  CHECK_THROWS_AS(route(t, "h1", "nowhere"), Error);
}

TEST_CASE("route agrees with exhaustive path enumeration on random graphs") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = oracle::random_topology(rng, 4, 2 + static_cast<int>(trial % 5));
    for (const auto& a : t.hosts) {
      for (const auto& b : t.hosts) {
        if (a == b) continue;
        const auto expected = oracle::enumerate_route(t, a, b);
        if (!expected) {
          CHECK_THROWS_AS(route(t, a, b), NoRoute);
          continue;
        }
        const auto got = route(t, a, b);
        CHECK(got == *expected);
        // Link consistency.
        for (std::size_t i = 0; i + 1 < got.size(); ++i) CHECK(t.find_link(got[i], got[i + 1]) != nullptr);
        ++checked;
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("hyperperiod is the lcm of the periods") {
  auto ms = [](int v) { return v * kMillisecond; };
  CHECK(hyperperiod(std::vector<TimeNs>{ms(10), ms(20), ms(30)}) == ms(60));
  CHECK(hyperperiod(std::vector<TimeNs>{ms(10)}) == ms(10));
  CHECK(hyperperiod(std::vector<TimeNs>{ms(7), ms(13)}) == ms(91));
  CHECK_THROWS_AS(hyperperiod(std::vector<TimeNs>{}), InvalidArgument);
  CHECK_THROWS_AS(hyperperiod(std::vector<TimeNs>{TimeNs{0}}), InvalidArgument);
  // Pairwise coprime periods of ~1e6 ns overflow 63 bits.
  CHECK_THROWS_AS(hyperperiod(std::vector<TimeNs>{TimeNs{1'000'003}, TimeNs{999'983}, TimeNs{1'000'033},
                                                  TimeNs{999'979}}),
                  Overflow);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<TimeNs> ps;
    const int n = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int k = 0; k < n; ++k) ps.push_back(TimeNs{std::uniform_int_distribution<int>(1, 60)(rng)} * 100'000);
    const TimeNs h = hyperperiod(ps);
    for (auto p : ps) CHECK(h % p == TimeNs{0});
  }
}

TEST_CASE("transmission time") {
  CHECK(transmission_time(1500, 1'000'000'000) == TimeNs{12'000});
  CHECK(transmission_time(64, 1'000'000'000) == TimeNs{512});
  CHECK(transmission_time(1000, 100'000'000) == TimeNs{80'000});
  CHECK(transmission_time(1, 3) == TimeNs{2'666'666'667});  // rounded up

  std::mt19937_64 rng(9);
  for (int i = 0; i < 1000; ++i) {
    const int size = std::uniform_int_distribution<int>(64, 1521)(rng);
    const std::int64_t rate = std::uniform_int_distribution<std::int64_t>(1'000'000, 10'000'000'000)(rng);
    CHECK(transmission_time(size, rate) <= transmission_time(size + 1, rate));
    CHECK(transmission_time(size, rate) >= transmission_time(size, rate + 1));
  }
}

TEST_CASE("gate control list construction enforces its invariant") {
  CHECK_NOTHROW(GateControlList(TimeNs{0}, TimeNs{1000}, {{1, TimeNs{300}}, {2, TimeNs{700}}}));
  CHECK_THROWS_AS(GateControlList(TimeNs{0}, TimeNs{1001}, {{1, TimeNs{300}}, {2, TimeNs{700}}}), InvalidArgument);
  CHECK_THROWS_AS(GateControlList(TimeNs{0}, TimeNs{1000}, {{1, TimeNs{0}}, {2, TimeNs{1000}}}), InvalidArgument);
  CHECK_THROWS_AS(GateControlList(TimeNs{0}, TimeNs{0}, {}), InvalidArgument);
  const GateControlList summed(TimeNs{5}, {{1, TimeNs{300}}, {2, TimeNs{700}}});
  CHECK(summed.cycle_time() == TimeNs{1000});
  CHECK(summed.base_time() == TimeNs{5});
}

TEST_CASE("stream validation") {
  const auto u = oracle::load_usecase();
  for (const auto& s : u.streams) CHECK(validate_stream(s, u.topology).ok());

  auto s = u.streams.front();
  s.frame_size = 63;
  CHECK_FALSE(validate_stream(s, u.topology).ok());
  s = u.streams.front();
  s.traffic_class = 8;
  CHECK_FALSE(validate_stream(s, u.topology).ok());
  s = u.streams.front();
  s.deadline = s.period + kMillisecond;
  CHECK_FALSE(validate_stream(s, u.topology).ok());
  CHECK(validate_stream(s, u.topology, true).ok());
  s = u.streams.front();
  s.path.erase(s.path.begin() + 1);  // h1 -> B2 is not a link
  CHECK_FALSE(validate_stream(s, u.topology).ok());
}

TEST_CASE("port ids round trip") {
  CHECK(make_port_id("B1", "B2") == "B1:B2");
  CHECK(split_port_id("B1:B2") == std::pair<NodeId, NodeId>{"B1", "B2"});
  CHECK_THROWS_AS(split_port_id("B1"), InvalidArgument);
}
