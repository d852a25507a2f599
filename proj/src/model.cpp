#include "tsn/model.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <set>

#include "tsn/errors.hpp"

namespace tsn {

namespace {
__extension__ using i128 = __int128;
}  // namespace

PortId make_port_id(const NodeId& node, const NodeId& neighbor) { return node + ":" + neighbor; }

std::pair<NodeId, NodeId> split_port_id(const PortId& port) {
  auto pos = port.find(':');
  if (pos == std::string::npos || pos == 0 || pos + 1 == port.size()) {
    throw InvalidArgument("malformed port id '" + port + "'");
  }
  return {port.substr(0, pos), port.substr(pos + 1)};
}

bool Topology::is_host(const NodeId& id) const {
  return std::find(hosts.begin(), hosts.end(), id) != hosts.end();
}

bool Topology::is_bridge(const NodeId& id) const {
  return std::find(bridges.begin(), bridges.end(), id) != bridges.end();
}

const LinkSpec* Topology::find_link(const NodeId& x, const NodeId& y) const {
  for (const auto& l : links) {
    if (l.joins(x, y)) return &l;
  }
  return nullptr;
}

std::vector<NodeId> Topology::neighbors(const NodeId& id) const {
  std::vector<NodeId> out;
  for (const auto& l : links) {
    if (l.endpoint_a == id) out.push_back(l.endpoint_b);
    if (l.endpoint_b == id) out.push_back(l.endpoint_a);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ValidationReport validate_topology(const Topology& t) {
  ValidationReport r;
  if (t.hosts.empty() && t.bridges.empty()) {
    r.add("no nodes");
    return r;
  }
  std::set<NodeId> ids;
  for (const auto* group : {&t.hosts, &t.bridges}) {
    for (const auto& id : *group) {
      if (id.empty()) r.add("empty node id");
      if (id.find(':') != std::string::npos) r.add("node id '" + id + "' contains ':'");
      if (!ids.insert(id).second) r.add("duplicate id '" + id + "'");
    }
  }
  std::set<std::pair<NodeId, NodeId>> pairs;
  for (const auto& l : t.links) {
    const std::string name = l.endpoint_a + "-" + l.endpoint_b;
    if (!ids.count(l.endpoint_a) || !ids.count(l.endpoint_b)) {
      r.add("dangling link " + name);
      continue;
    }
    if (l.endpoint_a == l.endpoint_b) r.add("self-loop on '" + l.endpoint_a + "'");
    if (l.rate_bps <= 0) r.add("link " + name + " has non-positive rate");
    if (l.propagation_delay < TimeNs{0}) r.add("link " + name + " has negative propagation delay");
    auto key = std::minmax(l.endpoint_a, l.endpoint_b);
    if (!pairs.insert({key.first, key.second}).second) r.add("duplicate link " + name);
  }
  if (!r.ok()) return r;

  // Connectivity over the undirected graph.
  std::set<NodeId> seen;
  std::deque<NodeId> todo{*ids.begin()};
  seen.insert(*ids.begin());
  while (!todo.empty()) {
    NodeId n = todo.front();
    todo.pop_front();
    for (const auto& m : t.neighbors(n)) {
      if (seen.insert(m).second) todo.push_back(m);
    }
  }
  if (seen.size() != ids.size()) r.add("disconnected graph");
  return r;
}

std::vector<NodeId> StreamSpec::bridges() const {
  std::vector<NodeId> out;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) out.push_back(path[i].node);
  return out;
}

ValidationReport validate_stream(const StreamSpec& s, const Topology& t,
                                 bool allow_deadline_beyond_period) {
  ValidationReport r;
  const std::string tag = "stream " + std::to_string(s.id) + ": ";
  if (s.period <= TimeNs{0}) r.add(tag + "period must be > 0");
  if (s.deadline <= TimeNs{0}) r.add(tag + "deadline must be > 0");
  if (!allow_deadline_beyond_period && s.deadline > s.period) r.add(tag + "deadline exceeds period");
  if (s.jitter_bound < TimeNs{0}) r.add(tag + "jitter bound must be >= 0");
  if (s.frame_size < kMinFrameSize || s.frame_size > kMaxFrameSize) {
    r.add(tag + "frame size outside [64, 1522]");
  }
  if (s.traffic_class < 0 || s.traffic_class >= kNumTrafficClasses) {
    r.add(tag + "traffic class outside [0, 7]");
  }
  if (!t.is_host(s.talker)) r.add(tag + "talker '" + s.talker + "' is not a host");
  if (!t.is_host(s.listener)) r.add(tag + "listener '" + s.listener + "' is not a host");
  if (s.path.size() < 2) {
    r.add(tag + "path has fewer than two nodes");
    return r;
  }
  if (s.path.front().node != s.talker) r.add(tag + "path does not start at talker");
  if (s.path.back().node != s.listener) r.add(tag + "path does not end at listener");
  if (!s.path.back().egress_port.empty()) r.add(tag + "listener hop has an egress port");
  for (std::size_t i = 0; i + 1 < s.path.size(); ++i) {
    const auto& here = s.path[i];
    const auto& next = s.path[i + 1];
    if (!t.find_link(here.node, next.node)) {
      r.add(tag + "no link between '" + here.node + "' and '" + next.node + "'");
    }
    if (here.egress_port != make_port_id(here.node, next.node)) {
      r.add(tag + "hop '" + here.node + "' egress port '" + here.egress_port + "' inconsistent");
    }
    if (i > 0 && !t.is_bridge(here.node)) r.add(tag + "intermediate node '" + here.node + "' is not a bridge");
  }
  return r;
}

GateControlList::GateControlList(TimeNs base_time, TimeNs cycle_time, std::vector<GateEntry> entries)
    : base_time_(base_time), cycle_time_(cycle_time), entries_(std::move(entries)) {
  if (entries_.empty()) throw InvalidArgument("gate control list has no entries");
  if (base_time_ < TimeNs{0}) throw InvalidArgument("gate control list base time is negative");
  TimeNs sum{0};
  for (const auto& e : entries_) {
    if (e.duration <= TimeNs{0}) throw InvalidArgument("gate control entry with non-positive duration");
    sum += e.duration;
  }
  if (sum != cycle_time_) {
    throw InvalidArgument("gate control entry durations sum to " + format_duration(sum) +
                          ", cycle time is " + format_duration(cycle_time_));
  }
}

namespace {
TimeNs sum_durations(const std::vector<GateEntry>& entries) {
  TimeNs sum{0};
  for (const auto& e : entries) sum += e.duration;
  return sum;
}
}  // namespace

GateControlList::GateControlList(TimeNs base_time, std::vector<GateEntry> entries)
    : GateControlList(base_time, sum_durations(entries), entries) {}

GateControlList GateControlList::always_open(TimeNs base_time, TimeNs cycle_time) {
  return GateControlList(base_time, cycle_time, {GateEntry{0xFF, cycle_time}});
}

ValidationReport validate_schedule(const Schedule& s, const std::vector<StreamSpec>& streams,
                                   const Topology& t) {
  ValidationReport r;
  if (s.cycle_time <= TimeNs{0}) r.add("schedule cycle time must be > 0");
  if (s.instant_zero < TimeNs{0}) r.add("instant zero is negative");
  for (const auto& st : streams) {
    auto it = s.offsets.find(st.id);
    if (it == s.offsets.end()) {
      r.add("no release offset for stream " + std::to_string(st.id));
    } else if (it->second < TimeNs{0} || it->second >= st.period) {
      r.add("offset of stream " + std::to_string(st.id) + " not in [0, period)");
    }
    for (std::size_t i = 1; i + 1 < st.path.size(); ++i) {
      const auto& port = st.path[i].egress_port;
      if (t.is_bridge(st.path[i].node) && !s.gcls.count(port)) {
        r.add("no gate control list for port " + port);
      }
    }
  }
  for (const auto& [port, gcl] : s.gcls) {
    if (gcl.cycle_time() != s.cycle_time) r.add("port " + port + " cycle differs from schedule cycle");
  }
  return r;
}

std::vector<NodeId> route(const Topology& t, const NodeId& talker, const NodeId& listener) {
  if (!t.is_host(talker) || !t.is_host(listener)) {
    throw NoRoute("route endpoints must be hosts: '" + talker + "' -> '" + listener + "'");
  }
  if (talker == listener) throw NoRoute("talker equals listener '" + talker + "'");

  // Breadth-first search visiting neighbors in ascending id order; the first
  // discovery of a node is along its lexicographically smallest shortest path.
  std::map<NodeId, NodeId> parent;
  std::deque<NodeId> todo{talker};
  parent[talker] = talker;
  while (!todo.empty()) {
    NodeId n = todo.front();
    todo.pop_front();
    if (n == listener) break;
    if (n != talker && !t.is_bridge(n)) continue;  // hosts do not forward
    for (const auto& m : t.neighbors(n)) {
      if (parent.count(m)) continue;
      parent[m] = n;
      todo.push_back(m);
    }
  }
  if (!parent.count(listener)) throw NoRoute("no route from '" + talker + "' to '" + listener + "'");
  std::vector<NodeId> path{listener};
  while (path.back() != talker) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<Hop> make_path(const std::vector<NodeId>& nodes) {
  std::vector<Hop> hops;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    hops.push_back({nodes[i], i + 1 < nodes.size() ? make_port_id(nodes[i], nodes[i + 1]) : PortId{}});
  }
  return hops;
}

void resolve_paths(std::vector<StreamSpec>& streams, const Topology& t) {
  for (auto& s : streams) {
    if (s.path.empty()) s.path = make_path(route(t, s.talker, s.listener));
  }
}

TimeNs hyperperiod(const std::vector<TimeNs>& periods) {
  if (periods.empty()) throw InvalidArgument("hyperperiod of an empty stream set");
  std::int64_t acc = 1;
  for (auto p : periods) {
    if (p <= TimeNs{0}) throw InvalidArgument("period must be > 0");
    const std::int64_t g = std::gcd(acc, p.count());
    const i128 l = static_cast<i128>(acc / g) * p.count();
    if (l > std::numeric_limits<std::int64_t>::max()) throw Overflow("hyperperiod exceeds 64-bit nanoseconds");
    acc = static_cast<std::int64_t>(l);
  }
  return TimeNs{acc};
}

TimeNs hyperperiod(const std::vector<StreamSpec>& streams) {
  std::vector<TimeNs> periods;
  for (const auto& s : streams) periods.push_back(s.period);
  return hyperperiod(periods);
}

TimeNs transmission_time(std::int64_t size_bytes, std::int64_t rate_bps) {
  if (size_bytes <= 0) throw InvalidArgument("frame size must be > 0");
  if (rate_bps <= 0) throw InvalidArgument("link rate must be > 0");
  const i128 bits_ns = static_cast<i128>(size_bytes) * 8 * 1'000'000'000;
  const i128 t = (bits_ns + rate_bps - 1) / rate_bps;
  return TimeNs{static_cast<std::int64_t>(t)};
}

const StreamSpec* find_stream(const std::vector<StreamSpec>& streams, int id) {
  for (const auto& s : streams) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

}  // namespace tsn
