#include "tsn/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsn/errors.hpp"
#include "tsn/rng.hpp"

namespace tsn::io {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get<T>(j, key);
}

// Integer nanoseconds; a suffixed string ("500us") is accepted as well.
TimeNs time_value(const Json& v, const char* key) {
  if (v.is_number_integer()) return TimeNs{v.get<std::int64_t>()};
  if (v.is_string()) return parse_duration(v.get<std::string>());
  throw ParseError(std::string("field '") + key + "' must be integer nanoseconds");
}

TimeNs get_time(const Json& j, const char* key) { return time_value(field(j, key), key); }

TimeNs get_time_or(const Json& j, const char* key, TimeNs fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get_time(j, key);
}

const Json& array_field(const Json& j, const char* key) {
  const Json& a = field(j, key);
  if (!a.is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
  return a;
}

}  // namespace

Json to_json(const Topology& t) {
  Json links = Json::array();
  for (const auto& l : t.links) {
    links.push_back({{"endpoint_a", l.endpoint_a},
                     {"endpoint_b", l.endpoint_b},
                     {"rate", l.rate_bps},
                     {"propagation_delay", l.propagation_delay.count()}});
  }
  return Json{{"hosts", t.hosts}, {"bridges", t.bridges}, {"links", links}};
}

Topology topology_from_json(const Json& j) {
  Topology t;
  t.hosts = get<std::vector<NodeId>>(j, "hosts");
  t.bridges = get<std::vector<NodeId>>(j, "bridges");
  for (const auto& l : array_field(j, "links")) {
    LinkSpec link;
    link.endpoint_a = get<NodeId>(l, "endpoint_a");
    link.endpoint_b = get<NodeId>(l, "endpoint_b");
    link.rate_bps = get_or<std::int64_t>(l, "rate", link.rate_bps);
    link.propagation_delay = get_time_or(l, "propagation_delay", TimeNs{0});
    t.links.push_back(link);
  }
  return t;
}

Json to_json(const StreamSpec& s) {
  Json j{{"id", s.id},
         {"talker", s.talker},
         {"listener", s.listener},
         {"period", s.period.count()},
         {"deadline", s.deadline.count()},
         {"jitter_bound", s.jitter_bound.count()},
         {"frame_size", s.frame_size},
         {"traffic_class", s.traffic_class}};
  if (!s.path.empty()) {
    Json path = Json::array();
    for (const auto& h : s.path) path.push_back({{"node", h.node}, {"egress_port", h.egress_port}});
    j["path"] = path;
  }
  return j;
}

StreamSpec stream_from_json(const Json& j) {
  StreamSpec s;
  s.id = get<int>(j, "id");
  s.talker = get<NodeId>(j, "talker");
  s.listener = get<NodeId>(j, "listener");
  s.period = get_time(j, "period");
  s.deadline = get_time_or(j, "deadline", s.period);
  s.jitter_bound = get_time_or(j, "jitter_bound", s.period);
  s.frame_size = get_or<int>(j, "frame_size", s.frame_size);
  s.traffic_class = get_or<int>(j, "traffic_class", 0);
  if (j.contains("path")) {
    const Json& path = array_field(j, "path");
    // Either hop objects or a plain node list.
    if (!path.empty() && path.front().is_string()) {
      std::vector<NodeId> nodes;
      for (const auto& n : path) nodes.push_back(n.get<NodeId>());
      s.path = make_path(nodes);
    } else {
      for (const auto& h : path) s.path.push_back({get<NodeId>(h, "node"), get_or<PortId>(h, "egress_port", "")});
    }
  }
  return s;
}

Json streams_to_json(const std::vector<StreamSpec>& streams) {
  Json a = Json::array();
  for (const auto& s : streams) a.push_back(to_json(s));
  return Json{{"streams", a}};
}

std::vector<StreamSpec> streams_from_json(const Json& j) {
  const Json& a = j.is_array() ? j : array_field(j, "streams");
  std::vector<StreamSpec> out;
  for (const auto& s : a) out.push_back(stream_from_json(s));
  return out;
}

Json to_json(const GateControlList& gcl) {
  Json entries = Json::array();
  for (const auto& e : gcl.entries()) entries.push_back({{"gate_mask", e.gate_mask}, {"duration", e.duration.count()}});
  return Json{{"base_time", gcl.base_time().count()}, {"cycle_time", gcl.cycle_time().count()}, {"entries", entries}};
}

GateControlList gcl_from_json(const Json& j) {
  std::vector<GateEntry> entries;
  for (const auto& e : array_field(j, "entries")) {
    const int mask = get<int>(e, "gate_mask");
    if (mask < 0 || mask > 0xff) throw ParseError("gate_mask must fit in 8 bits");
    entries.push_back({static_cast<std::uint8_t>(mask), get_time(e, "duration")});
  }
  const TimeNs base = get_time_or(j, "base_time", TimeNs{0});
  try {
    if (j.contains("cycle_time")) return GateControlList(base, get_time(j, "cycle_time"), std::move(entries));
    return GateControlList(base, std::move(entries));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("gate control list: ") + e.what());
  }
}

Json to_json(const Schedule& s) {
  Json offsets = Json::array();
  for (const auto& [id, o] : s.offsets) offsets.push_back({{"stream_id", id}, {"offset", o.count()}});
  std::map<PortId, Json> ports;
  for (const auto& [port, gcl] : s.gcls) ports[port]["gcl"] = to_json(gcl);
  for (const auto& [port, ws] : s.windows) {
    Json a = Json::array();
    for (const auto& w : ws) {
      a.push_back({{"stream_id", w.stream_id},
                   {"instance", w.instance},
                   {"traffic_class", w.traffic_class},
                   {"open", w.open.count()},
                   {"close", w.close.count()}});
    }
    ports[port]["windows"] = a;
  }
  Json port_list = Json::array();
  for (auto& [port, body] : ports) {
    Json p{{"port", port}};
    if (body.contains("gcl")) p["gcl"] = body["gcl"];
    p["windows"] = body.contains("windows") ? body["windows"] : Json::array();
    port_list.push_back(p);
  }
  return Json{{"instant_zero", s.instant_zero.count()},
              {"cycle_time", s.cycle_time.count()},
              {"offsets", offsets},
              {"ports", port_list}};
}

Schedule schedule_from_json(const Json& j) {
  Schedule s;
  s.instant_zero = get_time_or(j, "instant_zero", TimeNs{0});
  s.cycle_time = get_time(j, "cycle_time");
  for (const auto& o : array_field(j, "offsets")) s.offsets[get<int>(o, "stream_id")] = get_time(o, "offset");
  for (const auto& p : array_field(j, "ports")) {
    const auto port = get<PortId>(p, "port");
    if (p.contains("gcl")) s.gcls.emplace(port, gcl_from_json(p["gcl"]));
    if (p.contains("windows")) {
      auto& ws = s.windows[port];
      for (const auto& w : array_field(p, "windows")) {
        ws.push_back({get<int>(w, "stream_id"), get<int>(w, "instance"), get_or<int>(w, "traffic_class", 0),
                      get_time(w, "open"), get_time(w, "close")});
      }
    }
  }
  return s;
}

Json to_json(const sim::Distribution& d) {
  return Json{{"kind", sim::to_string(d.kind)},
              {"median", d.median.count()},
              {"iqr", d.iqr.count()},
              {"shape", d.shape},
              {"cap", d.cap.count()},
              {"outlier_prob", d.outlier_prob},
              {"outlier_scale", d.outlier_scale}};
}

sim::Distribution distribution_from_json(const Json& j) {
  sim::Distribution d;
  d.kind = sim::parse_distribution_kind(get<std::string>(j, "kind"));
  d.median = get_time(j, "median");
  d.iqr = get_time_or(j, "iqr", TimeNs{0});
  d.shape = get_or<double>(j, "shape", d.shape);
  d.cap = get_time_or(j, "cap", TimeNs{0});
  d.outlier_prob = get_or<double>(j, "outlier_prob", 0.0);
  d.outlier_scale = get_or<double>(j, "outlier_scale", 1.0);
  try {
    sim::validate(d);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("distribution: ") + e.what());
  }
  return d;
}

Json to_json(const sim::LatencyModel& lm) {
  Json overhead = Json::object();
  for (const auto& [m, d] : lm.probe_overhead) overhead[sim::to_string(m)] = to_json(d);
  Json overrides = Json::object();
  for (const auto& [b, d] : lm.bridge_overrides) overrides[b] = to_json(d);
  Json j{{"talker_send", to_json(lm.talker_send)},
         {"talker_stack", to_json(lm.talker_stack)},
         {"bridge_residence", to_json(lm.bridge_residence)},
         {"listener_delivery", to_json(lm.listener_delivery)},
         {"probe_overhead", overhead}};
  if (!lm.bridge_overrides.empty()) j["bridge_overrides"] = overrides;
  return j;
}

sim::LatencyModel latency_model_from_json(const Json& j) {
  auto lm = sim::LatencyModel::zero();
  lm.talker_send = distribution_from_json(field(j, "talker_send"));
  if (j.contains("talker_stack")) lm.talker_stack = distribution_from_json(j["talker_stack"]);
  lm.bridge_residence = distribution_from_json(field(j, "bridge_residence"));
  lm.listener_delivery = distribution_from_json(field(j, "listener_delivery"));
  if (j.contains("probe_overhead")) {
    for (const auto& [name, d] : j["probe_overhead"].items()) {
      lm.probe_overhead[sim::parse_probe_method(name)] = distribution_from_json(d);
    }
  }
  if (j.contains("bridge_overrides")) {
    for (const auto& [name, d] : j["bridge_overrides"].items()) lm.bridge_overrides[name] = distribution_from_json(d);
  }
  return lm;
}

Json to_json(const sim::PlatformProfile& p) {
  return Json{{"name", p.name}, {"allocation", p.allocation}, {"model", to_json(p.model)}};
}

sim::PlatformProfile profile_from_json(const Json& j) {
  if (j.is_object() && j.contains("model")) {
    return {get_or<std::string>(j, "name", "custom"), get_or<int>(j, "allocation", 0),
            latency_model_from_json(j["model"])};
  }
  return {"custom", 0, latency_model_from_json(j)};
}

Json to_json(const sim::ProbeConfig& p) {
  Json j = Json::object();
  for (std::size_t i = 0; i < sim::kNumProbePoints; ++i) {
    const auto point = static_cast<sim::ProbePoint>(i);
    j[sim::to_string(point)] = {{"enabled", p.points[i].enabled}, {"method", sim::to_string(p.points[i].method)}};
  }
  return j;
}

sim::ProbeConfig probe_config_from_json(const Json& j) {
  auto p = sim::ProbeConfig::defaults();
  if (!j.is_object()) throw ParseError("probe configuration must be an object");
  for (const auto& [name, v] : j.items()) {
    auto& s = p.at(sim::parse_probe_point(name));
    s.enabled = get_or<bool>(v, "enabled", true);
    if (v.contains("method")) s.method = sim::parse_probe_method(get<std::string>(v, "method"));
  }
  sim::validate(p);
  return p;
}

Json to_json(const RunMetadata& m) {
  Json streams = Json::array();
  for (const auto& s : m.streams) streams.push_back(to_json(s));
  return Json{{"seed", m.seed},
              {"profile", m.profile},
              {"probes", to_json(m.probes)},
              {"instant_zero", m.instant_zero.count()},
              {"duration", m.duration.count()},
              {"schedule_fingerprint", m.schedule_fingerprint},
              {"generated", m.generated},
              {"delivered", m.delivered},
              {"in_flight", m.in_flight},
              {"streams", streams}};
}

RunMetadata run_metadata_from_json(const Json& j) {
  RunMetadata m;
  m.seed = get<std::uint64_t>(j, "seed");
  m.profile = get_or<std::string>(j, "profile", "");
  if (j.contains("probes")) m.probes = probe_config_from_json(j["probes"]);
  m.instant_zero = get_time_or(j, "instant_zero", TimeNs{0});
  m.duration = get_time_or(j, "duration", TimeNs{0});
  m.schedule_fingerprint = get_or<std::string>(j, "schedule_fingerprint", "");
  m.generated = get_or<std::int64_t>(j, "generated", 0);
  m.delivered = get_or<std::int64_t>(j, "delivered", 0);
  m.in_flight = get_or<std::int64_t>(j, "in_flight", 0);
  if (j.contains("streams")) m.streams = streams_from_json(j["streams"]);
  return m;
}

Json to_json(const prof::StatSummary& s) {
  return Json{{"count", s.count},         {"min", s.min.count()},   {"q1", s.q1.count()},
              {"median", s.median.count()}, {"q3", s.q3.count()},     {"max", s.max.count()},
              {"mean", s.mean.count()},     {"stddev", s.stddev.count()}, {"n_outliers", s.outliers.size()}};
}

Json to_json(const prof::Jitter& j) {
  return Json{{"range", j.range.count()},
              {"iqr", j.iqr.count()},
              {"stddev", j.stddev.count()},
              {"insufficient_samples", j.insufficient_samples}};
}

Json to_json(const prof::CharacterizationReport& r) {
  Json figures = Json::object();
  for (const auto& [f, s] : r.figures) {
    Json entry = to_json(s);
    if (auto it = r.jitter.find(f); it != r.jitter.end()) entry["jitter"] = to_json(it->second);
    figures[prof::to_string(f)] = entry;
  }
  Json j{{"profile", r.profile},
         {"seed", r.seed},
         {"frames", r.frames},
         {"probes", to_json(r.probes)},
         {"figures", figures},
         {"talker_error_bound", r.talker_error_bound.count()},
         {"residual_range", r.residual_range.count()},
         {"intrinsic_jitter", r.intrinsic_jitter ? Json(r.intrinsic_jitter->count()) : Json(nullptr)},
         {"insufficient_samples", r.insufficient_samples},
         {"expected_br1l_median", r.expected_br1l_median.count()},
         {"calibration", r.calibration_ok ? "pass" : "fail"}};
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace tsn::io

namespace tsn {

std::string Schedule::fingerprint() const {
  const auto h = fnv1a64(io::to_json(*this).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tsn
