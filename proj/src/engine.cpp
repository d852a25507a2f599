#include "tsn/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <thread>
#include <tuple>

#include "tsn/errors.hpp"

namespace tsn::sim {

namespace {

using Phase = EventQueue::Phase;

// One egress port bound to the event loop: a single transmitter that asks
// the shaper for the next eligible frame whenever something changes.
class PortRuntime {
 public:
  using Done = std::function<void(const tas::Transmission&)>;

  PortRuntime(tas::EgressPort port, EventQueue& queue, Done on_done)
      : port_(std::move(port)), queue_(queue), on_done_(std::move(on_done)) {}

  void enqueue(const Frame& f) {
    port_.enqueue(f, queue_.now());
    wake_at(queue_.now());
  }

  const tas::EgressPort& port() const { return port_; }

 private:
  void wake_at(TimeNs t) {
    queue_.schedule(t, Phase::transmit, [this] { wake(); });
  }

  void wake() {
    if (busy_) return;
    const TimeNs now = queue_.now();
    auto next = port_.peek_transmission(now);
    if (!next) return;
    if (next->start > now) {
      wake_at(next->start);
      return;
    }
    port_.next_transmission(now);
    busy_ = true;
    queue_.schedule(next->finish, Phase::arrival, [this, tx = *next] {
      busy_ = false;
      on_done_(tx);
      wake_at(queue_.now());
    });
  }

  tas::EgressPort port_;
  EventQueue& queue_;
  Done on_done_;
  bool busy_ = false;
};

class Simulator {
 public:
  Simulator(const Topology& topology, const std::vector<StreamSpec>& streams, const Schedule& schedule,
            const LatencyModel& lm, const ProbeConfig& probes, std::uint64_t seed, const RunOptions& options)
      : topology_(topology),
        streams_(streams),
        schedule_(schedule),
        lm_(lm),
        probes_(probes),
        root_(seed),
        options_(options) {
    for (const auto& s : streams_) build_ports(s);
  }

  TraceSet run(std::span<const ScheduledRelease> releases, TimeNs horizon) {
    frames_.reserve(releases.size());
    for (const auto& r : releases) {
      const StreamSpec* s = find_stream(streams_, r.stream_id);
      if (!s) throw InvalidArgument("release for unknown stream " + std::to_string(r.stream_id));
      FrameState st;
      st.stream = s;
      st.frame = Frame{s->id, r.seq, s->frame_size, s->traffic_class, r.at};
      st.rec.stream_id = s->id;
      st.rec.seq = r.seq;
      st.rec.release = r.at;
      for (std::size_t i = 0; i < kNumProbePoints; ++i) st.rec.method[i] = probes_.points[i].method;
      const std::size_t index = frames_.size();
      if (!index_.emplace(std::pair{s->id, r.seq}, index).second) {
        throw InvalidArgument("duplicate release for stream " + std::to_string(s->id));
      }
      frames_.push_back(std::move(st));
      queue_.schedule(r.at, Phase::arrival, [this, index] { release(index); });
    }
    if (options_.drain) {
      queue_.run_all();
    } else {
      queue_.run_until(horizon);
    }

    TraceSet out;
    out.meta.generated = static_cast<std::int64_t>(frames_.size());
    for (const auto& f : frames_) {
      if (f.delivered) out.records.push_back(f.rec);
    }
    out.meta.delivered = static_cast<std::int64_t>(out.records.size());
    out.meta.in_flight = out.meta.generated - out.meta.delivered;
    std::sort(out.records.begin(), out.records.end(), [](const auto& a, const auto& b) {
      return std::tie(a.stream_id, a.seq) < std::tie(b.stream_id, b.seq);
    });
    out.transmissions = std::move(transmissions_);
    std::sort(out.transmissions.begin(), out.transmissions.end(), [](const auto& a, const auto& b) {
      return std::tie(a.start, a.port, a.stream_id, a.seq) < std::tie(b.start, b.port, b.stream_id, b.seq);
    });
    return out;
  }

 private:
  struct FrameState {
    const StreamSpec* stream = nullptr;
    Frame frame;
    TimestampRecord rec;
    std::size_t hop = 0;
    bool delivered = false;
  };

  void build_ports(const StreamSpec& s) {
    for (std::size_t i = 0; i + 1 < s.path.size(); ++i) {
      const auto& hop = s.path[i];
      if (ports_.count(hop.egress_port)) continue;
      const NodeId& next = s.path[i + 1].node;
      const LinkSpec* link = topology_.find_link(hop.node, next);
      if (!link) throw InvalidArgument("no link for port " + hop.egress_port);
      auto g = schedule_.gcls.find(hop.egress_port);
      std::optional<GateControlList> gcl;
      if (g != schedule_.gcls.end()) {
        gcl = g->second;
      } else if (topology_.is_bridge(hop.node)) {
        throw ScheduleIncomplete("schedule has no gate control list for port " + hop.egress_port);
      } else {
        gcl = GateControlList::always_open();
      }
      const PortId port_id = hop.egress_port;
      const TimeNs propagation = link->propagation_delay;
      auto runtime = std::make_unique<PortRuntime>(
          tas::EgressPort(port_id, *gcl, link->rate_bps, options_.queue_capacity), queue_,
          [this, port_id, propagation](const tas::Transmission& tx) { transmitted(port_id, propagation, tx); });
      ports_.emplace(port_id, std::move(runtime));
    }
  }

  Rng& rng(const NodeId& node, std::string_view purpose) {
    std::string key = node + "/" + std::string(purpose);
    auto it = rngs_.find(key);
    if (it == rngs_.end()) it = rngs_.emplace(key, root_.substream(key)).first;
    return it->second;
  }

  bool probing(ProbePoint p) const { return probes_.at(p).enabled; }

  void release(std::size_t index) {
    FrameState& f = frames_[index];
    const NodeId& talker = f.stream->path.front().node;
    const TimeNs t1 = queue_.now() + sample(lm_.talker_send, rng(talker, "send"));
    TimeNs dwell{0};
    if (probing(ProbePoint::t1)) {
      f.rec.at(ProbePoint::t1) = t1;
      dwell += sample(lm_.overhead_of(probes_.at(ProbePoint::t1).method), rng(talker, "probe"));
    }
    dwell += sample(lm_.talker_stack, rng(talker, "stack"));
    const PortId port = f.stream->path.front().egress_port;
    queue_.schedule(t1 + dwell, Phase::arrival, [this, index, port] { ports_.at(port)->enqueue(frames_[index].frame); });
  }

  void transmitted(const PortId& port, TimeNs propagation, const tas::Transmission& tx) {
    const std::size_t index = index_.at({tx.frame.stream_id, tx.frame.seq});
    transmissions_.push_back(PortTransmission{port, tx.frame.stream_id, tx.frame.seq, tx.frame.traffic_class,
                                              tx.start, tx.finish, tx.window.open, tx.window.close});
    queue_.schedule(tx.finish + propagation, Phase::arrival, [this, index] { arrive(index); });
  }

  void arrive(std::size_t index) {
    FrameState& f = frames_[index];
    f.hop += 1;
    const auto& path = f.stream->path;
    const NodeId& node = path[f.hop].node;
    const TimeNs now = queue_.now();
    if (f.hop + 1 == path.size()) {
      arrive_at_listener(index, node, now);
      return;
    }

    // Timestamp point at this bridge, if any.
    std::optional<ProbePoint> point;
    const bool first_bridge = f.hop == 1;
    const bool last_bridge = f.hop + 2 == path.size();
    if (last_bridge) {
      point = ProbePoint::t3;
    } else if (first_bridge) {
      point = ProbePoint::t2;
    }

    const Variate v = draw_variate(rng(node, "residence"));
    TimeNs dwell = transform(lm_.residence_at(node), v);
    if (point && probing(*point)) {
      f.rec.at(*point) = now;
      // The instrumentation process shares the bridge's CPU: its cost moves
      // with the residence draw, with its own outlier stream.
      const Variate pv{v.normal, v.uniform, rng(node, "probe").uniform()};
      dwell += transform(lm_.overhead_of(probes_.at(*point).method), pv);
    }
    if (first_bridge && options_.fault && options_.fault->stream_id == f.stream->id &&
        options_.fault->seq == f.frame.seq) {
      dwell += options_.fault->extra_delay;
    }
    // Bridges forward in arrival order.
    TimeNs& last_ready = bridge_ready_[node];
    const TimeNs ready = std::max(now + dwell, last_ready);
    last_ready = ready;
    const PortId port = path[f.hop].egress_port;
    queue_.schedule(ready, Phase::arrival, [this, index, port] { ports_.at(port)->enqueue(frames_[index].frame); });
  }

  void arrive_at_listener(std::size_t index, const NodeId& listener, TimeNs now) {
    FrameState& f = frames_[index];
    TimeNs dwell{0};
    if (probing(ProbePoint::t4)) {
      f.rec.at(ProbePoint::t4) = now;
      dwell += sample(lm_.overhead_of(probes_.at(ProbePoint::t4).method), rng(listener, "probe"));
    }
    dwell += sample(lm_.listener_delivery, rng(listener, "delivery"));
    const TimeNs t5 = now + dwell;
    if (probing(ProbePoint::t5)) f.rec.at(ProbePoint::t5) = t5;
    queue_.schedule(t5, Phase::arrival, [this, index] { frames_[index].delivered = true; });
  }

  const Topology& topology_;
  const std::vector<StreamSpec>& streams_;
  const Schedule& schedule_;
  const LatencyModel& lm_;
  const ProbeConfig& probes_;
  Rng root_;
  RunOptions options_;

  EventQueue queue_;
  std::map<PortId, std::unique_ptr<PortRuntime>> ports_;
  std::map<std::string, Rng> rngs_;
  std::map<NodeId, TimeNs> bridge_ready_;
  std::vector<FrameState> frames_;
  std::map<std::pair<int, std::int64_t>, std::size_t> index_;
  std::vector<PortTransmission> transmissions_;
};

void check_inputs(const Topology& topology, const std::vector<StreamSpec>& streams, const Schedule& schedule,
                  const LatencyModel& lm, const ProbeConfig& probes) {
  if (auto r = validate_topology(topology); !r.ok()) throw InvalidArgument("topology: " + r.violations.front());
  for (const auto& s : streams) {
    if (auto r = validate_stream(s, topology, true); !r.ok()) throw InvalidArgument(r.violations.front());
  }
  if (auto r = validate_schedule(schedule, streams, topology); !r.ok()) {
    throw ScheduleIncomplete(r.violations.front());
  }
  validate(lm);
  validate(probes);
}

TraceSet finish(TraceSet trace, const std::vector<StreamSpec>& streams, const Schedule& schedule,
                const ProbeConfig& probes, TimeNs duration, std::uint64_t seed, const RunOptions& options) {
  trace.meta.seed = seed;
  trace.meta.profile = options.profile_name;
  trace.meta.probes = probes;
  trace.meta.instant_zero = schedule.instant_zero;
  trace.meta.duration = duration;
  trace.meta.schedule_fingerprint = schedule.fingerprint();
  trace.meta.streams = streams;
  return trace;
}

}  // namespace

TraceSet simulate(const Topology& topology, const std::vector<StreamSpec>& streams, const Schedule& schedule,
                  const LatencyModel& lm, const ProbeConfig& probes, std::span<const ScheduledRelease> releases,
                  TimeNs horizon, std::uint64_t seed, const RunOptions& options) {
  check_inputs(topology, streams, schedule, lm, probes);
  Simulator sim(topology, streams, schedule, lm, probes, seed, options);
  return finish(sim.run(releases, horizon), streams, schedule, probes, horizon - schedule.instant_zero, seed,
                options);
}

TraceSet run(const Topology& topology, const std::vector<StreamSpec>& streams, const Schedule& schedule,
             const LatencyModel& lm, const ProbeConfig& probes, TimeNs duration, std::uint64_t seed,
             const RunOptions& options) {
  if (streams.empty()) throw InvalidArgument("no streams to simulate");
  const TimeNs hp = hyperperiod(streams);
  if (duration < hp) {
    throw DurationTooShort("duration " + format_duration(duration) + " is shorter than the hyperperiod " +
                           format_duration(hp));
  }
  check_inputs(topology, streams, schedule, lm, probes);
  std::vector<ScheduledRelease> releases;
  const TimeNs end = schedule.instant_zero + duration;
  for (const auto& s : streams) {
    const TimeNs offset = schedule.offsets.at(s.id);
    for (std::int64_t k = 0;; ++k) {
      const TimeNs at = schedule.instant_zero + offset + k * s.period;
      if (at >= end) break;
      releases.push_back({s.id, k, at});
    }
  }
  std::sort(releases.begin(), releases.end(), [](const auto& a, const auto& b) {
    return std::tie(a.at, a.stream_id, a.seq) < std::tie(b.at, b.stream_id, b.seq);
  });
  Simulator sim(topology, streams, schedule, lm, probes, seed, options);
  return finish(sim.run(releases, end), streams, schedule, probes, duration, seed, options);
}

std::vector<TraceSet> run_seeds(const Topology& topology, const std::vector<StreamSpec>& streams,
                                const Schedule& schedule, const LatencyModel& lm, const ProbeConfig& probes,
                                TimeNs duration, std::span<const std::uint64_t> seeds, unsigned threads,
                                const RunOptions& options) {
  std::vector<TraceSet> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        results[i] = run(topology, streams, schedule, lm, probes, duration, seeds[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(seeds.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::vector<tas::Transmission> simulate_port(const GateControlList& gcl, std::int64_t rate_bps,
                                             std::span<const PortArrival> arrivals) {
  EventQueue queue;
  std::vector<tas::Transmission> out;
  PortRuntime port(tas::EgressPort("port", gcl, rate_bps), queue,
                   [&out](const tas::Transmission& tx) { out.push_back(tx); });
  for (const auto& a : arrivals) {
    queue.schedule(a.at, Phase::arrival, [&port, frame = a.frame] { port.enqueue(frame); });
  }
  queue.run_all();
  return out;
}

Topology characterization_topology(std::int64_t link_rate_bps) {
  Topology t;
  t.hosts = {"talker", "listener"};
  t.bridges = {"B1", "B2"};
  t.links = {{"talker", "B1", link_rate_bps, TimeNs{0}},
             {"B1", "B2", link_rate_bps, TimeNs{0}},
             {"B2", "listener", link_rate_bps, TimeNs{0}}};
  return t;
}

prof::CharacterizationReport characterize(const PlatformProfile& profile, const CharacterizationOptions& options) {
  using prof::Figure;
  if (options.frames == 0) throw InvalidArgument("frames must be >= 1");
  if (options.min_spacing <= TimeNs{0} || options.max_spacing < options.min_spacing) {
    throw InvalidArgument("invalid release spacing");
  }
  const Topology topology = characterization_topology(options.link_rate_bps);

  StreamSpec stream;
  stream.id = 0;
  stream.talker = "talker";
  stream.listener = "listener";
  stream.period = options.max_spacing;
  stream.deadline = options.max_spacing;
  stream.jitter_bound = options.max_spacing;
  stream.frame_size = options.frame_size;
  stream.traffic_class = 0;
  stream.path = make_path(route(topology, stream.talker, stream.listener));
  const std::vector<StreamSpec> streams{stream};

  // All queues open so that no frame is ever held by a gate.
  Schedule schedule;
  schedule.cycle_time = kMillisecond;
  schedule.offsets[0] = TimeNs{0};
  for (const auto& hop : stream.path) {
    if (topology.is_bridge(hop.node)) schedule.gcls.emplace(hop.egress_port, GateControlList::always_open());
  }

  Rng spacing_rng = Rng(options.seed).substream("characterize/spacing");
  std::vector<ScheduledRelease> releases;
  TimeNs at{0};
  const double span = static_cast<double>((options.max_spacing - options.min_spacing).count());
  for (std::size_t i = 0; i < options.frames; ++i) {
    releases.push_back({0, static_cast<std::int64_t>(i), at});
    at += options.min_spacing + TimeNs{std::llround(spacing_rng.uniform() * span)};
  }

  RunOptions run_options;
  run_options.profile_name = profile.name;
  run_options.drain = true;
  prof::CharacterizationReport report;
  report.trace = simulate(topology, streams, schedule, profile.model, options.probes, releases, at,
                          options.seed, run_options);
  report.profile = profile.name;
  report.seed = options.seed;
  report.frames = options.frames;
  report.probes = options.probes;
  report.insufficient_samples = options.frames < prof::kMinCharacterizationFrames;

  const auto& records = report.trace.records;
  for (auto f : prof::kAllFigures) {
    auto series = prof::series_of(records, f);
    if (series.empty()) continue;
    report.figures[f] = prof::summarize(series);
    report.jitter[f] = prof::jitter(series);
  }
  std::vector<TimeNs> residual;
  for (const auto& r : records) {
    if (auto t1 = r.at(ProbePoint::t1)) report.talker_error_bound = std::max(report.talker_error_bound, *t1 - r.release);
    const auto lat = prof::latencies(r);
    if (lat[Figure::e2e_nic] && lat[Figure::br1_l] && lat[Figure::br2_l]) {
      residual.push_back(*lat[Figure::e2e_nic] - *lat[Figure::br1_l] - *lat[Figure::br2_l]);
    }
  }
  report.residual_range = prof::jitter(residual).range;

  const auto& t2 = options.probes.at(ProbePoint::t2);
  report.expected_br1l_median = profile.model.residence_at("B1").median +
                                (t2.enabled ? profile.model.overhead_of(t2.method).median : TimeNs{0}) +
                                transmission_time(options.frame_size, options.link_rate_bps);
  if (auto it = report.figures.find(Figure::br1_l); it != report.figures.end()) {
    const double expected = static_cast<double>(report.expected_br1l_median.count());
    const double measured = static_cast<double>(it->second.median.count());
    report.calibration_ok = std::abs(measured - expected) <= 0.05 * expected;
  }
  if (!report.insufficient_samples && report.jitter.count(Figure::br1_l) && report.jitter.count(Figure::br2_l)) {
    report.intrinsic_jitter = prof::estimate_intrinsic_jitter(report);
  }
  return report;
}

}  // namespace tsn::sim
