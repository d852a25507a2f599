#include "tsn/scheduler.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <set>

#include "tsn/errors.hpp"
#include "tsn/profiler.hpp"
#include "tsn/tas.hpp"

namespace tsn::sched {

NetworkParams NetworkParams::from_topology(const Topology& t, TimeNs bridge_latency_bound, TimeNs intrinsic_jitter) {
  NetworkParams p;
  p.bridge_latency_bound = bridge_latency_bound;
  p.intrinsic_jitter = intrinsic_jitter;
  for (const auto& l : t.links) {
    p.links[make_port_id(l.endpoint_a, l.endpoint_b)] = {l.rate_bps, l.propagation_delay};
    p.links[make_port_id(l.endpoint_b, l.endpoint_a)] = {l.rate_bps, l.propagation_delay};
  }
  return p;
}

const LinkParams& NetworkParams::at(const PortId& port) const {
  auto it = links.find(port);
  if (it == links.end()) throw InvalidArgument("no link parameters for port " + port);
  return it->second;
}

TimeNs window_width(const StreamSpec& s, const PortId& port, const NetworkParams& p) {
  return ceil_to(transmission_time(s.frame_size, p.at(port).rate_bps) + 2 * p.intrinsic_jitter, kQuantum);
}

bool FeasibilityReport::has(char check) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.check == check; });
}

bool TraceValidationReport::ok() const {
  return issues.empty() && std::all_of(streams.begin(), streams.end(), [](const StreamResult& r) { return r.ok(); });
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

TimeNs floor_mod(TimeNs t, TimeNs h) { return t - floor_div(t.count(), h.count()) * h; }

// End of the earliest occurrence of the cyclic interval [b0, b1) + mH that
// overlaps [a0, a1).
std::optional<TimeNs> cyclic_overlap_end(TimeNs a0, TimeNs a1, TimeNs b0, TimeNs b1, TimeNs h) {
  if (a0 >= a1 || b0 >= b1) return std::nullopt;
  const std::int64_t m = floor_div((a0 - b1).count(), h.count()) + 1;
  if (b0 + m * h < a1) return b1 + m * h;
  return std::nullopt;
}

struct HopInfo {
  PortId port;
  TimeNs tx{0};
  TimeNs prop{0};
  TimeNs width{0};
};

struct Geometry {
  TimeNs lead{0};  // release -> earliest ready at the first bridge egress
  std::vector<HopInfo> hops;  // gated (bridge) hops in path order
  TimeNs last_prop{0};
  TimeNs bridge_latency{0};
  TimeNs direct_latency{0};  // paths without bridges
};

Geometry geometry(const StreamSpec& s, const NetworkParams& p) {
  if (s.path.size() < 2) throw InvalidArgument("stream " + std::to_string(s.id) + " has no path");
  Geometry g;
  const auto& first = p.at(s.path.front().egress_port);
  const TimeNs tx0 = transmission_time(s.frame_size, first.rate_bps);
  g.lead = tx0 + first.propagation + p.bridge_latency_bound;
  g.bridge_latency = p.bridge_latency_bound;
  g.direct_latency = tx0 + first.propagation + p.intrinsic_jitter;
  for (std::size_t i = 1; i + 1 < s.path.size(); ++i) {
    const auto& port = s.path[i].egress_port;
    const auto& link = p.at(port);
    g.hops.push_back({port, transmission_time(s.frame_size, link.rate_bps), link.propagation, window_width(s, port, p)});
    g.last_prop = link.propagation;
  }
  return g;
}

struct Placed {
  int stream_id = 0;
  int instance = 0;
  int traffic_class = 0;
  TimeNs open{0};
  TimeNs close{0};
  TimeNs present_from{0};  // earliest arrival of the frame at the port
};

using Placement = std::map<PortId, std::vector<Placed>>;

struct Attempt {
  bool ok = false;
  std::string reason;
  TimeNs first_wait{0};
  Placement added;
};

std::string where(const StreamSpec& s, int k, const PortId& port) {
  return "stream " + std::to_string(s.id) + " instance " + std::to_string(k) + " at " + port;
}

Attempt try_offset(const StreamSpec& s, const Geometry& g, TimeNs offset, TimeNs h, const Placement& committed) {
  Attempt a;
  const auto n = static_cast<int>(h / s.period);
  auto for_each_on = [&](const PortId& port, auto&& fn) {
    for (const Placement* pl : {&committed, static_cast<const Placement*>(&a.added)}) {
      if (auto it = pl->find(port); it != pl->end()) {
        for (const auto& x : it->second) fn(x);
      }
    }
  };
  for (int k = 0; k < n; ++k) {
    const TimeNs release = offset + k * s.period;
    TimeNs earliest = release + g.lead;
    for (std::size_t hi = 0; hi < g.hops.size(); ++hi) {
      const auto& hop = g.hops[hi];
      if (hop.width > h) {
        a.reason = where(s, k, hop.port) + ": window wider than the cycle";
        return a;
      }
      const bool last = hi + 1 == g.hops.size();
      TimeNs open = ceil_to(earliest, kQuantum);
      for (;;) {
        const TimeNs close = open + hop.width;
        if (close + (last ? g.last_prop : TimeNs{0}) - release > s.deadline) {
          a.reason = where(s, k, hop.port) + ": no free window before the deadline";
          return a;
        }
        std::optional<TimeNs> push;
        for_each_on(hop.port, [&](const Placed& x) {
          if (auto end = cyclic_overlap_end(open, close, x.open, x.close, h)) push = std::max(push.value_or(*end), *end);
        });
        if (!push) break;
        open = ceil_to(*push, kQuantum);
      }
      const TimeNs close = open + hop.width;
      // With zero residence the frame can be queued up to one bridge latency
      // before `earliest`. It must not sit in its queue while another window
      // of its class is open, and must not be in the way of another frame.
      const TimeNs present_from = earliest - g.bridge_latency;
      bool leak = false;
      for_each_on(hop.port, [&](const Placed& x) {
        if (x.traffic_class != s.traffic_class) return;
        if (cyclic_overlap_end(present_from, close, x.open, x.close, h) ||
            cyclic_overlap_end(open, close, x.present_from, x.close, h)) {
          leak = true;
        }
      });
      if (leak) {
        a.reason = where(s, k, hop.port) + ": frame would share a gate window with another frame of class " +
                   std::to_string(s.traffic_class);
        return a;
      }
      if (k == 0 && hi == 0) a.first_wait = open - earliest;
      a.added[hop.port].push_back({s.id, k, s.traffic_class, open, close, present_from});
      // Next bridge: leaves by open + tx at the earliest, crosses the link,
      // then resides up to the bridge latency bound.
      earliest = open + hop.tx + hop.prop + g.bridge_latency;
    }
  }
  a.ok = true;
  return a;
}

std::vector<GateEntry> build_gcl(const std::vector<Placed>& windows, TimeNs h) {
  std::uint8_t scheduled = 0;
  for (const auto& w : windows) scheduled |= static_cast<std::uint8_t>(1u << w.traffic_class);
  const auto best_effort = static_cast<std::uint8_t>(~scheduled);

  struct Segment {
    TimeNs start, end;
    std::uint8_t mask;
  };
  std::vector<Segment> segs;
  for (const auto& w : windows) {
    const auto mask = static_cast<std::uint8_t>(1u << w.traffic_class);
    const TimeNs start = floor_mod(w.open, h);
    const TimeNs end = start + (w.close - w.open);
    if (end <= h) {
      segs.push_back({start, end, mask});
    } else {
      segs.push_back({start, h, mask});
      segs.push_back({TimeNs{0}, end - h, mask});
    }
  }
  std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.start < b.start; });

  std::vector<GateEntry> entries;
  auto append = [&](std::uint8_t mask, TimeNs d) {
    if (d <= TimeNs{0}) return;
    if (!entries.empty() && entries.back().gate_mask == mask) {
      entries.back().duration += d;
    } else {
      entries.push_back({mask, d});
    }
  };
  TimeNs t{0};
  for (const auto& seg : segs) {
    append(best_effort, seg.start - t);
    append(seg.mask, seg.end - seg.start);
    t = seg.end;
  }
  append(best_effort, h - t);
  return entries;
}

}  // namespace

Schedule synthesize(std::vector<StreamSpec> streams, const Topology& t, const NetworkParams& p) {
  if (streams.empty()) throw InvalidArgument("no streams to schedule");
  if (p.bridge_latency_bound < TimeNs{0} || p.intrinsic_jitter < TimeNs{0}) {
    throw InvalidArgument("network parameters must be non-negative");
  }
  resolve_paths(streams, t);
  for (const auto& s : streams) {
    if (auto r = validate_stream(s, t, true); !r.ok()) throw InvalidArgument(r.violations.front());
  }
  const TimeNs h = hyperperiod(streams);

  std::vector<const StreamSpec*> order;
  for (const auto& s : streams) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const StreamSpec* a, const StreamSpec* b) { return std::tie(a->period, a->id) < std::tie(b->period, b->id); });

  Schedule out;
  out.cycle_time = h;
  Placement committed;
  for (const StreamSpec* s : order) {
    const Geometry g = geometry(*s, p);
    if (g.hops.empty()) {
      if (g.direct_latency > s->deadline) {
        throw Infeasible("stream " + std::to_string(s->id) + ": direct path latency exceeds the deadline");
      }
      out.offsets[s->id] = TimeNs{0};
      continue;
    }

    // Candidate offsets: 0, then offsets that put the first-hop earliest
    // arrival right at the end of an existing window.
    std::vector<TimeNs> candidates{TimeNs{0}};
    if (auto it = committed.find(g.hops.front().port); it != committed.end()) {
      std::set<TimeNs> extra;
      for (const auto& x : it->second) {
        const TimeNs o = ceil_to(floor_mod(x.close - g.lead, s->period), kQuantum);
        if (o < s->period && o > TimeNs{0}) extra.insert(o);
      }
      candidates.insert(candidates.end(), extra.begin(), extra.end());
    }

    std::optional<Attempt> chosen;
    TimeNs chosen_offset{0};
    std::string reason;
    for (TimeNs o : candidates) {
      Attempt a = try_offset(*s, g, o, h, committed);
      if (!a.ok) {
        reason = a.reason;
        continue;
      }
      // Shift the release so the first frame does not wait at its first gate.
      if (a.first_wait > TimeNs{0} && o + a.first_wait < s->period) {
        Attempt aligned = try_offset(*s, g, o + a.first_wait, h, committed);
        if (aligned.ok) {
          chosen = std::move(aligned);
          chosen_offset = o + a.first_wait;
          break;
        }
      }
      chosen = std::move(a);
      chosen_offset = o;
      break;
    }
    if (!chosen) throw Infeasible(reason);
    out.offsets[s->id] = chosen_offset;
    for (auto& [port, ws] : chosen->added) {
      auto& dst = committed[port];
      dst.insert(dst.end(), ws.begin(), ws.end());
    }
  }

  for (auto& [port, ws] : committed) {
    std::sort(ws.begin(), ws.end(), [](const Placed& a, const Placed& b) { return a.open < b.open; });
    out.gcls.emplace(port, GateControlList(out.instant_zero, h, build_gcl(ws, h)));
    auto& dst = out.windows[port];
    for (const auto& w : ws) dst.push_back({w.stream_id, w.instance, w.traffic_class, w.open, w.close});
  }
  return out;
}

TimeNs worst_case_latency(const Schedule& s, const StreamSpec& stream, int instance, const NetworkParams& p) {
  const Geometry g = geometry(stream, p);
  if (g.hops.empty()) return g.direct_latency;
  auto off = s.offsets.find(stream.id);
  if (off == s.offsets.end()) throw InvalidArgument("schedule has no offset for stream " + std::to_string(stream.id));
  const TimeNs release = off->second + instance * stream.period;
  auto ws = s.windows.find(g.hops.back().port);
  if (ws != s.windows.end()) {
    for (const auto& w : ws->second) {
      if (w.stream_id == stream.id && w.instance == instance) return w.close + g.last_prop - release;
    }
  }
  throw InvalidArgument(where(stream, instance, g.hops.back().port) + ": no window");
}

FeasibilityReport check_schedule(const Schedule& s, const std::vector<StreamSpec>& streams, const NetworkParams& p) {
  FeasibilityReport rep;
  auto fail = [&](char check, PortId port, int stream, int instance, std::string msg) {
    rep.violations.push_back({check, std::move(port), stream, instance, std::move(msg)});
  };

  TimeNs h{0};
  try {
    h = hyperperiod(streams);
  } catch (const Error& e) {
    fail('s', "", -1, -1, e.what());
    return rep;
  }
  if (s.cycle_time != h) {
    fail('s', "", -1, -1,
         "cycle time " + format_duration(s.cycle_time) + " differs from the hyperperiod " + format_duration(h));
    return rep;
  }

  // Classes scheduled per port, for the exclusive-gating check.
  std::map<PortId, std::uint8_t> scheduled;
  for (const auto& [port, ws] : s.windows) {
    for (const auto& w : ws) {
      scheduled[port] |= static_cast<std::uint8_t>(1u << w.traffic_class);
      if (!find_stream(streams, w.stream_id)) {
        fail('s', port, w.stream_id, w.instance, "window for unknown stream " + std::to_string(w.stream_id));
      }
    }
  }
  for (const auto& [port, gcl] : s.gcls) {
    if (gcl.cycle_time() != s.cycle_time) fail('s', port, -1, -1, "gate control list cycle differs from the schedule");
    for (const auto& e : gcl.entries()) {
      if (std::popcount(static_cast<unsigned>(e.gate_mask & scheduled[port])) > 1) {
        fail('s', port, -1, -1, "gate entry opens more than one scheduled class");
        break;
      }
    }
  }

  // Per port: when each instance may be queued, for the same-class check.
  Placement presence;
  for (const auto& st : streams) {
    auto off = s.offsets.find(st.id);
    if (off == s.offsets.end() || off->second < TimeNs{0} || off->second >= st.period) {
      fail('s', "", st.id, -1, "stream " + std::to_string(st.id) + " has no valid offset");
      continue;
    }
    Geometry g;
    try {
      g = geometry(st, p);
    } catch (const Error& e) {
      fail('s', "", st.id, -1, e.what());
      continue;
    }
    const auto n = static_cast<int>(h / st.period);
    if (g.hops.empty()) {
      for (int k = 0; k < n; ++k) {
        rep.bounds.push_back({st.id, k, g.direct_latency, st.deadline});
        if (g.direct_latency > st.deadline) {
          fail('b', "", st.id, k, "stream " + std::to_string(st.id) + ": direct path latency exceeds the deadline");
        }
      }
      continue;
    }
    for (int k = 0; k < n; ++k) {
      const TimeNs release = off->second + k * st.period;
      TimeNs earliest = release + g.lead;
      std::optional<TimeNs> last_close;
      bool complete = true;
      for (const auto& hop : g.hops) {
        const WindowReservation* mine = nullptr;
        int matches = 0;
        if (auto it = s.windows.find(hop.port); it != s.windows.end()) {
          for (const auto& w : it->second) {
            if (w.stream_id == st.id && w.instance == k) {
              mine = &w;
              ++matches;
            }
          }
        }
        if (matches != 1) {
          fail('s', hop.port, st.id, k, where(st, k, hop.port) + ": expected one window, found " + std::to_string(matches));
          complete = false;
          break;
        }
        const auto& w = *mine;
        if (w.traffic_class != st.traffic_class) fail('s', hop.port, st.id, k, where(st, k, hop.port) + ": wrong class");
        if (w.open % kQuantum != TimeNs{0} || w.close % kQuantum != TimeNs{0}) {
          fail('s', hop.port, st.id, k, where(st, k, hop.port) + ": window not aligned to 1us");
        }
        if (w.width() < hop.tx + 2 * p.intrinsic_jitter) {
          fail('c', hop.port, st.id, k,
               where(st, k, hop.port) + ": width " + format_duration(w.width()) + " below " +
                   format_duration(hop.tx + 2 * p.intrinsic_jitter));
        }
        if (w.open < earliest) {
          fail('s', hop.port, st.id, k, where(st, k, hop.port) + ": window opens before the frame can arrive");
        }
        auto gcl = s.gcls.find(hop.port);
        if (gcl == s.gcls.end()) {
          fail('s', hop.port, st.id, k, "no gate control list for " + hop.port);
        } else if (w.width() > TimeNs{0} && w.width() <= s.cycle_time) {
          const TimeNs at = gcl->second.base_time() + floor_mod(w.open, s.cycle_time);
          auto iv = tas::open_interval_at(gcl->second, st.traffic_class, at);
          if (!iv || iv->close < at + w.width()) {
            fail('s', hop.port, st.id, k, where(st, k, hop.port) + ": gate program does not hold the window open");
          }
        }
        presence[hop.port].push_back(
            {st.id, k, st.traffic_class, w.open, w.close, earliest - p.bridge_latency_bound});
        earliest = w.open + hop.tx + p.bridge_latency_bound + hop.prop;
        last_close = w.close;
      }
      if (!complete || !last_close) continue;
      const TimeNs worst = *last_close + g.last_prop - release;
      rep.bounds.push_back({st.id, k, worst, st.deadline});
      if (worst > st.deadline) {
        fail('b', g.hops.back().port, st.id, k,
             "stream " + std::to_string(st.id) + " instance " + std::to_string(k) + ": worst-case latency " +
                 format_duration(worst) + " exceeds deadline " + format_duration(st.deadline));
      }
    }
  }

  for (const auto& [port, ws] : s.windows) {
    for (std::size_t i = 0; i < ws.size(); ++i) {
      for (std::size_t j = i + 1; j < ws.size(); ++j) {
        const auto& x = ws[i];
        const auto& y = ws[j];
        if (s.cycle_time <= TimeNs{0}) break;
        if (cyclic_overlap_end(x.open, x.close, y.open, y.close, s.cycle_time)) {
          fail('a', port, x.stream_id, x.instance,
               port + ": window [" + std::to_string(x.open.count()) + ", " + std::to_string(x.close.count()) +
                   ") of stream " + std::to_string(x.stream_id) + " overlaps [" + std::to_string(y.open.count()) +
                   ", " + std::to_string(y.close.count()) + ") of stream " + std::to_string(y.stream_id));
        }
      }
    }
  }
  // A queued frame leaves in the first open window of its class, so no
  // other window of that class may open while it can be waiting.
  for (const auto& [port, ps] : presence) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
      for (std::size_t j = 0; j < ps.size(); ++j) {
        const auto& x = ps[i];
        const auto& y = ps[j];
        if (i == j || x.traffic_class != y.traffic_class) continue;
        if (cyclic_overlap_end(x.present_from, x.open, y.open, y.close, s.cycle_time)) {
          fail('s', port, x.stream_id, x.instance,
               port + ": stream " + std::to_string(x.stream_id) + " instance " + std::to_string(x.instance) +
                   " may be queued while the window of stream " + std::to_string(y.stream_id) + " instance " +
                   std::to_string(y.instance) + " is open");
        }
      }
    }
  }
  return rep;
}

TraceValidationReport validate_against_trace(const Schedule& s, const std::vector<StreamSpec>& streams,
                                             const TraceSet& traces) {
  const std::string fp = s.fingerprint();
  if (traces.meta.schedule_fingerprint != fp) {
    throw TraceMismatch("trace was produced under schedule " + traces.meta.schedule_fingerprint + ", not " + fp);
  }
  TraceValidationReport rep;
  rep.in_flight = traces.meta.in_flight;
  std::map<int, StreamResult> results;
  std::map<int, std::pair<TimeNs, TimeNs>> span;
  for (const auto& st : streams) {
    auto& r = results[st.id];
    r.stream_id = st.id;
    r.deadline = st.deadline;
    r.jitter_bound = st.jitter_bound;
  }

  for (const auto& rec : traces.records) {
    auto it = results.find(rec.stream_id);
    if (it == results.end()) continue;
    auto& r = it->second;
    r.frames += 1;
    const auto t1 = rec.at(sim::ProbePoint::t1);
    const auto t4 = rec.at(sim::ProbePoint::t4);
    if (!t1 || !t4) continue;
    const TimeNs e2e = *t4 - *t1;
    r.worst_e2e_nic = std::max(r.worst_e2e_nic, e2e);
    auto [sp, fresh] = span.try_emplace(rec.stream_id, e2e, e2e);
    if (!fresh) {
      sp->second.first = std::min(sp->second.first, e2e);
      sp->second.second = std::max(sp->second.second, e2e);
    }
    if (e2e > r.deadline) {
      r.late_frames += 1;
      rep.issues.push_back({'i', rec.stream_id, rec.seq, "",
                            "e2e.nic " + format_duration(e2e) + " exceeds deadline " + format_duration(r.deadline)});
    }
  }
  for (const auto& [id, sp] : span) results[id].jitter = sp.second - sp.first;

  for (const auto& tx : traces.transmissions) {
    if (!s.windows.count(tx.port)) continue;
    const StreamSpec* st = find_stream(streams, tx.stream_id);
    if (!st) continue;
    auto w = prof::assigned_window(s, *st, tx.port, tx.seq);
    if (w && tx.start >= w->open && tx.finish <= w->close) continue;
    results[tx.stream_id].window_misses += 1;
    std::string msg = w ? "transmission [" + std::to_string(tx.start.count()) + ", " + std::to_string(tx.finish.count()) +
                              ") outside window [" + std::to_string(w->open.count()) + ", " +
                              std::to_string(w->close.count()) + ")"
                        : "no window assigned";
    rep.issues.push_back({'w', tx.stream_id, tx.seq, tx.port, std::move(msg)});
  }
  for (auto& [id, r] : results) rep.streams.push_back(r);
  return rep;
}

}  // namespace tsn::sched
