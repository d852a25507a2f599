#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include "tsn/cli.hpp"
#include "tsn/engine.hpp"
#include "tsn/errors.hpp"
#include "tsn/scheduler.hpp"
#include "tsn/serialization.hpp"
#include "tsn/svg.hpp"
#include "tsn/trace_io.hpp"

namespace tsn::cli {

namespace fs = std::filesystem;

namespace {

std::string us(TimeNs t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", to_us(t));
  return buf;
}

std::string port_file(const std::string& prefix, const PortId& port, const char* ext) {
  std::string name = port;
  std::replace(name.begin(), name.end(), ':', '_');
  return prefix + name + ext;
}

Topology load_topology(const fs::path& path) {
  Topology t = io::topology_from_json(io::read_json_file(path));
  if (auto r = validate_topology(t); !r.ok()) throw InvalidArgument(path.string() + ": " + r.violations.front());
  return t;
}

std::vector<StreamSpec> load_streams(const fs::path& path, const Topology& t, bool relax) {
  auto streams = io::streams_from_json(io::read_json_file(path));
  if (streams.empty()) throw InvalidArgument(path.string() + ": no streams");
  resolve_paths(streams, t);
  for (const auto& s : streams) {
    if (auto r = validate_stream(s, t, relax); !r.ok()) throw InvalidArgument(path.string() + ": " + r.violations.front());
  }
  return streams;
}

sim::PlatformProfile load_profile(const ProfileOptions& o) {
  if (!o.latency_model.empty()) return io::profile_from_json(io::read_json_file(o.latency_model));
  if (o.profile.size() > 5 && o.profile.ends_with(".json")) return io::profile_from_json(io::read_json_file(o.profile));
  return sim::builtin_profile(o.profile, o.allocation);
}

sim::ProbeConfig load_probes(const ProbeOptions& o) {
  auto p = o.probes_file.empty() ? sim::ProbeConfig::defaults() : io::probe_config_from_json(io::read_json_file(o.probes_file));
  if (!o.bridge_method.empty()) p = p.with_bridge_method(sim::parse_probe_method(o.bridge_method));
  if (!o.t4_method.empty()) p.at(sim::ProbePoint::t4).method = sim::parse_probe_method(o.t4_method);
  if (o.no_bridge_probes) p = p.without_bridge_probes();
  sim::validate(p);
  return p;
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ParseError("bad number '" + s + "'");
  return v;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (auto dash = part.find('-'); dash != std::string::npos && dash > 0) {
      const auto lo = parse_u64(part.substr(0, dash));
      const auto hi = parse_u64(part.substr(dash + 1));
      if (hi < lo || hi - lo > 100000) throw ParseError("bad seed range '" + part + "'");
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      out.push_back(parse_u64(part));
    }
  }
  if (out.empty()) throw ParseError("empty seed list");
  return out;
}

sim::FaultInjection parse_fault(const std::string& text) {
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw ParseError("--inject-delay expects stream:seq:delay, got '" + text + "'");
  }
  sim::FaultInjection f;
  f.stream_id = static_cast<int>(parse_u64(text.substr(0, a)));
  f.seq = static_cast<std::int64_t>(parse_u64(text.substr(a + 1, b - a - 1)));
  f.extra_delay = parse_duration(text.substr(b + 1));
  return f;
}

void print_figures(std::ostream& out, const std::map<prof::Figure, prof::StatSummary>& figures,
                   const std::map<prof::Figure, prof::Jitter>& jitter) {
  out << "figure    count     median_us     iqr_us   range_us\n";
  for (auto f : prof::kAllFigures) {
    auto it = figures.find(f);
    if (it == figures.end()) continue;
    char line[128];
    const auto j = jitter.count(f) ? jitter.at(f) : prof::Jitter{};
    std::snprintf(line, sizeof line, "%-8s %6zu %13s %10s %10s\n", prof::to_string(f).c_str(), it->second.count,
                  us(it->second.median).c_str(), us(j.iqr).c_str(), us(j.range).c_str());
    out << line;
  }
}

}  // namespace

int cmd_characterize(const CharacterizeOptions& o, std::ostream& out) {
  if (o.frames < 1) throw InvalidArgument("frames must be >= 1");
  const auto profile = load_profile(o.profile);
  sim::CharacterizationOptions copt;
  copt.frames = static_cast<std::size_t>(o.frames);
  copt.seed = o.seed;
  copt.probes = load_probes(o.probes);
  const auto report = sim::characterize(profile, copt);

  io::save_trace_set(o.out, report.trace);
  io::write_text_file(o.out / "summary.csv", io::summary_csv(report.figures));
  io::write_text_file(o.out / "characterization.json", io::dump(io::to_json(report)));

  out << "profile " << report.profile << ", " << report.frames << " frames, seed " << report.seed << ", probes "
      << report.probes.label() << "\n";
  print_figures(out, report.figures, report.jitter);
  out << "talker error bound: " << format_duration(report.talker_error_bound) << "\n";
  out << "residual range: " << us(report.residual_range) << " us\n";
  if (report.intrinsic_jitter) {
    out << "intrinsic jitter estimate: " << format_duration(*report.intrinsic_jitter) << "\n";
  } else {
    out << "intrinsic jitter estimate: n/a (insufficient samples)\n";
  }
  if (report.insufficient_samples) out << "warning: insufficient samples for jitter figures\n";
  if (auto it = report.figures.find(prof::Figure::br1_l); it != report.figures.end()) {
    out << "calibration: " << (report.calibration_ok ? "pass" : "fail") << " (br1L median " << us(it->second.median)
        << " us, expected " << us(report.expected_br1l_median) << " us)\n";
  }
  out << "wrote " << o.out.string() << "\n";
  return kOk;
}

int cmd_schedule(const ScheduleOptions& o, std::ostream& out) {
  const auto topo = load_topology(o.topology);
  const auto streams = load_streams(o.streams, topo, o.relax_deadline);
  TimeNs jitter = parse_duration(o.intrinsic_jitter);
  if (!o.characterization.empty()) {
    const auto j = io::read_json_file(o.characterization);
    if (!j.contains("intrinsic_jitter") || !j["intrinsic_jitter"].is_number_integer()) {
      throw InvalidArgument(o.characterization.string() + " holds no intrinsic jitter estimate");
    }
    jitter = TimeNs{j["intrinsic_jitter"].get<std::int64_t>()};
  }
  const auto params = sched::NetworkParams::from_topology(topo, parse_duration(o.bridge_latency), jitter);
  const Schedule s = sched::synthesize(streams, topo, params);
  const auto report = sched::check_schedule(s, streams, params);

  io::write_text_file(o.out / "schedule.json", io::dump(io::to_json(s)));
  for (const auto& [port, gcl] : s.gcls) io::write_text_file(o.out / port_file("gcl_", port, ".json"), io::dump(io::to_json(gcl)));

  io::Json fj{{"feasible", report.ok()}, {"violations", io::Json::array()}, {"bounds", io::Json::array()}};
  for (const auto& v : report.violations) {
    fj["violations"].push_back({{"check", std::string(1, v.check)},
                                {"port", v.port},
                                {"stream_id", v.stream_id},
                                {"instance", v.instance},
                                {"message", v.message}});
  }
  for (const auto& b : report.bounds) {
    fj["bounds"].push_back(
        {{"stream_id", b.stream_id}, {"instance", b.instance}, {"worst", b.worst.count()}, {"deadline", b.deadline.count()}});
  }
  io::write_text_file(o.out / "feasibility.json", io::dump(fj));

  out << "hyperperiod " << format_duration(s.cycle_time) << ", bridge latency " << format_duration(params.bridge_latency_bound)
      << ", intrinsic jitter " << format_duration(params.intrinsic_jitter) << "\n";
  for (const auto& st : streams) {
    TimeNs worst{0};
    for (const auto& b : report.bounds) {
      if (b.stream_id == st.id) worst = std::max(worst, b.worst);
    }
    out << "stream " << st.id << ": offset " << format_duration(s.offsets.at(st.id)) << ", worst-case latency "
        << us(worst) << " us, deadline " << format_duration(st.deadline) << "\n";
  }
  for (const auto& [port, gcl] : s.gcls) {
    out << "gcl " << port << ": " << gcl.entries().size() << " entries, " << s.windows.at(port).size() << " windows\n";
  }
  for (const auto& v : report.violations) out << "violation (" << v.check << "): " << v.message << "\n";
  out << (report.ok() ? "feasible" : "infeasible") << "; wrote " << o.out.string() << "\n";
  return report.ok() ? kOk : kInfeasible;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const auto topo = load_topology(o.topology);
  const auto streams = load_streams(o.streams, topo, o.relax_deadline);
  const Schedule s = io::schedule_from_json(io::read_json_file(o.schedule));
  const auto profile = load_profile(o.profile);
  const auto probes = load_probes(o.probes);

  TimeNs duration{0};
  if (!o.duration.empty()) {
    duration = parse_duration(o.duration);
  } else {
    if (o.hyperperiods < 1) throw InvalidArgument("hyperperiods must be >= 1");
    duration = o.hyperperiods * hyperperiod(streams);
  }
  if (duration <= TimeNs{0}) throw InvalidArgument("duration must be > 0");

  sim::RunOptions ropt;
  ropt.profile_name = profile.name;
  if (o.inject_delay.size() > 1) throw InvalidArgument("only one --inject-delay is supported");
  if (!o.inject_delay.empty()) ropt.fault = parse_fault(o.inject_delay.front());

  auto summary = [&](const TraceSet& ts, const fs::path& dir) {
    out << "seed " << ts.meta.seed << ": " << ts.meta.generated << " frames generated, " << ts.meta.delivered
        << " delivered, " << ts.meta.in_flight << " in flight -> " << dir.string() << "\n";
  };
  if (!o.seeds.empty()) {
    const auto seeds = parse_seeds(o.seeds);
    const auto runs = sim::run_seeds(topo, streams, s, profile.model, probes, duration, seeds, o.parallel_seeds, ropt);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const fs::path dir = o.out / ("seed-" + std::to_string(seeds[i]));
      io::save_trace_set(dir, runs[i]);
      summary(runs[i], dir);
    }
    return kOk;
  }
  const auto ts = sim::run(topo, streams, s, profile.model, probes, duration, o.seed, ropt);
  io::save_trace_set(o.out, ts);
  summary(ts, o.out);
  return kOk;
}

int cmd_validate(const ValidateOptions& o, std::ostream& out) {
  const TraceSet ts = io::load_trace_set(o.trace);
  const Schedule s = io::schedule_from_json(io::read_json_file(o.schedule));
  std::vector<StreamSpec> streams = ts.meta.streams;
  if (!o.streams.empty()) {
    if (!o.topology.empty()) {
      streams = load_streams(o.streams, load_topology(o.topology), true);
    } else {
      streams = io::streams_from_json(io::read_json_file(o.streams));
      for (const auto& st : streams) {
        if (st.path.empty()) throw InvalidArgument("stream " + std::to_string(st.id) + " has no path; pass --topology");
      }
    }
  }
  if (streams.empty()) throw InvalidArgument("no stream definitions in the trace metadata; pass --streams");

  const auto rep = sched::validate_against_trace(s, streams, ts);
  out << "stream  frames  worst_e2e_nic_us  deadline_us  margin_us  jitter_us  bound_us  deadline  windows  jitter\n";
  for (const auto& r : rep.streams) {
    char line[256];
    std::snprintf(line, sizeof line, "%6d %7zu %17s %12s %10s %10s %9s  %-8s  %-7s  %s\n", r.stream_id, r.frames,
                  us(r.worst_e2e_nic).c_str(), us(r.deadline).c_str(), us(r.margin()).c_str(), us(r.jitter).c_str(),
                  us(r.jitter_bound).c_str(), r.deadline_ok() ? "PASS" : "FAIL", r.windows_ok() ? "PASS" : "FAIL",
                  r.jitter_ok() ? "PASS" : "FAIL");
    out << line;
  }

  out << "pass-through per gated port:\n";
  for (const auto& [port, ws] : s.windows) {
    const auto rows = prof::pass_through(ts, s, port);
    std::size_t within = 0;
    TimeNs worst{0};
    TimeNs width = TimeNs::max();
    for (const auto& r : rows) {
      within += r.within ? 1 : 0;
      worst = std::max(worst, r.complete_offset);
      width = std::min(width, r.width);
    }
    out << "  " << port << ": " << within << "/" << rows.size() << " within window, max complete offset " << us(worst)
        << " us";
    if (!rows.empty()) out << ", narrowest window " << us(width) << " us";
    out << "\n";
    if (!o.out.empty()) io::write_text_file(o.out / port_file("pass_through_", port, ".csv"), io::pass_through_csv(rows));
  }
  if (rep.in_flight > 0) out << rep.in_flight << " frames still in flight at the horizon\n";

  constexpr std::size_t kMaxListed = 20;
  for (std::size_t i = 0; i < rep.issues.size() && i < kMaxListed; ++i) {
    const auto& f = rep.issues[i];
    out << "FAIL (" << f.check << ") stream " << f.stream_id << " seq " << f.seq;
    if (!f.port.empty()) out << " at " << f.port;
    out << ": " << f.message << "\n";
  }
  if (rep.issues.size() > kMaxListed) out << "... " << rep.issues.size() - kMaxListed << " more\n";
  for (const auto& r : rep.streams) {
    if (!r.jitter_ok()) {
      out << "FAIL (iii) stream " << r.stream_id << ": e2e.nic jitter " << us(r.jitter) << " us exceeds "
          << us(r.jitter_bound) << " us\n";
    }
  }
  out << (rep.ok() ? "validation passed" : "validation failed") << "\n";
  return rep.ok() ? kOk : kValidationFailed;
}

int cmd_report(const ReportOptions& o, std::ostream& out) {
  struct Tagged {
    std::string group;
    int order;
    const TimestampRecord* record;
  };
  std::vector<TraceSet> sets;
  for (const auto& p : o.traces) sets.push_back(io::load_trace_set(p));

  std::vector<Tagged> tagged;
  std::vector<TimestampRecord> all;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (const auto& r : sets[i].records) {
      all.push_back(r);
      if (o.group_by == "stream") {
        tagged.push_back({"stream " + std::to_string(r.stream_id), r.stream_id, &r});
      } else if (o.group_by == "method") {
        tagged.push_back({sets[i].meta.probes.label(), static_cast<int>(i), &r});
      } else {
        tagged.push_back({"all", 0, &r});
      }
    }
  }
  if (all.empty()) throw ParseError("trace contains no frames");

  // Groups keep the order of their first key (stream id or --trace position).
  std::map<std::string, int> group_order;
  for (const auto& t : tagged) group_order.try_emplace(t.group, t.order);
  std::vector<std::string> groups;
  for (const auto& [g, ord] : group_order) groups.push_back(g);
  std::stable_sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) { return group_order[a] < group_order[b]; });

  std::map<prof::Figure, prof::StatSummary> overall;
  std::vector<io::GroupedSummary> grouped;
  std::vector<std::string> written;
  for (auto f : prof::kAllFigures) {
    auto series = prof::series_of(all, f);
    if (series.empty()) continue;
    overall[f] = prof::summarize(series);
    std::vector<svg::Box> boxes;
    for (const auto& g : groups) {
      std::vector<TimeNs> xs;
      for (const auto& t : tagged) {
        if (t.group != g) continue;
        if (auto v = prof::latencies(*t.record)[f]) xs.push_back(*v);
      }
      if (xs.empty()) continue;
      auto sum = prof::summarize(xs);
      grouped.push_back({g, f, sum});
      boxes.push_back({g, std::move(sum)});
    }
    const std::string file = prof::to_string(f) + ".svg";
    io::write_text_file(o.out / file, svg::box_plot(prof::to_string(f) + " latency", boxes));
    written.push_back(file);
  }
  io::write_text_file(o.out / "summary.csv", io::summary_csv(overall));
  written.push_back("summary.csv");
  if (o.group_by != "none") {
    const std::string file = "summary_by_" + o.group_by + ".csv";
    io::write_text_file(o.out / file, io::grouped_summary_csv(grouped));
    written.push_back(file);
  }
  print_figures(out, overall, {});
  for (const auto& w : written) out << "wrote " << (o.out / w).string() << "\n";
  return kOk;
}

int cmd_gcl_dump(const GclDumpOptions& o, std::ostream& out) {
  if (o.cycles < 1) throw InvalidArgument("cycles must be >= 1");
  const Schedule s = io::schedule_from_json(io::read_json_file(o.schedule));
  if (!o.port.empty() && !s.gcls.count(o.port)) throw UnknownPort("schedule has no gate control list for '" + o.port + "'");
  for (const auto& [port, gcl] : s.gcls) {
    if (!o.port.empty() && port != o.port) continue;
    const std::string csv = io::gcl_timeline_csv(gcl, o.cycles);
    if (o.out.empty()) {
      if (o.port.empty()) out << "# " << port << "\n";
      out << csv;
    } else {
      const fs::path file = o.out / port_file("gcl_", port, ".csv");
      io::write_text_file(file, csv);
      out << "wrote " << file.string() << "\n";
    }
  }
  return kOk;
}

}  // namespace tsn::cli
