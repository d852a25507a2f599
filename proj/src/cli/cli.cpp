#include "tsn/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "commands.hpp"
#include "tsn/errors.hpp"

namespace tsn::cli {

namespace {

std::filesystem::path default_out(const char* leaf) {
  const char* env = std::getenv(kOutDirEnv);
  std::filesystem::path base = env && *env ? env : "out";
  return base / leaf;
}

void add_profile(CLI::App* app, ProfileOptions& p) {
  app->add_option("--profile", p.profile, "Platform preset (C1, C2, C3) or profile JSON file")
      ->capture_default_str();
  app->add_option("--allocation", p.allocation, "C3 core allocation (1-3)");
  app->add_option("--latency-model", p.latency_model, "Custom latency model JSON (overrides --profile)");
}

void add_probes(CLI::App* app, ProbeOptions& p) {
  app->add_option("--probes", p.probes_file, "Probe configuration JSON");
  app->add_option("--bridge-method", p.bridge_method, "Method at T2/T3 (M2.2 or M3)");
  app->add_option("--t4-method", p.t4_method, "Method at T4 (M2.1 or M3)");
  app->add_flag("--no-bridge-probes", p.no_bridge_probes, "Disable T2/T3");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic TSN simulator and latency profiler"};
  app.name("tsnsim");
  app.require_subcommand(1);

  CharacterizeOptions co;
  co.out = default_out("characterize");
  auto* characterize = app.add_subcommand("characterize", "Measure latencies on a two-bridge chain with open gates");
  add_profile(characterize, co.profile);
  add_probes(characterize, co.probes);
  characterize->add_option("--frames", co.frames, "Number of frames")->capture_default_str();
  characterize->add_option("--seed", co.seed, "Random seed")->capture_default_str();
  characterize->add_option("--out", co.out, "Output directory");

  ScheduleOptions so;
  so.out = default_out("schedule");
  auto* schedule = app.add_subcommand("schedule", "Synthesize offsets and gate control lists");
  schedule->add_option("--topology", so.topology, "Topology JSON")->required();
  schedule->add_option("--streams", so.streams, "Streams JSON")->required();
  schedule->add_option("--bridge-latency", so.bridge_latency, "Bridge latency bound")->capture_default_str();
  schedule->add_option("--intrinsic-jitter", so.intrinsic_jitter, "Intrinsic jitter")->capture_default_str();
  schedule->add_option("--characterization", so.characterization,
                       "Take the intrinsic jitter from a characterization summary");
  schedule->add_flag("--relax-deadline", so.relax_deadline, "Allow deadlines beyond the period");
  schedule->add_option("--out", so.out, "Output directory");

  SimulateOptions sim;
  sim.out = default_out("simulate");
  auto* simulate = app.add_subcommand("simulate", "Replay a schedule and record timestamps");
  simulate->add_option("--topology", sim.topology, "Topology JSON")->required();
  simulate->add_option("--streams", sim.streams, "Streams JSON")->required();
  simulate->add_option("--schedule", sim.schedule, "Schedule JSON")->required();
  add_profile(simulate, sim.profile);
  add_probes(simulate, sim.probes);
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--seeds", sim.seeds, "Seed list (1,2,3) or range (1-10); one output directory per seed");
  simulate->add_option("--parallel-seeds", sim.parallel_seeds, "Worker threads for --seeds");
  simulate->add_option("--hyperperiods", sim.hyperperiods, "Duration in hyperperiods")->capture_default_str();
  simulate->add_option("--duration", sim.duration, "Duration (overrides --hyperperiods), e.g. 180ms");
  simulate->add_option("--inject-delay", sim.inject_delay, "Extra delay at the first bridge: stream:seq:delay");
  simulate->add_flag("--relax-deadline", sim.relax_deadline, "Allow deadlines beyond the period");
  simulate->add_option("--out", sim.out, "Output directory");

  ValidateOptions vo;
  auto* validate = app.add_subcommand("validate", "Check a trace against deadlines and gate windows");
  validate->add_option("--trace", vo.trace, "Run directory or traces.csv")->required();
  validate->add_option("--schedule", vo.schedule, "Schedule JSON")->required();
  validate->add_option("--streams", vo.streams, "Streams JSON (default: from the run metadata)");
  validate->add_option("--topology", vo.topology, "Topology JSON used to route --streams");
  validate->add_option("--out", vo.out, "Directory for pass-through CSVs");

  ReportOptions ro;
  ro.out = default_out("report");
  auto* report = app.add_subcommand("report", "Summaries and box plots per latency figure");
  report->add_option("--trace", ro.traces, "Run directory or traces.csv (repeatable)")->required();
  report->add_option("--group-by", ro.group_by, "none, stream or method")
      ->check(CLI::IsMember({"none", "stream", "method"}))
      ->capture_default_str();
  report->add_option("--out", ro.out, "Output directory");

  GclDumpOptions go;
  auto* gcl = app.add_subcommand("gcl-dump", "Print gate timelines as CSV (time_ns,mask)");
  gcl->add_option("--schedule", go.schedule, "Schedule JSON")->required();
  gcl->add_option("--port", go.port, "Only this port");
  gcl->add_option("--cycles", go.cycles, "Cycles to unroll")->capture_default_str();
  gcl->add_option("--out", go.out, "Directory for one CSV per port (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*characterize) return cmd_characterize(co, out);
    if (*schedule) return cmd_schedule(so, out);
    if (*simulate) return cmd_simulate(sim, out);
    if (*validate) return cmd_validate(vo, out);
    if (*report) return cmd_report(ro, out);
    if (*gcl) return cmd_gcl_dump(go, out);
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const TraceMismatch& e) {
    err << "trace mismatch: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    // Remaining domain errors stem from the inputs (no route, overflow,
    // short duration, incomplete schedule, empty series...).
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace tsn::cli
