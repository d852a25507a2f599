#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tsn::cli {

struct ProfileOptions {
  std::string profile = "C2";  // C1, C2, C3 or a JSON file
  int allocation = 0;
  std::string latency_model;  // overrides profile when set
};

struct ProbeOptions {
  std::string probes_file;
  std::string bridge_method;  // T2/T3
  std::string t4_method;
  bool no_bridge_probes = false;
};

struct CharacterizeOptions {
  ProfileOptions profile;
  ProbeOptions probes;
  std::int64_t frames = 1000;
  std::uint64_t seed = 1;
  std::filesystem::path out;
};

struct ScheduleOptions {
  std::filesystem::path topology;
  std::filesystem::path streams;
  std::string bridge_latency = "200us";
  std::string intrinsic_jitter = "500us";
  std::filesystem::path characterization;
  bool relax_deadline = false;
  std::filesystem::path out;
};

struct SimulateOptions {
  std::filesystem::path topology;
  std::filesystem::path streams;
  std::filesystem::path schedule;
  ProfileOptions profile;
  ProbeOptions probes;
  std::uint64_t seed = 42;
  std::string seeds;  // "1,2,5" or "1-10"
  unsigned parallel_seeds = 1;
  std::int64_t hyperperiods = 3;
  std::string duration;  // overrides hyperperiods
  std::vector<std::string> inject_delay;  // "stream:seq:delay"
  bool relax_deadline = false;
  std::filesystem::path out;
};

struct ValidateOptions {
  std::filesystem::path trace;
  std::filesystem::path schedule;
  std::filesystem::path streams;
  std::filesystem::path topology;
  std::filesystem::path out;
};

struct ReportOptions {
  std::vector<std::filesystem::path> traces;
  std::string group_by = "none";  // none, stream, method
  std::filesystem::path out;
};

struct GclDumpOptions {
  std::filesystem::path schedule;
  std::string port;
  int cycles = 1;
  std::filesystem::path out;
};

int cmd_characterize(const CharacterizeOptions& o, std::ostream& out);
int cmd_schedule(const ScheduleOptions& o, std::ostream& out);
int cmd_simulate(const SimulateOptions& o, std::ostream& out);
int cmd_validate(const ValidateOptions& o, std::ostream& out);
int cmd_report(const ReportOptions& o, std::ostream& out);
int cmd_gcl_dump(const GclDumpOptions& o, std::ostream& out);

}  // namespace tsn::cli
