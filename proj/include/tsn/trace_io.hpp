#pragma once

// CSV exports of traces, transmissions, summaries and gate timelines, and
// the on-disk layout of a run directory.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tsn/profiler.hpp"
#include "tsn/trace.hpp"

namespace tsn::io {

/// stream_id,seq,T1..T5,sendL,br1L,br2L,arrL,e2e,e2e_nic (ns; empty when absent).
std::string traces_csv(const std::vector<TimestampRecord>& records);
/// Throws ParseError. Methods are left at their defaults.
std::vector<TimestampRecord> parse_traces_csv(const std::string& text);

/// port,stream_id,seq,traffic_class,start,finish,gate_open,gate_close
std::string transmissions_csv(const std::vector<PortTransmission>& txs);
std::vector<PortTransmission> parse_transmissions_csv(const std::string& text);

/// figure,count,min,q1,median,q3,max,mean,stddev,n_outliers
std::string summary_csv(const std::map<prof::Figure, prof::StatSummary>& summaries);

struct GroupedSummary {
  std::string group;
  prof::Figure figure;
  prof::StatSummary summary;
};
/// group,figure,count,... for summaries split by stream or method.
std::string grouped_summary_csv(const std::vector<GroupedSummary>& rows);

/// stream,seq,open_offset_ns,complete_offset_ns,width_ns
std::string pass_through_csv(const std::vector<prof::PassThrough>& rows);

/// time_ns,mask rows: one per gate change over `cycles` cycles from the
/// base time; mask as an 8-bit binary string.
std::string gcl_timeline_csv(const GateControlList& gcl, int cycles = 1);

inline constexpr const char* kTracesFile = "traces.csv";
inline constexpr const char* kTransmissionsFile = "transmissions.csv";
inline constexpr const char* kMetadataFile = "metadata.json";

/// Writes traces.csv, transmissions.csv and metadata.json into `dir`.
void save_trace_set(const std::filesystem::path& dir, const TraceSet& ts);

/// Reads a run directory, or a traces.csv file together with its sibling
/// files. Missing transmissions/metadata are tolerated. Throws
/// InvalidArgument, ParseError.
TraceSet load_trace_set(const std::filesystem::path& path);

}  // namespace tsn::io
