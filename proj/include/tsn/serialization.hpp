#pragma once

// JSON documents for topology, streams, schedules, latency models and run
// metadata. Times are integer nanoseconds.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsn/latency_model.hpp"
#include "tsn/model.hpp"
#include "tsn/profiler.hpp"
#include "tsn/trace.hpp"

namespace tsn::io {

using Json = nlohmann::ordered_json;

Json to_json(const Topology& t);
Topology topology_from_json(const Json& j);

Json to_json(const StreamSpec& s);
StreamSpec stream_from_json(const Json& j);
/// {"streams": [...]}
Json streams_to_json(const std::vector<StreamSpec>& streams);
/// Accepts {"streams": [...]} or a bare array.
std::vector<StreamSpec> streams_from_json(const Json& j);

Json to_json(const GateControlList& gcl);
GateControlList gcl_from_json(const Json& j);

Json to_json(const Schedule& s);
Schedule schedule_from_json(const Json& j);

Json to_json(const sim::Distribution& d);
sim::Distribution distribution_from_json(const Json& j);

Json to_json(const sim::LatencyModel& lm);
sim::LatencyModel latency_model_from_json(const Json& j);

/// {"name", "allocation", "model"}
Json to_json(const sim::PlatformProfile& p);
/// Accepts a profile document or a bare latency model (named "custom").
sim::PlatformProfile profile_from_json(const Json& j);

Json to_json(const sim::ProbeConfig& p);
sim::ProbeConfig probe_config_from_json(const Json& j);

Json to_json(const RunMetadata& m);
RunMetadata run_metadata_from_json(const Json& j);

Json to_json(const prof::StatSummary& s);
Json to_json(const prof::Jitter& j);
/// Summary without the underlying trace.
Json to_json(const prof::CharacterizationReport& r);

/// Throws InvalidArgument if the file is missing, ParseError if malformed.
Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
/// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

}  // namespace tsn::io
