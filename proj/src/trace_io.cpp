#include "tsn/trace_io.hpp"

#include <bitset>
#include <charconv>
#include <sstream>

#include "tsn/errors.hpp"
#include "tsn/serialization.hpp"

namespace tsn::io {

namespace {

using sim::ProbePoint;

std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::int64_t to_int(const std::string& s, std::size_t line_no) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end) {
    throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

std::string cell(const std::optional<TimeNs>& t) { return t ? std::to_string(t->count()) : std::string(); }

void summary_cells(std::ostringstream& out, const prof::StatSummary& s) {
  out << s.count << ',' << s.min.count() << ',' << s.q1.count() << ',' << s.median.count() << ',' << s.q3.count()
      << ',' << s.max.count() << ',' << s.mean.count() << ',' << s.stddev.count() << ',' << s.outliers.size() << '\n';
}

const char* kTraceHeader = "stream_id,seq,T1,T2,T3,T4,T5,sendL,br1L,br2L,arrL,e2e,e2e_nic";
const char* kTxHeader = "port,stream_id,seq,traffic_class,start,finish,gate_open,gate_close";

}  // namespace

std::string traces_csv(const std::vector<TimestampRecord>& records) {
  std::ostringstream out;
  out << kTraceHeader << '\n';
  for (const auto& r : records) {
    out << r.stream_id << ',' << r.seq;
    for (const auto& t : r.t) out << ',' << cell(t);
    const auto lat = prof::latencies(r);
    for (auto f : prof::kAllFigures) out << ',' << cell(lat[f]);
    out << '\n';
  }
  return out.str();
}

std::vector<TimestampRecord> parse_traces_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("empty trace file");
  if (lines.front() != kTraceHeader) throw ParseError("unexpected trace header '" + lines.front() + "'");
  std::vector<TimestampRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    if (cells.size() != 13) throw ParseError("line " + std::to_string(i + 1) + ": expected 13 columns");
    TimestampRecord r;
    r.stream_id = static_cast<int>(to_int(cells[0], i + 1));
    r.seq = to_int(cells[1], i + 1);
    for (std::size_t k = 0; k < sim::kNumProbePoints; ++k) {
      if (!cells[2 + k].empty()) r.t[k] = TimeNs{to_int(cells[2 + k], i + 1)};
    }
    out.push_back(r);
  }
  return out;
}

std::string transmissions_csv(const std::vector<PortTransmission>& txs) {
  std::ostringstream out;
  out << kTxHeader << '\n';
  for (const auto& t : txs) {
    out << t.port << ',' << t.stream_id << ',' << t.seq << ',' << t.traffic_class << ',' << t.start.count() << ','
        << t.finish.count() << ',' << t.gate_open.count() << ',' << t.gate_close.count() << '\n';
  }
  return out.str();
}

std::vector<PortTransmission> parse_transmissions_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kTxHeader) throw ParseError("unexpected transmissions header");
  std::vector<PortTransmission> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto c = split(lines[i]);
    if (c.size() != 8) throw ParseError("line " + std::to_string(i + 1) + ": expected 8 columns");
    PortTransmission t;
    t.port = c[0];
    t.stream_id = static_cast<int>(to_int(c[1], i + 1));
    t.seq = to_int(c[2], i + 1);
    t.traffic_class = static_cast<int>(to_int(c[3], i + 1));
    t.start = TimeNs{to_int(c[4], i + 1)};
    t.finish = TimeNs{to_int(c[5], i + 1)};
    t.gate_open = TimeNs{to_int(c[6], i + 1)};
    t.gate_close = TimeNs{to_int(c[7], i + 1)};
    out.push_back(t);
  }
  return out;
}

std::string summary_csv(const std::map<prof::Figure, prof::StatSummary>& summaries) {
  std::ostringstream out;
  out << "figure,count,min,q1,median,q3,max,mean,stddev,n_outliers\n";
  for (auto f : prof::kAllFigures) {
    auto it = summaries.find(f);
    if (it == summaries.end()) continue;
    out << prof::to_string(f) << ',';
    summary_cells(out, it->second);
  }
  return out.str();
}

std::string grouped_summary_csv(const std::vector<GroupedSummary>& rows) {
  std::ostringstream out;
  out << "group,figure,count,min,q1,median,q3,max,mean,stddev,n_outliers\n";
  for (const auto& r : rows) {
    out << r.group << ',' << prof::to_string(r.figure) << ',';
    summary_cells(out, r.summary);
  }
  return out.str();
}

std::string pass_through_csv(const std::vector<prof::PassThrough>& rows) {
  std::ostringstream out;
  out << "stream,seq,open_offset_ns,complete_offset_ns,width_ns\n";
  for (const auto& r : rows) {
    out << r.stream_id << ',' << r.seq << ',' << r.open_offset.count() << ',' << r.complete_offset.count() << ','
        << r.width.count() << '\n';
  }
  return out.str();
}

std::string gcl_timeline_csv(const GateControlList& gcl, int cycles) {
  std::ostringstream out;
  out << "time_ns,mask\n";
  TimeNs t = gcl.base_time();
  for (int c = 0; c < cycles; ++c) {
    for (const auto& e : gcl.entries()) {
      out << t.count() << ',' << std::bitset<8>(e.gate_mask).to_string() << '\n';
      t += e.duration;
    }
  }
  return out.str();
}

void save_trace_set(const std::filesystem::path& dir, const TraceSet& ts) {
  write_text_file(dir / kTracesFile, traces_csv(ts.records));
  write_text_file(dir / kTransmissionsFile, transmissions_csv(ts.transmissions));
  write_text_file(dir / kMetadataFile, dump(to_json(ts.meta)));
}

TraceSet load_trace_set(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::is_directory(path) ? path : path.parent_path();
  const fs::path traces = fs::is_directory(path) ? path / kTracesFile : path;
  TraceSet ts;
  ts.records = parse_traces_csv(read_text_file(traces));
  if (fs::exists(dir / kTransmissionsFile)) {
    ts.transmissions = parse_transmissions_csv(read_text_file(dir / kTransmissionsFile));
  }
  if (fs::exists(dir / kMetadataFile)) ts.meta = run_metadata_from_json(read_json_file(dir / kMetadataFile));
  for (auto& r : ts.records) {
    for (std::size_t i = 0; i < sim::kNumProbePoints; ++i) r.method[i] = ts.meta.probes.points[i].method;
  }
  return ts;
}

}  // namespace tsn::io
