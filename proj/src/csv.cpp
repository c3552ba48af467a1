#include "ris/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ris {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoFailure("write failed for " + path);
}

double to_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }
long long to_int(const std::string& s) { return std::strtoll(s.c_str(), nullptr, 10); }
std::uint64_t to_u64(const std::string& s) { return std::strtoull(s.c_str(), nullptr, 10); }

// Reads the whole file as records (quoted fields may span lines).
std::vector<std::vector<std::string>> read_records(const std::string& path, const char* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  std::vector<std::string> lines;
  std::string cur;
  bool quoted = false;
  for (char c : text) {
    if (c == '"') quoted = !quoted;
    if (c == '\n' && !quoted) {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  if (lines.empty() || lines[0] != header) throw IoFailure("unexpected header in " + path);

  std::vector<std::vector<std::string>> records;
  for (size_t i = 1; i < lines.size(); ++i) records.push_back(split_csv_line(lines[i]));
  return records;
}

}  // namespace

std::string aggregate_path(const std::string& trials_path) {
  const std::string ext = ".csv";
  if (trials_path.size() >= ext.size() &&
      trials_path.compare(trials_path.size() - ext.size(), ext.size(), ext) == 0) {
    return trials_path.substr(0, trials_path.size() - ext.size()) + "_aggregate.csv";
  }
  return trials_path + "_aggregate.csv";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

void write_trials_csv(const std::vector<TrialRecord>& rows, const std::string& path) {
  auto out = open_out(path);
  out << kTrialHeader << "\n";
  for (const auto& r : rows) {
    out << fmt(r.sweep_value) << ',' << r.trial << ',' << r.seed << ',' << r.channel_hash << ','
        << quote(r.solver) << ',' << fmt(r.se) << ',' << fmt(r.ee) << ',' << fmt(r.total_power)
        << ',' << fmt(r.bs_power) << ',' << r.iterations << ',' << int(r.feasible) << ','
        << int(r.qos_relaxed) << ',' << int(r.converged) << ',' << fmt(r.wall_time) << ','
        << quote(r.error) << "\n";
  }
  finish(out, path);
}

void write_aggregate_csv(const std::vector<AggregateRecord>& rows, const std::string& path) {
  auto out = open_out(path);
  out << kAggregateHeader << "\n";
  for (const auto& a : rows) {
    out << fmt(a.sweep_value) << ',' << quote(a.solver) << ',' << a.trials << ',' << a.errors << ','
        << fmt(a.se_mean) << ',' << fmt(a.se_stderr) << ',' << fmt(a.ee_mean) << ','
        << fmt(a.ee_stderr) << ',' << fmt(a.total_power_mean) << ',' << fmt(a.bs_power_mean) << ','
        << fmt(a.iterations_mean) << ',' << fmt(a.feasibility_rate) << ',' << fmt(a.relaxed_rate)
        << "\n";
  }
  finish(out, path);
}

void emit_csv(const ExperimentResult& result, const std::string& path) {
  write_trials_csv(result.trials, path);
  write_aggregate_csv(result.aggregates, aggregate_path(path));
}

std::vector<TrialRecord> read_trials_csv(const std::string& path) {
  std::vector<TrialRecord> rows;
  for (const auto& f : read_records(path, kTrialHeader)) {
    if (f.size() != 15) throw IoFailure("malformed trial row in " + path);
    TrialRecord r;
    r.sweep_value = to_double(f[0]);
    r.trial = static_cast<int>(to_int(f[1]));
    r.seed = to_u64(f[2]);
    r.channel_hash = to_u64(f[3]);
    r.solver = f[4];
    r.se = to_double(f[5]);
    r.ee = to_double(f[6]);
    r.total_power = to_double(f[7]);
    r.bs_power = to_double(f[8]);
    r.iterations = static_cast<int>(to_int(f[9]));
    r.feasible = f[10] == "1";
    r.qos_relaxed = f[11] == "1";
    r.converged = f[12] == "1";
    r.wall_time = to_double(f[13]);
    r.error = f[14];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<AggregateRecord> read_aggregate_csv(const std::string& path) {
  std::vector<AggregateRecord> rows;
  for (const auto& f : read_records(path, kAggregateHeader)) {
    if (f.size() != 13) throw IoFailure("malformed aggregate row in " + path);
    AggregateRecord a;
    a.sweep_value = to_double(f[0]);
    a.solver = f[1];
    a.trials = static_cast<int>(to_int(f[2]));
    a.errors = static_cast<int>(to_int(f[3]));
    a.se_mean = to_double(f[4]);
    a.se_stderr = to_double(f[5]);
    a.ee_mean = to_double(f[6]);
    a.ee_stderr = to_double(f[7]);
    a.total_power_mean = to_double(f[8]);
    a.bs_power_mean = to_double(f[9]);
    a.iterations_mean = to_double(f[10]);
    a.feasibility_rate = to_double(f[11]);
    a.relaxed_rate = to_double(f[12]);
    rows.push_back(a);
  }
  return rows;
}

}  // namespace ris
