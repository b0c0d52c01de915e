#include "pdsage/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pdsage/errors.hpp"

namespace pdsage::io {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_num(double v) { return std::isfinite(v) ? num(v) : "null"; }

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

// Scenario names are identifiers; quote them only if they would break a CSV row.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<double> numeric_fields(const TrialRecord& r) {
  return {r.p_dbm,
          static_cast<double>(r.trial),
          r.nmse_aware,
          r.nmse_unaware,
          r.phi_true,
          r.phi_hat,
          r.rmse_delay_aware,
          r.rmse_aoa_aware,
          r.rmse_aod_aware,
          r.rmse_delay_unaware,
          r.rmse_aoa_unaware,
          r.rmse_aod_unaware};
}

void assign_numeric(TrialRecord& r, std::size_t i, double v) {
  switch (i) {
    case 0: r.p_dbm = v; break;
    case 1:
      if (!(v >= 0.0) || v != std::floor(v)) throw FormatError("trial must be a non-negative integer", 0);
      r.trial = static_cast<std::size_t>(v);
      break;
    case 2: r.nmse_aware = v; break;
    case 3: r.nmse_unaware = v; break;
    case 4: r.phi_true = v; break;
    case 5: r.phi_hat = v; break;
    case 6: r.rmse_delay_aware = v; break;
    case 7: r.rmse_aoa_aware = v; break;
    case 8: r.rmse_aod_aware = v; break;
    case 9: r.rmse_delay_unaware = v; break;
    case 10: r.rmse_aoa_unaware = v; break;
    case 11: r.rmse_aod_unaware = v; break;
    default: break;
  }
}

double parse_number(const std::string& text, std::uint64_t offset) {
  if (text.empty()) throw FormatError("empty numeric field", offset);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) throw FormatError("bad number '" + text + "'", offset);
  return v;
}

std::vector<std::string> split_csv(const std::string& line, std::uint64_t offset) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw FormatError("unterminated quoted field", offset);
  out.push_back(cur);
  return out;
}

}  // namespace

ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw ConfigError("unknown report format '" + std::string(name) + "' (expected csv or json)");
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{
      "scenario",           "p_dbm",           "trial",           "nmse_aware",
      "nmse_unaware",       "phi_true",        "phi_hat",         "rmse_delay_aware",
      "rmse_aoa_aware",     "rmse_aod_aware",  "rmse_delay_unaware", "rmse_aoa_unaware",
      "rmse_aod_unaware"};
  return cols;
}

void write_csv(std::ostream& out, std::span<const TrialRecord> records) {
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : records) {
    out << csv_field(r.scenario);
    for (double v : numeric_fields(r)) out << ',' << num(v);
    out << '\n';
  }
}

void write_json(std::ostream& out, std::span<const TrialRecord> records) {
  const auto& cols = report_columns();
  out << "{\n  \"columns\": [";
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? ", " : "") << json_string(cols[i]);
  out << "],\n  \"records\": [";
  for (std::size_t j = 0; j < records.size(); ++j) {
    const auto& r = records[j];
    out << (j ? ",\n" : "\n") << "    {" << json_string(cols[0]) << ": " << json_string(r.scenario);
    const auto vals = numeric_fields(r);
    for (std::size_t i = 0; i < vals.size(); ++i)
      out << ", " << json_string(cols[i + 1]) << ": " << json_num(vals[i]);
    out << '}';
  }
  out << (records.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

std::vector<TrialRecord> read_csv(std::istream& in) {
  const auto& cols = report_columns();
  std::string line;
  std::uint64_t offset = 0;
  if (!std::getline(in, line)) throw FormatError("empty report", 0);
  if (split_csv(line, 0) != cols) throw FormatError("unexpected CSV header", 0);
  offset += line.size() + 1;
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      offset += 1;
      continue;
    }
    const auto fields = split_csv(line, offset);
    if (fields.size() != cols.size())
      throw FormatError("expected " + std::to_string(cols.size()) + " fields, found " +
                            std::to_string(fields.size()),
                        offset);
    TrialRecord r;
    r.scenario = fields[0];
    for (std::size_t i = 1; i < fields.size(); ++i) assign_numeric(r, i - 1, parse_number(fields[i], offset));
    out.push_back(std::move(r));
    offset += line.size() + 1;
  }
  return out;
}

std::vector<TrialRecord> read_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what(), e.byte);
  }
  const auto& cols = report_columns();
  if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array())
    throw FormatError("JSON report needs a \"records\" array", 0);
  std::vector<TrialRecord> out;
  for (const auto& item : doc["records"]) {
    if (!item.is_object()) throw FormatError("record is not an object", 0);
    TrialRecord r;
    if (!item.contains(cols[0]) || !item[cols[0]].is_string())
      throw FormatError("record lacks a scenario string", 0);
    r.scenario = item[cols[0]].get<std::string>();
    for (std::size_t i = 1; i < cols.size(); ++i) {
      if (!item.contains(cols[i])) throw FormatError("record lacks '" + cols[i] + "'", 0);
      const auto& v = item[cols[i]];
      double x = std::numeric_limits<double>::quiet_NaN();
      if (v.is_number()) {
        x = v.get<double>();
      } else if (!v.is_null()) {
        throw FormatError("field '" + cols[i] + "' is not numeric", 0);
      }
      assign_numeric(r, i - 1, x);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void emit_report(std::span<const TrialRecord> records, ReportFormat format,
                 const std::filesystem::path& destination) {
  if (records.empty()) throw std::invalid_argument("no records to report");
  auto write = [&](std::ostream& os) {
    if (format == ReportFormat::kCsv) {
      write_csv(os, records);
    } else {
      write_json(os, records);
    }
  };
  if (destination.empty() || destination == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(destination, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + destination.string() + " for writing");
  write(out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + destination.string());
}

void write_summary_csv(std::ostream& out, std::span<const PowerSummary> rows) {
  out << "scenario,p_dbm,trials,mean_nmse_aware,mean_nmse_unaware\n";
  for (const auto& s : rows)
    out << csv_field(s.scenario) << ',' << num(s.p_dbm) << ',' << s.trials << ','
        << num(s.mean_nmse_aware) << ',' << num(s.mean_nmse_unaware) << '\n';
}

}  // namespace pdsage::io
