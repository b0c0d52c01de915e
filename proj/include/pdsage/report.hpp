#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdsage/experiment.hpp"

namespace pdsage::io {

enum class ReportFormat { kCsv, kJson };

ReportFormat parse_format(std::string_view name);

/// Column order of the CSV header and the JSON record keys.
const std::vector<std::string>& report_columns();

/// Numbers are written with 17 significant digits so every double round-trips.
void write_csv(std::ostream& out, std::span<const TrialRecord> records);
void write_json(std::ostream& out, std::span<const TrialRecord> records);

std::vector<TrialRecord> read_csv(std::istream& in);
std::vector<TrialRecord> read_json(std::istream& in);

/// Writes to `destination`, or to stdout when it is empty or "-".
void emit_report(std::span<const TrialRecord> records, ReportFormat format,
                 const std::filesystem::path& destination);

/// Mean NMSE per power level as CSV: scenario,p_dbm,trials,mean_nmse_aware,mean_nmse_unaware.
void write_summary_csv(std::ostream& out, std::span<const PowerSummary> rows);

}  // namespace pdsage::io
