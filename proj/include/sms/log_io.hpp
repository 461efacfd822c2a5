#pragma once

#include <iosfwd>
#include <string>

#include "sms/metrics.hpp"
#include "sms/sim.hpp"

namespace sms {

/// Log CSV schema version; bump whenever the column set changes.
inline constexpr int kLogSchemaVersion = 1;

/// Writes the full time series, one row per sample.  The first line is a
/// `# smsim-log v<N>` schema marker, the second the column header.  All
/// numbers use round-trip (%.17g) formatting, so identical logs serialize
/// to identical bytes.
void write_log_csv(const TrajectoryLog& log, std::ostream& out);
void write_log_csv(const TrajectoryLog& log, const std::string& path);

/// Serializes a metrics report (schema-versioned JSON object).
std::string metrics_to_json(const MetricsReport& report);
void write_metrics_json(const MetricsReport& report, const std::string& path);

}  // namespace sms
