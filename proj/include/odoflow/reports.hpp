#pragma once

// Serialization of computed statistics: CSV tables with fixed schemas, JSON
// reports, and a small SVG decay plot. All writers are deterministic (same
// input, byte-identical output) and file output is atomic (temp + rename).

#include <string>
#include <vector>

#include <json.hpp>

#include "odoflow/statistics.hpp"

namespace odoflow {

// One row per n in [4, max_n]: "n,K_n" with K_n in decimal.
std::string csv_kvalues(int max_n);

// "prefix,k,n,variant,expected_index,expected_value,observed_value";
// prefix rendered "0-1-0", variant "printed"/"corrected", backward rows
// carry negative k.
std::string csv_violations(const std::vector<ViolationRecord>& rows);

// "n,m,forward,backward,corrected_bound,printed_bound,forward_ok_corrected,forward_ok_printed"
std::string csv_bounds(const std::vector<BoundRow>& rows);

// "label,lo,hi,forward,backward,union,envelope"
std::string csv_decay(const std::vector<DecayRow>& rows);

// log2-scale decay plot: one polyline per measure column plus the envelope,
// floor ticks standing in for exact-zero rows. Plot geometry uses doubles
// (presentation only; the data stays exact in the CSV).
std::string svg_decay(const std::vector<DecayRow>& rows);

nlohmann::json report_to_json(const ReturnReport& report);
nlohmann::json report_to_json(const RectangleReport& report);
nlohmann::json report_to_json(const PropAReport& report);
nlohmann::json report_to_json(const ConjugacyReport& report);
nlohmann::json report_to_json(const WeightingReport& report);
nlohmann::json outcome_to_json(const FlowOutcome& outcome);
nlohmann::json trace_to_json(const SumTrace& trace);

// Writes via a temp file in the same directory, then renames over the
// target, so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace odoflow
