#pragma once

#include "curvestab/classify.hpp"
#include "curvestab/curvature.hpp"
#include "curvestab/jordan.hpp"
#include "curvestab/types.hpp"

#include <filesystem>
#include <string>

namespace curvestab {

/// Auto-detection: a JSON object with "blocks" is a JordanSpec, with "rows" a
/// matrix; anything that does not look like JSON is whitespace-separated rows.
SystemInput parse_system_input(const std::string& text);
SystemInput load_system_input(const std::filesystem::path& path);

Matrix parse_matrix_json(const std::string& text);
Matrix parse_matrix_text(const std::string& text);
JordanSpec parse_jordan_spec_json(const std::string& text);

/// CSV with header exactly `t,log_kappa_1,...,log_kappa_k,flags`.
/// Zero curvatures print as -inf, undefined ones as nan. With linear=true the
/// columns are raw kappa (saturated at 1e300) under kappa_i headers.
std::string trace_to_csv(const CurvatureTrace& trace, bool linear = false);
std::string trace_to_json(const CurvatureTrace& trace, bool linear = false);

std::string report_to_json(const StabilityReport& report);

/// Shortest round-trip decimal form; identical inputs give identical bytes.
std::string format_double(double v);

/// Write to a sibling temp file, then rename over the target, so a failed run
/// never leaves a partial output behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace curvestab
