#pragma once

#include <string>

#include "quadent/pipeline.hpp"

namespace quadent {

/// %.17g, with nan and inf spelled as such.
std::string format_double(double v);

/// Header `t,S_vn_A,S2_A,S_as_A,I_AB,lambda_A_alg,lambda_A_vol,bound_lower,bound_upper,source,trusted`
/// followed by one row per output time.
std::string csv_text(const RunReport& report);

/// Human-readable summary: sections for dynamics, exponents, entropies, bounds, oracle, checks.
std::string text_report(const RunReport& report);

/// Machine-readable report (JSON).
std::string json_report(const RunReport& report);

/// Writes whichever of csv / report / json paths are non-empty. Throws ConfigError when a file cannot be written.
void write_outputs(const RunReport& report, const OutputSpec& paths);

}  // namespace quadent
