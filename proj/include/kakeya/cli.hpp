#pragma once

// Command-line front end. Every subcommand renders its complete output into
// memory first, so a failing run prints nothing but a diagnostic.
//
// Exit codes: 0 success, 1 usage or parse error, 2 budget exceeded or
// insufficient input depth, 3 fixture mismatch.

#include <iosfwd>
#include <string>
#include <vector>

#include "kakeya/analysis.hpp"
#include "kakeya/measure.hpp"

namespace kakeya::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitFixture = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Convenience overload for tests; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Renderers shared by the subcommands. Seconds are written as 0.000 unless
// `timing` is set, keeping repeated runs byte-identical.
std::string render_decay_csv(const DecayReport& report, bool timing);
std::string render_certificates_csv(const std::vector<CertificateReport>& reports);
// Per scale: the strict quotient valuation (defect valuation minus the
// scale) and the very strong margin.
std::string render_defects_csv(const DefectReport& report);

}  // namespace kakeya::cli
