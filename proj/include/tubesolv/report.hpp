#pragma once

#include <string>
#include <vector>

#include "tubesolv/conditions.hpp"
#include "tubesolv/counterexample.hpp"
#include "tubesolv/homogeneous.hpp"
#include "tubesolv/solver.hpp"

namespace tubesolv {

// Fixed-precision (%.17g) emission so reports are byte-stable for a fixed
// configuration.
std::string format_real(Real v);

// Per-frequency table plus optional homogeneous columns.  Rows follow the box
// enumeration; margins and constants must be aligned with it.
void write_conditions_csv(const std::string& path, const std::vector<DioMargin>& margins,
                          const std::vector<OscillationConstants>& constants,
                          const CorollaryReport* homog = nullptr);

void write_verdict_summary(const std::string& path, const Verdict& verdict,
                           const CorollaryReport* homog = nullptr,
                           const std::vector<std::string>& extra = {});

// plot data: |xi| vs margin and |xi| vs the three window constants
void write_margin_plot(const std::string& path, const std::vector<DioMargin>& margins);
void write_dstar_plot(const std::string& path, const std::vector<OscillationConstants>& constants);

void write_solve_report(const std::string& path, const SolveDiagnostics& diag,
                        const FrequencyBox& box);

// forged field sidecar (sequence, witnesses, measured bounds) and bounds table
void write_forged_sidecar(const std::string& path, const ForgedRHS& forged);
void write_forged_bounds(const std::string& path, const ForgedRHS& forged);

} // namespace tubesolv
