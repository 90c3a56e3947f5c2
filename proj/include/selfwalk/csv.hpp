#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selfwalk/analysis.hpp"
#include "selfwalk/engine.hpp"

// Text output: every file starts with a '#' provenance line carrying the
// tool version, the exact command essentials (kernel literal, seeds, steps,
// rng identifier), so any file can be regenerated byte-identically.

namespace selfwalk {

inline constexpr const char* kVersion = "selfwalk 0.1.0";

// shortest-round-trip-safe decimal rendering (%.17g)
std::string fmt_double(double v);

std::string provenance_line(const std::string& command, const std::string& kernel_literal,
                            const std::string& seed_field, std::int64_t steps);

// columns: n, position, range_min, range_max (one row per checkpoint)
std::string trajectory_csv(const RunSummary& summary, const std::string& provenance);

// columns: edge_left_endpoint, count, initial_value
std::string profile_csv(const RunSummary& summary, const std::string& provenance);

struct ClassificationRow {
    std::string kernel_literal;
    std::string a;  // empty unless the kernel is in the (a,b) family
    std::string b;
    std::uint64_t seed = 0;
    double slope = 0.0;
    double stderr_ = 0.0;
    std::string label;
    int k_sites = 0;
    std::string sqrt_ratio;    // empty when not computed
    std::string log_ratio;     // empty when not computed
    std::string growth_ratio;  // empty when not computed
    bool failed = false;
};

ClassificationRow classification_row(const InteractionKernel& kernel, std::uint64_t seed,
                                     const PhaseLabel& label);

// columns: kernel,a,b,seed,slope,stderr,label,k_sites,sqrt_ratio,log_ratio,growth_ratio
std::string classification_csv(const std::vector<ClassificationRow>& rows,
                               const std::string& provenance);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace selfwalk
