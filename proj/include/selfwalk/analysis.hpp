#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "selfwalk/engine.hpp"

// Offline classification of finished runs: scaling-exponent estimation from
// checkpointed excursions, detection of frozen (stuck) ranges, signatures of
// the deterministic sqrt(2n) and logarithmic regimes, and a phase label.

namespace selfwalk {

struct ExponentEstimate {
    double slope = 0.0;
    double stderr_ = 0.0;
    std::int64_t window_low = 0;   // first n used in the regression
    std::int64_t window_high = 0;  // last n used
    bool stuck = false;            // no excursion growth over the window
    // statistic: max_{m<=n} |X_m - X_0|, read from checkpoint ranges
};

// Least-squares slope of log(excursion) against log(n) over the checkpoints
// with n >= sqrt(steps). Requires at least 8 checkpoints.
ExponentEstimate scaling_exponent(const RunSummary& summary);

struct StuckInterval {
    std::int64_t site_min = 0;
    std::int64_t site_max = 0;
    int k_sites = 0;
};

// Finite-time proxy for eventual confinement: the visited range is unchanged
// over the last half of the checkpoints AND every interior site of the range
// was revisited during the last quarter of the run. Requires >= 1e4 steps.
std::optional<StuckInterval> detect_stuck(const RunSummary& summary);

struct SqrtSignature {
    double ratio = 0.0;              // X_n / sqrt(2n) at the final checkpoint
    std::int64_t max_backtrack = 0;  // max_m (S_m - X_m), S the running max
};

// Requires steps >= 1.
SqrtSignature sqrt_signature(const RunSummary& summary);

struct LogSignature {
    double position_ratio = 0.0;  // X_n * log 2 / log n
    double growth_ratio = 0.0;    // mean over interior sites of l(y+1/2)/l(y-1/2)
};

// Requires a final profile spanning at least 6 sites.
LogSignature log_signature(const RunSummary& summary);

enum class Phase {
    stuck,
    logarithmic,
    slow_trapped,
    diffusive_band,
    superdiffusive_band,
    sqrt_deterministic,
    ballistic,
    unclassified,
};

std::string phase_name(Phase phase);

struct PhaseLabel {
    Phase phase = Phase::unclassified;
    int k_sites = 0;  // for stuck
    // diagnostics
    ExponentEstimate exponent;
    std::optional<SqrtSignature> sqrt_sig;
    std::optional<LogSignature> log_sig;
};

// Band thresholds of the classifier; defaults as documented, overridable.
struct PhaseThresholds {
    double log_slope_max = 0.1;
    double ballistic_slope_min = 0.9;
    std::int64_t sqrt_backtrack_max = 2;
    double sqrt_ratio_low = 0.9;
    double sqrt_ratio_high = 1.1;
    double diffusive_low = 0.45;
    double diffusive_high = 0.55;
    double superdiffusive_high = 0.9;
    double slow_trapped_low = 0.1;
    // "position grows linearly in log n" test
    double loglinear_min_slope = 0.2;
    double loglinear_rel_resid = 0.15;
    double loglinear_abs_resid = 2.0;
};

// Decision tree: stuck -> logarithmic -> ballistic -> sqrt_deterministic ->
// diffusive/superdiffusive/slow_trapped bands -> unclassified. Pure function
// of (summary, thresholds). Requires a run of >= 1e6 steps.
PhaseLabel classify_phase(const RunSummary& summary, const InteractionKernel& kernel,
                          const PhaseThresholds& thresholds = {});

}  // namespace selfwalk
