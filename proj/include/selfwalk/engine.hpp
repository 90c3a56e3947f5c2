#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selfwalk/kernel.hpp"
#include "selfwalk/local_time.hpp"
#include "selfwalk/rng.hpp"

// The stepping core. A walk state is (position, step count, local-time
// profile, rng stream); one step computes the drift seen from the walker,
// draws one uniform, moves +-1 and increments the crossed edge.

namespace selfwalk {

struct WalkState {
    std::int64_t position = 0;
    std::int64_t step = 0;
    LocalTimeProfile profile;
    Rng rng;
};

// Probability of jumping right given drift d: 1/(1 + e^{-2d}), evaluated so
// that jump_probability(-d) == 1 - jump_probability(d) bit-exactly. Saturates
// to exactly 0 / 1 beyond |d| > 400. NaN input throws.
double jump_probability(double d);

// sum_e a_e * (counts + L0)(position + e)
double drift(const LocalTimeProfile& profile, std::int64_t position,
             const InteractionKernel& kernel);

// One step driven by an externally supplied uniform draw in [0,1).
void step_with(WalkState& state, const InteractionKernel& kernel, double u);

// One step; advances the state's rng by exactly one draw.
void step(WalkState& state, const InteractionKernel& kernel);

struct RunConfig {
    InteractionKernel kernel = InteractionKernel::symmetric_family(0.0, 1.0);
    std::int64_t steps = 0;
    std::uint64_t seed = 0;
    std::int64_t initial_position = 0;
    std::map<std::int64_t, double> initial_profile;  // absolute edges
    double checkpoint_ratio = 1.5;                   // must lie in (1, 10]
    bool record_trajectory = false;
};

struct Checkpoint {
    std::int64_t n;
    std::int64_t position;
    std::int64_t range_min;  // min position visited up to n
    std::int64_t range_max;  // max position visited up to n
};

struct RunSummary {
    std::vector<Checkpoint> checkpoints;  // geometric times, last = steps
    LocalTimeProfile final_profile;
    std::int64_t final_position = 0;
    std::int64_t steps = 0;
    std::int64_t initial_position = 0;
    // max over m <= steps of (running max of X) - X_m
    std::int64_t max_backtrack = 0;
    LastVisit last_visit;
    std::vector<std::int32_t> trajectory;  // filled when record_trajectory

    std::string kernel_literal;
    std::uint64_t seed = 0;
};

// Runs config.steps steps. Deterministic function of the config; memory is
// O(range + checkpoints) unless record_trajectory is set.
RunSummary run(const RunConfig& config);

struct Preset {
    std::string name;
    InteractionKernel kernel;
    std::map<std::int64_t, double> initial_profile;
};

// Known presets: tsrw, third_derivative, trap, second_derivative, log_walk,
// ballistic. Unknown names throw std::out_of_range.
Preset preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace selfwalk
