#include "selfwalk/engine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace selfwalk {

namespace {

constexpr double kSaturation = 400.0;

// 1/(1 + e^{-2d}) for d >= 0; lies in [1/2, 1]
inline double logistic_nonneg(double d) {
    return 1.0 / (1.0 + std::exp(-2.0 * d));
}

}  // namespace

double jump_probability(double d) {
    if (std::isnan(d)) throw std::domain_error("jump_probability: NaN drift");
    if (d > kSaturation) return 1.0;
    if (d < -kSaturation) return 0.0;
    if (d >= 0.0) return logistic_nonneg(d);
    // exact complement: 1 - p is computed without rounding for p in [1/2, 1]
    return 1.0 - logistic_nonneg(-d);
}

double drift(const LocalTimeProfile& profile, std::int64_t position,
             const InteractionKernel& kernel) {
    double d = 0.0;
    for (const auto& t : kernel.terms()) {
        std::int64_t edge = position + (t.two_e - 1) / 2;  // 2e odd, division exact
        d += t.weight * profile.value(edge);
    }
    return d;
}

void step_with(WalkState& state, const InteractionKernel& kernel, double u) {
    if (state.step == std::numeric_limits<std::int64_t>::max())
        throw std::length_error("step counter overflow");
    double p = jump_probability(drift(state.profile, state.position, kernel));
    if (u < p) {
        state.profile.increment(state.position);
        ++state.position;
    } else {
        state.profile.increment(state.position - 1);
        --state.position;
    }
    ++state.step;
}

void step(WalkState& state, const InteractionKernel& kernel) {
    step_with(state, kernel, state.rng.uniform());
}

namespace {

std::vector<std::int64_t> checkpoint_times(std::int64_t steps, double ratio) {
    std::vector<std::int64_t> times{0};
    double t = 1.0;
    while (true) {
        auto n = static_cast<std::int64_t>(t);
        if (n >= steps) break;
        if (n > times.back()) times.push_back(n);
        t *= ratio;
    }
    if (steps > 0) times.push_back(steps);
    return times;
}

}  // namespace

RunSummary run(const RunConfig& config) {
    if (config.steps < 0) throw std::invalid_argument("run: steps must be >= 0");
    if (!(config.checkpoint_ratio > 1.0 && config.checkpoint_ratio <= 10.0))
        throw std::invalid_argument("run: checkpoint_ratio must lie in (1, 10]");

    WalkState state;
    state.position = config.initial_position;
    state.profile = LocalTimeProfile(config.initial_profile);
    state.rng = Rng(config.seed);

    RunSummary out;
    out.steps = config.steps;
    out.initial_position = config.initial_position;
    out.kernel_literal = config.kernel.literal();
    out.seed = config.seed;

    auto times = checkpoint_times(config.steps, config.checkpoint_ratio);
    std::size_t next_time = 0;

    std::int64_t range_min = state.position;
    std::int64_t range_max = state.position;
    std::int64_t running_max = state.position;
    out.last_visit.record(state.position, 0);
    if (config.record_trajectory) {
        out.trajectory.reserve(static_cast<std::size_t>(config.steps) + 1);
        out.trajectory.push_back(static_cast<std::int32_t>(state.position));
    }

    auto record_if_due = [&] {
        while (next_time < times.size() && times[next_time] == state.step) {
            out.checkpoints.push_back({state.step, state.position, range_min, range_max});
            ++next_time;
        }
    };
    record_if_due();

    for (std::int64_t n = 0; n < config.steps; ++n) {
        step(state, config.kernel);
        if (state.position < range_min) range_min = state.position;
        if (state.position > range_max) range_max = state.position;
        if (state.position > running_max) running_max = state.position;
        std::int64_t back = running_max - state.position;
        if (back > out.max_backtrack) out.max_backtrack = back;
        out.last_visit.record(state.position, state.step);
        if (config.record_trajectory)
            out.trajectory.push_back(static_cast<std::int32_t>(state.position));
        record_if_due();
    }

    out.final_profile = state.profile;
    out.final_position = state.position;
    return out;
}

Preset preset(const std::string& name) {
    if (name == "tsrw")
        return {name, InteractionKernel::symmetric_family(0.0, 1.0), {}};
    if (name == "third_derivative")
        return {name, InteractionKernel::symmetric_family(-1.0, 3.0), {}};
    if (name == "trap")
        return {name, InteractionKernel::symmetric_family(1.0, 0.0), {}};
    if (name == "second_derivative")
        // D = -(second difference)/2, started against two pre-charged edges
        // behind the walker: l0(-1/2) = l0(-3/2) = 1.
        return {name,
                InteractionKernel::from_coeffs({{-3, -0.5}, {-1, 0.5}, {1, 0.5}, {3, -0.5}}),
                {{-2, 1.0}, {-1, 1.0}}};
    if (name == "log_walk")
        return {name, InteractionKernel::from_coeffs({{-3, -2.0}, {-1, 1.0}, {1, 1.0}}), {}};
    if (name == "ballistic")
        return {name, InteractionKernel::from_coeffs({{-1, 1.0}, {1, -2.0}, {3, 1.0}}), {}};
    throw std::out_of_range("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
    return {"tsrw", "third_derivative", "trap", "second_derivative", "log_walk", "ballistic"};
}

}  // namespace selfwalk
