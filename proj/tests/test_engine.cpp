#include <doctest.h>

#include <cmath>
#include <cstring>

#include "selfwalk/engine.hpp"
#include "selfwalk/rng.hpp"

using namespace selfwalk;

TEST_CASE("jump probability values and saturation") {
    CHECK(jump_probability(0.0) == 0.5);
    CHECK(jump_probability(1.0) == doctest::Approx(0.8807970779778823).epsilon(1e-15));
    CHECK(jump_probability(-1000.0) == 0.0);
    CHECK(jump_probability(1000.0) == 1.0);
    CHECK(jump_probability(400.0001) == 1.0);
    CHECK_THROWS_AS(jump_probability(std::nan("")), std::domain_error);

    // exact complement; strictly increasing where doubles resolve the tails
    Rng rng(5);
    double prev = -1.0;
    for (double d = -15.0; d <= 15.0; d += 0.173) {
        double p = jump_probability(d);
        CHECK(jump_probability(-d) == 1.0 - p);
        CHECK(p > prev);
        prev = p;
    }
    prev = -1.0;
    for (double d = -500.0; d <= 500.0; d += 7.3) {
        double p = jump_probability(d);
        CHECK(p >= prev);
        prev = p;
    }
    for (int i = 0; i < 1000; ++i) {
        double d = (rng.uniform() - 0.5) * 900.0;
        CHECK(jump_probability(-d) == 1.0 - jump_probability(d));
    }
}

TEST_CASE("drift sees counts plus the initial profile") {
    auto tsrw = InteractionKernel::symmetric_family(0.0, 1.0);
    LocalTimeProfile empty;
    CHECK(drift(empty, 0, tsrw) == 0.0);

    // walker just arrived at 1 from 0 on a fresh profile
    WalkState s;
    step_with(s, tsrw, 0.0);  // u = 0 < 1/2: forced right
    REQUIRE(s.position == 1);
    CHECK(drift(s.profile, s.position, tsrw) == 1.0);

    // second-difference kernel on the pre-charged profile is balanced
    auto second = preset("second_derivative");
    LocalTimeProfile charged(second.initial_profile);
    CHECK(drift(charged, 0, second.kernel) == 0.0);
}

TEST_CASE("two forced right steps produce the pre-charged profile") {
    auto second = preset("second_derivative");
    WalkState s;  // zero initial profile
    step_with(s, second.kernel, 0.0);
    step_with(s, second.kernel, 0.0);
    CHECK(s.position == 2);
    CHECK(s.step == 2);
    // relative to the walker: l(-1/2) = l(-3/2) = 1
    CHECK(s.profile.value(s.position - 1) == 1.0);
    CHECK(s.profile.value(s.position - 2) == 1.0);
}

TEST_CASE("step conserves mass and moves by one") {
    auto k = preset("tsrw").kernel;
    WalkState s;
    s.rng = Rng(17);
    std::int64_t prev_pos = s.position;
    for (int i = 0; i < 5000; ++i) {
        step(s, k);
        CHECK(std::llabs(s.position - prev_pos) == 1);
        CHECK(s.profile.total() == i + 1);
        prev_pos = s.position;
    }
    CHECK(s.step == 5000);
    // rng advanced by exactly one draw per step
    Rng replay(17);
    for (int i = 0; i < 5000; ++i) replay.next_u64();
    CHECK(s.rng == replay);
}

TEST_CASE("run: checkpoints, determinism, conservation") {
    RunConfig config;
    config.kernel = preset("tsrw").kernel;
    config.steps = 20000;
    config.seed = 3;
    RunSummary a = run(config);
    RunSummary b = run(config);

    CHECK(a.final_position == b.final_position);
    CHECK(a.checkpoints.size() == b.checkpoints.size());
    for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
        CHECK(a.checkpoints[i].n == b.checkpoints[i].n);
        CHECK(a.checkpoints[i].position == b.checkpoints[i].position);
    }
    CHECK(a.final_profile == b.final_profile);

    CHECK(a.checkpoints.front().n == 0);
    CHECK(a.checkpoints.back().n == config.steps);
    for (std::size_t i = 1; i < a.checkpoints.size(); ++i)
        CHECK(a.checkpoints[i].n > a.checkpoints[i - 1].n);

    // conservation at the end (and bounds along the way)
    CHECK(a.final_profile.total() == config.steps);
    for (const auto& c : a.checkpoints) {
        CHECK(c.range_min <= c.position);
        CHECK(c.position <= c.range_max);
    }
}

TEST_CASE("run with zero steps") {
    RunConfig config;
    config.kernel = preset("tsrw").kernel;
    config.steps = 0;
    config.initial_position = 5;
    RunSummary s = run(config);
    REQUIRE(s.checkpoints.size() == 1);
    CHECK(s.checkpoints[0].n == 0);
    CHECK(s.checkpoints[0].position == 5);
    CHECK(s.checkpoints[0].range_min == 5);
    CHECK(s.checkpoints[0].range_max == 5);
}

TEST_CASE("trajectory recording matches the neighbour rule") {
    RunConfig config;
    config.kernel = preset("log_walk").kernel;
    config.steps = 4000;
    config.seed = 11;
    config.record_trajectory = true;
    RunSummary s = run(config);
    REQUIRE(s.trajectory.size() == 4001);
    for (std::size_t i = 1; i < s.trajectory.size(); ++i)
        CHECK(std::abs(s.trajectory[i] - s.trajectory[i - 1]) == 1);
    CHECK(s.trajectory.back() == s.final_position);
}

TEST_CASE("height invariance of the seeded trajectory") {
    // adding a constant to L0 leaves every drift, hence the trajectory,
    // bit-identical (dyadic weights and shift keep the arithmetic exact)
    for (const char* name : {"tsrw", "second_derivative", "log_walk", "ballistic"}) {
        Preset p = preset(name);
        RunConfig config;
        config.kernel = p.kernel;
        config.steps = 2000;
        config.seed = 23;
        config.initial_profile = p.initial_profile;
        RunSummary base = run(config);
        // the constant must cover every edge the kernel can see along the run
        REQUIRE(base.checkpoints.back().range_max < 2490);
        REQUIRE(base.checkpoints.back().range_min > -2490);

        RunConfig shifted = config;
        for (std::int64_t e = -2500; e <= 2500; ++e) shifted.initial_profile[e] += 6.5;
        RunSummary lifted = run(shifted);
        CHECK(base.final_position == lifted.final_position);
        CHECK(base.max_backtrack == lifted.max_backtrack);
        for (std::size_t i = 0; i < base.checkpoints.size(); ++i)
            CHECK(base.checkpoints[i].position == lifted.checkpoints[i].position);
    }
}

TEST_CASE("mirror coupling for symmetric kernels") {
    // complementing the uniform draws mirrors the trajectory exactly
    auto k = InteractionKernel::symmetric_family(-0.25, 1.0);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        WalkState fwd, mir;
        fwd.rng = Rng(seed);
        Rng draws(seed);
        for (int i = 0; i < 20000; ++i) {
            double u = draws.uniform();
            step_with(fwd, k, u);
            step_with(mir, k, 1.0 - u);
            REQUIRE(mir.position == -fwd.position);
        }
    }
}

TEST_CASE("attractive nearest-edge kernel gets stuck on one edge") {
    // D^{0,-1}: jumping an edge makes it more attractive; most seeds end up
    // bouncing on a single edge
    auto k = InteractionKernel::symmetric_family(0.0, -1.0);
    int one_edge = 0;
    const int seeds = 40;
    for (int s = 0; s < seeds; ++s) {
        RunConfig config;
        config.kernel = k;
        config.steps = 100000;
        config.seed = derive_stream(777, static_cast<std::uint64_t>(s));
        RunSummary sum = run(config);
        const auto& last = sum.checkpoints.back();
        if (last.range_max - last.range_min == 1) ++one_edge;
    }
    CHECK(one_edge >= seeds / 2);
}

TEST_CASE("log_walk to 1e6 steps stays finite and in range") {
    RunConfig config;
    config.kernel = preset("log_walk").kernel;
    config.steps = 1000000;
    config.seed = 9;
    RunSummary s = run(config);
    double d = drift(s.final_profile, s.final_position, config.kernel);
    CHECK(std::isfinite(d));
    double p = jump_probability(d);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(s.final_profile.total() == config.steps);
}

TEST_CASE("preset coefficient maps") {
    CHECK(preset("tsrw").kernel.literal() == InteractionKernel::symmetric_family(0, 1).literal());
    auto second = preset("second_derivative").kernel;
    CHECK(second.weight(-3) == -0.5);
    CHECK(second.weight(-1) == 0.5);
    CHECK(second.weight(1) == 0.5);
    CHECK(second.weight(3) == -0.5);
    auto log_k = preset("log_walk").kernel;
    CHECK(log_k.weight(-3) == -2.0);
    CHECK(log_k.weight(-1) == 1.0);
    CHECK(log_k.weight(1) == 1.0);
    auto ball = preset("ballistic").kernel;
    CHECK(ball.weight(-1) == 1.0);
    CHECK(ball.weight(1) == -2.0);
    CHECK(ball.weight(3) == 1.0);
    for (const auto& name : preset_names()) {
        Preset p = preset(name);
        double sum = 0.0;
        for (const auto& t : p.kernel.terms()) sum += t.weight;
        CHECK(sum == 0.0);
    }
    CHECK_THROWS_AS(preset("nope"), std::out_of_range);
}
