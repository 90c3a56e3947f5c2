#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "selfwalk/coupling.hpp"
#include "selfwalk/engine.hpp"
#include "selfwalk/rng.hpp"

using namespace selfwalk;

namespace {

// two-sample Kolmogorov-Smirnov statistic on integer samples
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        double v = (j >= b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST_CASE("sign family law and memo determinism") {
    CHECK(SignFamily::p_plus(0) == 0.5);
    CHECK(SignFamily::p_plus(2) == doctest::Approx(0.11920292202211755).epsilon(1e-15));
    CHECK(SignFamily::p_plus(-2) == doctest::Approx(0.8807970779778823).epsilon(1e-15));

    SignFamily fam(42);
    int v = fam.draw(3, 4, 1);
    CHECK(fam.draw(3, 4, 1) == v);
    CHECK(fam.peek(3, 4, 1) == v);
    SignFamily fam2(42);
    CHECK(fam2.peek(3, 4, 1) == v);
    CHECK_THROWS_AS(fam.peek(0, 0, 0), std::domain_error);

    // fair coin at level zero
    SignFamily fresh(2718);
    double mean = 0.0;
    for (int i = 0; i < 100000; ++i) mean += fresh.peek(i, 0, 1);
    mean /= 100000.0;
    CHECK(std::abs(mean) < 0.02);
}

TEST_CASE("sign surplus has mean one half") {
    double mean = 0.0;
    const int families = 10000;
    for (int i = 0; i < families; ++i) {
        SignFamily fam(derive_stream(31337, static_cast<std::uint64_t>(i)));
        mean += static_cast<double>(fam.sign_surplus_enumerated(17));
    }
    mean /= families;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.04));  // 0.5 +- 0.02
}

TEST_CASE("coupled run basics") {
    CoupledRun r0 = run_coupled(0, 5);
    CHECK(r0.positions == std::vector<std::int32_t>{0});

    CoupledRun r = run_coupled(5000, 5);
    CHECK(r.positions.size() == 5001);
    for (std::size_t i = 1; i < r.positions.size(); ++i)
        CHECK(std::abs(r.positions[i] - r.positions[i - 1]) == 1);
    // every step consumed a fresh key, and no key twice
    CHECK(r.family.realized().size() == 5000);
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> distinct;
    for (const auto& [key, value] : r.family.realized())
        distinct.insert({key.x, key.two_j, key.k});
    CHECK(distinct.size() == 5000);

    // replay determinism
    CoupledRun r2 = run_coupled(5000, 5);
    CHECK(r.positions == r2.positions);
}

TEST_CASE("coupled walk matches the engine walk in law") {
    // both implement P(right) = F(-(second difference)/2) from the same
    // pre-charged profile; quick KS check at the 1% level (the acceptance
    // suite runs the full-size version)
    const int seeds = 400;
    const std::int64_t n = 2000;
    std::vector<double> coupled, direct;
    Preset p = preset("second_derivative");
    for (int s = 0; s < seeds; ++s) {
        CoupledRun cr = run_coupled(n, derive_stream(101, static_cast<std::uint64_t>(s)));
        coupled.push_back(cr.positions.back());
        RunConfig config;
        config.kernel = p.kernel;
        config.steps = n;
        config.seed = derive_stream(202, static_cast<std::uint64_t>(s));
        config.initial_profile = p.initial_profile;
        direct.push_back(static_cast<double>(run(config).final_position));
    }
    double d = ks_statistic(coupled, direct);
    double critical = 1.628 * std::sqrt(2.0 / seeds);
    CHECK(d < critical);
}

TEST_CASE("sigma times against a brute-force scan") {
    // hand-built 12-step trajectory: cross edge {0,1} twice, then wander
    std::vector<std::int32_t> hand{0, 1, 0, 1, 2, 1, 2, 3, 4, 3, 2, 1, 0};
    auto sigma = sigma_times(hand);
    REQUIRE(sigma.size() >= 2);
    CHECK(sigma[0] == 2);  // sigma_1: edge {0,1} crossed twice, walk back at 0

    // brute force directly from the definition on random walks
    Rng rng(555);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::int32_t> pos{0};
        for (int m = 0; m < 200; ++m)
            pos.push_back(pos.back() + (rng.uniform() < 0.55 ? 1 : -1));
        auto got = sigma_times(pos);
        std::int32_t max_pos = *std::max_element(pos.begin(), pos.end());
        for (std::int32_t x = 1; x <= max_pos; ++x) {
            std::optional<std::int64_t> expect;
            for (std::size_t m = 1; m < pos.size() && !expect; ++m) {
                std::int64_t crossings = 0;
                for (std::size_t t = 1; t <= m; ++t)
                    if (std::min(pos[t - 1], pos[t]) == x - 1) ++crossings;
                if (pos[m] == x - 1 && 8 * crossings > x) expect = static_cast<std::int64_t>(m);
            }
            CHECK(got[static_cast<std::size_t>(x - 1)] == expect);
        }
    }
}

TEST_CASE("scenario checker flags a crafted early visit") {
    // sigma_1 = 2, sigma_2 = 5, sigma_3 = 10, but site 4 is reached at m = 8,
    // before sigma_3: condition 1 of E(3) must fail
    std::vector<std::int32_t> crafted{0, 1, 0, 1, 2, 1, 2, 3, 4, 3, 2};
    CoupledRun run{crafted, SignFamily(1), {{-2, 1.0}, {-1, 1.0}}, 0};
    ScenarioReport rep = check_scenario(run, 3);
    CHECK_FALSE(rep.good);
    CHECK(rep.first_failure == "x=3:e1");
    REQUIRE(rep.records.size() >= 3);
    CHECK(rep.records[2].evaluated);
    CHECK_FALSE(rep.records[2].e1);
    CHECK(rep.to_csv().find("x,sigma_x,e1,e2,e3,e4,M_x,recursion_ok") == 0);
}

TEST_CASE("good scenario runs verify the exact recursion") {
    // scan a few seeds for flagged runs; on them the crossing-count recursion
    // must hold with zero residual and sigma must grow like x^2/2
    int flagged = 0;
    for (std::uint64_t seed = 0; seed < 60 && flagged < 3; ++seed) {
        CoupledRun cr = run_coupled(100000, derive_stream(40, seed));
        ScenarioReport rep = check_scenario(cr);
        if (!rep.good) continue;
        ++flagged;
        CHECK(rep.max_backtrack <= 2);
        // sigma strictly increasing over the checked window
        std::int64_t prev = -1;
        for (std::int64_t x = rep.x_checked_from - 1; x <= rep.x_contiguous; ++x) {
            std::int64_t s = *rep.records[static_cast<std::size_t>(x - 1)].sigma;
            CHECK(s > prev);
            prev = s;
        }
        for (const auto& rec : rep.records)
            if (rec.recursion_residual) CHECK(*rec.recursion_residual == 0);
        // sigma(x) ~ x^2/2 at the largest contiguous x
        std::int64_t x = rep.x_contiguous;
        if (x >= 200) {
            double ratio = static_cast<double>(
                               *rep.records[static_cast<std::size_t>(x - 1)].sigma) /
                           (0.5 * static_cast<double>(x) * static_cast<double>(x));
            CHECK(ratio > 0.8);
            CHECK(ratio < 1.2);
        }
    }
    CHECK(flagged >= 1);
}

TEST_CASE("fourth-difference drift keeps the deterministic sqrt signature") {
    // same one-sided structure, two extra taps: a positive fraction of seeds
    // still advances deterministically at sqrt scale with backtrack <= 2;
    // the constant in front of sqrt(n) is kernel-dependent (measured ~ 1
    // here, i.e. ~ 0.71 on the sqrt(2n) normalization)
    auto fourth = InteractionKernel::from_coeffs(
        {{-5, 0.5}, {-3, -1.5}, {-1, 1.0}, {1, 1.0}, {3, -1.5}, {5, 0.5}});
    std::vector<double> ratios;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        RunConfig config;
        config.kernel = fourth;
        config.steps = 100000;
        config.seed = derive_stream(808, seed);
        RunSummary s = run(config);
        if (s.max_backtrack > 2) continue;
        ratios.push_back(static_cast<double>(s.final_position) /
                         std::sqrt(2.0 * static_cast<double>(config.steps)));
    }
    REQUIRE(ratios.size() >= 10);
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    var /= static_cast<double>(ratios.size());
    CHECK(mean > 0.5);
    CHECK(mean < 1.1);
    CHECK(std::sqrt(var) < 0.05);  // deterministic scale, not diffusive scatter
}

TEST_CASE("event audit") {
    // realize the integer subfamily on a stretch of sites, then audit
    auto realize = [](SignFamily& fam, std::int64_t x_max) {
        for (std::int64_t x = 0; x <= x_max; ++x)
            for (std::int64_t j = -3; j <= 6; ++j) fam.draw(x, 2 * j, 1);
    };

    // C violated at some seed: the band [y/4, 4y] is tight for small y
    bool found_c_fail = false;
    for (std::uint64_t seed = 0; seed < 200 && !found_c_fail; ++seed) {
        SignFamily fam(derive_stream(900, seed));
        realize(fam, 30);
        EventAudit audit = audit_events(fam, 30, {100, 5.0, 20.0, 7});
        if (!audit.surplus_band_ok) {
            found_c_fail = true;
            CHECK_FALSE(audit.all());
            CHECK(audit.surplus_first_fail_y.has_value());
        }
    }
    CHECK(found_c_fail);

    // all three events together hold for a (rare) positive fraction of
    // families: near-threshold draws make the tail event strict, so the
    // joint pass rate at this scale is well under a percent
    int joint_pass = 0;
    for (int s = 0; s < 300; ++s) {
        CoupledRun cr = run_coupled(300, derive_stream(777010, static_cast<std::uint64_t>(s)));
        if (audit_events(cr.family, 10).all()) ++joint_pass;
    }
    CHECK(joint_pass > 0);

    CHECK_THROWS_AS(audit_events(SignFamily(1), 501), std::length_error);
}
