#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "selfwalk/engine.hpp"

// Coupling machinery for the second-derivative walk (D = -(second
// difference)/2). The walk is rebuilt deterministically from a family of
// +-1 variables indexed by (site x, twice the drift level 2j, visit index k),
// with P(+1) = e^{-j}/(e^j + e^{-j}). Checkers verify the near-deterministic
// sqrt(2n) scenario: the stopping times sigma_x, the four per-site conditions,
// the running-max bound S_n - X_n <= 2, and the exact crossing-count
// recursion driven by the sign-surplus statistic M^x.

namespace selfwalk {

// Lazily sampled family of +-1 draws. A draw is a pure hash of
// (seed, x, 2j, k), so repeated queries agree and whole runs replay
// bit-identically from the seed. draw() records the key as realized;
// peek() does not. The coupled run consumes each key at most once, so the
// realized log is append-only.
class SignFamily {
public:
    struct Key {
        std::int64_t x;
        std::int64_t two_j;
        std::int64_t k;
        bool operator==(const Key& o) const { return x == o.x && two_j == o.two_j && k == o.k; }
    };

    explicit SignFamily(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // P(+1) for a variable at drift level j = two_j / 2; k >= 1 required.
    static double p_plus(std::int64_t two_j);

    int draw(std::int64_t x, std::int64_t two_j, std::int64_t k);
    int peek(std::int64_t x, std::int64_t two_j, std::int64_t k) const;

    const std::vector<std::pair<Key, int>>& realized() const { return realized_; }

    // Sign surplus over the realized integer-level subfamily at site x
    // (k = 1, 2j even): #{j >= 0 : value +1} - #{j < 0 : value -1}.
    std::int64_t sign_surplus_realized(std::int64_t x) const;

    // Surplus of every site with realized keys, in one pass.
    std::unordered_map<std::int64_t, std::int64_t> surplus_by_site() const;

    // Same statistic over the full subfamily enumerated for |j| <= j_max.
    std::int64_t sign_surplus_enumerated(std::int64_t x, int j_max = 40) const;

private:
    std::uint64_t seed_;
    std::vector<std::pair<Key, int>> realized_;
};

struct CoupledRun {
    std::vector<std::int32_t> positions;  // X_0 .. X_n
    SignFamily family;
    std::map<std::int64_t, double> initial_profile;
    // steps at which the walk sat at x >= 0 with an odd drift difference;
    // the parity argument promises none, violations are logged not fatal
    std::int64_t parity_violations = 0;
};

// Runs the coupled walk for n steps from X_0 = 0 with the pre-charged
// initial profile l0(-1/2) = l0(-3/2) = 1. Each step consumes the key
// (x = X_m, 2j = current second difference, k = visits to x at this level).
CoupledRun run_coupled(std::int64_t n, std::uint64_t seed);

// sigma_x: first time at which edge {x-1, x} has been crossed more than x/8
// times while the walk stands at x-1; entry x-1 of the result (x >= 1).
std::vector<std::optional<std::int64_t>> sigma_times(const std::vector<std::int32_t>& positions);

struct ScenarioRecord {
    std::int64_t x = 0;
    std::optional<std::int64_t> sigma;
    bool evaluated = false;  // conditions checked (needs sigma_{x-1}, sigma_x)
    bool e1 = false;         // no visit to x+1 before sigma_x
    bool e2 = false;         // only sites x-2, x-1, x on [sigma_{x-1}, sigma_x]
    bool e3 = false;         // last floor(x/10) jumps all on edge {x-1, x}
    bool e4 = false;         // the two trailing local times balanced and sized
    std::int64_t m_surplus = 0;
    std::optional<std::int64_t> recursion_residual;  // 0 on good runs
};

struct ScenarioReport {
    std::vector<ScenarioRecord> records;  // x = 1 .. max site reached
    std::int64_t x_contiguous = 0;        // largest x with sigma_1..sigma_x all set
    std::int64_t x_checked_from = 0;      // first site the conditions were evaluated at
    std::int64_t max_backtrack = 0;       // max (S_m - X_m)
    std::int64_t parity_violations = 0;
    bool good = false;
    std::string first_failure;  // empty when good

    std::string to_csv() const;
};

// Evaluates the scenario conditions for x_low <= x <= x_contiguous, the
// running-max bound, and the crossing-count recursion
//   l_{sigma(x+1)}(-1/2) = l_{sigma(x)}(-1/2) + 2 (1 - M^x)   (exact).
// The per-site conditions are asymptotic; the first sites after the start are
// dominated by initialization noise (e.g. the sqrt(x) balance bound admits a
// single exception only once x > 16), hence the default checking window.
ScenarioReport check_scenario(const CoupledRun& run, std::int64_t x_low = 20);

struct EventAuditOptions {
    std::int64_t samples_per_site = 10000;
    double tail_margin = 5.0;  // sampled tail starts at threshold + margin
    double tail_band = 20.0;   // width of the sampled j band
    std::uint64_t audit_seed = 0x5eedau;
};

struct EventAudit {
    // A: all tail draws (j above sqrt(|x|)/100, k <= 100 x^2) equal -sign(j);
    // checked on realized keys exactly, plus a declared sampled band.
    bool tail_ok = false;
    std::int64_t tail_violations = 0;
    std::int64_t tail_sampled_keys = 0;
    // B: at most sqrt(x)/100 sign exceptions in the integer subfamily per site
    bool exceptions_ok = false;
    std::optional<std::int64_t> exceptions_first_fail_x;
    // C: partial sums of M^x stay inside [y/4, 4y]
    bool surplus_band_ok = false;
    std::optional<std::int64_t> surplus_first_fail_y;

    bool all() const { return tail_ok && exceptions_ok && surplus_band_ok; }
};

// Audits the three events over sites [0, x_max]; x_max <= 500.
EventAudit audit_events(const SignFamily& family, std::int64_t x_max,
                        const EventAuditOptions& options = {});

}  // namespace selfwalk
