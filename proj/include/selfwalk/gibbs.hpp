#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfwalk/engine.hpp"
#include "selfwalk/kernel.hpp"

// The environment seen from the walker: the integer gradient profile
// eta(x) = l(x+1/2) - l(x-1/2) on a finite window, the shift operators that
// a jump induces on it, Gibbs weights for the stationary environment, and an
// exact stationarity check on truncated state spaces.
//
// Sign conventions, frozen after numerical validation by
// rn_identity_residual and exact_stationarity_check:
//   * shifts are derived from first principles (increment the crossed edge,
//     then recenter):  R eta(x) = eta(x+1) + d_{-1}(x) - d_0(x) and
//     L eta(x) = eta(x-1) + d_0(x) - d_1(x);
//   * the Gibbs precision is alpha := -c with c the gradient coefficients of
//     the kernel, so the drift is  sum_x c(x) eta(x)  and the log weight is
//     -1/2 sum alpha(y-x) eta(x) eta(y) = +1/2 sum c(y-x) eta(x) eta(y);
//   * the stationary weight of the discrete (jump) chain is
//     gibbs_log_weight + log tau, tau = e^D + e^{-D} the total jump rate of
//     the continuous-time chain. (Weighting by 1/tau instead turns the
//     stationarity residual macroscopic; see exact_stationarity_check.)

namespace selfwalk {

struct WindowOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parity class of a gradient configuration. The walk dynamics preserve
// omega (eta(x) + 1_{x=0} even everywhere, the class reachable from a zero
// initial profile) and its shifted twin (eta(x) + 1 + 1_{x=0} even). Other
// configurations are algebraically fine for drift/weight evaluation but are
// not closed under the shifts.
enum class ParityClass { omega, shifted_omega, none };

// eta on [-w, w], zero outside.
class GradientProfile {
public:
    GradientProfile(int w, std::vector<std::int64_t> values);

    int w() const { return w_; }
    std::int64_t at(int x) const {
        return (x < -w_ || x > w_) ? 0 : values_[static_cast<std::size_t>(x + w_)];
    }
    const std::vector<std::int64_t>& values() const { return values_; }
    ParityClass parity_class() const { return parity_; }
    bool in_omega() const { return parity_ == ParityClass::omega; }

    bool operator==(const GradientProfile& o) const { return w_ == o.w_ && values_ == o.values_; }

private:
    int w_;
    std::vector<std::int64_t> values_;  // size 2w+1
    ParityClass parity_ = ParityClass::none;
};

// Environment shift for a right / left jump. Throws WindowOverflow when the
// shifted profile no longer fits the window (pad the window first).
GradientProfile shift_right(const GradientProfile& eta);
GradientProfile shift_left(const GradientProfile& eta);

// Preimages: shift_right(shift_right_inverse(eta)) == eta.
GradientProfile shift_right_inverse(const GradientProfile& eta);
GradientProfile shift_left_inverse(const GradientProfile& eta);

// sum_x c(x) eta(x); equals engine drift of any cumulative-sum profile.
double gradient_drift(const GradientProfile& eta, const InteractionKernel& kernel);

// -1/2 sum_{x,y in window} eta(x) eta(y) alpha(y-x), free boundary.
// Requires a positive definite (symmetric) kernel.
double gibbs_log_weight(const GradientProfile& eta, const InteractionKernel& kernel);

// | [logw(R eta) - logw(eta)] - [D(eta) - D(R eta)] |; vanishes (to rounding)
// under the frozen sign conventions. The identity is algebraic, so any
// left-right symmetric kernel is accepted, positive definite or not.
// Requires eta(-w) = 0 so that R eta is representable.
double rn_identity_residual(const GradientProfile& eta, const InteractionKernel& kernel);

// tau = e^D + e^{-D}, the total jump rate; >= 2, equality iff D = 0.
double waiting_time(const GradientProfile& eta, const InteractionKernel& kernel);

// gibbs_log_weight + log tau (unnormalized); overflow-safe in log space.
double discrete_stationary_logweight(const GradientProfile& eta, const InteractionKernel& kernel);

// All parity-admissible states in the box {|eta(x)| <= H on [-w, w]} with the
// discrete-chain transitions; transitions leaving the box are accumulated as
// leakage. States are indexed lexicographically over (x, eta(x)).
struct TruncatedChain {
    int w = 0;
    int H = 0;
    std::vector<GradientProfile> states;
    struct Row {
        std::int64_t right_target = -1;  // -1 when the move leaves the box
        double p_right = 0.0;
        std::int64_t left_target = -1;
        double p_left = 0.0;
        double leakage = 0.0;  // p-mass of out-of-box moves
    };
    std::vector<Row> rows;
    std::vector<std::int64_t> right_source;  // index of R^{-1}, -1 if outside
    std::vector<std::int64_t> left_source;

    std::optional<std::size_t> index_of(const GradientProfile& eta) const;
};

// Throws std::length_error when the state space exceeds the cap.
TruncatedChain build_truncated_chain(const InteractionKernel& kernel, int w, int H,
                                     std::size_t max_states = 4u << 20);

struct StationarityReport {
    std::string kernel_literal;
    int w = 0;
    int H = 0;
    std::size_t state_count = 0;
    std::size_t interior_count = 0;  // states with both preimages in the box
    double leakage = 0.0;            // pi-weighted out-of-box mass
    double residual_ct = 0.0;        // continuous-time flow imbalance, interior, relative
    double residual_discrete = 0.0;  // ||pi P - pi||_1 over interior states
    double max_row_defect = 0.0;     // max |p_right + p_left + leakage - 1|
    std::string sign_convention =
        "first-principles shifts; precision alpha = -c; discrete weight pi0 * tau";

    std::string to_text() const;
};

// Enumerates the truncated box, checks stationarity of the Gibbs weights for
// the continuous-time chain and of pi0 * tau for the discrete chain, both
// restricted to interior states. The finite box is normalizable for any
// symmetric kernel, so the oracle runs outside the positive definite wedge
// too (where no infinite-volume measure exists). Requires w <= 4 and H <= 5.
StationarityReport exact_stationarity_check(const InteractionKernel& kernel, int w, int H);

struct GradientMoments {
    struct EdgeStats {
        int two_e = 0;      // edge offset of the sampled gradient-of-gradient
        double mean = 0.0;  // of eta(e+1/2) - eta(e-1/2)
        double variance = 0.0;
        double excess_kurtosis = 0.0;
        double stderr_mean = 0.0;  // batch-means standard error
    };
    std::vector<EdgeStats> edges;
    double cross_correlation = 0.0;  // corr of the values at offsets -1/2, 1/2
    std::vector<double> mean_eta;    // mean eta(x) for x in [-3, 3]
    std::int64_t samples = 0;
};

// Simulates the walk for `steps` steps (after `burn_in`) and samples the
// discrete gradient of eta at the walker. Requires a kernel on the a = -b/3
// line (where that gradient has an i.i.d. discrete-Gaussian stationary law).
GradientMoments gradient_chain_moments(const InteractionKernel& kernel, std::int64_t steps,
                                       std::uint64_t seed, std::int64_t burn_in = -1);

}  // namespace selfwalk
