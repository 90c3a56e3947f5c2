#include "selfwalk/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace selfwalk {

GradientProfile::GradientProfile(int w, std::vector<std::int64_t> values)
    : w_(w), values_(std::move(values)) {
    if (w < 0) throw std::invalid_argument("GradientProfile: negative window");
    if (values_.size() != static_cast<std::size_t>(2 * w + 1))
        throw std::invalid_argument("GradientProfile: values must span [-w, w]");
    bool omega = true, shifted = true;
    for (int x = -w_; x <= w_; ++x) {
        bool even = ((at(x) % 2) + 2) % 2 == 0;
        if (x == 0) {
            omega = omega && !even;
            shifted = shifted && even;
        } else {
            omega = omega && even;
            shifted = shifted && !even;
        }
    }
    // sites outside the window are zero (even), which rules shifted_omega out
    // unless the window is empty of off-center sites
    if (w_ > 0) shifted = false;
    parity_ = omega ? ParityClass::omega
                    : (shifted ? ParityClass::shifted_omega : ParityClass::none);
}

GradientProfile shift_right(const GradientProfile& eta) {
    int w = eta.w();
    if (eta.at(-w) != 0)
        throw WindowOverflow("shift_right: support would leave the window on the left");
    std::vector<std::int64_t> v(static_cast<std::size_t>(2 * w + 1));
    for (int x = -w; x <= w; ++x) {
        std::int64_t val = eta.at(x + 1);
        if (x == -1) val += 1;
        if (x == 0) val -= 1;
        v[static_cast<std::size_t>(x + w)] = val;
    }
    return GradientProfile(w, std::move(v));
}

GradientProfile shift_left(const GradientProfile& eta) {
    int w = eta.w();
    if (eta.at(w) != 0)
        throw WindowOverflow("shift_left: support would leave the window on the right");
    std::vector<std::int64_t> v(static_cast<std::size_t>(2 * w + 1));
    for (int x = -w; x <= w; ++x) {
        std::int64_t val = eta.at(x - 1);
        if (x == 0) val += 1;
        if (x == 1) val -= 1;
        v[static_cast<std::size_t>(x + w)] = val;
    }
    return GradientProfile(w, std::move(v));
}

GradientProfile shift_right_inverse(const GradientProfile& eta) {
    int w = eta.w();
    if (eta.at(w) != 0)
        throw WindowOverflow("shift_right_inverse: support would leave the window");
    std::vector<std::int64_t> v(static_cast<std::size_t>(2 * w + 1));
    for (int x = -w; x <= w; ++x) {
        std::int64_t val = eta.at(x - 1);
        if (x == 0) val -= 1;
        if (x == 1) val += 1;
        v[static_cast<std::size_t>(x + w)] = val;
    }
    return GradientProfile(w, std::move(v));
}

GradientProfile shift_left_inverse(const GradientProfile& eta) {
    int w = eta.w();
    if (eta.at(-w) != 0)
        throw WindowOverflow("shift_left_inverse: support would leave the window");
    std::vector<std::int64_t> v(static_cast<std::size_t>(2 * w + 1));
    for (int x = -w; x <= w; ++x) {
        std::int64_t val = eta.at(x + 1);
        if (x == -1) val -= 1;
        if (x == 0) val += 1;
        v[static_cast<std::size_t>(x + w)] = val;
    }
    return GradientProfile(w, std::move(v));
}

double gradient_drift(const GradientProfile& eta, const InteractionKernel& kernel) {
    auto c = gradient_coeffs(kernel);
    int w = eta.w();
    for (const auto& [x, cx] : c)
        if (x < -w || x > w)
            throw std::invalid_argument("gradient_drift: kernel support exceeds the window");
    double d = 0.0;
    for (const auto& [x, cx] : c) d += cx * static_cast<double>(eta.at(x));
    return d;
}

namespace {

// full displacement table of c over [-(2w), 2w]
std::vector<double> displacement_coeffs(const InteractionKernel& kernel, int w) {
    std::vector<double> c(static_cast<std::size_t>(4 * w + 1), 0.0);
    for (const auto& [x, cx] : gradient_coeffs(kernel)) {
        if (x < -2 * w || x > 2 * w)
            throw std::invalid_argument("kernel gradient support exceeds the window");
        c[static_cast<std::size_t>(x + 2 * w)] = cx;
    }
    return c;
}

double quadratic_form(const GradientProfile& eta, const std::vector<double>& c, int w) {
    // +1/2 sum_{x,y} eta(x) eta(y) c(y-x)  ==  -1/2 sum eta eta alpha(y-x)
    double total = 0.0;
    for (int x = -w; x <= w; ++x) {
        if (eta.at(x) == 0) continue;
        for (int y = -w; y <= w; ++y) {
            double cyx = c[static_cast<std::size_t>((y - x) + 2 * w)];
            if (cyx == 0.0) continue;
            total += static_cast<double>(eta.at(x)) * static_cast<double>(eta.at(y)) * cyx;
        }
    }
    return 0.5 * total;
}

}  // namespace

namespace {

void require_symmetric(const InteractionKernel& kernel, const char* who) {
    if (!kernel.is_symmetric())
        throw KernelError(std::string(who) + ": requires a left-right symmetric kernel");
}

}  // namespace

double gibbs_log_weight(const GradientProfile& eta, const InteractionKernel& kernel) {
    if (!is_positive_definite(kernel))
        throw KernelError("gibbs_log_weight: kernel precision is not positive definite");
    return quadratic_form(eta, displacement_coeffs(kernel, eta.w()), eta.w());
}

double rn_identity_residual(const GradientProfile& eta, const InteractionKernel& kernel) {
    // the identity is algebraic for any even precision, so it is checked on
    // the raw quadratic form; the weight only defines a measure in the
    // positive definite wedge
    require_symmetric(kernel, "rn_identity_residual");
    auto c = displacement_coeffs(kernel, eta.w());
    GradientProfile shifted = shift_right(eta);
    double dw = quadratic_form(shifted, c, eta.w()) - quadratic_form(eta, c, eta.w());
    double dd = gradient_drift(eta, kernel) - gradient_drift(shifted, kernel);
    return std::abs(dw - dd);
}

double waiting_time(const GradientProfile& eta, const InteractionKernel& kernel) {
    return 2.0 * std::cosh(gradient_drift(eta, kernel));
}

namespace {

double log_two_cosh(double d) {
    double a = std::abs(d);
    return a + std::log1p(std::exp(-2.0 * a));
}

}  // namespace

double discrete_stationary_logweight(const GradientProfile& eta, const InteractionKernel& kernel) {
    require_symmetric(kernel, "discrete_stationary_logweight");
    return quadratic_form(eta, displacement_coeffs(kernel, eta.w()), eta.w()) +
           log_two_cosh(gradient_drift(eta, kernel));
}

std::optional<std::size_t> TruncatedChain::index_of(const GradientProfile& eta) const {
    if (eta.w() != w) return std::nullopt;
    // mixed-radix rank in the lexicographic enumeration over (x, eta(x))
    std::size_t rank = 0;
    for (int x = -w; x <= w; ++x) {
        std::int64_t v = eta.at(x);
        if (v < -H || v > H) return std::nullopt;
        std::size_t digits, digit;
        if (x == 0) {
            digits = static_cast<std::size_t>((2 * H + (H % 2 == 0 ? 0 : 2)) / 2);
            std::int64_t lowest_odd = -(H % 2 == 0 ? H - 1 : H);
            if ((v - lowest_odd) % 2 != 0) return std::nullopt;
            digit = static_cast<std::size_t>((v - lowest_odd) / 2);
        } else {
            digits = static_cast<std::size_t>(2 * (H / 2) + 1);
            if (v % 2 != 0) return std::nullopt;
            digit = static_cast<std::size_t>((v + 2 * (H / 2)) / 2);
        }
        rank = rank * digits + digit;
    }
    return rank;
}

TruncatedChain build_truncated_chain(const InteractionKernel& kernel, int w, int H,
                                     std::size_t max_states) {
    if (w < 1 || H < 1) throw std::invalid_argument("build_truncated_chain: need w, H >= 1");
    TruncatedChain chain;
    chain.w = w;
    chain.H = H;

    std::size_t odd_count = static_cast<std::size_t>((2 * H + (H % 2 == 0 ? 0 : 2)) / 2);
    std::size_t even_count = static_cast<std::size_t>(2 * (H / 2) + 1);
    double total = static_cast<double>(odd_count);
    for (int x = 1; x <= 2 * w; ++x) total *= static_cast<double>(even_count);
    if (total > static_cast<double>(max_states))
        throw std::length_error("build_truncated_chain: state space exceeds the resource cap");

    // odometer over sites in lexicographic order
    std::vector<std::int64_t> values(static_cast<std::size_t>(2 * w + 1));
    std::int64_t lowest_odd = -(H % 2 == 0 ? H - 1 : H);
    std::int64_t lowest_even = -2 * (H / 2);
    std::vector<std::size_t> digit(static_cast<std::size_t>(2 * w + 1), 0);
    while (true) {
        for (int x = -w; x <= w; ++x) {
            std::size_t i = static_cast<std::size_t>(x + w);
            values[i] = (x == 0 ? lowest_odd : lowest_even) + 2 * static_cast<std::int64_t>(digit[i]);
        }
        chain.states.emplace_back(w, values);
        // increment odometer, rightmost site fastest
        int x = w;
        for (; x >= -w; --x) {
            std::size_t i = static_cast<std::size_t>(x + w);
            std::size_t radix = (x == 0) ? odd_count : even_count;
            if (++digit[i] < radix) break;
            digit[i] = 0;
        }
        if (x < -w) break;
    }

    chain.rows.resize(chain.states.size());
    chain.right_source.assign(chain.states.size(), -1);
    chain.left_source.assign(chain.states.size(), -1);
    for (std::size_t s = 0; s < chain.states.size(); ++s) {
        const GradientProfile& eta = chain.states[s];
        double p = jump_probability(gradient_drift(eta, kernel));
        auto& row = chain.rows[s];
        row.p_right = p;
        row.p_left = 1.0 - p;
        try {
            if (auto t = chain.index_of(shift_right(eta))) {
                row.right_target = static_cast<std::int64_t>(*t);
                chain.right_source[*t] = static_cast<std::int64_t>(s);
            } else {
                row.leakage += p;
                row.right_target = -1;
            }
        } catch (const WindowOverflow&) {
            row.leakage += p;
        }
        try {
            if (auto t = chain.index_of(shift_left(eta))) {
                row.left_target = static_cast<std::int64_t>(*t);
                chain.left_source[*t] = static_cast<std::int64_t>(s);
            } else {
                row.leakage += 1.0 - p;
                row.left_target = -1;
            }
        } catch (const WindowOverflow&) {
            row.leakage += 1.0 - p;
        }
        if (row.right_target < 0) row.p_right = 0.0;
        if (row.left_target < 0) row.p_left = 0.0;
    }
    return chain;
}

std::string StationarityReport::to_text() const {
    std::ostringstream os;
    os << "stationarity check\n"
       << "  kernel            " << kernel_literal << "\n"
       << "  window w          " << w << "\n"
       << "  height cutoff H   " << H << "\n"
       << "  states            " << state_count << "\n"
       << "  interior states   " << interior_count << "\n"
       << "  leakage           " << leakage << "\n"
       << "  residual ct       " << residual_ct << "\n"
       << "  residual discrete " << residual_discrete << "\n"
       << "  max row defect    " << max_row_defect << "\n"
       << "  sign convention   " << sign_convention << "\n";
    return os.str();
}

StationarityReport exact_stationarity_check(const InteractionKernel& kernel, int w, int H) {
    if (w > 4 || H > 5)
        throw std::length_error("exact_stationarity_check: w <= 4 and H <= 5 required");
    require_symmetric(kernel, "exact_stationarity_check");

    TruncatedChain chain = build_truncated_chain(kernel, w, H);
    std::size_t n = chain.states.size();

    auto c = displacement_coeffs(kernel, w);
    std::vector<double> logw0(n), drifts(n);
    for (std::size_t s = 0; s < n; ++s) {
        logw0[s] = quadratic_form(chain.states[s], c, w);
        drifts[s] = gradient_drift(chain.states[s], kernel);
    }
    double max_log = *std::max_element(logw0.begin(), logw0.end());

    // normalized pi0 (continuous-time) and pi0 * tau (discrete chain)
    std::vector<double> pi0(n), pid(n);
    double z0 = 0.0, zd = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        pi0[s] = std::exp(logw0[s] - max_log);
        pid[s] = std::exp(logw0[s] - max_log + log_two_cosh(drifts[s]));
        z0 += pi0[s];
        zd += pid[s];
    }
    for (std::size_t s = 0; s < n; ++s) {
        pi0[s] /= z0;
        pid[s] /= zd;
    }

    StationarityReport report;
    report.kernel_literal = kernel.literal();
    report.w = w;
    report.H = H;
    report.state_count = n;

    double leakage = 0.0, max_defect = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const auto& row = chain.rows[s];
        leakage += pid[s] * row.leakage;
        max_defect = std::max(max_defect,
                              std::abs(row.p_right + row.p_left + row.leakage - 1.0));
    }
    report.leakage = leakage;
    report.max_row_defect = max_defect;

    double resid_d = 0.0, resid_ct = 0.0, flow_total = 0.0;
    std::size_t interior = 0;
    for (std::size_t s = 0; s < n; ++s) {
        flow_total += pi0[s] * 2.0 * std::cosh(drifts[s]);
        std::int64_t rs = chain.right_source[s];
        std::int64_t ls = chain.left_source[s];
        if (rs < 0 || ls < 0) continue;
        ++interior;
        auto r = static_cast<std::size_t>(rs);
        auto l = static_cast<std::size_t>(ls);
        double inflow_d = pid[r] * chain.rows[r].p_right + pid[l] * chain.rows[l].p_left;
        resid_d += std::abs(inflow_d - pid[s]);
        double inflow_ct = pi0[r] * std::exp(drifts[r]) + pi0[l] * std::exp(-drifts[l]);
        resid_ct += std::abs(inflow_ct - pi0[s] * 2.0 * std::cosh(drifts[s]));
    }
    report.interior_count = interior;
    report.residual_discrete = resid_d;
    report.residual_ct = resid_ct / flow_total;
    return report;
}

GradientMoments gradient_chain_moments(const InteractionKernel& kernel, std::int64_t steps,
                                       std::uint64_t seed, std::int64_t burn_in) {
    auto ab = kernel.symmetric_params();
    if (!ab || !(ab->second > 0.0) || std::abs(ab->first + ab->second / 3.0) > 1e-12)
        throw std::invalid_argument(
            "gradient_chain_moments: kernel must lie on the a = -b/3 line with b > 0");
    if (burn_in < 0) burn_in = steps / 10;

    WalkState state;
    state.rng = Rng(seed);

    auto eta_at = [&](int x) {
        return state.profile.value(state.position + x) - state.profile.value(state.position + x - 1);
    };

    // The i.i.d. discrete-Gaussian law is stationary for the continuous-time
    // chain; jump-chain samples are reweighted by the holding time 1/tau to
    // recover its time averages.
    const int offsets[4] = {-3, -1, 1, 3};  // 2e of the sampled edges
    double sum[4] = {}, sum2[4] = {}, sum3[4] = {}, sum4[4] = {};
    double cross = 0.0, weight_total = 0.0;
    std::vector<double> eta_sum(7, 0.0);
    std::int64_t samples = 0;

    // batch means for an autocorrelation-aware standard error
    constexpr int kBatches = 100;
    std::vector<double> batch_sum(static_cast<std::size_t>(kBatches) * 4, 0.0);
    std::vector<double> batch_weight(kBatches, 0.0);
    std::int64_t batch_len = std::max<std::int64_t>(1, steps / kBatches);

    for (std::int64_t m = 0; m < burn_in; ++m) step(state, kernel);
    for (std::int64_t m = 0; m < steps; ++m) {
        step(state, kernel);
        double w = 1.0 / (2.0 * std::cosh(drift(state.profile, state.position, kernel)));
        std::int64_t b = std::min<std::int64_t>(m / batch_len, kBatches - 1);
        weight_total += w;
        batch_weight[static_cast<std::size_t>(b)] += w;
        double grad[4];
        for (int i = 0; i < 4; ++i) {
            int x_hi = (offsets[i] + 1) / 2;  // e + 1/2
            grad[i] = static_cast<double>(eta_at(x_hi) - eta_at(x_hi - 1));
            double g2 = grad[i] * grad[i];
            sum[i] += w * grad[i];
            sum2[i] += w * g2;
            sum3[i] += w * g2 * grad[i];
            sum4[i] += w * g2 * g2;
            batch_sum[static_cast<std::size_t>(b) * 4 + static_cast<std::size_t>(i)] += w * grad[i];
        }
        cross += w * grad[1] * grad[2];  // offsets -1/2 and +1/2
        for (int x = -3; x <= 3; ++x) eta_sum[static_cast<std::size_t>(x + 3)] += w * eta_at(x);
        ++samples;
    }

    GradientMoments out;
    out.samples = samples;
    double ns = weight_total;
    for (int i = 0; i < 4; ++i) {
        GradientMoments::EdgeStats st;
        st.two_e = offsets[i];
        st.mean = sum[i] / ns;
        double m2 = sum2[i] / ns - st.mean * st.mean;
        double m4 = sum4[i] / ns - 4.0 * st.mean * sum3[i] / ns +
                    6.0 * st.mean * st.mean * sum2[i] / ns - 3.0 * std::pow(st.mean, 4);
        st.variance = m2;
        st.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
        // batch-means SE of the weighted mean
        double bvar = 0.0;
        int used = 0;
        for (int b = 0; b < kBatches; ++b) {
            if (batch_weight[static_cast<std::size_t>(b)] <= 0.0) break;
            double bm = batch_sum[static_cast<std::size_t>(b) * 4 + static_cast<std::size_t>(i)] /
                        batch_weight[static_cast<std::size_t>(b)];
            bvar += (bm - st.mean) * (bm - st.mean);
            ++used;
        }
        st.stderr_mean = used > 1 ? std::sqrt(bvar / (used * (used - 1.0))) : 0.0;
        out.edges.push_back(st);
    }
    double c12 = cross / ns - out.edges[1].mean * out.edges[2].mean;
    double denom = std::sqrt(out.edges[1].variance * out.edges[2].variance);
    out.cross_correlation = denom > 0.0 ? c12 / denom : 0.0;
    for (double& v : eta_sum) v /= ns;
    out.mean_eta = eta_sum;
    return out;
}

}  // namespace selfwalk
