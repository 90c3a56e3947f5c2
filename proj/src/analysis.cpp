#include "selfwalk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace selfwalk {

namespace {

std::int64_t excursion(const Checkpoint& c, std::int64_t x0) {
    return std::max(c.range_max - x0, x0 - c.range_min);
}

struct Fit {
    double slope = 0.0;
    double stderr_ = 0.0;
    double rms_resid = 0.0;
};

Fit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    Fit fit;
    fit.slope = sxy / sxx;
    double intercept = my - fit.slope * mx;
    double ss_resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = ys[i] - (intercept + fit.slope * xs[i]);
        ss_resid += r * r;
    }
    fit.rms_resid = std::sqrt(ss_resid / static_cast<double>(n));
    fit.stderr_ = n > 2 ? std::sqrt(ss_resid / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
    return fit;
}

}  // namespace

ExponentEstimate scaling_exponent(const RunSummary& summary) {
    const auto& cps = summary.checkpoints;
    if (cps.size() < 8) throw std::invalid_argument("scaling_exponent: need >= 8 checkpoints");
    double n_min = std::sqrt(static_cast<double>(summary.steps));

    ExponentEstimate est;
    std::vector<double> xs, ys;
    std::int64_t first_exc = -1, last_exc = -1;
    for (const auto& c : cps) {
        if (static_cast<double>(c.n) < n_min || c.n < 1) continue;
        std::int64_t exc = excursion(c, summary.initial_position);
        if (first_exc < 0) {
            first_exc = exc;
            est.window_low = c.n;
        }
        last_exc = exc;
        est.window_high = c.n;
        if (exc > 0) {
            xs.push_back(std::log(static_cast<double>(c.n)));
            ys.push_back(std::log(static_cast<double>(exc)));
        }
    }
    if (first_exc == last_exc || xs.size() < 2) {
        est.stuck = true;
        est.slope = 0.0;
        est.stderr_ = 0.0;
        return est;
    }
    Fit fit = least_squares(xs, ys);
    est.slope = fit.slope;
    est.stderr_ = fit.stderr_;
    return est;
}

std::optional<StuckInterval> detect_stuck(const RunSummary& summary) {
    if (summary.steps < 10000) throw std::invalid_argument("detect_stuck: need a run of >= 1e4 steps");
    const auto& cps = summary.checkpoints;
    if (cps.empty()) return std::nullopt;

    // The confinement interval is the set of sites the walk occupies over the
    // last half of the run (walks typically wander before the trap locks, so
    // the all-time range is wider than the trap). Stuck means that interval
    // is frozen: the last quarter revisits every one of its sites, i.e. the
    // occupied interval of the last quarter equals that of the last half.
    std::int64_t half_cutoff = summary.steps - summary.steps / 2;
    std::int64_t quarter_cutoff = summary.steps - summary.steps / 4;
    const Checkpoint& last = cps.back();
    bool seen = false;
    std::int64_t half_min = 0, half_max = 0;
    for (std::int64_t site = last.range_min; site <= last.range_max; ++site) {
        if (summary.last_visit.at(site) < half_cutoff) continue;
        if (!seen) half_min = site;
        half_max = site;
        seen = true;
    }
    if (!seen) return std::nullopt;
    for (std::int64_t site = half_min; site <= half_max; ++site)
        if (summary.last_visit.at(site) < quarter_cutoff) return std::nullopt;

    StuckInterval out;
    out.site_min = half_min;
    out.site_max = half_max;
    out.k_sites = static_cast<int>(half_max - half_min + 1);
    return out;
}

SqrtSignature sqrt_signature(const RunSummary& summary) {
    if (summary.steps < 1) throw std::invalid_argument("sqrt_signature: empty run");
    SqrtSignature out;
    out.ratio = static_cast<double>(summary.final_position - summary.initial_position) /
                std::sqrt(2.0 * static_cast<double>(summary.steps));
    out.max_backtrack = summary.max_backtrack;
    return out;
}

LogSignature log_signature(const RunSummary& summary) {
    const auto& cps = summary.checkpoints;
    if (cps.empty()) throw std::invalid_argument("log_signature: no checkpoints");
    const Checkpoint& last = cps.back();
    if (last.range_max - last.range_min + 1 < 6)
        throw std::invalid_argument("log_signature: range spans fewer than 6 sites");

    LogSignature out;
    out.position_ratio = static_cast<double>(summary.final_position - summary.initial_position) *
                         std::log(2.0) / std::log(static_cast<double>(summary.steps));
    double sum = 0.0;
    std::int64_t terms = 0;
    for (std::int64_t y = last.range_min + 1; y < last.range_max; ++y) {
        double denom = summary.final_profile.value(y - 1);
        double numer = summary.final_profile.value(y);
        if (denom <= 0.0) continue;
        sum += numer / denom;
        ++terms;
    }
    out.growth_ratio = terms > 0 ? sum / static_cast<double>(terms) : 0.0;
    return out;
}

std::string phase_name(Phase phase) {
    switch (phase) {
        case Phase::stuck: return "stuck";
        case Phase::logarithmic: return "logarithmic";
        case Phase::slow_trapped: return "slow_trapped";
        case Phase::diffusive_band: return "diffusive_band";
        case Phase::superdiffusive_band: return "superdiffusive_band";
        case Phase::sqrt_deterministic: return "sqrt_deterministic";
        case Phase::ballistic: return "ballistic";
        case Phase::unclassified: return "unclassified";
    }
    return "unclassified";
}

namespace {

// Does the excursion grow linearly in log n over the regression window?
bool loglinear_position(const RunSummary& summary, const PhaseThresholds& th) {
    std::vector<double> xs, ys;
    double n_min = std::sqrt(static_cast<double>(summary.steps));
    for (const auto& c : summary.checkpoints) {
        if (static_cast<double>(c.n) < n_min || c.n < 1) continue;
        xs.push_back(std::log(static_cast<double>(c.n)));
        ys.push_back(static_cast<double>(excursion(c, summary.initial_position)));
    }
    if (xs.size() < 3) return false;
    Fit fit = least_squares(xs, ys);
    if (fit.slope < th.loglinear_min_slope) return false;
    double final_exc = ys.back();
    return fit.rms_resid <= std::max(th.loglinear_abs_resid, th.loglinear_rel_resid * final_exc);
}

}  // namespace

PhaseLabel classify_phase(const RunSummary& summary, const InteractionKernel& kernel,
                          const PhaseThresholds& th) {
    (void)kernel;  // labels depend on the realized run only
    if (summary.steps < 1000000)
        throw std::invalid_argument("classify_phase: need a run of >= 1e6 steps");

    PhaseLabel label;
    if (auto stuck = detect_stuck(summary)) {
        label.phase = Phase::stuck;
        label.k_sites = stuck->k_sites;
        label.exponent.stuck = true;
        return label;
    }
    label.exponent = scaling_exponent(summary);
    double slope = label.exponent.slope;

    if (slope < th.log_slope_max && loglinear_position(summary, th)) {
        label.phase = Phase::logarithmic;
        try {
            label.log_sig = log_signature(summary);
        } catch (const std::invalid_argument&) {
        }
        return label;
    }
    if (slope > th.ballistic_slope_min) {
        label.phase = Phase::ballistic;
        return label;
    }
    SqrtSignature sq = sqrt_signature(summary);
    label.sqrt_sig = sq;
    if (sq.max_backtrack <= th.sqrt_backtrack_max && sq.ratio >= th.sqrt_ratio_low &&
        sq.ratio <= th.sqrt_ratio_high) {
        label.phase = Phase::sqrt_deterministic;
        return label;
    }
    if (slope >= th.diffusive_low && slope <= th.diffusive_high)
        label.phase = Phase::diffusive_band;
    else if (slope > th.diffusive_high && slope < th.superdiffusive_high)
        label.phase = Phase::superdiffusive_band;
    else if (slope > th.slow_trapped_low && slope < th.diffusive_low)
        label.phase = Phase::slow_trapped;
    else
        label.phase = Phase::unclassified;
    return label;
}

}  // namespace selfwalk
