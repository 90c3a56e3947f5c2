#include "selfwalk/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "selfwalk/rng.hpp"

namespace selfwalk {

double SignFamily::p_plus(std::int64_t two_j) {
    // e^{-j}/(e^j + e^{-j}) with j = two_j / 2
    return jump_probability(-static_cast<double>(two_j) / 2.0);
}

int SignFamily::peek(std::int64_t x, std::int64_t two_j, std::int64_t k) const {
    if (k < 1) throw std::domain_error("SignFamily: visit index k must be >= 1");
    double u = key_uniform(seed_, x, two_j, k);
    return u < p_plus(two_j) ? +1 : -1;
}

int SignFamily::draw(std::int64_t x, std::int64_t two_j, std::int64_t k) {
    int value = peek(x, two_j, k);
    realized_.emplace_back(Key{x, two_j, k}, value);
    return value;
}

std::int64_t SignFamily::sign_surplus_realized(std::int64_t x) const {
    std::int64_t m = 0;
    for (const auto& [key, value] : realized_) {
        if (key.x != x || key.k != 1 || key.two_j % 2 != 0) continue;
        if (key.two_j >= 0 && value == +1) ++m;
        if (key.two_j < 0 && value == -1) --m;
    }
    return m;
}

std::unordered_map<std::int64_t, std::int64_t> SignFamily::surplus_by_site() const {
    std::unordered_map<std::int64_t, std::int64_t> out;
    for (const auto& [key, value] : realized_) {
        if (key.k != 1 || key.two_j % 2 != 0) continue;
        if (key.two_j >= 0 && value == +1) ++out[key.x];
        if (key.two_j < 0 && value == -1) --out[key.x];
    }
    return out;
}

std::int64_t SignFamily::sign_surplus_enumerated(std::int64_t x, int j_max) const {
    std::int64_t m = 0;
    for (int j = 0; j <= j_max; ++j)
        if (peek(x, 2 * j, 1) == +1) ++m;
    for (int j = -j_max; j < 0; ++j)
        if (peek(x, 2 * j, 1) == -1) --m;
    return m;
}

CoupledRun run_coupled(std::int64_t n, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("run_coupled: n must be >= 0");
    CoupledRun run{{}, SignFamily(seed), {{-2, 1.0}, {-1, 1.0}}, 0};
    run.positions.reserve(static_cast<std::size_t>(n) + 1);
    run.positions.push_back(0);

    LocalTimeProfile profile(run.initial_profile);
    std::int64_t pos = 0;
    std::unordered_map<std::uint64_t, std::int64_t> visit_count;
    visit_count.reserve(static_cast<std::size_t>(std::min<std::int64_t>(n, 1 << 21)));

    for (std::int64_t m = 0; m < n; ++m) {
        // second difference of the local time around the walker
        double delta_real = profile.value(pos - 2) - profile.value(pos - 1) -
                            profile.value(pos) + profile.value(pos + 1);
        auto delta = static_cast<std::int64_t>(std::llround(delta_real));
        if (pos >= 0 && (delta % 2 != 0)) ++run.parity_violations;

        std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(pos)) << 32) |
                            static_cast<std::uint32_t>(delta);
        std::int64_t k = ++visit_count[key];
        int xi = run.family.draw(pos, delta, k);
        if (xi > 0) {
            profile.increment(pos);
            ++pos;
        } else {
            profile.increment(pos - 1);
            --pos;
        }
        run.positions.push_back(static_cast<std::int32_t>(pos));
    }
    return run;
}

namespace {

// growable site/edge-indexed int64 array centered near 0
class DenseCounter {
public:
    std::int64_t& at(std::int64_t i) {
        if (data_.empty()) {
            origin_ = i - 4;
            data_.assign(16, 0);
        }
        while (i < origin_ || i >= origin_ + static_cast<std::int64_t>(data_.size())) {
            std::size_t n = data_.size();
            std::vector<std::int64_t> grown(n * 2, 0);
            std::int64_t new_origin = origin_ - static_cast<std::int64_t>(n / 2);
            std::copy(data_.begin(), data_.end(),
                      grown.begin() + static_cast<std::ptrdiff_t>(origin_ - new_origin));
            data_ = std::move(grown);
            origin_ = new_origin;
        }
        return data_[static_cast<std::size_t>(i - origin_)];
    }
    std::int64_t get(std::int64_t i) const {
        std::int64_t j = i - origin_;
        if (data_.empty() || j < 0 || j >= static_cast<std::int64_t>(data_.size())) return 0;
        return data_[static_cast<std::size_t>(j)];
    }

private:
    std::vector<std::int64_t> data_;
    std::int64_t origin_ = 0;
};

}  // namespace

std::vector<std::optional<std::int64_t>> sigma_times(const std::vector<std::int32_t>& positions) {
    std::int32_t max_pos = 0;
    for (std::int32_t p : positions) max_pos = std::max(max_pos, p);
    std::vector<std::optional<std::int64_t>> sigma(static_cast<std::size_t>(std::max(0, max_pos)));

    DenseCounter crossings;
    for (std::size_t m = 1; m < positions.size(); ++m) {
        std::int64_t edge = std::min(positions[m - 1], positions[m]);
        ++crossings.at(edge);
        std::int64_t x = static_cast<std::int64_t>(positions[m]) + 1;  // walk is at x-1
        if (x >= 1 && x <= max_pos && !sigma[static_cast<std::size_t>(x - 1)] &&
            8 * crossings.get(x - 1) > x)
            sigma[static_cast<std::size_t>(x - 1)] = static_cast<std::int64_t>(m);
    }
    return sigma;
}

std::string ScenarioReport::to_csv() const {
    std::ostringstream os;
    os << "x,sigma_x,e1,e2,e3,e4,M_x,recursion_ok\n";
    for (const auto& r : records) {
        os << r.x << ',';
        if (r.sigma) os << *r.sigma;
        os << ',';
        if (r.evaluated)
            os << r.e1 << ',' << r.e2 << ',' << r.e3 << ',' << r.e4;
        else
            os << ",,,";
        os << ',' << r.m_surplus << ',';
        if (r.recursion_residual) os << (*r.recursion_residual == 0 ? 1 : 0);
        os << '\n';
    }
    os << "# good=" << (good ? 1 : 0) << " x_contiguous=" << x_contiguous
       << " max_backtrack=" << max_backtrack << " parity_violations=" << parity_violations;
    if (!first_failure.empty()) os << " first_failure=" << first_failure;
    os << '\n';
    return os.str();
}

ScenarioReport check_scenario(const CoupledRun& run, std::int64_t x_low) {
    if (run.positions.empty()) throw std::invalid_argument("check_scenario: empty history");
    if (x_low < 3) throw std::invalid_argument("check_scenario: x_low must be >= 3");
    const auto& pos = run.positions;
    std::int64_t n = static_cast<std::int64_t>(pos.size()) - 1;

    ScenarioReport report;
    report.parity_violations = run.parity_violations;
    report.x_checked_from = x_low;

    // running-max bound
    std::int32_t running_max = pos[0];
    for (std::int64_t m = 0; m <= n; ++m) {
        running_max = std::max(running_max, pos[static_cast<std::size_t>(m)]);
        report.max_backtrack = std::max<std::int64_t>(
            report.max_backtrack, running_max - pos[static_cast<std::size_t>(m)]);
    }

    auto sigma = sigma_times(pos);
    std::int64_t max_x = static_cast<std::int64_t>(sigma.size());
    // largest X with sigma defined on all of [x_low - 1, X] (sigma_{x-1} is
    // needed to evaluate the conditions at x)
    report.x_contiguous = 0;
    if (max_x >= x_low - 1 && sigma[static_cast<std::size_t>(x_low - 2)]) {
        std::int64_t top = x_low - 1;
        while (top + 1 <= max_x && sigma[static_cast<std::size_t>(top)]) ++top;
        report.x_contiguous = top;
    }

    // first visit time per site, stored as m+1 so 0 means never seen
    DenseCounter first_visit;
    for (std::int64_t m = 0; m <= n; ++m) {
        std::int64_t site = pos[static_cast<std::size_t>(m)];
        if (first_visit.get(site) == 0) first_visit.at(site) = m + 1;
    }

    LocalTimeProfile l0_profile(run.initial_profile);

    // forward pass: crossing counts captured at each sigma time
    std::vector<std::int64_t> l_back1(static_cast<std::size_t>(max_x) + 2, -1);  // l(-1/2) at sigma_x
    std::vector<std::int64_t> l_back2(static_cast<std::size_t>(max_x) + 2, -1);  // l(-3/2) at sigma_x
    {
        std::unordered_map<std::int64_t, std::int64_t> sigma_at_time;
        for (std::int64_t x = 1; x <= max_x; ++x)
            if (sigma[static_cast<std::size_t>(x - 1)])
                sigma_at_time[*sigma[static_cast<std::size_t>(x - 1)]] = x;
        DenseCounter crossings;
        for (std::int64_t m = 1; m <= n; ++m) {
            std::int64_t edge = std::min(pos[static_cast<std::size_t>(m - 1)],
                                         pos[static_cast<std::size_t>(m)]);
            ++crossings.at(edge);
            auto it = sigma_at_time.find(m);
            if (it != sigma_at_time.end()) {
                std::int64_t x = it->second;
                auto l = [&](std::int64_t e) {
                    return crossings.get(e) +
                           static_cast<std::int64_t>(std::llround(l0_profile.initial_value(e)));
                };
                l_back1[static_cast<std::size_t>(x)] = l(x - 2);  // edge {x-2, x-1}
                l_back2[static_cast<std::size_t>(x)] = l(x - 3);  // edge {x-3, x-2}
            }
        }
    }

    auto fail = [&](std::int64_t x, const std::string& what) {
        if (report.first_failure.empty())
            report.first_failure = "x=" + std::to_string(x) + ":" + what;
    };

    report.records.reserve(static_cast<std::size_t>(max_x));
    bool all_ok = report.max_backtrack <= 2;
    if (!all_ok) report.first_failure = "backtrack>2";

    auto surplus = run.family.surplus_by_site();
    auto surplus_at = [&](std::int64_t x) {
        auto it = surplus.find(x);
        return it == surplus.end() ? std::int64_t{0} : it->second;
    };

    for (std::int64_t x = 1; x <= max_x; ++x) {
        ScenarioRecord rec;
        rec.x = x;
        rec.sigma = sigma[static_cast<std::size_t>(x - 1)];
        rec.m_surplus = surplus_at(x);

        bool within = x >= x_low && x <= report.x_contiguous;
        if (within) {
            std::int64_t sx = *rec.sigma;
            std::int64_t sprev = *sigma[static_cast<std::size_t>(x - 2)];
            rec.evaluated = true;

            std::int64_t fv = first_visit.get(x + 1);
            rec.e1 = (fv == 0) || (fv - 1 >= sx);

            rec.e2 = sprev <= sx;
            if (rec.e2)
                for (std::int64_t m = sprev; m <= sx; ++m) {
                    std::int64_t site = pos[static_cast<std::size_t>(m)];
                    if (site < x - 2 || site > x) {
                        rec.e2 = false;
                        break;
                    }
                }

            rec.e3 = true;
            std::int64_t tail = x / 10;
            if (sx < tail) {
                rec.e3 = false;
            } else {
                for (std::int64_t m = sx - tail + 1; m <= sx; ++m) {
                    std::int64_t edge = std::min(pos[static_cast<std::size_t>(m - 1)],
                                                 pos[static_cast<std::size_t>(m)]);
                    if (edge != x - 1) {
                        rec.e3 = false;
                        break;
                    }
                }
            }

            std::int64_t la = l_back1[static_cast<std::size_t>(x)];
            std::int64_t lb = l_back2[static_cast<std::size_t>(x)];
            std::int64_t diff = la > lb ? la - lb : lb - la;
            rec.e4 = diff * diff <= x && 6 * la > x && 6 * lb > x && la < 50 * x && lb < 50 * x;

            if (all_ok) {
                if (!rec.e1) fail(x, "e1");
                else if (!rec.e2) fail(x, "e2");
                else if (!rec.e3) fail(x, "e3");
                else if (!rec.e4) fail(x, "e4");
            }
            all_ok = all_ok && rec.e1 && rec.e2 && rec.e3 && rec.e4;

            if (x + 1 <= report.x_contiguous) {
                std::int64_t next = l_back1[static_cast<std::size_t>(x + 1)];
                if (next >= 0) {
                    // each sign exception shifts the crossing count by 2; the
                    // compliant sweep leaves it unchanged, so the growth per
                    // site is 2(1 - M^x), zero in the exception-free case
                    rec.recursion_residual = next - la - 2 * (1 - rec.m_surplus);
                    if (*rec.recursion_residual != 0) {
                        if (all_ok) fail(x, "recursion");
                        all_ok = false;
                    }
                }
            }
        }
        report.records.push_back(std::move(rec));
    }

    report.good = all_ok && report.x_contiguous > x_low;
    if (!report.good && report.first_failure.empty())
        report.first_failure =
            report.x_contiguous <= x_low ? "x_contiguous<=x_low" : "unknown";
    return report;
}

EventAudit audit_events(const SignFamily& family, std::int64_t x_max,
                        const EventAuditOptions& options) {
    if (x_max > 500) throw std::length_error("audit_events: x_max must be <= 500");
    EventAudit audit;

    // --- event A on realized keys: tail draws must equal -sign(j)
    audit.tail_violations = 0;
    for (const auto& [key, value] : family.realized()) {
        double threshold = std::sqrt(static_cast<double>(std::llabs(key.x))) / 100.0;
        double j = static_cast<double>(key.two_j) / 2.0;
        std::int64_t cap = 100 * key.x * key.x;
        if (key.k > cap) continue;
        if (j > threshold && value != -1) ++audit.tail_violations;
        if (j < -threshold && value != +1) ++audit.tail_violations;
    }
    // --- event A on a declared sampled band above the threshold
    Rng audit_rng(derive_stream(family.seed(), options.audit_seed));
    for (std::int64_t x = 1; x <= x_max; ++x) {
        double threshold = std::sqrt(static_cast<double>(x)) / 100.0;
        std::int64_t cap = 100 * x * x;
        auto lo = static_cast<std::int64_t>(std::ceil(2.0 * (threshold + options.tail_margin)));
        auto width = static_cast<std::int64_t>(2.0 * options.tail_band);
        for (std::int64_t s = 0; s < options.samples_per_site; ++s) {
            std::int64_t two_j = lo + static_cast<std::int64_t>(audit_rng.uniform() * width);
            std::int64_t k = 1 + static_cast<std::int64_t>(audit_rng.uniform() * cap);
            bool negative = audit_rng.uniform() < 0.5;
            if (negative) two_j = -two_j;
            int expect = negative ? +1 : -1;
            if (family.peek(x, two_j, k) != expect) ++audit.tail_violations;
            ++audit.tail_sampled_keys;
        }
    }
    audit.tail_ok = audit.tail_violations == 0;

    // --- event B: per-site exception budget sqrt(x)/100 on the realized
    //     integer-level subfamily
    std::vector<std::int64_t> exceptions(static_cast<std::size_t>(x_max) + 1, 0);
    for (const auto& [key, value] : family.realized()) {
        if (key.x < 0 || key.x > x_max || key.k != 1 || key.two_j % 2 != 0 || key.two_j == 0)
            continue;
        if (key.two_j > 0 && value == +1) ++exceptions[static_cast<std::size_t>(key.x)];
        if (key.two_j < 0 && value == -1) ++exceptions[static_cast<std::size_t>(key.x)];
    }
    audit.exceptions_ok = true;
    for (std::int64_t x = 0; x <= x_max; ++x) {
        std::int64_t e = exceptions[static_cast<std::size_t>(x)];
        if (10000 * e * e > x) {
            audit.exceptions_ok = false;
            audit.exceptions_first_fail_x = x;
            break;
        }
    }

    // --- event C: partial sums of the surplus within [y/4, 4y]
    audit.surplus_band_ok = true;
    auto surplus = family.surplus_by_site();
    std::int64_t partial = 0;
    for (std::int64_t y = 0; y <= x_max; ++y) {
        auto it = surplus.find(y);
        partial += it == surplus.end() ? 0 : it->second;
        if (y >= 1 && !(4 * partial >= y && partial <= 4 * y)) {
            audit.surplus_band_ok = false;
            audit.surplus_first_fail_y = y;
            break;
        }
    }
    return audit;
}

}  // namespace selfwalk
