#include "selfwalk/local_time.hpp"

#include <algorithm>

namespace selfwalk {

LocalTimeProfile::LocalTimeProfile(const std::map<std::int64_t, double>& initial) {
    if (initial.empty()) return;
    std::int64_t lo = initial.begin()->first;
    std::int64_t hi = initial.rbegin()->first;
    l0_origin_ = lo;
    l0_.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (const auto& [edge, v] : initial) l0_[static_cast<std::size_t>(edge - lo)] = v;
}

void LocalTimeProfile::ensure(std::int64_t edge) {
    if (counts_.empty()) {
        origin_ = edge - 4;
        counts_.assign(16, 0);
    }
    while (edge < origin_ || edge >= origin_ + static_cast<std::int64_t>(counts_.size())) {
        // double the span, keeping the old block roughly centered
        std::size_t n = counts_.size();
        std::vector<std::int64_t> grown(n * 2, 0);
        std::int64_t new_origin = origin_ - static_cast<std::int64_t>(n / 2);
        std::copy(counts_.begin(), counts_.end(),
                  grown.begin() + static_cast<std::ptrdiff_t>(origin_ - new_origin));
        counts_ = std::move(grown);
        origin_ = new_origin;
    }
    visited_min_ = any_visited() ? std::min(visited_min_, edge) : edge;
    visited_max_ = any_visited() ? std::max(visited_max_, edge) : edge;
}

bool LocalTimeProfile::operator==(const LocalTimeProfile& other) const {
    if (total_ != other.total_) return false;
    std::int64_t lo = std::min(any_visited() ? visited_min_ : 0,
                               other.any_visited() ? other.visited_min_ : 0);
    std::int64_t hi = std::max(any_visited() ? visited_max_ : 0,
                               other.any_visited() ? other.visited_max_ : 0);
    for (std::int64_t e = lo; e <= hi; ++e)
        if (count(e) != other.count(e) || initial_value(e) != other.initial_value(e)) return false;
    if (has_initial() != other.has_initial()) return false;
    if (has_initial())
        for (std::int64_t e = std::min(initial_min(), other.initial_min());
             e <= std::max(initial_max(), other.initial_max()); ++e)
            if (initial_value(e) != other.initial_value(e)) return false;
    return true;
}

void LastVisit::record(std::int64_t site, std::int64_t step) {
    if (empty_) {
        origin_ = site - 4;
        steps_.assign(16, -1);
        empty_ = false;
    }
    while (site < origin_ || site >= origin_ + static_cast<std::int64_t>(steps_.size())) {
        std::size_t n = steps_.size();
        std::vector<std::int64_t> grown(n * 2, -1);
        std::int64_t new_origin = origin_ - static_cast<std::int64_t>(n / 2);
        std::copy(steps_.begin(), steps_.end(),
                  grown.begin() + static_cast<std::ptrdiff_t>(origin_ - new_origin));
        steps_ = std::move(grown);
        origin_ = new_origin;
    }
    steps_[static_cast<std::size_t>(site - origin_)] = step;
}

std::int64_t LastVisit::at(std::int64_t site) const {
    std::int64_t i = site - origin_;
    if (empty_ || i < 0 || i >= static_cast<std::int64_t>(steps_.size())) return -1;
    return steps_[static_cast<std::size_t>(i)];
}

}  // namespace selfwalk
