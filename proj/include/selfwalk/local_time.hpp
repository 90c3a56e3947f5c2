#pragma once

#include <cstdint>
#include <map>
#include <vector>

// Edge local times: a dense growable array of traversal counts over the
// visited edge range, plus an optional fixed real-valued initial profile L0.
// Absolute edges {x, x+1} are keyed by their left endpoint x. The array grows
// by doubling when the walk extends its range, so the stepping loop is
// allocation-free in steady state.

namespace selfwalk {

class LocalTimeProfile {
public:
    LocalTimeProfile() = default;
    explicit LocalTimeProfile(const std::map<std::int64_t, double>& initial);

    // traversal count of edge {e, e+1}
    std::int64_t count(std::int64_t edge) const {
        std::int64_t i = edge - origin_;
        if (i < 0 || i >= static_cast<std::int64_t>(counts_.size())) return 0;
        return counts_[static_cast<std::size_t>(i)];
    }

    double initial_value(std::int64_t edge) const {
        std::int64_t i = edge - l0_origin_;
        if (i < 0 || i >= static_cast<std::int64_t>(l0_.size())) return 0.0;
        return l0_[static_cast<std::size_t>(i)];
    }

    // count + L0, the value the drift sees
    double value(std::int64_t edge) const {
        return static_cast<double>(count(edge)) + initial_value(edge);
    }

    void increment(std::int64_t edge) {
        ensure(edge);
        ++counts_[static_cast<std::size_t>(edge - origin_)];
        ++total_;
    }

    // sum of all counts; equals the number of steps taken
    std::int64_t total() const { return total_; }

    bool any_visited() const { return visited_min_ <= visited_max_; }
    std::int64_t visited_min() const { return visited_min_; }  // valid if any_visited()
    std::int64_t visited_max() const { return visited_max_; }

    bool has_initial() const { return !l0_.empty(); }
    std::int64_t initial_min() const { return l0_origin_; }
    std::int64_t initial_max() const { return l0_origin_ + static_cast<std::int64_t>(l0_.size()) - 1; }

    bool operator==(const LocalTimeProfile& other) const;

private:
    void ensure(std::int64_t edge);

    std::vector<std::int64_t> counts_;
    std::int64_t origin_ = 0;
    std::int64_t total_ = 0;
    std::int64_t visited_min_ = 1;  // empty range while min > max
    std::int64_t visited_max_ = 0;

    std::vector<double> l0_;
    std::int64_t l0_origin_ = 0;
};

// Growable map site -> last step at which the walk stood there.
class LastVisit {
public:
    void record(std::int64_t site, std::int64_t step);
    // -1 when never visited
    std::int64_t at(std::int64_t site) const;

private:
    std::vector<std::int64_t> steps_;
    std::int64_t origin_ = 0;
    bool empty_ = true;
};

}  // namespace selfwalk
