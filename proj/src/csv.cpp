#include "selfwalk/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "selfwalk/rng.hpp"

namespace selfwalk {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string provenance_line(const std::string& command, const std::string& kernel_literal,
                            const std::string& seed_field, std::int64_t steps) {
    std::ostringstream os;
    os << "# " << kVersion << " cmd=" << command << " kernel=\"" << kernel_literal
       << "\" seed=" << seed_field << " steps=" << steps << " rng=" << kRngId << "\n";
    return os.str();
}

std::string trajectory_csv(const RunSummary& summary, const std::string& provenance) {
    std::ostringstream os;
    os << provenance << "n,position,range_min,range_max\n";
    for (const auto& c : summary.checkpoints)
        os << c.n << ',' << c.position << ',' << c.range_min << ',' << c.range_max << '\n';
    return os.str();
}

std::string profile_csv(const RunSummary& summary, const std::string& provenance) {
    std::ostringstream os;
    os << provenance << "edge_left_endpoint,count,initial_value\n";
    const auto& p = summary.final_profile;
    std::int64_t lo = 0, hi = -1;
    if (p.any_visited()) {
        lo = p.visited_min();
        hi = p.visited_max();
    }
    if (p.has_initial()) {
        lo = p.any_visited() ? std::min(lo, p.initial_min()) : p.initial_min();
        hi = p.any_visited() ? std::max(hi, p.initial_max()) : p.initial_max();
    }
    for (std::int64_t e = lo; e <= hi; ++e)
        os << e << ',' << p.count(e) << ',' << fmt_double(p.initial_value(e)) << '\n';
    return os.str();
}

ClassificationRow classification_row(const InteractionKernel& kernel, std::uint64_t seed,
                                     const PhaseLabel& label) {
    ClassificationRow row;
    row.kernel_literal = kernel.literal();
    if (auto ab = kernel.symmetric_params()) {
        row.a = fmt_double(ab->first);
        row.b = fmt_double(ab->second);
    }
    row.seed = seed;
    row.slope = label.exponent.slope;
    row.stderr_ = label.exponent.stderr_;
    row.label = phase_name(label.phase);
    row.k_sites = label.k_sites;
    if (label.sqrt_sig) row.sqrt_ratio = fmt_double(label.sqrt_sig->ratio);
    if (label.log_sig) {
        row.log_ratio = fmt_double(label.log_sig->position_ratio);
        row.growth_ratio = fmt_double(label.log_sig->growth_ratio);
    }
    return row;
}

std::string classification_csv(const std::vector<ClassificationRow>& rows,
                               const std::string& provenance) {
    std::ostringstream os;
    os << provenance << "kernel,a,b,seed,slope,stderr,label,k_sites,sqrt_ratio,log_ratio,growth_ratio\n";
    for (const auto& r : rows) {
        if (r.failed) {
            os << '"' << r.kernel_literal << "\"," << r.a << ',' << r.b << ',' << r.seed
               << ",,,failed,,,,\n";
            continue;
        }
        os << '"' << r.kernel_literal << "\"," << r.a << ',' << r.b << ',' << r.seed << ','
           << fmt_double(r.slope) << ',' << fmt_double(r.stderr_) << ',' << r.label << ','
           << r.k_sites << ',' << r.sqrt_ratio << ',' << r.log_ratio << ',' << r.growth_ratio
           << '\n';
    }
    return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace selfwalk
