#include "selfwalk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace selfwalk {

namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kFourierTolerance = 1e-9;
constexpr int kFourierGridPoints = 4096;

bool check_symmetry(const std::vector<InteractionKernel::Term>& terms) {
    for (const auto& t : terms) {
        double opposite = 0.0;
        for (const auto& u : terms) {
            if (u.two_e == -t.two_e) opposite = u.weight;
        }
        if (opposite != -t.weight) return false;
    }
    return true;
}

std::string format_weight(double w) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
}

}  // namespace

InteractionKernel InteractionKernel::symmetric_family(double a, double b) {
    if (a == 0.0 && b == 0.0) throw KernelError("degenerate kernel: a = b = 0 has empty support");
    std::map<int, double> coeffs;
    if (a != 0.0) {
        coeffs[-3] = a;
        coeffs[3] = -a;
    }
    if (b != 0.0) {
        coeffs[-1] = b;
        coeffs[1] = -b;
    }
    return from_coeffs(coeffs);
}

InteractionKernel InteractionKernel::from_coeffs(const std::map<int, double>& coeffs) {
    std::vector<Term> terms;
    double sum = 0.0;
    double scale = 0.0;
    for (const auto& [two_e, w] : coeffs) {
        if (two_e % 2 == 0) throw KernelError("edge offset must be a half-integer (odd 2e)");
        if (w == 0.0) continue;
        terms.push_back({two_e, w});
        sum += w;
        scale += std::abs(w);
    }
    if (terms.empty()) throw KernelError("degenerate kernel: empty support");
    if (std::abs(sum) > kSumTolerance * std::max(1.0, scale))
        throw KernelError("height-invariance violation: kernel weights must sum to zero");
    bool symmetric = check_symmetry(terms);
    return InteractionKernel(std::move(terms), symmetric);
}

InteractionKernel InteractionKernel::parse(const std::string& literal) {
    if (literal.find(':') == std::string::npos) {
        // "a,b" form
        double a, b;
        char extra;
        if (std::sscanf(literal.c_str(), "%lf,%lf %c", &a, &b, &extra) != 2)
            throw KernelError("bad kernel literal: expected \"a,b\" or \"e:w;...\": " + literal);
        return symmetric_family(a, b);
    }
    std::map<int, double> coeffs;
    std::stringstream ss(literal);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw KernelError("bad kernel literal entry (missing ':'): " + item);
        std::string edge = item.substr(0, colon);
        std::string weight = item.substr(colon + 1);
        long num = 0, den = 0;
        char extra;
        if (std::sscanf(edge.c_str(), "%ld/%ld %c", &num, &den, &extra) != 2 || den != 2 ||
            num % 2 == 0)
            throw KernelError("bad edge offset (expected odd n/2): " + edge);
        double w;
        if (std::sscanf(weight.c_str(), "%lf %c", &w, &extra) != 1)
            throw KernelError("bad weight: " + weight);
        if (coeffs.count(static_cast<int>(num)))
            throw KernelError("duplicate edge offset in kernel literal: " + edge);
        coeffs[static_cast<int>(num)] = w;
    }
    return from_coeffs(coeffs);
}

double InteractionKernel::weight(int two_e) const {
    for (const auto& t : terms_)
        if (t.two_e == two_e) return t.weight;
    return 0.0;
}

std::optional<std::pair<double, double>> InteractionKernel::symmetric_params() const {
    double a = weight(-3);
    double b = weight(-1);
    if (a == 0.0 && b == 0.0) return std::nullopt;
    std::map<int, double> expect;
    if (a != 0.0) {
        expect[-3] = a;
        expect[3] = -a;
    }
    if (b != 0.0) {
        expect[-1] = b;
        expect[1] = -b;
    }
    if (terms_.size() != expect.size()) return std::nullopt;
    for (const auto& t : terms_) {
        auto it = expect.find(t.two_e);
        if (it == expect.end() || it->second != t.weight) return std::nullopt;
    }
    return std::make_pair(a, b);
}

std::string InteractionKernel::literal() const {
    if (auto ab = symmetric_params()) return format_weight(ab->first) + "," + format_weight(ab->second);
    std::string out;
    for (const auto& t : terms_) {
        if (!out.empty()) out += ';';
        out += std::to_string(t.two_e) + "/2:" + format_weight(t.weight);
    }
    return out;
}

std::vector<double> polynomial(const InteractionKernel& kernel) {
    int lo = kernel.two_e_min();
    int hi = kernel.two_e_max();
    std::vector<double> coeffs(static_cast<std::size_t>((hi - lo) / 2 + 1), 0.0);
    for (const auto& t : kernel.terms()) coeffs[static_cast<std::size_t>((t.two_e - lo) / 2)] = t.weight;
    return coeffs;
}

std::map<int, double> gradient_coeffs(const InteractionKernel& kernel) {
    // c(x) = sum of weights at offsets >= x + 1/2, i.e. 2e >= 2x + 1.
    std::map<int, double> c;
    const auto& terms = kernel.terms();
    double tail = 0.0;
    // walk support from the right, accumulating tail sums
    int x_min = (kernel.two_e_min() - 1) / 2;
    int x_max = (kernel.two_e_max() - 1) / 2;
    std::size_t idx = terms.size();
    for (int x = x_max; x >= x_min; --x) {
        while (idx > 0 && terms[idx - 1].two_e >= 2 * x + 1) tail += terms[--idx].weight;
        if (tail != 0.0) c[x] = tail;
    }
    return c;
}

bool is_positive_definite(const InteractionKernel& kernel) {
    if (!kernel.is_symmetric())
        throw KernelError("positive definiteness is only defined for left-right symmetric kernels");
    auto c = gradient_coeffs(kernel);
    // precision sequence alpha = -c, even because the kernel is symmetric:
    // alpha_hat(theta) = alpha(0) + 2 sum_{x>0} alpha(x) cos(x theta)
    int x_max = 0;
    for (const auto& [x, cx] : c) x_max = std::max(x_max, std::abs(x));
    // weight[|x|] accumulates -c(x) once per sign: -c(0) at the centre and
    // -2 c(|x|) off centre
    std::vector<double> weight(static_cast<std::size_t>(x_max) + 1, 0.0);
    for (const auto& [x, cx] : c) weight[static_cast<std::size_t>(std::abs(x))] -= cx;
    static const std::vector<double> cos_table = [] {
        std::vector<double> t(kFourierGridPoints);
        for (int i = 0; i < kFourierGridPoints; ++i)
            t[static_cast<std::size_t>(i)] =
                std::cos(M_PI * static_cast<double>(i) / (kFourierGridPoints - 1));
        return t;
    }();
    double min_hat = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kFourierGridPoints; ++i) {
        double ct = cos_table[static_cast<std::size_t>(i)];
        double hat = weight[0];
        double prev = 1.0, cur = ct;  // cos(0), cos(theta)
        for (int x = 1; x <= x_max; ++x) {
            hat += weight[static_cast<std::size_t>(x)] * cur;
            double next = 2.0 * ct * cur - prev;  // cos((x+1) theta)
            prev = cur;
            cur = next;
        }
        min_hat = std::min(min_hat, hat);
    }
    return min_hat > kFourierTolerance;
}

double critical_ratio(int k) {
    if (k < 1) throw std::domain_error("critical_ratio: k must be >= 1");
    return 1.0 + 2.0 * std::cos(2.0 * M_PI / (k + 2));
}

std::optional<int> predict_stuck_size(double a, double b) {
    if (!(a < 0.0 && 0.0 < b)) return std::nullopt;
    double ratio = b / -a;
    if (ratio >= 3.0) return std::nullopt;
    // invert A_k = 1 + 2 cos(2 pi/(k+2)) and scan the neighbourhood
    double theta = std::acos((ratio - 1.0) / 2.0);
    double k_real = 2.0 * M_PI / theta - 2.0;
    long lo = std::max(1L, static_cast<long>(std::floor(k_real)) - 2);
    for (long k = lo; k <= lo + 4; ++k) {
        double ak = critical_ratio(static_cast<int>(k));
        double ak1 = critical_ratio(static_cast<int>(k + 1));
        if (ratio == ak || ratio == ak1) return std::nullopt;  // boundary: undetermined
        if (ak < ratio && ratio < ak1) return static_cast<int>(k) + 2;
    }
    return std::nullopt;
}

KernelClassification classify_kernel(const InteractionKernel& kernel) {
    KernelClassification out;
    out.polynomial = polynomial(kernel);
    out.is_symmetric = kernel.is_symmetric();
    out.gradient_coeffs = gradient_coeffs(kernel);
    if (kernel.is_symmetric()) out.positive_definite = is_positive_definite(kernel);
    if (auto ab = kernel.symmetric_params())
        out.predicted_stuck_sites = predict_stuck_size(ab->first, ab->second);
    return out;
}

}  // namespace selfwalk
