#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Interaction kernels: the finite linear functional of nearby edge local
// times that drives the walk. A kernel is a finite set of weights a_e on
// half-integer edge offsets e, with sum(a_e) = 0 so that the drift only sees
// the shape of the local-time profile, not its height.
//
// Edge encoding: the half-integer offset e is stored as the odd integer 2e;
// an absolute edge {x, x+1} is identified by its left endpoint x. Integer
// keys avoid any floating-point identity issues.

namespace selfwalk {

struct KernelError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class InteractionKernel {
public:
    // One weighted edge offset; two_e is odd.
    struct Term {
        int two_e;
        double weight;
    };

    // D^{a,b}: weights (a, b, -b, -a) at offsets (-3/2, -1/2, 1/2, 3/2).
    // Zero weights are dropped from the support. a = b = 0 is degenerate.
    static InteractionKernel symmetric_family(double a, double b);

    // General kernel from a map 2e -> weight. Requires sum of weights = 0
    // (tolerance 1e-12) and a nonempty support.
    static InteractionKernel from_coeffs(const std::map<int, double>& coeffs);

    // Parses "a,b" (symmetric family) or "e:w;e:w;..." with e written n/2.
    static InteractionKernel parse(const std::string& literal);

    const std::vector<Term>& terms() const { return terms_; }
    double weight(int two_e) const;
    int two_e_min() const { return terms_.front().two_e; }
    int two_e_max() const { return terms_.back().two_e; }

    // a_{-e} = -a_e for every e.
    bool is_symmetric() const { return symmetric_; }

    // (a, b) if the kernel is exactly D^{a,b} for some a, b.
    std::optional<std::pair<double, double>> symmetric_params() const;

    // Canonical literal; parse(literal()) reproduces the kernel.
    std::string literal() const;

private:
    InteractionKernel(std::vector<Term> terms, bool symmetric)
        : terms_(std::move(terms)), symmetric_(symmetric) {}

    std::vector<Term> terms_;  // sorted by two_e, all weights nonzero
    bool symmetric_ = false;
};

// Coefficients of P(x) = sum_k a_{k+1/2} x^{k-k0} in increasing degree,
// where k0 indexes the leftmost support edge. No normalization is applied.
// P(1) = 0 for every valid kernel.
std::vector<double> polynomial(const InteractionKernel& kernel);

// Site-offset coefficients c with  sum_e a_e l(e) = sum_x c(x) eta(x)  for
// every profile l and its gradient eta(x) = l(x+1/2) - l(x-1/2). Computed as
// c(x) = sum_{e >= x+1/2} a_e; zero entries are dropped.
std::map<int, double> gradient_coeffs(const InteractionKernel& kernel);

// Whether the precision sequence alpha(x) := -c(x) has a strictly positive
// Fourier transform: min over a 4096-point theta grid of
// sum_x alpha(x) cos(theta x) must exceed 1e-9. Only defined for left-right
// symmetric kernels (alpha is even then); throws KernelError otherwise.
// For D^{a,b} with b > 0 this coincides with -b/3 < a < b.
bool is_positive_definite(const InteractionKernel& kernel);

// A_k = 1 + 2 cos(2 pi / (k+2)); strictly increasing, limit 3. k >= 1.
double critical_ratio(int k);

// Predicted size of the trapping interval for D^{a,b}: k+2 sites when
// a < 0 < b and b/|a| lies strictly inside (A_k, A_{k+1}) for some k >= 1.
// Returns nullopt when the sign pattern fails, when b/|a| >= 3, or when the
// ratio equals a computed A_k exactly (the boundary is undetermined).
std::optional<int> predict_stuck_size(double a, double b);

struct KernelClassification {
    std::vector<double> polynomial;
    bool is_symmetric = false;
    std::map<int, double> gradient_coeffs;
    std::optional<bool> positive_definite;       // set for symmetric kernels
    std::optional<int> predicted_stuck_sites;    // set for the (a,b) family
};

KernelClassification classify_kernel(const InteractionKernel& kernel);

}  // namespace selfwalk
