#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "qms/semigroups.hpp"

namespace qms {

inline constexpr double p_infinity = std::numeric_limits<double>::infinity();

// Schatten-p norm of d^{1/2p} x d^{1/2p}; the operator norm at p = infinity.
double weighted_p_norm(const cmat& x, const cmat& reference, double p, const Tolerances& tol = {});

struct ConcentrationReport {
    std::vector<double> p_grid;
    std::vector<double> ratios;  // alpha ||x - E x||_p / (sqrt(p) ||x||_Lip)
    double sup_ratio = 0.0;
    double lipschitz = 0.0;
    double growth_exponent = 0.0;  // least-squares slope of ln r against ln p
    bool bounded = true;           // growth_exponent <= 0.05
};

ConcentrationReport mlsi_concentration_ratios(const Lindbladian& l, double alpha_lower,
                                              const cmat& x, const std::vector<double>& p_grid);

enum class BernsteinSampler {
    dense,     // Hermitian with uniform complex entries, clipped to norm M
    diagonal,  // real diagonal with uniform entries, clipped to norm M
    fixed,     // the same rank-one summand M e_00 every time
};

struct BernsteinRecord {
    Eigen::Index d = 0;
    int n = 0;
    int trials = 0;
    double bound = 1.0;      // M
    double mean_norm = 0.0;  // E ||Z - EZ||
    double v = 0.0;          // ||E (Z - EZ)^2||
    double ratio = 0.0;      // mean_norm / sqrt((v + M^2) ln d)
};

// Z = S_1 + ... + S_n with i.i.d. bounded Hermitian summands.
BernsteinRecord matrix_bernstein_mc(Eigen::Index d, int n, double bound, int trials,
                                    std::uint64_t seed,
                                    BernsteinSampler sampler = BernsteinSampler::dense);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

// Least-squares fit of ln y against ln x.
LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    return loglog_fit(x, y).slope;
}

}  // namespace qms
