#pragma once

#include <functional>
#include <limits>

#include "qms/matcore.hpp"

namespace qms {

// Returned by relative_entropy when supp(rho) is not inside supp(sigma).
inline constexpr double infinite_divergence = std::numeric_limits<double>::infinity();

struct QuadratureSpec {
    enum class Scheme { adaptive_simpson, fixed_gauss };
    Scheme scheme = Scheme::adaptive_simpson;
    int max_subdivisions = 1 << 14;
    double abs_tol = 1e-8;
};

// tr(rho ln rho - rho ln sigma). Arguments need only be positive semidefinite;
// unnormalized operators are accepted (entropy_functional passes I).
double relative_entropy(const cmat& rho, const cmat& sigma, const Tolerances& tol = {});

// tr(rho ln rho)
double entropy_functional(const cmat& rho, const Tolerances& tol = {});

// int_0^inf tr(X* (sigma+s)^-1 X (sigma+s)^-1) ds, evaluated in sigma's eigenbasis.
// sigma must be positive definite but need not have unit trace.
double bkm_metric(const cmat& sigma, const cmat& x, const Tolerances& tol = {});

// (ln a - ln b)/(a - b), with the diagonal limit 1/a.
double log_mean_kernel(double a, double b);

// int_0^1 (1-t) gamma_{rho_t}(rho - sigma) dt with rho_t = t rho + (1-t) sigma.
double relative_entropy_via_bkm(const cmat& rho, const cmat& sigma,
                                const QuadratureSpec& q = {}, const Tolerances& tol = {});

// (c ln c - c + 1)/(c-1)^2
double k_of_c(double c);

// tr(L_*(rho)(ln rho - ln d_phi)) for a Heisenberg-picture generator L.
double entropy_production(const Superop& generator, const cmat& reference, const cmat& rho,
                          const Tolerances& tol = {});

struct EntropyDerivatives {
    double first = 0.0;
    double second = 0.0;
};

// Derivatives of t -> tr(rho_t ln rho_t) at a point with rho_t = rho,
// rho_t' = d1, rho_t'' = d2.
EntropyDerivatives entropy_second_derivative_terms(const cmat& rho, const cmat& d1,
                                                   const cmat& d2, const Tolerances& tol = {});

// Generic 1-D quadrature used by relative_entropy_via_bkm; exposed for tests.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& q);

}  // namespace qms
