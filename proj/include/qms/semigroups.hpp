#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qms/channels.hpp"
#include "qms/matcore.hpp"

namespace qms {

// Generator of T_t = exp(-tL) in GNS form:
//   L(x) = sum_j e^{-w_j/2} ({V_j* V_j, x} - 2 V_j* x V_j)
// with d V_j = e^{-w_j} V_j d and the jump list closed under adjoints
// (V_j* appears with weight -w_j). L is positive in the KMS picture.
class Lindbladian {
public:
    Lindbladian(std::vector<cmat> jumps, std::vector<double> bohr_weights, cmat reference,
                const Tolerances& tol = {});

    // A generator given directly as a superoperator (no jump data), checked
    // for L(1) = 0 and GNS symmetry.
    static Lindbladian from_generator(Superop generator, cmat reference,
                                      const Tolerances& tol = {});

    Eigen::Index dim() const { return reference_.rows(); }
    const std::vector<cmat>& jumps() const { return jumps_; }
    const std::vector<double>& bohr_weights() const { return weights_; }
    const cmat& reference() const { return reference_; }
    const Superop& generator() const { return generator_; }
    const Tolerances& tolerances() const { return tol_; }

    // Spectrum and eigenvectors of W L W^-1 (Hermitian), ascending.
    const rvec& kms_spectrum() const { return spectrum_; }
    const cmat& kms_vectors() const { return vectors_; }
    const KmsFrame<cplx>& frame() const { return frame_; }

    // Superoperator of exp(-tL).
    Superop semigroup(double t) const;

private:
    Lindbladian() = default;
    void diagonalize();

    std::vector<cmat> jumps_;
    std::vector<double> weights_;
    cmat reference_;
    Superop generator_;
    Tolerances tol_;
    KmsFrame<cplx> frame_;
    rvec spectrum_;
    cmat vectors_;
};

inline Lindbladian lindbladian_gns(std::vector<cmat> jumps, std::vector<double> bohr_weights,
                                   cmat reference, const Tolerances& tol = {}) {
    return Lindbladian(std::move(jumps), std::move(bohr_weights), std::move(reference), tol);
}

QuantumChannel evolve(const Lindbladian& l, double t);

// Kernel of L as a reference-preserving conditional expectation.
ConditionalExpectation fixed_point_expectation(const Lindbladian& l);

// Smallest eigenvalue above 1e-9 of the KMS generator; 0 when there is none.
double spectral_gap(const Lindbladian& l);

double dirichlet_form(const Lindbladian& l, const cmat& x);
cmat gradient_form(const Lindbladian& l, const cmat& x, const cmat& y);
double lipschitz_seminorm(const Lindbladian& l, const cmat& x);

double entropy_production(const Lindbladian& l, const cmat& rho);

struct TcbSearch {
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int evaluations = 0;
    bool monotone = true;  // bracket ends and interior probes agreed with a threshold
};

// Bisection for inf{t : (1-eps)E <=cp T_t <=cp (1+eps)E}. t_hint <= 0 means 1/gap.
TcbSearch t_cb_search(const Lindbladian& l, const ConditionalExpectation& e, double eps = 0.1,
                      double t_hint = 0.0, double rel_width = 1e-6, double tol = 1e-10);

inline double t_cb(const Lindbladian& l, const ConditionalExpectation& e, double eps = 0.1,
                   double t_hint = 0.0) {
    return t_cb_search(l, e, eps, t_hint).value;
}

// Smallest c with ambient <=cp c E (ambient defaults to the identity map).
double cb_index(const ConditionalExpectation& e, const std::optional<Superop>& ambient = {},
                double rel_tol = 1e-8);

struct Trajectory {
    std::vector<double> times;
    std::vector<double> divergence;  // D(T_t rho || E rho)
    std::vector<double> envelope;    // e^{-t/t_cb} D(rho || E rho)
    bool bound_holds = true;
    bool monotone = true;
    bool pass() const { return bound_holds && monotone; }
};

Trajectory decay_check(const Lindbladian& l, const ConditionalExpectation& e, const cmat& rho,
                       const std::vector<double>& times, double tcb);

struct PoincareCheck {
    double lhs = 0.0;  // gap * ||x - E x||^2
    double rhs = 0.0;  // Dirichlet form
    bool holds() const { return lhs <= rhs + 1e-9; }
};

PoincareCheck poincare_check(const Lindbladian& l, const ConditionalExpectation& e,
                             const cmat& x);

struct BoundReport {
    std::string model;
    Eigen::Index d = 0;
    double lambda = 0.0;
    double t_cb = 0.0;
    std::optional<int> k_cb_snapshot;
    double c_cb = 0.0;
    double bound_tcb = 0.0;
    double bound_index = 0.0;
    double best_lower = 0.0;
    bool decay_pass = false;
    bool consistency_pass = false;  // t_cb <= ln(10 C_cb)/lambda
    bool monotone = true;
    bool no_decay = false;
    std::map<std::string, double> diagnostics;
};

BoundReport mlsi_lower_bounds(const Lindbladian& l, const std::string& model, double eps = 0.1,
                              std::uint64_t seed = 1, double rel_width = 1e-6);

}  // namespace qms
