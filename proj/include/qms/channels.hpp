#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qms/entropy.hpp"
#include "qms/matcore.hpp"

namespace qms {

// A Heisenberg-picture map with the properties that have been checked.
struct QuantumChannel {
    Superop map;
    bool cp_verified = false;
    bool unital_verified = false;
    bool trace_preserving_verified = false;
    std::optional<cmat> reference;  // absent means the trace
    bool gns_verified = false;

    Eigen::Index dim() const { return superop_dim(map); }
    cmat reference_or_trace() const;
    cmat operator()(const cmat& x) const { return apply_map(map, x); }
    // Schrodinger picture (pre-adjoint under the trace pairing).
    cmat on_state(const cmat& rho) const { return apply_map(adjoint_trace(map), rho); }
};

// Fills in the verification flags from the superoperator itself.
QuantumChannel make_channel(Superop map, std::optional<cmat> reference = std::nullopt,
                            const Tolerances& tol = {});

// Both pictures describe X -> sum K* X K once the Schrodinger Kraus form
// rho -> sum K rho K* is dualized, so the picture only documents intent.
enum class KrausPicture { heisenberg, schrodinger };
QuantumChannel from_kraus(const std::vector<cmat>& kraus,
                          KrausPicture picture = KrausPicture::heisenberg,
                          const Tolerances& tol = {});

// d_phi S(X) = S_*(d_phi X) for all X.
bool is_gns_symmetric(const Superop& s, const cmat& reference, double tol = 1e-9);

// Adjoint with respect to the KMS inner product of the reference.
Superop kms_adjoint(const Superop& s, const cmat& reference, const Tolerances& tol = {});

// ---- conditional expectations ----

struct ConditionalExpectation {
    Superop map;
    std::vector<cmat> algebra_basis;  // KMS-orthonormal, spans the range
    cmat reference;

    Eigen::Index dim() const { return superop_dim(map); }
    cmat operator()(const cmat& x) const { return apply_map(map, x); }
    cmat on_state(const cmat& rho) const { return apply_map(adjoint_trace(map), rho); }
};

// X -> tr(d X) 1
ConditionalExpectation state_expectation(const cmat& reference);
ConditionalExpectation trace_expectation(Eigen::Index d);
ConditionalExpectation identity_expectation(const cmat& reference);

// Builds E = W^-1 P W from KMS-picture orthonormal columns spanning the range.
ConditionalExpectation expectation_from_kms_range(const cmat& kms_columns, const cmat& reference,
                                                  const Tolerances& tol = {});

struct ExpectationDiagnostics {
    double idempotency = 0.0;
    double choi_min_eigenvalue = 0.0;
    double unitality = 0.0;
    double closure = 0.0;
    double bimodule = 0.0;
};

// Measures the conditional-expectation invariants. Throws AlgebraClosureFailure
// when any of them is out of tolerance.
ExpectationDiagnostics verify_expectation(const ConditionalExpectation& e,
                                          const Tolerances& tol = {});

// ---- CP order ----

// choi(b - a) >= -tol
bool cp_leq(const Superop& a, const Superop& b, double tol = 1e-10);

// Tests (1-eps) E <=cp T <=cp (1+eps) E after normalizing by choi(E)^(-1/2)
// on its support, so that the tolerance is relative to E rather than absolute.
class CpSandwich {
public:
    explicit CpSandwich(const Superop& e, double tol = 1e-10);

    struct Result {
        bool lower = false;
        bool upper = false;
        double min_ratio = 0.0;
        double max_ratio = 0.0;
        double leak = 0.0;  // part of choi(T) outside supp choi(E)
        bool holds() const { return lower && upper; }
    };

    Result check(const Superop& t, double eps) const;
    // Generalized eigenvalue range of choi(T) relative to choi(E).
    Result ratios(const Superop& t) const;
    // choi(E)^{-1/2} choi(T) choi(E)^{-1/2} restricted to supp choi(E).
    cmat normalized_choi(const Superop& t, double* leak = nullptr) const;

private:
    cmat scaled_support_;  // Q Lambda^{-1/2}
    cmat support_;         // Q
    double tol_;
};

// ---- operations on channels ----

ConditionalExpectation multiplicative_domain(const QuantumChannel& phi, const Tolerances& tol = {});

// Smallest k <= k_max with (1-eps)E <=cp (Phi* Phi)^k <=cp (1+eps)E.
int k_cb(const QuantumChannel& phi, const ConditionalExpectation& e, double eps = 0.1,
         int k_max = 4096, double tol = 1e-10);

struct ContractionCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

ContractionCheck entropy_contraction_check(const QuantumChannel& phi,
                                           const ConditionalExpectation& e, const cmat& rho,
                                           int kcb, const Tolerances& tol = {});
ContractionCheck entropy_contraction_check(const QuantumChannel& phi,
                                           const ConditionalExpectation& e, const cmat& rho,
                                           const Tolerances& tol = {});

struct DifferenceChain {
    double lhs = 0.0;  // D(rho || Phi* Phi(omega))
    double mid = 0.0;  // D_Phi(rho) + D(rho || omega)
    double rhs = 0.0;  // tr((id - Phi* Phi)(rho) ln rho) + D(rho || omega)
    bool holds() const { return lhs <= mid + 1e-9 && mid + 1e-9 <= rhs + 2e-9; }
};

// Phi is read in the Schrodinger picture (its pre-adjoint acts on states).
DifferenceChain entropy_difference_check(const QuantumChannel& phi, const cmat& rho,
                                         const cmat& omega, const Tolerances& tol = {});

struct ProjectionCheck {
    double lhs = 0.0;  // D(rho || Psi_* rho)
    double rhs = 0.0;  // D(rho || E_* rho) / 2
    bool holds() const { return lhs >= rhs - 1e-9; }
};

ProjectionCheck approximate_projection_check(const QuantumChannel& psi,
                                             const ConditionalExpectation& e, const cmat& rho,
                                             const Tolerances& tol = {});

// (1-eps)/(1+eps) - eps/((1-eps) k(2))
double approximate_projection_constant(double eps);

// Multi-start coordinate ascent over states of D(Phi rho||Phi E rho)/D(rho||E rho).
// An empirical lower bound of the supremum, not a certificate.
double contraction_coefficient_estimate(const QuantumChannel& phi,
                                        const ConditionalExpectation& e, int restarts,
                                        std::uint64_t seed, int iterations = 500);

// ||Phi (id - E)|| on L2 of the reference (KMS picture).
double l2_contraction(const QuantumChannel& phi, const ConditionalExpectation& e,
                      const Tolerances& tol = {});

// Replaces a rank-deficient state with (1-delta) rho + delta d_phi.
cmat regularize_state(const cmat& rho, const cmat& reference, double delta = 1e-9,
                      const Tolerances& tol = {});

}  // namespace qms
