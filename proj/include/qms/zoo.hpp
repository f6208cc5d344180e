#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qms/semigroups.hpp"

namespace qms {

// ---- classical chains ----

struct StochasticKernel {
    rmat kernel;      // row-stochastic
    rvec stationary;  // mu P = mu
    bool reversible = false;
};

StochasticKernel make_kernel(rmat kernel);
StochasticKernel cyclic_walk(int d);
rvec cyclic_walk_spectrum(int d);  // cos(2 pi j / d), j = 0..d-1

// Continuous-time chain: (L f)(u) = sum_v L(u, v) f(v), rows summing to zero,
// T_t = exp(-tL), reversible with respect to `stationary`.
struct ClassicalGenerator {
    rmat generator;
    rvec stationary;
};

ClassicalGenerator classical_generator(rmat generator, rvec stationary);
ClassicalGenerator cyclic_generator(int d);  // 2(I - K_{C_d})

struct WeightedEdge {
    int u = 0;
    int v = 0;
    double weight = 1.0;
};
ClassicalGenerator graph_laplacian(int n, const std::vector<WeightedEdge>& edges);

rvec classical_spectrum(const ClassicalGenerator& g);
double classical_gap(const ClassicalGenerator& g);

// max_{u,v} |p_t(u,v)/mu(v) - 1|
double classical_sup_distance(const ClassicalGenerator& g, double t);
double classical_mixing_time(const ClassicalGenerator& g, double eps = 0.1);

// 2 exp(-4t/d^2) sqrt(1 + d^2/(4t)) for the cycle C_d
double cyclic_heat_kernel_bound(int d, double t);

struct ClassicalBounds {
    double lambda = 0.0;
    double t0 = 0.0;
    double c0 = 0.0;
    double cmlsi = 0.0;      // lambda / (2 (lambda t0 + ln C0 + ln 10))
    double diaconis = 0.0;   // lambda / (lambda t0 + ln C0 + 1)
    double loglog = 0.0;     // 4 + ln ln ||1/mu||_inf
};
ClassicalBounds classical_bounds(const ClassicalGenerator& g, double t0, double c0);
ClassicalBounds classical_bounds(const ClassicalGenerator& g);  // t0 = 0, C0 = ||1/mu||_inf

// Diagonal quantum model whose restriction to diagonal matrices is `g`.
// Off-diagonal matrix units are damped by dephasing jumps of strength
// `dephasing` (default: the largest exit rate), which keeps the quantum gap
// equal to the classical one.
Lindbladian embed_classical(const ClassicalGenerator& g, double dephasing = -1.0);
Lindbladian cyclic_laplacian(int d);

// ---- quantum models ----

Lindbladian depolarizing(Eigen::Index d, const cmat& reference);

struct GraphModel {
    struct Edge {
        int r = 0;
        int s = 0;
        double weight = 1.0;
        double beta = 0.0;  // beta_rs = -beta_sr
    };
    int n = 0;
    std::vector<Edge> edges;  // one entry per unordered edge
    rvec stationary;
};

// Path graph 0..n-1 with thermal mu_j proportional to exp(-beta j) and
// beta_{j,j+1} = ln(mu_j / mu_{j+1}).
GraphModel thermal_path(int n, double beta, const std::optional<std::vector<double>>& weights = {});

Lindbladian nc_birth_death(int n, double beta,
                           const std::optional<std::vector<double>>& weights = {});
Lindbladian graph_lindbladian(const GraphModel& g);

// Models whose jumps are all scaled matrix units c e_ab. The diagonal is a
// classical chain and every off-diagonal e_rs is an eigenvector of L.
struct MatrixUnitModel {
    ClassicalGenerator diagonal;
    rmat gammas;  // L(e_rs) = gammas(r, s) e_rs for r != s, zero diagonal
};
MatrixUnitModel matrix_unit_structure(const GraphModel& g);
MatrixUnitModel matrix_unit_structure(const ClassicalGenerator& g, double dephasing = -1.0);
// Read off the structure from jump data; throws PreconditionFailed when a
// jump is not a matrix unit or the reference is not diagonal.
MatrixUnitModel matrix_unit_structure(const Lindbladian& l);

inline rmat bd_gammas(const GraphModel& g) { return matrix_unit_structure(g).gammas; }
inline ClassicalGenerator bd_classical_part(const GraphModel& g) {
    return matrix_unit_structure(g).diagonal;
}

struct BdDecomposition {
    double diag_norm = 0.0;     // ||T_t E_d - E||_{1 -> inf}
    double offdiag_norm = 0.0;  // ||A_t||
    double schur_bound = 0.0;   // Schur-test bound on ||A_t||
};
BdDecomposition bd_decomposition_bound(const MatrixUnitModel& m, double t);
inline BdDecomposition bd_decomposition_bound(const GraphModel& g, double t) {
    return bd_decomposition_bound(matrix_unit_structure(g), t);
}

// t_cb against the state expectation, without forming superoperators. The
// normalized Choi matrix of T_t splits into the scalars h_t(u, v) = p_t(u, v)/mu_v
// (u != v) and the n x n block diag(h_t(i, i)) + A_t. Requires an ergodic chain.
TcbSearch matrix_unit_t_cb(const MatrixUnitModel& m, double eps = 0.1,
                           double rel_width = 1e-6);

// BoundReport through the matrix-unit structure. The fixed-point algebra is
// the scalars, so C_cb = sum_k 1/mu_k; decay is checked on diagonal states,
// which the semigroup keeps diagonal. No k_cb snapshot is taken.
BoundReport matrix_unit_bounds(const MatrixUnitModel& m, const std::string& model,
                               double eps = 0.1, std::uint64_t seed = 1,
                               double rel_width = 1e-6);

struct Witness {
    double divergence = 0.0;          // closed form D(rho || mu)
    double entropy_production = 0.0;  // I(rho)
    double value = 0.0;               // 2 I / D
};
Witness bd_upper_witness(int n, double beta);
// Same quantities computed on the full n x n quantum model (small n).
Witness bd_upper_witness_quantum(int n, double beta);

// ---- SU(2) ----

// Skew-Hermitian images of X, Y, Z in the spin-j representation, with [X, Y] = 2Z.
std::array<cmat, 3> su2_generators(double j);
Lindbladian su2_transference(double j, const std::string& generators = "XY");

// ---- Rothaus ----

struct RothausRecord {
    double eta = 0.0;
    double r = 0.0;
    double gamma_numeric = 0.0;  // gamma_f(2h) through bkm_metric
    double gamma_closed = 0.0;   // (2/eta) ln((1+eta)/(1-eta)) ||h||^2
    double h_norm_sq = 0.0;
    double rothaus_rhs = 0.0;    // D(h^2 || E h^2) + ||h||^2
    double ratio = 0.0;          // rothaus_rhs / gamma_numeric
};
RothausRecord rothaus_counterexample(double eta, double r);

// ---- random models ----

Lindbladian random_gns_lindbladian(Eigen::Index d, int num_jumps, const cmat& reference,
                                   std::uint64_t seed);

}  // namespace qms
