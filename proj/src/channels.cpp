#include "qms/channels.hpp"

#include <algorithm>
#include <cmath>

#include "qms/random.hpp"

namespace qms {

cmat QuantumChannel::reference_or_trace() const {
    return reference ? *reference : maximally_mixed(dim());
}

bool is_gns_symmetric(const Superop& s, const cmat& reference, double tol) {
    const Superop m = left_mul(reference);
    return max_abs(m * s - adjoint_trace(s) * m) <= tol * std::max(1.0, max_abs(s));
}

QuantumChannel make_channel(Superop map, std::optional<cmat> reference, const Tolerances& tol) {
    QuantumChannel ch;
    ch.map = std::move(map);
    const auto d = ch.dim();
    const cmat id = cmat::Identity(d, d);
    ch.cp_verified = is_psd(choi(ch.map), tol.psd);
    ch.unital_verified = max_abs(apply_map(ch.map, id) - id) <= 1e-10;
    ch.trace_preserving_verified = max_abs(apply_map(adjoint_trace(ch.map), id) - id) <= 1e-10;
    if (reference) {
        if (reference->rows() != d) throw DimensionMismatch("channel reference dimension");
        ch.reference = reference;
    }
    ch.gns_verified = is_gns_symmetric(ch.map, ch.reference_or_trace());
    return ch;
}

QuantumChannel from_kraus(const std::vector<cmat>& kraus, KrausPicture, const Tolerances& tol) {
    if (kraus.empty()) throw DimensionMismatch("from_kraus: empty Kraus list");
    const auto d = kraus.front().rows();
    Superop s = Superop::Zero(d * d, d * d);
    for (const auto& k : kraus) {
        if (k.rows() != d || k.cols() != d)
            throw DimensionMismatch("from_kraus: Kraus operators differ in shape");
        s += sandwich(k.adjoint(), k);
    }
    auto ch = make_channel(std::move(s), std::nullopt, tol);
    ch.cp_verified = true;
    return ch;
}

Superop kms_adjoint(const Superop& s, const cmat& reference, const Tolerances& tol) {
    const auto f = kms_frame(reference, tol);
    const Superop m = f.w * s * f.w_inv;
    return f.w_inv * m.adjoint() * f.w;
}

// ---- conditional expectations ----

ConditionalExpectation state_expectation(const cmat& reference) {
    const auto d = reference.rows();
    const cmat id = cmat::Identity(d, d);
    ConditionalExpectation e;
    // vec(E(X)) = vec(I) tr(d X) = vec(I) vec(d^T)^T vec(X)
    const cmat dt = reference.transpose();
    e.map = vec(id) * vec(dt).transpose();
    e.algebra_basis = {id};
    e.reference = reference;
    return e;
}

ConditionalExpectation trace_expectation(Eigen::Index d) {
    return state_expectation(maximally_mixed(d));
}

ConditionalExpectation identity_expectation(const cmat& reference) {
    const auto d = reference.rows();
    const auto f = kms_frame(reference);
    ConditionalExpectation e;
    e.map = identity_superop(d);
    for (Eigen::Index k = 0; k < d * d; ++k) e.algebra_basis.push_back(unvec(f.w_inv.col(k)));
    e.reference = reference;
    return e;
}

ConditionalExpectation expectation_from_kms_range(const cmat& kms_columns, const cmat& reference,
                                                  const Tolerances& tol) {
    const auto f = kms_frame(reference, tol);
    ConditionalExpectation e;
    e.map = f.w_inv * (kms_columns * kms_columns.adjoint()) * f.w;
    for (Eigen::Index k = 0; k < kms_columns.cols(); ++k)
        e.algebra_basis.push_back(unvec(cvec(f.w_inv * kms_columns.col(k))));
    e.reference = reference;
    return e;
}

ExpectationDiagnostics verify_expectation(const ConditionalExpectation& e, const Tolerances& tol) {
    const auto d = e.dim();
    const cmat id = cmat::Identity(d, d);
    ExpectationDiagnostics diag;
    diag.idempotency = max_abs(e.map * e.map - e.map);
    diag.choi_min_eigenvalue = min_eigenvalue(choi(e.map));
    diag.unitality = max_abs(e(id) - id);

    // All basis pairs for small algebras, a fixed sample of pairs otherwise.
    const auto& basis = e.algebra_basis;
    const auto r = basis.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (r * r <= 256) {
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) pairs.emplace_back(i, j);
    } else {
        Rng rng(0x5eed);
        std::uniform_int_distribution<std::size_t> pick(0, r - 1);
        for (int k = 0; k < 256; ++k) pairs.emplace_back(pick(rng), pick(rng));
    }
    Rng rng(0xb1de);
    std::vector<cmat> probes;
    for (int k = 0; k < 2; ++k) probes.push_back(ginibre(d, d, rng));
    for (auto [i, j] : pairs) {
        const cmat& a = basis[i];
        const cmat& b = basis[j];
        const double scale = std::max(1.0, max_abs(a) * max_abs(b));
        const cmat ab = a * b;
        diag.closure = std::max(diag.closure, max_abs(e(ab) - ab) / scale);
        for (const auto& x : probes) {
            const double s = scale * std::max(1.0, max_abs(x));
            diag.bimodule = std::max(diag.bimodule, max_abs(e(a * x * b) - a * e(x) * b) / s);
        }
    }

    auto fail = [](const std::string& what, double v) {
        throw AlgebraClosureFailure("conditional expectation " + what + " violated (" +
                                    std::to_string(v) + ")");
    };
    if (diag.idempotency > 1e-9) fail("idempotency", diag.idempotency);
    if (diag.choi_min_eigenvalue < -tol.psd) fail("complete positivity", diag.choi_min_eigenvalue);
    if (diag.unitality > 1e-10) fail("unitality", diag.unitality);
    if (diag.closure > 1e-8) fail("product closure", diag.closure);
    if (diag.bimodule > 1e-8) fail("bimodule property", diag.bimodule);
    return diag;
}

// ---- CP order ----

bool cp_leq(const Superop& a, const Superop& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("cp_leq: superoperator sizes differ");
    return is_psd(choi(Superop(b - a)), tol);
}

CpSandwich::CpSandwich(const Superop& e, double tol) : tol_(tol) {
    const auto es = eig_hermitian(choi(e));
    const double top = es.values.maxCoeff();
    if (!(top > 0.0)) throw DomainError("CpSandwich: reference map has no positive Choi part");
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < es.values.size(); ++k)
        if (es.values(k) > 1e-12 * top) keep.push_back(k);
    const auto n = es.vectors.rows();
    support_.resize(n, static_cast<Eigen::Index>(keep.size()));
    scaled_support_.resize(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        const auto k = keep[c];
        support_.col(c) = es.vectors.col(k);
        scaled_support_.col(c) = es.vectors.col(k) / std::sqrt(es.values(k));
    }
}

cmat CpSandwich::normalized_choi(const Superop& t, double* leak) const {
    const cmat ct = hermitian_part(choi(t));
    if (leak) {
        *leak = 0.0;
        if (support_.cols() < ct.rows()) {
            const cmat inside =
                support_ * (support_.adjoint() * ct * support_) * support_.adjoint();
            *leak = max_abs(ct - inside) / std::max(1e-300, max_abs(ct));
        }
    }
    return hermitian_part(scaled_support_.adjoint() * ct * scaled_support_);
}

CpSandwich::Result CpSandwich::ratios(const Superop& t) const {
    Result r;
    const cmat z = normalized_choi(t, &r.leak);
    Eigen::SelfAdjointEigenSolver<cmat> solver(z, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NonConvergence("CpSandwich: eigensolver failed");
    r.min_ratio = solver.eigenvalues().minCoeff();
    r.max_ratio = solver.eigenvalues().maxCoeff();
    return r;
}

CpSandwich::Result CpSandwich::check(const Superop& t, double eps) const {
    Result r = ratios(t);
    const bool contained = r.leak <= tol_;
    r.upper = contained && r.max_ratio <= 1.0 + eps + tol_;
    r.lower = contained && r.min_ratio >= 1.0 - eps - tol_;
    return r;
}

// ---- multiplicative domain ----

ConditionalExpectation multiplicative_domain(const QuantumChannel& phi, const Tolerances& tol) {
    const cmat ref = phi.reference_or_trace();
    const auto d = phi.dim();
    const cmat id = cmat::Identity(d, d);
    if (max_abs(phi(id) - id) > 1e-10)
        throw PreconditionFailed("multiplicative_domain: map is not unital");
    if (!is_gns_symmetric(phi.map, ref))
        throw NotSymmetric("multiplicative_domain: map is not GNS-symmetric to its reference");
    const auto f = kms_frame(ref, tol);
    const cmat m = f.w * phi.map * f.w_inv;
    const auto es = eig_hermitian(cmat(m.adjoint() * m));
    std::vector<Eigen::Index> fixed;
    for (Eigen::Index k = 0; k < es.values.size(); ++k)
        if (es.values(k) > 1.0 - 1e-8) fixed.push_back(k);
    cmat cols(es.vectors.rows(), static_cast<Eigen::Index>(fixed.size()));
    for (std::size_t c = 0; c < fixed.size(); ++c) cols.col(c) = es.vectors.col(fixed[c]);
    auto e = expectation_from_kms_range(cols, ref, tol);
    verify_expectation(e, tol);
    return e;
}

// ---- k_cb ----

namespace {

Superop power_from_squares(const std::vector<Superop>& squares, long k) {
    Superop out;
    bool first = true;
    for (std::size_t b = 0; k > 0; ++b, k >>= 1) {
        if (!(k & 1)) continue;
        out = first ? squares[b] : Superop(out * squares[b]);
        first = false;
    }
    return out;
}

}  // namespace

int k_cb(const QuantumChannel& phi, const ConditionalExpectation& e, double eps, int k_max,
         double tol) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("k_cb: eps must lie in (0, 1)");
    if (k_max < 1) throw DomainError("k_cb: k_max must be positive");
    const Superop psi = kms_adjoint(phi.map, e.reference) * phi.map;
    const CpSandwich sandwich(e.map, tol);

    if (k_max <= 64) {
        Superop p = psi;
        for (int k = 1; k <= k_max; ++k) {
            if (sandwich.check(p, eps).holds()) return k;
            p = p * psi;
        }
        throw NotReached("k_cb: sandwich not reached within " + std::to_string(k_max) + " steps");
    }

    // Doubling by repeated squaring, then binary search inside the last octave.
    std::vector<Superop> squares{psi};
    long hi = 1;
    while (!sandwich.check(squares.back(), eps).holds()) {
        if (hi >= k_max) {
            if (sandwich.check(power_from_squares(squares, k_max), eps).holds()) {
                hi = k_max;
                break;
            }
            throw NotReached("k_cb: sandwich not reached within " + std::to_string(k_max) +
                             " steps");
        }
        squares.push_back(squares.back() * squares.back());
        hi *= 2;
    }
    long lo = hi / 2;  // fails (or zero)
    while (hi - lo > 1) {
        const long mid = (lo + hi) / 2;
        if (sandwich.check(power_from_squares(squares, mid), eps).holds())
            hi = mid;
        else
            lo = mid;
    }
    return static_cast<int>(hi);
}

// ---- entropy inequalities ----

cmat regularize_state(const cmat& rho, const cmat& reference, double delta, const Tolerances& tol) {
    if (min_eigenvalue(rho) > tol.support) return rho;
    return (1.0 - delta) * rho + delta * reference;
}

ContractionCheck entropy_contraction_check(const QuantumChannel& phi,
                                           const ConditionalExpectation& e, const cmat& rho,
                                           int kcb, const Tolerances& tol) {
    const cmat r = regularize_state(rho, e.reference, 1e-9, tol);
    const cmat er = e.on_state(r);
    ContractionCheck c;
    const double base = relative_entropy(r, er, tol);
    c.lhs = relative_entropy(phi.on_state(r), phi.on_state(er), tol);
    c.rhs = (1.0 - 1.0 / (2.0 * kcb)) * base;
    c.ratio = c.lhs / std::max(base, 1e-12);
    return c;
}

ContractionCheck entropy_contraction_check(const QuantumChannel& phi,
                                           const ConditionalExpectation& e, const cmat& rho,
                                           const Tolerances& tol) {
    return entropy_contraction_check(phi, e, rho, k_cb(phi, e, 0.1), tol);
}

DifferenceChain entropy_difference_check(const QuantumChannel& phi, const cmat& rho,
                                         const cmat& omega, const Tolerances& tol) {
    // Phi acts on states through its pre-adjoint; Phi* is then phi.map itself.
    const cmat phi_rho = phi.on_state(rho);
    const cmat back = phi(phi.on_state(omega));
    const double d_rho_omega = relative_entropy(rho, omega, tol);
    const double entropy_drop = entropy_functional(rho, tol) - entropy_functional(phi_rho, tol);
    const cmat moved = rho - phi(phi_rho);
    DifferenceChain c;
    c.lhs = relative_entropy(rho, back, tol);
    c.mid = entropy_drop + d_rho_omega;
    c.rhs = (moved * mat_log(rho, tol)).trace().real() + d_rho_omega;
    return c;
}

double approximate_projection_constant(double eps) {
    return (1.0 - eps) / (1.0 + eps) - eps / ((1.0 - eps) * k_of_c(2.0));
}

ProjectionCheck approximate_projection_check(const QuantumChannel& psi,
                                             const ConditionalExpectation& e, const cmat& rho,
                                             const Tolerances& tol) {
    const CpSandwich sandwich(e.map, tol.psd);
    const auto s = sandwich.check(psi.map, 0.1);
    if (!s.lower) throw PreconditionFailed("approximate_projection_check: 0.9 E <=cp Psi fails");
    if (!s.upper) throw PreconditionFailed("approximate_projection_check: Psi <=cp 1.1 E fails");
    if (max_abs(e.map * psi.map - e.map) > 1e-9)
        throw PreconditionFailed("approximate_projection_check: E o Psi != E");
    const cmat r = regularize_state(rho, e.reference, 1e-9, tol);
    ProjectionCheck c;
    c.lhs = relative_entropy(r, psi.on_state(r), tol);
    c.rhs = 0.5 * relative_entropy(r, e.on_state(r), tol);
    return c;
}

double contraction_coefficient_estimate(const QuantumChannel& phi,
                                        const ConditionalExpectation& e, int restarts,
                                        std::uint64_t seed, int iterations) {
    const auto d = phi.dim();
    const Superop phi_s = adjoint_trace(phi.map);
    const Superop e_s = adjoint_trace(e.map);
    auto ratio = [&](const cmat& a) {
        cmat rho = a * a.adjoint();
        rho /= rho.trace().real();
        const cmat er = apply_map(e_s, rho);
        const double den = relative_entropy(rho, er);
        if (!(den > 1e-12) || !std::isfinite(den)) return 0.0;
        const double num = relative_entropy(apply_map(phi_s, rho), apply_map(phi_s, er));
        return std::isfinite(num) ? num / den : 0.0;
    };

    // Besides random starts, perturb the reference along the top KMS singular direction
    // of Phi(id - E); near the fixed points the ratio tends to the square of that value.
    std::vector<cmat> starts;
    {
        const auto f = kms_frame(e.reference);
        const cmat m = f.w * (phi.map * (identity_superop(d) - e.map)) * f.w_inv;
        Eigen::BDCSVD<cmat> svd(m, Eigen::ComputeThinV);
        const cmat x = unvec(cvec(f.w_inv * svd.matrixV().col(0)));
        const cmat re = hermitian_part(x);
        const cmat im = hermitian_part(cmat(cplx(0.0, 1.0) * x));
        const cmat dir = max_abs(re) >= max_abs(im) ? re : im;
        const cmat half = mat_pow(e.reference, 0.5);
        const cmat h = half * dir * half;
        const double floor = eig_hermitian(e.reference).values.minCoeff();
        const double norm = eig_hermitian(h).values.cwiseAbs().maxCoeff();
        if (norm > 0.0)
            for (double scale : {0.5, 0.005})
                starts.push_back(mat_pow(cmat(e.reference + (scale * floor / norm) * h), 0.5));
    }

    Rng rng(seed);
    double best = 0.0;
    const Eigen::Index coords = 2 * d * d;
    const int total = restarts + static_cast<int>(starts.size());
    for (int r = 0; r < total; ++r) {
        const auto local = static_cast<std::size_t>(r);
        cmat a = local < starts.size() ? starts[local] : ginibre(d, d, rng);
        double cur = ratio(a);
        double step = 0.5;
        bool moved_this_pass = false;
        for (int it = 0; it < iterations; ++it) {
            const Eigen::Index c = it % coords;
            const Eigen::Index entry = c / 2;
            const cplx dir = (c % 2 == 0) ? cplx(step, 0.0) : cplx(0.0, step);
            for (double sign : {1.0, -1.0}) {
                cmat trial = a;
                trial(entry % d, entry / d) += sign * dir;
                const double v = ratio(trial);
                if (v > cur) {
                    cur = v;
                    a = trial;
                    moved_this_pass = true;
                    break;
                }
            }
            if (c == coords - 1) {
                if (!moved_this_pass) step *= 0.5;
                moved_this_pass = false;
            }
        }
        best = std::max(best, cur);
    }
    return best;
}

double l2_contraction(const QuantumChannel& phi, const ConditionalExpectation& e,
                      const Tolerances& tol) {
    const auto d = phi.dim();
    const auto f = kms_frame(e.reference, tol);
    const cmat m = f.w * (phi.map * (identity_superop(d) - e.map)) * f.w_inv;
    Eigen::BDCSVD<cmat> svd(m);
    return svd.singularValues()(0);
}

}  // namespace qms
