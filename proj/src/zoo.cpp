#include "qms/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "qms/random.hpp"

namespace qms {

namespace {

constexpr double pi = std::numbers::pi;

// S = D^{1/2} L D^{-1/2} is symmetric for a reversible chain; keep its
// eigendecomposition so that e^{-tL} costs one product per time.
struct SymmetrizedChain {
    rvec sqrt_mu;
    rvec spectrum;
    rmat vectors;

    explicit SymmetrizedChain(const ClassicalGenerator& g) {
        sqrt_mu = g.stationary.cwiseSqrt();
        rmat s = sqrt_mu.asDiagonal() * g.generator * sqrt_mu.cwiseInverse().asDiagonal();
        s = 0.5 * (s + s.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<rmat> es(s);
        if (es.info() != Eigen::Success) throw NonConvergence("classical chain eigensolver failed");
        spectrum = es.eigenvalues();
        vectors = es.eigenvectors();
    }

    // h_t(u, v) = p_t(u, v) / mu_v
    rmat density_kernel(double t) const {
        const rvec decay = (-t * spectrum.array()).exp().matrix();
        const rmat sym = vectors * decay.asDiagonal() * vectors.transpose();
        const rvec inv = sqrt_mu.cwiseInverse();
        return inv.asDiagonal() * sym * inv.asDiagonal();
    }
};

void require_ergodic(const ClassicalGenerator& g) {
    const rvec spec = classical_spectrum(g);
    if (spec.size() < 2 || spec(1) < 1e-9)
        throw NotErgodic("classical chain has more than one invariant measure");
}

// Smallest t with pred(t), assuming pred is a threshold; pred(0) false.
template <typename Pred>
double bisect_threshold(Pred&& pred, double hint, double rel_width, int* evaluations = nullptr) {
    int count = 0;
    auto holds = [&](double t) {
        ++count;
        return pred(t);
    };
    double lo = 0.0, hi = hint;
    if (holds(hi)) {
        while (hi > 1e-12 * hint && holds(hi / 2)) hi /= 2;
        lo = hi / 2;
    } else {
        const double limit = std::ldexp(hint, 40);
        do {
            lo = hi;
            hi *= 2;
            if (hi > limit) throw BracketNotFound("threshold not reached");
        } while (!holds(hi));
    }
    for (int it = 0; it < 80 && hi - lo > rel_width * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (holds(mid) ? hi : lo) = mid;
    }
    if (evaluations) *evaluations = count;
    return 0.5 * (lo + hi);
}

rvec thermal_weights(int n, double beta) {
    rvec mu(n);
    for (int j = 0; j < n; ++j) mu(j) = std::exp(-beta * (j - (n - 1) / 2.0));
    return mu / mu.sum();
}

void check_diagonal_reference(const cmat& reference) {
    const cmat off = reference - cmat(reference.diagonal().asDiagonal());
    if (max_abs(off) > 1e-12) throw PreconditionFailed("reference must be diagonal");
}

}  // namespace

// ---- classical chains ----

StochasticKernel make_kernel(rmat kernel) {
    const auto n = kernel.rows();
    if (kernel.cols() != n || n == 0) throw DimensionMismatch("kernel must be square");
    if ((kernel.array() < 0.0).any()) throw DomainError("kernel has negative entries");
    if ((kernel.rowwise().sum().array() - 1.0).abs().maxCoeff() > 1e-12)
        throw DomainError("kernel rows must sum to 1");

    // Stationary vector: kernel of (P^T - I), normalized.
    const rmat a = kernel.transpose() - rmat::Identity(n, n);
    Eigen::JacobiSVD<rmat> svd(a, Eigen::ComputeFullV);
    rvec mu = svd.matrixV().col(n - 1);
    mu /= mu.sum();
    if ((mu.array() < -1e-12).any()) throw NotErgodic("kernel has no positive stationary vector");
    if ((mu.transpose() * kernel - mu.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw NotErgodic("stationary vector is not unique");

    StochasticKernel k{std::move(kernel), std::move(mu), true};
    for (Eigen::Index u = 0; u < n && k.reversible; ++u)
        for (Eigen::Index v = 0; v < n; ++v)
            if (std::abs(k.stationary(u) * k.kernel(u, v) - k.stationary(v) * k.kernel(v, u)) >
                1e-10) {
                k.reversible = false;
                break;
            }
    return k;
}

StochasticKernel cyclic_walk(int d) {
    if (d < 3) throw DomainError("cyclic_walk: d >= 3 required");
    rmat k = rmat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        k(i, (i + 1) % d) = 0.5;
        k(i, (i + d - 1) % d) = 0.5;
    }
    return make_kernel(std::move(k));
}

rvec cyclic_walk_spectrum(int d) {
    rvec s(d);
    for (int j = 0; j < d; ++j) s(j) = std::cos(2.0 * pi * j / d);
    return s;
}

ClassicalGenerator classical_generator(rmat generator, rvec stationary) {
    const auto n = generator.rows();
    if (generator.cols() != n || stationary.size() != n)
        throw DimensionMismatch("classical generator shape");
    if ((stationary.array() <= 0.0).any() || std::abs(stationary.sum() - 1.0) > 1e-10)
        throw DomainError("stationary vector must be a faithful probability vector");
    const double scale = std::max(1.0, generator.cwiseAbs().maxCoeff());
    if (generator.rowwise().sum().cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw DomainError("generator rows must sum to zero");
    for (Eigen::Index u = 0; u < n; ++u)
        for (Eigen::Index v = 0; v < n; ++v) {
            if (u != v && generator(u, v) > 1e-14 * scale)
                throw DomainError("generator off-diagonal entries must be nonpositive");
            if (std::abs(stationary(u) * generator(u, v) - stationary(v) * generator(v, u)) >
                1e-10 * scale)
                throw NotSymmetric("generator is not reversible for the stationary vector");
        }
    return {std::move(generator), std::move(stationary)};
}

ClassicalGenerator cyclic_generator(int d) {
    const auto k = cyclic_walk(d);
    return classical_generator(2.0 * (rmat::Identity(d, d) - k.kernel), k.stationary);
}

ClassicalGenerator graph_laplacian(int n, const std::vector<WeightedEdge>& edges) {
    if (n < 1) throw DomainError("graph_laplacian: empty graph");
    rmat l = rmat::Zero(n, n);
    for (const auto& e : edges) {
        if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n || e.u == e.v)
            throw DomainError("graph_laplacian: bad edge");
        if (!(e.weight > 0.0)) throw DomainError("graph_laplacian: weights must be positive");
        l(e.u, e.v) -= e.weight;
        l(e.v, e.u) -= e.weight;
        l(e.u, e.u) += e.weight;
        l(e.v, e.v) += e.weight;
    }
    return classical_generator(std::move(l), rvec::Constant(n, 1.0 / n));
}

rvec classical_spectrum(const ClassicalGenerator& g) { return SymmetrizedChain(g).spectrum; }

double classical_gap(const ClassicalGenerator& g) {
    const rvec s = classical_spectrum(g);
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) >= 1e-9) return s(k);
    return 0.0;
}

double classical_sup_distance(const ClassicalGenerator& g, double t) {
    const rmat h = SymmetrizedChain(g).density_kernel(t);
    return (h.array() - 1.0).abs().maxCoeff();
}

double classical_mixing_time(const ClassicalGenerator& g, double eps) {
    if (!(eps > 0.0)) throw DomainError("classical_mixing_time: eps must be positive");
    require_ergodic(g);
    const SymmetrizedChain chain(g);
    auto mixed = [&](double t) {
        return (chain.density_kernel(t).array() - 1.0).abs().maxCoeff() <= eps;
    };
    if (mixed(0.0)) return 0.0;
    return bisect_threshold(mixed, 1.0 / chain.spectrum(1), 1e-10);
}

double cyclic_heat_kernel_bound(int d, double t) {
    if (!(t > 0.0)) throw DomainError("cyclic_heat_kernel_bound: t must be positive");
    const double dd = static_cast<double>(d) * d;
    return 2.0 * std::exp(-4.0 * t / dd) * std::sqrt(1.0 + dd / (4.0 * t));
}

ClassicalBounds classical_bounds(const ClassicalGenerator& g, double t0, double c0) {
    require_ergodic(g);
    if (t0 < 0.0 || c0 < 1.0) throw DomainError("classical_bounds: need t0 >= 0 and C0 >= 1");
    ClassicalBounds b;
    b.lambda = classical_gap(g);
    b.t0 = t0;
    b.c0 = c0;
    b.cmlsi = b.lambda / (2.0 * (b.lambda * t0 + std::log(c0) + std::log(10.0)));
    b.diaconis = b.lambda / (b.lambda * t0 + std::log(c0) + 1.0);
    b.loglog = 4.0 + std::log(std::log(g.stationary.cwiseInverse().maxCoeff()));
    if (b.cmlsi > b.lambda * (1.0 + 1e-12))
        throw PreconditionFailed("classical_bounds: CMLSI bound exceeds the spectral gap");
    return b;
}

ClassicalBounds classical_bounds(const ClassicalGenerator& g) {
    return classical_bounds(g, 0.0, g.stationary.cwiseInverse().maxCoeff());
}

Lindbladian embed_classical(const ClassicalGenerator& g, double dephasing) {
    const auto n = g.generator.rows();
    const rvec& mu = g.stationary;
    if (dephasing < 0.0) dephasing = g.generator.diagonal().maxCoeff();

    std::vector<cmat> jumps;
    std::vector<double> weights;
    // rate b -> a: jump c e_ab with w = ln(mu_b / mu_a) and c^2 = q sqrt(mu_b / mu_a) / 2
    for (Eigen::Index b = 0; b < n; ++b)
        for (Eigen::Index a = 0; a < n; ++a) {
            const double q = -g.generator(b, a);
            if (a == b || q <= 0.0) continue;
            const double ratio = mu(b) / mu(a);
            jumps.push_back(std::sqrt(q * std::sqrt(ratio) / 2.0) * matrix_unit(n, a, b));
            weights.push_back(std::log(ratio));
        }
    if (dephasing > 0.0)
        for (Eigen::Index k = 0; k < n; ++k) {
            jumps.push_back(std::sqrt(dephasing) * matrix_unit(n, k, k));
            weights.push_back(0.0);
        }
    return Lindbladian(std::move(jumps), std::move(weights),
                       cmat(mu.cast<cplx>().asDiagonal()));
}

Lindbladian cyclic_laplacian(int d) { return embed_classical(cyclic_generator(d)); }

// ---- quantum models ----

Lindbladian depolarizing(Eigen::Index d, const cmat& reference) {
    if (reference.rows() != d || reference.cols() != d)
        throw DimensionMismatch("depolarizing: reference has the wrong size");
    const auto es = eig_hermitian(reference);
    if (es.values.minCoeff() <= 0.0) throw SingularReference("depolarizing: reference not faithful");
    const cmat& u = es.vectors;
    const rvec& mu = es.values;

    // Matrix units of the reference eigenbasis with c^2 = sqrt(mu_k mu_l)/2 give
    // L = id - E_phi.
    std::vector<cmat> jumps;
    std::vector<double> weights;
    for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l) {
            const double c = std::sqrt(std::sqrt(mu(k) * mu(l)) / 2.0);
            jumps.push_back(c * u * matrix_unit(d, k, l) * u.adjoint());
            weights.push_back(std::log(mu(l) / mu(k)));
        }
    // Rotated units are only adjoint to each other up to rounding; pair them exactly.
    for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = k; l < d; ++l) {
            const auto kl = static_cast<std::size_t>(k * d + l);
            const auto lk = static_cast<std::size_t>(l * d + k);
            if (k == l)
                jumps[kl] = hermitian_part(jumps[kl]);
            else
                jumps[lk] = jumps[kl].adjoint();
        }
    return Lindbladian(std::move(jumps), std::move(weights), reference);
}

GraphModel thermal_path(int n, double beta, const std::optional<std::vector<double>>& weights) {
    if (n < 2) throw DomainError("thermal_path: n >= 2 required");
    if (weights && weights->size() != static_cast<std::size_t>(n - 1))
        throw DimensionMismatch("thermal_path: one weight per edge required");
    GraphModel g;
    g.n = n;
    g.stationary = thermal_weights(n, beta);
    for (int j = 0; j + 1 < n; ++j) {
        const double w = weights ? (*weights)[j] : 1.0;
        if (!(w > 0.0)) throw DomainError("thermal_path: weights must be positive");
        g.edges.push_back({j, j + 1, w, std::log(g.stationary(j) / g.stationary(j + 1))});
    }
    return g;
}

Lindbladian graph_lindbladian(const GraphModel& g) {
    const int n = g.n;
    std::vector<cmat> jumps;
    std::vector<double> weights;
    // Twice the edge term e^{beta_rs/2} w (e_ss x + x e_ss - 2 e_sr x e_rs) plus its mirror,
    // which is what makes L(e_rs) = gamma_rs e_rs with the general gamma formula:
    // jump sqrt(2w) e_rs with Bohr weight -beta_rs and its adjoint.
    for (const auto& e : g.edges) {
        const double c = std::sqrt(2.0 * e.weight);
        jumps.push_back(c * matrix_unit(n, e.r, e.s));
        weights.push_back(-e.beta);
        jumps.push_back(c * matrix_unit(n, e.s, e.r));
        weights.push_back(e.beta);
    }
    return Lindbladian(std::move(jumps), std::move(weights),
                       cmat(g.stationary.cast<cplx>().asDiagonal()));
}

Lindbladian nc_birth_death(int n, double beta, const std::optional<std::vector<double>>& weights) {
    const auto g = thermal_path(n, beta, weights);
    auto l = graph_lindbladian(g);

    const auto m = matrix_unit_structure(g);
    const auto& gen = l.generator();
    const double scale = std::max(1.0, max_abs(gen));
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
            const cmat image = apply_map(gen, matrix_unit(n, r, s));
            if (r == s) {
                const cmat off = image - cmat(image.diagonal().asDiagonal());
                if (max_abs(off) > 1e-10 * scale)
                    throw AlgebraClosureFailure("birth-death: diagonal algebra not invariant");
            } else if (max_abs(image - m.gammas(r, s) * matrix_unit(n, r, s)) > 1e-10 * scale) {
                throw AlgebraClosureFailure("birth-death: e_rs is not an eigenvector with gamma_rs");
            }
        }
    if (l.kms_spectrum().size() > 1 && l.kms_spectrum()(1) < 1e-9)
        throw NotErgodic("birth-death: kernel larger than the scalars");
    return l;
}

MatrixUnitModel matrix_unit_structure(const GraphModel& g) {
    const int n = g.n;
    rmat gen = rmat::Zero(n, n);
    rmat gammas = rmat::Zero(n, n);
    // Jump c e_ab with Bohr weight w contributes k = e^{-w/2} c^2: rate b -> a of 2k
    // and k to gamma_rs for each of r, s equal to b.
    auto add = [&](int a, int b, double k) {
        gen(b, b) += 2.0 * k;
        gen(b, a) -= 2.0 * k;
        for (int r = 0; r < n; ++r) {
            if (r == b) continue;
            gammas(b, r) += k;
            gammas(r, b) += k;
        }
    };
    for (const auto& e : g.edges) {
        add(e.r, e.s, std::exp(e.beta / 2.0) * 2.0 * e.weight);
        add(e.s, e.r, std::exp(-e.beta / 2.0) * 2.0 * e.weight);
    }
    return {classical_generator(std::move(gen), g.stationary), std::move(gammas)};
}

MatrixUnitModel matrix_unit_structure(const ClassicalGenerator& g, double dephasing) {
    const auto n = g.generator.rows();
    if (dephasing < 0.0) dephasing = g.generator.diagonal().maxCoeff();
    rmat gammas(n, n);
    const rvec exit = g.generator.diagonal();
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index s = 0; s < n; ++s)
            gammas(r, s) = r == s ? 0.0 : 0.5 * (exit(r) + exit(s)) + 2.0 * dephasing;
    return {g, std::move(gammas)};
}

MatrixUnitModel matrix_unit_structure(const Lindbladian& l) {
    const auto n = l.dim();
    check_diagonal_reference(l.reference());
    rmat gen = rmat::Zero(n, n);
    rmat gammas = rmat::Zero(n, n);
    for (std::size_t j = 0; j < l.jumps().size(); ++j) {
        const cmat& v = l.jumps()[j];
        Eigen::Index a = 0, b = 0;
        const double peak = v.cwiseAbs().maxCoeff(&a, &b);
        if (max_abs(cmat(v - v(a, b) * matrix_unit(n, a, b))) > 1e-12 * std::max(1.0, peak))
            throw PreconditionFailed("matrix_unit_structure: jump is not a matrix unit");
        const double k = std::exp(-l.bohr_weights()[j] / 2.0) * peak * peak;
        if (a != b) {
            gen(b, b) += 2.0 * k;
            gen(b, a) -= 2.0 * k;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == b) continue;
            gammas(b, r) += k;
            gammas(r, b) += k;
        }
    }
    const rvec mu = l.reference().diagonal().real();
    return {classical_generator(std::move(gen), mu), std::move(gammas)};
}

BdDecomposition bd_decomposition_bound(const MatrixUnitModel& m, double t) {
    if (t < 0.0) throw DomainError("bd_decomposition_bound: t must be nonnegative");
    const rvec& mu = m.diagonal.stationary;
    const auto n = mu.size();
    rmat a = rmat::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index s = 0; s < n; ++s)
            if (r != s) a(r, s) = std::exp(-m.gammas(r, s) * t) / std::sqrt(mu(r) * mu(s));
    BdDecomposition out;
    out.diag_norm = classical_sup_distance(m.diagonal, t);
    if (n > 1) {
        Eigen::SelfAdjointEigenSolver<rmat> es(a, Eigen::EigenvaluesOnly);
        out.offdiag_norm = es.eigenvalues().cwiseAbs().maxCoeff();
    }
    out.schur_bound = a.rowwise().sum().maxCoeff();
    if (out.offdiag_norm > out.schur_bound * (1.0 + 1e-12) + 1e-300)
        throw Error("bd_decomposition_bound: Schur test violated");
    return out;
}

TcbSearch matrix_unit_t_cb(const MatrixUnitModel& m, double eps, double rel_width) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("t_cb: eps must lie in (0, 1)");
    require_ergodic(m.diagonal);
    const SymmetrizedChain chain(m.diagonal);
    const rvec& mu = m.diagonal.stationary;
    const auto n = mu.size();
    const rvec inv_sqrt = mu.cwiseSqrt().cwiseInverse();

    auto holds = [&](double t) {
        const rmat h = chain.density_kernel(t);
        for (Eigen::Index u = 0; u < n; ++u)
            for (Eigen::Index v = 0; v < n; ++v)
                if (u != v && std::abs(h(u, v) - 1.0) > eps) return false;
        rmat block = (-t * m.gammas.array()).exp().matrix();
        block = inv_sqrt.asDiagonal() * block * inv_sqrt.asDiagonal();
        block.diagonal() = h.diagonal();
        Eigen::SelfAdjointEigenSolver<rmat> es(block, Eigen::EigenvaluesOnly);
        const rvec ev = es.eigenvalues();
        return ev.minCoeff() >= 1.0 - eps && ev.maxCoeff() <= 1.0 + eps;
    };

    TcbSearch out;
    const double hint = 1.0 / chain.spectrum(1);
    out.value = bisect_threshold(holds, hint, rel_width, &out.evaluations);
    const double half = 0.5 * rel_width * out.value;
    out.lo = out.value - half;
    out.hi = out.value + half;
    out.monotone = !holds(out.lo) && holds(out.hi);
    return out;
}

BoundReport matrix_unit_bounds(const MatrixUnitModel& m, const std::string& model, double eps,
                               std::uint64_t seed, double rel_width) {
    const rvec& mu = m.diagonal.stationary;
    const auto n = mu.size();
    BoundReport rep;
    rep.model = model;
    rep.d = n;
    rep.lambda = classical_gap(m.diagonal);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index s = 0; s < n; ++s)
            if (r != s) rep.lambda = std::min(rep.lambda, m.gammas(r, s));
    if (rep.lambda <= 0.0) throw NotErgodic("matrix_unit_bounds: no spectral gap");

    const auto search = matrix_unit_t_cb(m, eps, rel_width);
    rep.t_cb = search.value;
    rep.monotone = search.monotone;
    rep.c_cb = mu.cwiseInverse().sum();
    rep.bound_tcb = 1.0 / (2.0 * rep.t_cb);
    rep.bound_index = rep.lambda / (2.0 * std::log(10.0 * rep.c_cb));
    rep.best_lower = std::max(rep.bound_tcb, rep.bound_index);
    const double tcb_ceiling = std::log(10.0 * rep.c_cb) / rep.lambda;
    rep.consistency_pass = rep.t_cb <= tcb_ceiling + 1e-6 && rep.best_lower <= rep.lambda + 1e-9;
    rep.diagnostics["t_cb_ceiling"] = tcb_ceiling;
    rep.diagnostics["t_cb_evaluations"] = search.evaluations;

    // Diagonal states evolve by p_t(v) = sum_u p(u) h_t(u, v) mu_v.
    const SymmetrizedChain chain(m.diagonal);
    auto divergence = [&](const rvec& p) {
        double out = 0.0;
        for (Eigen::Index k = 0; k < n; ++k)
            if (p(k) > 0.0) out += p(k) * (std::log(p(k)) - std::log(mu(k)));
        return out;
    };
    Rng rng(seed);
    std::exponential_distribution<double> expo(1.0);
    rep.decay_pass = true;
    for (int sample = 0; sample < 4; ++sample) {
        rvec p(n);
        for (Eigen::Index k = 0; k < n; ++k) p(k) = expo(rng);
        p /= p.sum();
        const double d0 = divergence(p);
        double prev = d0;
        for (int k = 1; k <= 8; ++k) {
            const double t = rep.t_cb * k / 4.0;
            const rvec pt = (p.transpose() * chain.density_kernel(t)).transpose().cwiseProduct(mu);
            const double dt = divergence(pt);
            if (dt > std::exp(-t / rep.t_cb) * d0 + 1e-9 || dt > prev + 1e-9) rep.decay_pass = false;
            prev = dt;
        }
    }
    return rep;
}

Witness bd_upper_witness(int n, double beta) {
    if (n < 3 || !(beta > 0.0)) throw DomainError("bd_upper_witness: need n >= 3, beta > 0");
    const auto g = thermal_path(n, beta);
    const auto m = matrix_unit_structure(g);
    const rvec& mu = g.stationary;

    // Z = sum_{j=1}^n e^{-beta j}
    double z = 0.0;
    for (int j = 1; j <= n; ++j) z += std::exp(-beta * j);
    Witness w;
    w.divergence = std::log(z) - std::log(static_cast<double>(n)) + beta * (n + 1) / 2.0;

    const rvec rho = rvec::Constant(n, 1.0 / n);
    const rvec flow = m.diagonal.generator.transpose() * rho;
    w.entropy_production = (flow.array() * (rho.array().log() - mu.array().log())).sum();
    w.value = 2.0 * w.entropy_production / w.divergence;
    return w;
}

Witness bd_upper_witness_quantum(int n, double beta) {
    if (n < 3 || !(beta > 0.0)) throw DomainError("bd_upper_witness: need n >= 3, beta > 0");
    const auto l = nc_birth_death(n, beta);
    const cmat rho = maximally_mixed(n);
    Witness w;
    w.divergence = relative_entropy(rho, l.reference(), l.tolerances());
    w.entropy_production = entropy_production(l, rho);
    w.value = 2.0 * w.entropy_production / w.divergence;
    return w;
}

// ---- SU(2) ----

std::array<cmat, 3> su2_generators(double j) {
    const double twice = 2.0 * j;
    if (!(j > 0.0) || std::abs(twice - std::round(twice)) > 1e-12)
        throw DomainError("su2_generators: j must be a positive half-integer");
    const auto d = static_cast<Eigen::Index>(std::lround(twice)) + 1;
    // Basis |j, m> with m = j, j-1, ..., -j.
    cmat jz = cmat::Zero(d, d), jp = cmat::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const double m = j - static_cast<double>(k);
        jz(k, k) = m;
        if (k > 0) jp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    const cmat jm = jp.adjoint();
    const cplx i(0.0, 1.0);
    const cmat jx = 0.5 * (jp + jm);
    const cmat jy = -0.5 * i * (jp - jm);
    std::array<cmat, 3> g{cmat(2.0 * i * jy), cmat(2.0 * i * jx), cmat(2.0 * i * jz)};

    auto bracket = [](const cmat& a, const cmat& b) -> cmat { return a * b - b * a; };
    const double err = std::max({max_abs(cmat(bracket(g[0], g[1]) - 2.0 * g[2])),
                                 max_abs(cmat(bracket(g[1], g[2]) - 2.0 * g[0])),
                                 max_abs(cmat(bracket(g[2], g[0]) - 2.0 * g[1]))});
    if (err > 1e-10) throw AlgebraClosureFailure("su2_generators: Lie brackets fail");
    return g;
}

Lindbladian su2_transference(double j, const std::string& generators) {
    const auto g = su2_generators(j);
    const auto d = g[0].rows();
    std::set<char> chosen;
    for (char c : generators) {
        if (c != 'X' && c != 'Y' && c != 'Z')
            throw DomainError("su2_transference: generators must be drawn from X, Y, Z");
        chosen.insert(c);
    }
    if (chosen.empty()) throw DomainError("su2_transference: no generators");

    // -[dX, [dX, x]] = [V, [V, x]] with V = -i dX Hermitian, Bohr weight 0.
    std::vector<cmat> jumps;
    std::vector<double> weights;
    const cplx i(0.0, 1.0);
    for (char c : chosen) {
        jumps.push_back(hermitian_part(cmat(-i * g[static_cast<std::size_t>(c - 'X')])));
        weights.push_back(0.0);
    }
    return Lindbladian(std::move(jumps), std::move(weights), maximally_mixed(d));
}

// ---- Rothaus ----

RothausRecord rothaus_counterexample(double eta, double r) {
    if (!(eta > 0.0 && eta < 1.0) || !(r > 0.0 && r < 1.0))
        throw DomainError("rothaus_counterexample: eta and r must lie in (0, 1)");
    // Two atoms of mass r and 1 - r, each carrying M_2 with normalized trace.
    const rvec masses = (rvec(4) << r / 2, r / 2, (1 - r) / 2, (1 - r) / 2).finished();
    const cmat weight = masses.cast<cplx>().asDiagonal();
    const cmat weight_sqrt = masses.cwiseSqrt().cast<cplx>().asDiagonal();

    const cmat f = rvec((rvec(4) << 1 + eta, 1 - eta, 1 + eta, 1 - eta).finished())
                       .cast<cplx>()
                       .asDiagonal();
    cmat h = cmat::Zero(4, 4);
    h(0, 1) = h(1, 0) = 1.0 - r;
    h(2, 3) = h(3, 2) = -r;

    RothausRecord rec;
    rec.eta = eta;
    rec.r = r;
    const cmat h2 = h * h;
    rec.h_norm_sq = (weight * h2).trace().real();
    rec.gamma_numeric = bkm_metric(f, cmat(2.0 * weight_sqrt * h));
    rec.gamma_closed = 2.0 / eta * std::log((1 + eta) / (1 - eta)) * rec.h_norm_sq;
    if (std::abs(rec.gamma_numeric - rec.gamma_closed) > 1e-8 * rec.gamma_closed)
        throw Error("rothaus_counterexample: BKM metric disagrees with the closed form");

    const cmat expected = rec.h_norm_sq * cmat::Identity(4, 4);
    rec.rothaus_rhs =
        relative_entropy(cmat(weight * h2), cmat(weight * expected)) + rec.h_norm_sq;
    rec.ratio = rec.rothaus_rhs / rec.gamma_numeric;
    return rec;
}

// ---- random models ----

Lindbladian random_gns_lindbladian(Eigen::Index d, int num_jumps, const cmat& reference,
                                   std::uint64_t seed) {
    if (num_jumps < 1) throw DomainError("random_gns_lindbladian: num_jumps >= 1 required");
    if (reference.rows() != d || reference.cols() != d)
        throw DimensionMismatch("random_gns_lindbladian: reference has the wrong size");
    check_diagonal_reference(reference);
    const rvec mu = reference.diagonal().real();
    if (mu.minCoeff() <= 0.0) throw SingularReference("random_gns_lindbladian: reference not faithful");

    Rng rng(seed);
    std::uniform_int_distribution<Eigen::Index> index(0, d - 1);
    std::uniform_real_distribution<double> strength(0.5, 1.5);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);

    std::vector<cmat> jumps;
    std::vector<double> weights;
    for (int j = 0; j < num_jumps; ++j) {
        const Eigen::Index k = index(rng), l = index(rng);
        const double amp = std::sqrt(strength(rng));
        const cplx c = k == l ? cplx(amp) : std::polar(amp, phase(rng));
        const cmat v = c * matrix_unit(d, k, l);
        jumps.push_back(v);
        weights.push_back(std::log(mu(l) / mu(k)));
        if (k != l) {
            jumps.push_back(v.adjoint());
            weights.push_back(std::log(mu(k) / mu(l)));
        }
    }
    return Lindbladian(std::move(jumps), std::move(weights), reference);
}

}  // namespace qms
