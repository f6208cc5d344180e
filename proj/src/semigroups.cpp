#include "qms/semigroups.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qms/entropy.hpp"
#include "qms/random.hpp"

namespace qms {

namespace {

constexpr double kernel_cutoff = 1e-9;

Superop gksl_term(const cmat& v) {
    const cmat vv = v.adjoint() * v;
    return left_mul(vv) + right_mul(vv) - 2.0 * sandwich(cmat(v.adjoint()), v);
}

double kms_inner(const Lindbladian& l, const cmat& x, const cmat& y) {
    const auto& w = l.frame().w;
    return (vec(x).adjoint() * (w * (w * vec(y))))(0).real();
}

}  // namespace

Lindbladian::Lindbladian(std::vector<cmat> jumps, std::vector<double> bohr_weights,
                         cmat reference, const Tolerances& tol)
    : jumps_(std::move(jumps)), weights_(std::move(bohr_weights)),
      reference_(std::move(reference)), tol_(tol) {
    const auto d = reference_.rows();
    if (reference_.cols() != d) throw DimensionMismatch("Lindbladian: reference not square");
    if (jumps_.size() != weights_.size())
        throw DimensionMismatch("Lindbladian: one Bohr weight per jump required");
    if (!is_density(reference_, tol_))
        throw DomainError("Lindbladian: reference is not a density matrix");

    for (std::size_t j = 0; j < jumps_.size(); ++j) {
        const cmat& v = jumps_[j];
        if (v.rows() != d || v.cols() != d)
            throw DimensionMismatch("Lindbladian: jump " + std::to_string(j) + " has wrong shape");
        const double scale = std::max(1e-300, max_abs(v));
        const cmat mod = reference_ * v - std::exp(-weights_[j]) * v * reference_;
        if (max_abs(mod) > 1e-8 * scale * std::max(1.0, max_abs(reference_)))
            throw ModularMismatch("jump " + std::to_string(j) +
                                  " is not a modular eigenvector for its Bohr weight");
        const bool paired = std::any_of(jumps_.begin(), jumps_.end(), [&](const cmat& u) {
            const auto k = &u - jumps_.data();
            return std::abs(weights_[k] + weights_[j]) <= 1e-10 &&
                   max_abs(u - v.adjoint()) <= 1e-12 * scale;
        });
        if (!paired)
            throw ModularMismatch("jump " + std::to_string(j) +
                                  " has no adjoint partner with negated weight");
    }

    generator_ = Superop::Zero(d * d, d * d);
    for (std::size_t j = 0; j < jumps_.size(); ++j)
        generator_ += std::exp(-weights_[j] / 2.0) * gksl_term(jumps_[j]);
    diagonalize();
}

Lindbladian Lindbladian::from_generator(Superop generator, cmat reference, const Tolerances& tol) {
    Lindbladian l;
    l.reference_ = std::move(reference);
    l.generator_ = std::move(generator);
    l.tol_ = tol;
    if (superop_dim(l.generator_) != l.reference_.rows())
        throw DimensionMismatch("Lindbladian: generator and reference sizes differ");
    if (!is_density(l.reference_, tol))
        throw DomainError("Lindbladian: reference is not a density matrix");
    l.diagonalize();
    return l;
}

void Lindbladian::diagonalize() {
    const auto d = dim();
    const cmat id = cmat::Identity(d, d);
    if (max_abs(apply_map(generator_, id)) > 1e-10 * std::max(1.0, max_abs(generator_)))
        throw DomainError("Lindbladian: generator does not annihilate the identity");
    frame_ = kms_frame(reference_, tol_);
    const cmat m = frame_.w * generator_ * frame_.w_inv;
    if (asymmetry(m) > 1e-8 * std::max(1.0, max_abs(m)))
        throw NotSymmetric("Lindbladian: generator is not GNS-symmetric to its reference");
    auto es = eig_hermitian(m);
    spectrum_ = std::move(es.values);
    vectors_ = std::move(es.vectors);
    if (!is_gns_symmetric(semigroup(0.1), reference_))
        throw NotSymmetric("Lindbladian: exp(-0.1 L) fails the GNS check");
}

Superop Lindbladian::semigroup(double t) const {
    if (t < 0.0) throw DomainError("semigroup time must be nonnegative");
    const rvec decay = (-t * spectrum_.array()).exp().matrix();
    return frame_.w_inv * (vectors_ * decay.cast<cplx>().asDiagonal() * vectors_.adjoint()) *
           frame_.w;
}

QuantumChannel evolve(const Lindbladian& l, double t) {
    return make_channel(l.semigroup(t), l.reference(), l.tolerances());
}

ConditionalExpectation fixed_point_expectation(const Lindbladian& l) {
    const auto& spec = l.kms_spectrum();
    Eigen::Index k = 0;
    while (k < spec.size() && spec(k) < kernel_cutoff) ++k;
    const cmat cols = l.kms_vectors().leftCols(k);
    auto e = expectation_from_kms_range(cols, l.reference(), l.tolerances());
    verify_expectation(e, l.tolerances());
    for (double t : {0.1, 1.0}) {
        const Superop tt = l.semigroup(t);
        const double drift =
            std::max(max_abs(tt * e.map - e.map), max_abs(e.map * tt - e.map));
        if (drift > 1e-8)
            throw AlgebraClosureFailure("fixed_point_expectation: T_t E != E at t = " +
                                        std::to_string(t));
    }
    return e;
}

double spectral_gap(const Lindbladian& l) {
    const auto& spec = l.kms_spectrum();
    for (Eigen::Index k = 0; k < spec.size(); ++k)
        if (spec(k) >= kernel_cutoff) return spec(k);
    return 0.0;
}

double dirichlet_form(const Lindbladian& l, const cmat& x) {
    return kms_inner(l, x, apply_map(l.generator(), x));
}

cmat gradient_form(const Lindbladian& l, const cmat& x, const cmat& y) {
    const cmat xs = x.adjoint();
    const auto& g = l.generator();
    return 0.5 * (apply_map(g, xs) * y + xs * apply_map(g, y) - apply_map(g, cmat(xs * y)));
}

double lipschitz_seminorm(const Lindbladian& l, const cmat& x) {
    const cmat xs = x.adjoint();
    const double a = gradient_form(l, x, x).operatorNorm();
    const double b = gradient_form(l, xs, xs).operatorNorm();
    return std::sqrt(std::max(a, b));
}

double entropy_production(const Lindbladian& l, const cmat& rho) {
    return entropy_production(l.generator(), l.reference(), rho, l.tolerances());
}

TcbSearch t_cb_search(const Lindbladian& l, const ConditionalExpectation& e, double eps,
                      double t_hint, double rel_width, double tol) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("t_cb: eps must lie in (0, 1)");
    const CpSandwich sandwich(e.map, tol);
    TcbSearch out;
    auto holds = [&](double t) {
        ++out.evaluations;
        return sandwich.check(l.semigroup(t), eps).holds();
    };

    if (holds(0.0)) return out;  // E = id
    if (t_hint <= 0.0) {
        const double gap = spectral_gap(l);
        if (gap <= 0.0) throw BracketNotFound("t_cb: generator has no spectral gap");
        t_hint = 1.0 / gap;
    }

    double lo = 0.0, hi = t_hint;
    if (holds(hi)) {
        while (hi > 1e-12 * t_hint && holds(hi / 2)) hi /= 2;
        lo = hi / 2;
    } else {
        const double limit = std::ldexp(t_hint, 20);
        do {
            lo = hi;
            hi *= 2;
            if (hi > limit)
                throw BracketNotFound("t_cb: sandwich not reached before t = " +
                                      std::to_string(limit));
        } while (!holds(hi));
    }
    const double lo0 = lo, hi0 = hi;

    for (int it = 0; it < 60 && hi - lo > rel_width * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (holds(mid) ? hi : lo) = mid;
    }
    out.lo = lo;
    out.hi = hi;
    out.value = 0.5 * (lo + hi);

    // Probe the initial bracket: a threshold predicate is false below lo and true above hi.
    out.monotone = !holds(lo0) && holds(hi0);
    for (int k = 1; k <= 8; ++k) {
        const double t = lo0 + (hi0 - lo0) * k / 9.0;
        if (t < lo && holds(t)) out.monotone = false;
        if (t > hi && !holds(t)) out.monotone = false;
    }
    return out;
}

double cb_index(const ConditionalExpectation& e, const std::optional<Superop>& ambient,
                double rel_tol) {
    const auto d = e.dim();
    const Superop id = ambient ? *ambient : identity_superop(d);
    const CpSandwich sandwich(e.map);
    double leak = 0.0;
    const cmat z = sandwich.normalized_choi(id, &leak);
    if (leak > 1e-10)
        throw BracketNotFound("cb_index: ambient map is not dominated by any multiple of E");
    // ambient <=cp c E  <=>  c - z >= 0 in the normalized frame
    auto dominated = [&](double c) {
        return is_psd(cmat(c * cmat::Identity(z.rows(), z.cols()) - z), 1e-12 * c);
    };
    double lo = 0.0, hi = 1.0;
    while (!dominated(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > 1e300) throw BracketNotFound("cb_index: no finite index");
    }
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        (dominated(mid) ? hi : lo) = mid;
    }
    return hi;
}

Trajectory decay_check(const Lindbladian& l, const ConditionalExpectation& e, const cmat& rho,
                       const std::vector<double>& times, double tcb) {
    const auto& tol = l.tolerances();
    const cmat r = regularize_state(rho, l.reference(), 1e-9, tol);
    const cmat target = e.on_state(r);
    const double d0 = relative_entropy(r, target, tol);
    Trajectory tr;
    double prev = d0;
    for (double t : times) {
        const cmat rt = apply_map(adjoint_trace(l.semigroup(t)), r);
        const double dt = relative_entropy(rt, target, tol);
        const double env = std::exp(-t / tcb) * d0;
        tr.times.push_back(t);
        tr.divergence.push_back(dt);
        tr.envelope.push_back(env);
        if (dt > env + 1e-9) tr.bound_holds = false;
        if (dt > prev + 1e-9) tr.monotone = false;
        prev = dt;
    }
    return tr;
}

PoincareCheck poincare_check(const Lindbladian& l, const ConditionalExpectation& e,
                             const cmat& x) {
    const cmat y = x - e(x);
    PoincareCheck c;
    c.lhs = spectral_gap(l) * kms_inner(l, y, y);
    c.rhs = dirichlet_form(l, x);
    return c;
}

BoundReport mlsi_lower_bounds(const Lindbladian& l, const std::string& model, double eps,
                              std::uint64_t seed, double rel_width) {
    BoundReport rep;
    rep.model = model;
    rep.d = l.dim();
    rep.lambda = spectral_gap(l);
    if (rep.lambda <= 0.0) {
        rep.no_decay = true;
        rep.t_cb = std::numeric_limits<double>::infinity();
        rep.decay_pass = true;
        rep.consistency_pass = true;
        return rep;
    }
    const auto e = fixed_point_expectation(l);
    const auto search = t_cb_search(l, e, eps, 0.0, rel_width);
    rep.t_cb = search.value;
    rep.monotone = search.monotone;
    rep.c_cb = cb_index(e);
    rep.bound_tcb = 1.0 / (2.0 * rep.t_cb);
    rep.bound_index = rep.lambda / (2.0 * std::log(10.0 * rep.c_cb));
    rep.best_lower = std::max(rep.bound_tcb, rep.bound_index);
    const double tcb_ceiling = std::log(10.0 * rep.c_cb) / rep.lambda;
    rep.consistency_pass = rep.t_cb <= tcb_ceiling + 1e-6 && rep.best_lower <= rep.lambda + 1e-9;
    rep.diagnostics["t_cb_ceiling"] = tcb_ceiling;
    rep.diagnostics["t_cb_evaluations"] = search.evaluations;

    // Discrete snapshot T_{t_cb/4} = Phi with Phi*Phi = T_{t_cb/2}; k_cb <= 2.
    const auto snapshot = evolve(l, search.hi / 4.0);
    try {
        rep.k_cb_snapshot = k_cb(snapshot, e, eps, 64);
    } catch (const NotReached&) {
    }

    Rng rng(seed);
    std::vector<double> times;
    for (int k = 1; k <= 8; ++k) times.push_back(rep.t_cb * k / 4.0);
    rep.decay_pass = true;
    for (int s = 0; s < 4; ++s) {
        const auto tr = decay_check(l, e, random_state(rep.d, rng), times, rep.t_cb);
        rep.decay_pass = rep.decay_pass && tr.pass();
    }
    return rep;
}

}  // namespace qms
