#include "qms/entropy.hpp"

#include <array>
#include <cmath>

namespace qms {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

struct Simpson {
    const std::function<double(double)>& f;
    double tol;
    int budget;
    int used = 0;

    double step(double a, double b, double fa, double fm, double fb, double whole, double eps,
                int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (++used > budget)
            throw QuadratureBudgetExceeded("adaptive Simpson exceeded " +
                                           std::to_string(budget) + " subdivisions");
        if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
            return left + right + delta / 15.0;
        return step(a, m, fa, flm, fm, left, eps / 2, depth - 1) +
               step(m, b, fm, frm, fb, right, eps / 2, depth - 1);
    }
};

double gauss5(const std::function<double(double)>& f, double a, double b, int panels) {
    static constexpr std::array<double, 5> x = {0.0, -0.5384693101056831, 0.5384693101056831,
                                                -0.9061798459386640, 0.9061798459386640};
    static constexpr std::array<double, 5> w = {0.5688888888888889, 0.4786286704993665,
                                                0.4786286704993665, 0.2369268850561891,
                                                0.2369268850561891};
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        for (std::size_t k = 0; k < x.size(); ++k) sum += w[k] * f(c + 0.5 * h * x[k]);
    }
    return 0.5 * h * sum;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& q) {
    if (!(q.abs_tol > 0.0)) throw DomainError("quadrature abs_tol must be positive");
    if (q.scheme == QuadratureSpec::Scheme::fixed_gauss) {
        double prev = gauss5(f, a, b, 1);
        for (int panels = 2; panels <= q.max_subdivisions; panels *= 2) {
            const double cur = gauss5(f, a, b, panels);
            if (std::abs(cur - prev) <= q.abs_tol) return cur;
            prev = cur;
        }
        throw QuadratureBudgetExceeded("Gauss-Legendre refinement did not settle within " +
                                       std::to_string(q.max_subdivisions) + " panels");
    }
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    Simpson s{f, q.abs_tol, q.max_subdivisions};
    return s.step(a, b, fa, fm, fb, whole, q.abs_tol, 50);
}

double relative_entropy(const cmat& rho, const cmat& sigma, const Tolerances& tol) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw DimensionMismatch("relative_entropy: operand sizes differ");
    const auto er = eig_hermitian(rho);
    const auto es = eig_hermitian(sigma);
    const auto d = rho.rows();

    cmat support = cmat::Zero(d, d);
    double cross = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        if (es.values(j) <= tol.support) continue;
        const cvec v = es.vectors.col(j);
        support += v * v.adjoint();
        cross += std::log(es.values(j)) * (v.adjoint() * hermitian_part(rho) * v)(0).real();
    }
    const cmat outside = cmat::Identity(d, d) - support;
    const cmat leak = outside * rho * outside;
    if (leak.size() > 0 && leak.operatorNorm() > tol.psd) return infinite_divergence;

    double self = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
        if (er.values(i) > tol.support) self += xlogx(er.values(i));
    return self - cross;
}

double entropy_functional(const cmat& rho, const Tolerances& tol) {
    const auto er = eig_hermitian(rho);
    double h = 0.0;
    for (Eigen::Index i = 0; i < er.values.size(); ++i)
        if (er.values(i) > tol.support) h += xlogx(er.values(i));
    return h;
}

double log_mean_kernel(double a, double b) {
    if (std::abs(a - b) <= 1e-12 * std::max(a, b)) return 1.0 / a;
    return (std::log(a) - std::log(b)) / (a - b);
}

double bkm_metric(const cmat& sigma, const cmat& x, const Tolerances& tol) {
    if (sigma.rows() != x.rows() || sigma.cols() != x.cols())
        throw DimensionMismatch("bkm_metric: operand sizes differ");
    const auto es = eig_hermitian(sigma);
    if (es.values(0) <= tol.support)
        throw SingularReference("bkm_metric: base point is not faithful");
    const cmat xt = es.vectors.adjoint() * x * es.vectors;
    double g = 0.0;
    for (Eigen::Index i = 0; i < xt.rows(); ++i)
        for (Eigen::Index j = 0; j < xt.cols(); ++j)
            g += std::norm(xt(i, j)) * log_mean_kernel(es.values(i), es.values(j));
    return g;
}

double relative_entropy_via_bkm(const cmat& rho, const cmat& sigma, const QuadratureSpec& q,
                                const Tolerances& tol) {
    if (min_eigenvalue(rho) <= tol.support || min_eigenvalue(sigma) <= tol.support)
        throw SingularReference("relative_entropy_via_bkm: states must be faithful");
    const cmat diff = rho - sigma;
    if (max_abs(diff) == 0.0) return 0.0;
    auto integrand = [&](double t) {
        const cmat rt = t * rho + (1.0 - t) * sigma;
        return (1.0 - t) * bkm_metric(rt, diff, tol);
    };
    return integrate(integrand, 0.0, 1.0, q);
}

double k_of_c(double c) {
    if (c <= 1.0 - 1e-6) throw DomainError("k_of_c: c must exceed 1");
    const double u = c - 1.0;
    if (std::abs(u) < 1e-6) return 0.5 - u / 6.0;
    return (c * std::log(c) - c + 1.0) / (u * u);
}

double entropy_production(const Superop& generator, const cmat& reference, const cmat& rho,
                          const Tolerances& tol) {
    if (min_eigenvalue(reference) <= tol.support)
        throw SingularReference("entropy_production: reference is not faithful");
    if (min_eigenvalue(rho) <= tol.support)
        throw SingularReference("entropy_production: state is not faithful");
    const cmat flow = apply_map(adjoint_trace(generator), rho);
    const cmat potential = mat_log(rho, tol) - mat_log(reference, tol);
    return (flow * potential).trace().real();
}

EntropyDerivatives entropy_second_derivative_terms(const cmat& rho, const cmat& d1,
                                                   const cmat& d2, const Tolerances& tol) {
    if (min_eigenvalue(rho) <= tol.support)
        throw SingularReference("entropy derivatives need a faithful state");
    const auto d = rho.rows();
    const cmat shifted = mat_log(rho, tol) + cmat::Identity(d, d);
    EntropyDerivatives out;
    out.first = (d1 * shifted).trace().real();
    out.second = (d2 * shifted).trace().real() + bkm_metric(rho, d1, tol);
    return out;
}

}  // namespace qms
