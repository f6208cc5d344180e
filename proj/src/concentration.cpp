#include "qms/concentration.hpp"

#include <cmath>
#include <random>

#include "qms/random.hpp"

namespace qms {

double weighted_p_norm(const cmat& x, const cmat& reference, double p, const Tolerances& tol) {
    if (x.rows() != reference.rows() || x.cols() != reference.cols())
        throw DimensionMismatch("weighted_p_norm: shapes differ");
    if (!(p >= 1.0)) throw DomainError("weighted_p_norm: p must be at least 1");
    if (min_eigenvalue(reference) <= tol.support)
        throw SingularReference("weighted_p_norm: reference is not faithful");
    if (std::isinf(p)) return x.operatorNorm();

    const cmat w = mat_pow(reference, 1.0 / (2.0 * p), tol);
    const rvec sv = Eigen::BDCSVD<cmat>(w * x * w).singularValues();
    return std::pow(sv.array().pow(p).sum(), 1.0 / p);
}

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_fit: need two points");
    const auto n = static_cast<Eigen::Index>(x.size());
    rvec lx(n), ly(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw DomainError("loglog_fit: values must be positive");
        lx(i) = std::log(x[k]);
        ly(i) = std::log(y[k]);
    }
    const double mx = lx.mean(), my = ly.mean();
    const double sxx = (lx.array() - mx).square().sum();
    if (sxx <= 0.0) throw DomainError("loglog_fit: x values coincide");
    LogLogFit fit;
    fit.slope = ((lx.array() - mx) * (ly.array() - my)).sum() / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        const double rss = (ly.array() - fit.intercept - fit.slope * lx.array()).square().sum();
        fit.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    }
    return fit;
}

ConcentrationReport mlsi_concentration_ratios(const Lindbladian& l, double alpha_lower,
                                              const cmat& x, const std::vector<double>& p_grid) {
    if (!(alpha_lower > 0.0)) throw DomainError("mlsi_concentration_ratios: alpha must be positive");
    if (p_grid.empty()) throw DomainError("mlsi_concentration_ratios: empty p grid");
    const auto e = fixed_point_expectation(l);
    const cmat centered = x - e(x);

    ConcentrationReport rep;
    rep.p_grid = p_grid;
    rep.lipschitz = lipschitz_seminorm(l, x);
    const bool constant = rep.lipschitz <= 1e-12 || max_abs(centered) <= 1e-12;
    for (double p : p_grid) {
        const double r = constant ? 0.0
                                  : alpha_lower * weighted_p_norm(centered, l.reference(), p,
                                                                  l.tolerances()) /
                                        (std::sqrt(p) * rep.lipschitz);
        rep.ratios.push_back(r);
        rep.sup_ratio = std::max(rep.sup_ratio, r);
    }
    if (!constant && p_grid.size() > 1) {
        rep.growth_exponent = loglog_slope(rep.p_grid, rep.ratios);
        rep.bounded = rep.growth_exponent <= 0.05;
    }
    return rep;
}

namespace {

cmat bernstein_summand(Eigen::Index d, double bound, BernsteinSampler sampler, Rng& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    cmat s;
    switch (sampler) {
    case BernsteinSampler::fixed:
        return bound * matrix_unit(d, 0, 0);
    case BernsteinSampler::diagonal: {
        s = cmat::Zero(d, d);
        for (Eigen::Index k = 0; k < d; ++k) s(k, k) = unif(rng);
        break;
    }
    case BernsteinSampler::dense: {
        s.resize(d, d);
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index i = 0; i < d; ++i) s(i, j) = cplx(unif(rng), unif(rng));
        s = hermitian_part(s);
        break;
    }
    }
    const auto es = eig_hermitian(s);
    const double norm = es.values.cwiseAbs().maxCoeff();
    if (norm > bound) s *= bound / norm;
    return s;
}

}  // namespace

BernsteinRecord matrix_bernstein_mc(Eigen::Index d, int n, double bound, int trials,
                                    std::uint64_t seed, BernsteinSampler sampler) {
    if (d < 2 || n < 1 || trials < 2 || !(bound > 0.0))
        throw DomainError("matrix_bernstein_mc: need d >= 2, n >= 1, trials >= 2, M > 0");
    Rng rng(seed);
    std::vector<cmat> sums;
    sums.reserve(static_cast<std::size_t>(trials));
    cmat mean_s = cmat::Zero(d, d);
    cmat mean_sq = cmat::Zero(d, d);
    for (int t = 0; t < trials; ++t) {
        cmat z = cmat::Zero(d, d);
        for (int k = 0; k < n; ++k) {
            const cmat s = bernstein_summand(d, bound, sampler, rng);
            z += s;
            mean_s += s;
            mean_sq += s * s;
        }
        sums.push_back(std::move(z));
    }
    const double count = static_cast<double>(n) * trials;
    mean_s /= count;
    mean_sq /= count;

    BernsteinRecord rec;
    rec.d = d;
    rec.n = n;
    rec.trials = trials;
    rec.bound = bound;
    // Independence: EZ = n ES and E(Z - EZ)^2 = n (ES^2 - (ES)^2).
    const cmat ez = static_cast<double>(n) * mean_s;
    rec.v = n * eig_hermitian(hermitian_part(cmat(mean_sq - mean_s * mean_s)))
                    .values.cwiseAbs()
                    .maxCoeff();
    for (const auto& z : sums) {
        const cmat c = z - ez;
        rec.mean_norm += eig_hermitian(hermitian_part(c)).values.cwiseAbs().maxCoeff();
    }
    rec.mean_norm /= trials;
    rec.ratio = rec.mean_norm / std::sqrt((rec.v + bound * bound) * std::log(static_cast<double>(d)));
    return rec;
}

}  // namespace qms
