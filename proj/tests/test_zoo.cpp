#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qms/random.hpp"
#include "qms/semigroups.hpp"
#include "qms/zoo.hpp"

using namespace qms;

namespace {

constexpr double pi = std::numbers::pi;

Superop trace_against(const cmat& ref) {
    const auto d = ref.rows();
    return superop_from_action(
        [&](const cmat& x) -> cmat { return (ref * x).trace() * cmat::Identity(d, d); }, d);
}

int kernel_dimension(const Lindbladian& l) {
    int k = 0;
    for (Eigen::Index i = 0; i < l.kms_spectrum().size(); ++i)
        if (std::abs(l.kms_spectrum()(i)) < 1e-9) ++k;
    return k;
}

// Eigenvalue of e_ab under the edge sum, with the GNS convention e^{b_rs} = mu_s / mu_r.
double gamma_oracle(const rvec& mu, int n, int a, int b, double w = 1.0) {
    auto beta = [&](int r, int s) { return std::log(mu(s) / mu(r)); };
    double g = 0.0;
    for (int j : {a - 1, a + 1})
        if (j >= 0 && j < n) g += w * std::exp(beta(a, j) / 2.0);
    for (int k : {b - 1, b + 1})
        if (k >= 0 && k < n) g += w * std::exp(-beta(k, b) / 2.0);
    return 2.0 * g;
}

}  // namespace

TEST_CASE("cyclic walk kernel and spectrum") {
    const auto k4 = cyclic_walk(4);
    const rvec s4 = cyclic_walk_spectrum(4);
    CHECK(s4.minCoeff() == doctest::Approx(-1.0));
    CHECK((k4.kernel.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-15);
    CHECK(k4.reversible);
    CHECK((k4.stationary.array() - 0.25).abs().maxCoeff() < 1e-12);

    for (int d : {4, 5, 7}) {
        const auto k = cyclic_walk(d);
        Eigen::SelfAdjointEigenSolver<rmat> es(k.kernel);
        rvec expect(d);
        for (int j = 0; j < d; ++j) expect(j) = std::cos(2.0 * pi * j / d);
        std::sort(expect.data(), expect.data() + d);
        rvec got = cyclic_walk_spectrum(d);
        std::sort(got.data(), got.data() + d);
        CHECK((es.eigenvalues() - expect).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-15);
    }
    const rvec s5 = cyclic_walk_spectrum(5);
    CHECK(s5(1) == doctest::Approx(std::cos(72.0 * pi / 180.0)));
    CHECK(s5(4) == doctest::Approx(std::cos(72.0 * pi / 180.0)));
    CHECK(s5(2) == doctest::Approx(std::cos(144.0 * pi / 180.0)));
    CHECK_THROWS_AS(cyclic_walk(2), DomainError);
}

TEST_CASE("make_kernel stationarity and reversibility") {
    rmat p(3, 3);
    p << 0.5, 0.5, 0.0,
         0.25, 0.5, 0.25,
         0.0, 0.5, 0.5;
    const auto k = make_kernel(p);
    CHECK(k.reversible);
    CHECK((k.stationary.transpose() * p - k.stationary.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(k.stationary(1) == doctest::Approx(0.5));

    rmat q(3, 3);  // a biased rotation is not reversible
    q << 0.0, 0.9, 0.1,
         0.1, 0.0, 0.9,
         0.9, 0.1, 0.0;
    CHECK_FALSE(make_kernel(q).reversible);

    rmat bad = p;
    bad(0, 0) = 0.6;
    CHECK_THROWS_AS(make_kernel(bad), DomainError);
}

TEST_CASE("cyclic laplacian gap and kernel") {
    CHECK(spectral_gap(cyclic_laplacian(3)) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(spectral_gap(cyclic_laplacian(5)) == doctest::Approx(1.3819660112501).epsilon(1e-10));
    for (int d = 3; d <= 9; ++d) {
        const auto l = cyclic_laplacian(d);
        CHECK(std::abs(spectral_gap(l) - 2.0 * (1.0 - std::cos(2.0 * pi / d))) < 1e-10);
        CHECK(kernel_dimension(l) == 1);
        CHECK(max_abs(apply_map(l.generator(), cmat(cmat::Identity(d, d)))) < 1e-12);
    }
}

TEST_CASE("embedded classical chain acts as the generator on diagonals") {
    rmat gen(3, 3);
    gen << 1.0, -1.0, 0.0,
           -0.5, 1.5, -1.0,
           0.0, -2.0, 2.0;
    // mu proportional to (1, 2, 1) makes this reversible
    const auto g = classical_generator(gen, rvec((rvec(3) << 0.25, 0.5, 0.25).finished()));
    const auto l = embed_classical(g);
    const rvec f = (rvec(3) << 0.3, -1.2, 2.0).finished();
    const cmat image = apply_map(l.generator(), cmat(f.cast<cplx>().asDiagonal()));
    const rvec expect = gen * f;
    CHECK(max_abs(cmat(image - cmat(expect.cast<cplx>().asDiagonal()))) < 1e-12);
    CHECK(spectral_gap(l) == doctest::Approx(classical_gap(g)).epsilon(1e-10));

    const auto m = matrix_unit_structure(l);
    const auto direct = matrix_unit_structure(g);
    CHECK((m.gammas - direct.gammas).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((m.diagonal.generator - gen).cwiseAbs().maxCoeff() < 1e-12);
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s)
            if (r != s) {
                const cmat e = matrix_unit(3, r, s);
                CHECK(max_abs(cmat(apply_map(l.generator(), e) - m.gammas(r, s) * e)) < 1e-12);
            }
}

TEST_CASE("two-state chain mixing time") {
    rmat gen(2, 2);
    gen << 1.0, -1.0, -1.0, 1.0;
    const auto g = classical_generator(gen, rvec::Constant(2, 0.5));
    // p_t(u, v) = (1 +- e^{-2t}) / 2, so h_t - 1 = +-e^{-2t}
    for (double t : {0.1, 0.5, 2.0})
        CHECK(classical_sup_distance(g, t) == doctest::Approx(std::exp(-2.0 * t)).epsilon(1e-12));
    for (double eps : {0.05, 0.1, 0.2})
        CHECK(classical_mixing_time(g, eps) ==
              doctest::Approx(std::log(1.0 / eps) / 2.0).epsilon(1e-8));
    CHECK_THROWS_AS(classical_mixing_time(g, 0.0), DomainError);

    rmat split = rmat::Zero(2, 2);
    CHECK_THROWS_AS(classical_mixing_time(classical_generator(split, rvec::Constant(2, 0.5))),
                    NotErgodic);
}

TEST_CASE("cyclic mixing time against the heat kernel bound") {
    const auto g = cyclic_generator(5);
    const double t = classical_mixing_time(g, 0.1);
    CHECK(std::isfinite(t));
    CHECK(t > 0.0);
    CHECK(classical_mixing_time(g, 0.2) <= t);
    CHECK(classical_mixing_time(g, 0.05) >= t);
    for (int d : {5, 7, 11, 15}) {
        const double dd = double(d) * d;
        CHECK(classical_sup_distance(cyclic_generator(d), dd) <= cyclic_heat_kernel_bound(d, dd));
    }
}

TEST_CASE("classical bounds") {
    const auto g = cyclic_generator(5);
    const double lambda = 2.0 * (1.0 - std::cos(2.0 * pi / 5));
    const double t0 = 25.0;
    // P_t = E + (P_t - E), so the L1 -> Linf norm is at most 1 + the heat kernel bound
    const double c0 = 1.0 + cyclic_heat_kernel_bound(5, t0);
    const auto b = classical_bounds(g, t0, c0);
    CHECK(b.lambda == doctest::Approx(lambda).epsilon(1e-10));
    CHECK(b.cmlsi ==
          doctest::Approx(lambda / (2.0 * (lambda * t0 + std::log(c0) + std::log(10.0)))));
    CHECK(b.diaconis == doctest::Approx(lambda / (lambda * t0 + std::log(c0) + 1.0)));
    CHECK(b.cmlsi <= b.lambda);

    rmat gen(2, 2);
    gen << 1.0, -1.0, -1.0, 1.0;
    const auto two = classical_bounds(classical_generator(gen, rvec::Constant(2, 0.5)));
    CHECK(two.lambda == doctest::Approx(2.0));
    CHECK(two.c0 == doctest::Approx(2.0));
    CHECK(two.cmlsi == doctest::Approx(2.0 / (2.0 * (std::log(2.0) + std::log(10.0)))));
    CHECK(two.diaconis == doctest::Approx(2.0 / (std::log(2.0) + 1.0)));
    CHECK(two.loglog == doctest::Approx(4.0 + std::log(std::log(2.0))));
    CHECK_THROWS_AS(classical_bounds(g, 0.0, 0.5), DomainError);
}

TEST_CASE("depolarizing semigroup") {
    Rng rng(41);
    for (Eigen::Index d : {2, 3, 4}) {
        const cmat ref = random_state(d, rng);
        const auto l = depolarizing(d, ref);
        CHECK(spectral_gap(l) == doctest::Approx(1.0).epsilon(1e-10));
        const Superop e = trace_against(ref);
        CHECK(max_abs(Superop(l.generator() - (identity_superop<cplx>(d) - e))) < 1e-10);
        for (double t : {0.2, 1.5}) {
            const Superop expect =
                std::exp(-t) * identity_superop<cplx>(d) + (1.0 - std::exp(-t)) * e;
            CHECK(max_abs(Superop(evolve(l, t).map - expect)) < 1e-10);
        }
    }
    CHECK_THROWS_AS(depolarizing(2, cmat(cmat::Identity(3, 3) / 3.0)), DimensionMismatch);
    cmat singular = cmat::Zero(2, 2);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(depolarizing(2, singular), SingularReference);
}

TEST_CASE("depolarizing decay rate on samples") {
    Rng rng(5);
    const cmat ref = random_state(3, rng);
    const auto l = depolarizing(3, ref);
    for (int sample = 0; sample < 10; ++sample) {
        const cmat rho = random_state(3, rng);
        const double d0 = oracle::relative_entropy(rho, ref);
        for (double t : {0.25, 0.5, 1.0, 2.0}) {
            const cmat rt = evolve(l, t).on_state(rho);
            CHECK(oracle::relative_entropy(rt, ref) <= std::exp(-t) * d0 + 1e-12);
        }
    }
}

TEST_CASE("birth-death generator structure") {
    for (int n : {2, 3, 4, 6}) {
        for (double beta : {0.0, 0.7, 1.0}) {
            const auto l = nc_birth_death(n, beta);
            const rvec mu = l.reference().diagonal().real();
            CHECK(kernel_dimension(l) == 1);
            for (int j = 0; j + 1 < n; ++j)
                CHECK(mu(j + 1) / mu(j) == doctest::Approx(std::exp(-beta)));
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    const cmat e = matrix_unit(n, a, b);
                    const cmat image = apply_map(l.generator(), e);
                    if (a == b) {
                        CHECK(max_abs(cmat(image - cmat(image.diagonal().asDiagonal()))) < 1e-12);
                    } else {
                        CHECK(max_abs(cmat(image - gamma_oracle(mu, n, a, b) * e)) < 1e-10);
                    }
                }
        }
    }
    // one edge: 4 cosh(beta / 2)
    const auto m2 = matrix_unit_structure(thermal_path(2, 1.3));
    CHECK(m2.gammas(0, 1) == doctest::Approx(4.0 * std::cosh(0.65)));
    CHECK(matrix_unit_structure(thermal_path(2, 0.0)).gammas(0, 1) == doctest::Approx(4.0));
    // interior pairs see two edges on each side
    const auto m5 = matrix_unit_structure(thermal_path(5, 1.0));
    CHECK(m5.gammas(1, 3) == doctest::Approx(8.0 * std::cosh(0.5)));

    CHECK_THROWS_AS(thermal_path(1, 1.0), DomainError);
    CHECK_THROWS_AS(thermal_path(3, 1.0, std::vector<double>{1.0}), DimensionMismatch);
    CHECK_THROWS_AS(thermal_path(3, 1.0, std::vector<double>{1.0, -1.0}), DomainError);
}

TEST_CASE("birth-death is GNS symmetric for the thermal state") {
    const int n = 4;
    const auto l = nc_birth_death(n, 1.0);
    const cmat rho = l.reference();
    const cmat rho_inv = rho.inverse();
    // L commutes with the modular group x -> rho x rho^{-1}
    const Superop modular = sandwich(rho, rho_inv);
    CHECK(max_abs(Superop(l.generator() * modular - modular * l.generator())) < 1e-10);
    // <x, L y>_rho = <L x, y>_rho in the GNS inner product tr(rho x^* y)
    Rng rng(2);
    for (int k = 0; k < 5; ++k) {
        const cmat x = ginibre(n, n, rng), y = ginibre(n, n, rng);
        const cplx lhs = (rho * x.adjoint() * apply_map(l.generator(), y)).trace();
        const cplx rhs = (rho * apply_map(l.generator(), x).adjoint() * y).trace();
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("birth-death at beta zero") {
    for (int n : {3, 4, 6, 8}) {
        const auto l = nc_birth_death(n, 0.0);
        // diagonal part is 4 times the path laplacian, whose gap is 2(1 - cos(pi/n))
        const double classical = 8.0 * (1.0 - std::cos(pi / n));
        const auto m = matrix_unit_structure(thermal_path(n, 0.0));
        CHECK(classical_gap(m.diagonal) == doctest::Approx(classical).epsilon(1e-10));
        double smallest = 1e300;
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s)
                if (r != s) smallest = std::min(smallest, m.gammas(r, s));
        CHECK(spectral_gap(l) == doctest::Approx(std::min(classical, smallest)).epsilon(1e-10));
    }
}

TEST_CASE("matrix unit structure read from jumps") {
    const auto g = thermal_path(5, 0.8, std::vector<double>{1.0, 0.5, 2.0, 1.5});
    const auto from_graph = matrix_unit_structure(g);
    const auto from_jumps = matrix_unit_structure(graph_lindbladian(g));
    CHECK((from_graph.gammas - from_jumps.gammas).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((from_graph.diagonal.generator - from_jumps.diagonal.generator).cwiseAbs().maxCoeff() <
          1e-12);

    Rng rng(9);
    const auto l = depolarizing(2, random_state(2, rng));
    CHECK_THROWS_AS(matrix_unit_structure(l), PreconditionFailed);
}

TEST_CASE("birth-death decomposition bound") {
    const auto g2 = thermal_path(2, 0.0);
    const auto at0 = bd_decomposition_bound(g2, 0.0);
    CHECK(at0.offdiag_norm == doctest::Approx(2.0));
    CHECK(at0.schur_bound == doctest::Approx(2.0));

    const auto late = bd_decomposition_bound(thermal_path(6, 1.0), 200.0);
    CHECK(late.diag_norm < 1e-12);
    CHECK(late.offdiag_norm < 1e-12);
    CHECK(late.schur_bound < 1e-12);

    Rng rng(17);
    std::uniform_real_distribution<double> time(0.0, 3.0), temp(0.0, 2.0);
    for (int n = 2; n <= 12; ++n)
        for (int k = 0; k < 20; ++k) {
            const auto b = bd_decomposition_bound(thermal_path(n, temp(rng)), time(rng));
            CHECK(b.offdiag_norm <= b.schur_bound * (1.0 + 1e-12));
        }
    CHECK_THROWS_AS(bd_decomposition_bound(g2, -1.0), DomainError);
}

TEST_CASE("fast t_cb agrees with the superoperator search") {
    {
        const auto l = nc_birth_death(4, 1.0);
        const auto e = fixed_point_expectation(l);
        const double full = t_cb(l, e, 0.1);
        const double fast = matrix_unit_t_cb(matrix_unit_structure(l), 0.1).value;
        CHECK(fast == doctest::Approx(full).epsilon(1e-5));
    }
    {
        const auto l = cyclic_laplacian(5);
        const double full = t_cb(l, fixed_point_expectation(l), 0.1);
        const auto search = matrix_unit_t_cb(matrix_unit_structure(cyclic_generator(5)), 0.1);
        CHECK(search.value == doctest::Approx(full).epsilon(1e-5));
        CHECK(search.monotone);
        CHECK(search.lo < search.value);
        CHECK(search.value < search.hi);
    }
}

TEST_CASE("matrix unit bound report") {
    const auto m = matrix_unit_structure(thermal_path(6, 1.0));
    const auto rep = matrix_unit_bounds(m, "nc_birth_death");
    CHECK(rep.d == 6);
    CHECK(rep.c_cb == doctest::Approx(m.diagonal.stationary.cwiseInverse().sum()));
    CHECK(rep.bound_tcb == doctest::Approx(1.0 / (2.0 * rep.t_cb)));
    CHECK(rep.best_lower <= rep.lambda);
    CHECK(rep.consistency_pass);
    CHECK(rep.decay_pass);
    CHECK(rep.monotone);
}

TEST_CASE("birth-death witness") {
    const auto w = bd_upper_witness(10, 1.0);
    const auto q = bd_upper_witness_quantum(10, 1.0);
    CHECK(std::abs(w.divergence - q.divergence) < 1e-10);
    CHECK(w.entropy_production == doctest::Approx(q.entropy_production).epsilon(1e-9));
    CHECK(w.value == doctest::Approx(2.0 * w.entropy_production / w.divergence));

    // independent: uniform rho against mu_j ~ e^{-j}
    rvec mu(10);
    for (int j = 0; j < 10; ++j) mu(j) = std::exp(-double(j + 1));
    mu /= mu.sum();
    double div = 0.0;
    for (int j = 0; j < 10; ++j) div += 0.1 * (std::log(0.1) - std::log(mu(j)));
    CHECK(w.divergence == doctest::Approx(div).epsilon(1e-12));

    for (int n : {4, 8, 12}) {
        const auto rep = matrix_unit_bounds(matrix_unit_structure(thermal_path(n, 1.0)), "bd");
        CHECK(rep.bound_tcb <= bd_upper_witness(n, 1.0).value);
    }
    CHECK_THROWS_AS(bd_upper_witness(2, 1.0), DomainError);
    CHECK_THROWS_AS(bd_upper_witness(5, 0.0), DomainError);
}

TEST_CASE("su2 generators and transference") {
    for (double j : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        const auto g = su2_generators(j);
        const auto d = static_cast<Eigen::Index>(2 * j + 1);
        CHECK(g[0].rows() == d);
        auto bracket = [](const cmat& a, const cmat& b) -> cmat { return a * b - b * a; };
        CHECK(max_abs(cmat(bracket(g[0], g[1]) - 2.0 * g[2])) < 1e-10);
        CHECK(max_abs(cmat(bracket(g[1], g[2]) - 2.0 * g[0])) < 1e-10);
        CHECK(max_abs(cmat(bracket(g[2], g[0]) - 2.0 * g[1])) < 1e-10);
        for (const auto& x : g) CHECK(max_abs(cmat(x + x.adjoint())) < 1e-14);
        CHECK(kernel_dimension(su2_transference(j, "XY")) == 1);
    }
    cmat x(2, 2);
    x << 0, 1, -1, 0;
    CHECK(max_abs(cmat(su2_generators(0.5)[0] - x)) < 1e-15);

    rvec spec = su2_transference(0.5, "XY").kms_spectrum();
    std::sort(spec.data(), spec.data() + spec.size());
    const rvec expect = (rvec(4) << 0.0, 4.0, 4.0, 8.0).finished();
    CHECK((spec - expect).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(spectral_gap(su2_transference(0.5, "XYZ")) == doctest::Approx(8.0).epsilon(1e-10));
    CHECK(kernel_dimension(su2_transference(1.0, "Z")) == 3);

    CHECK_THROWS_AS(su2_generators(0.7), DomainError);
    CHECK_THROWS_AS(su2_transference(0.5, "XW"), DomainError);
    CHECK_THROWS_AS(su2_transference(0.5, ""), DomainError);
}

TEST_CASE("rothaus counterexample") {
    const auto rec = rothaus_counterexample(0.5, 0.5);
    CHECK(rec.h_norm_sq == doctest::Approx(0.25));
    CHECK(rec.gamma_closed == doctest::Approx(4.0 * std::log(3.0) * 0.25));
    CHECK(rec.gamma_numeric == doctest::Approx(rec.gamma_closed).epsilon(1e-8));

    // BKM metric through the quadrature oracle on the same 4x4 data
    const double r = 0.3, eta = 0.6;
    const rvec m = (rvec(4) << r / 2, r / 2, (1 - r) / 2, (1 - r) / 2).finished();
    const rvec fd = (rvec(4) << 1 + eta, 1 - eta, 1 + eta, 1 - eta).finished();
    cmat h = cmat::Zero(4, 4);
    h(0, 1) = h(1, 0) = 1.0 - r;
    h(2, 3) = h(3, 2) = -r;
    const cmat f = fd.cast<cplx>().asDiagonal();
    const cmat x = 2.0 * cmat(m.cwiseSqrt().cast<cplx>().asDiagonal()) * h;
    const auto rec2 = rothaus_counterexample(eta, r);
    CHECK(rec2.gamma_numeric == doctest::Approx(oracle::bkm_integral(f, x)).epsilon(1e-6));
    CHECK(rec2.h_norm_sq == doctest::Approx(r * (1 - r)));

    for (double rr : {0.1, 0.5, 0.8})
        CHECK(rothaus_counterexample(0.4, rr).h_norm_sq == doctest::Approx(rr * (1 - rr)));

    double prev = 1e300;
    for (double e : {0.3, 0.5, 0.9, 0.99}) {
        const auto c = rothaus_counterexample(e, 0.5);
        CHECK(c.ratio < prev);
        prev = c.ratio;
    }
    CHECK_THROWS_AS(rothaus_counterexample(1.0, 0.5), DomainError);
    CHECK_THROWS_AS(rothaus_counterexample(0.5, 0.0), DomainError);
}

TEST_CASE("random GNS lindbladian") {
    const cmat thermal = rvec((rvec(2) << 0.7, 0.3).finished()).cast<cplx>().asDiagonal();
    const auto a = random_gns_lindbladian(2, 1, thermal, 3);
    const auto b = random_gns_lindbladian(2, 1, thermal, 3);
    CHECK(max_abs(Superop(a.generator() - b.generator())) == 0.0);
    CHECK(a.jumps().size() == b.jumps().size());
    CHECK(max_abs(apply_map(a.generator(), cmat(cmat::Identity(2, 2)))) < 1e-14);
    CHECK(max_abs(apply_map(adjoint_trace(a.generator()), thermal)) < 1e-14);

    const auto tracial = random_gns_lindbladian(4, 5, maximally_mixed(4), 8);
    for (double w : tracial.bohr_weights()) CHECK(w == 0.0);
    CHECK(asymmetry(tracial.generator()) < 1e-12);

    Rng rng(1);
    CHECK_THROWS_AS(random_gns_lindbladian(2, 1, random_state(2, rng), 1), PreconditionFailed);
    CHECK_THROWS_AS(random_gns_lindbladian(2, 0, thermal, 1), DomainError);
}
