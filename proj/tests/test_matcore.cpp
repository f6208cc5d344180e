#include <doctest.h>

#include "oracles.hpp"
#include "qms/errors.hpp"
#include "qms/random.hpp"

using namespace qms;

TEST_CASE("eig_hermitian on fixed inputs") {
    rmat a = rvec((rvec(3) << 3, 1, 2).finished()).asDiagonal();
    const auto es = eig_hermitian(a);
    CHECK(es.values(0) == doctest::Approx(1));
    CHECK(es.values(1) == doctest::Approx(2));
    CHECK(es.values(2) == doctest::Approx(3));
    CHECK(std::abs(es.vectors(1, 0)) == doctest::Approx(1));

    cmat x(2, 2);
    x << 0, 1, 1, 0;
    const auto px = eig_hermitian(x);
    CHECK(px.values(0) == doctest::Approx(-1));
    CHECK(px.values(1) == doctest::Approx(1));
}

TEST_CASE("eig_hermitian reconstructs random input") {
    Rng rng(7);
    for (Eigen::Index d : {2, 5, 16, 64}) {
        const cmat a = random_hermitian(d, rng);
        const auto es = eig_hermitian(a);
        const cmat back = es.vectors * es.values.cast<cplx>().asDiagonal() * es.vectors.adjoint();
        CHECK(max_abs(cmat(back - a)) <= 1e-10 * max_abs(a));
        for (Eigen::Index k = 1; k < d; ++k) CHECK(es.values(k) >= es.values(k - 1));
    }
}

TEST_CASE("eig_hermitian symmetrizes and records the asymmetry") {
    cmat a(2, 2);
    a << 1, 2, 2.5, 1;
    const auto es = eig_hermitian(a);
    CHECK(es.asymmetry == doctest::Approx(0.5));
    CHECK(es.values(1) == doctest::Approx(3.25));
}

TEST_CASE("mat_func basics") {
    const cmat zero = cmat::Zero(3, 3);
    CHECK(max_abs(cmat(mat_func(zero, [](double x) { return std::exp(x); }) -
                       cmat::Identity(3, 3))) < 1e-14);

    cmat a = cmat::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = std::exp(1.0);
    const cmat l = mat_log(a);
    CHECK(std::abs(l(0, 0)) < 1e-14);
    CHECK(l(1, 1).real() == doctest::Approx(1.0));

    Rng rng(11);
    const cmat h = 0.5 * random_hermitian(4, rng);
    const cmat e = mat_func(h, [](double x) { return std::exp(x); });
    CHECK(max_abs(cmat(mat_log(e) - h)) < 1e-9);
    CHECK(max_abs(cmat(e - oracle::expm(h))) < 1e-10);
}

TEST_CASE("mat_func clamps tiny negatives and rejects real negatives") {
    cmat a = cmat::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = -1e-12;
    CHECK(std::isfinite(mat_log(a)(1, 1).real()));
    CHECK(mat_log(a)(1, 1).real() == doctest::Approx(std::log(1e-14)));
    a(1, 1) = -1e-6;
    CHECK_THROWS_AS(mat_log(a), DomainError);
}

TEST_CASE("is_psd thresholds") {
    cmat a = cmat::Zero(2, 2);
    a(0, 0) = 1;
    CHECK(is_psd(a, 1e-10));
    a(1, 1) = -1e-6;
    CHECK_FALSE(is_psd(a, 1e-10));
    a(1, 1) = -1e-12;
    CHECK(is_psd(a, 1e-10));
}

TEST_CASE("vec is column stacking") {
    cmat x(2, 2);
    x << 1, 2, 3, 4;
    const cvec v = vec(x);
    CHECK(v(0) == cplx(1));
    CHECK(v(1) == cplx(3));
    CHECK(v(2) == cplx(2));
    CHECK(v(3) == cplx(4));
    CHECK(max_abs(cmat(unvec(v) - x)) == 0.0);
}

TEST_CASE("superop_from_action") {
    const Eigen::Index d = 3;
    const Superop id = superop_from_action([](const cmat& x) { return x; }, d);
    CHECK(max_abs(cmat(id - cmat::Identity(d * d, d * d))) == 0.0);

    const Superop tr =
        superop_from_action([d](const cmat& x) -> cmat { return x.trace() * maximally_mixed(d); }, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            const cmat expect = (i == j ? 1.0 : 0.0) * maximally_mixed(d);
            CHECK(max_abs(cmat(apply_map(tr, matrix_unit(d, i, j)) - expect)) < 1e-15);
        }

    Rng rng(5);
    const cmat v = ginibre(d, d, rng);
    const Superop conj = superop_from_action([&](const cmat& x) -> cmat { return v * x * v.adjoint(); }, d);
    CHECK(max_abs(cmat(conj - sandwich(v, cmat(v.adjoint())))) < 1e-13);
    for (int k = 0; k < 10; ++k) {
        const cmat x = ginibre(d, d, rng);
        const cmat direct = v * x * v.adjoint();
        CHECK(max_abs(cmat(apply_map(conj, x) - direct)) < 1e-12 * std::max(1.0, max_abs(direct)));
        CHECK(max_abs(cmat(oracle::act(conj, x) - direct)) < 1e-12 * std::max(1.0, max_abs(direct)));
    }
}

TEST_CASE("left and right multiplication superoperators") {
    Rng rng(3);
    const cmat a = ginibre(3, 3, rng), b = ginibre(3, 3, rng), x = ginibre(3, 3, rng);
    CHECK(max_abs(cmat(apply_map(left_mul(a), x) - a * x)) < 1e-12);
    CHECK(max_abs(cmat(apply_map(right_mul(b), x) - x * b)) < 1e-12);
    CHECK(max_abs(cmat(apply_map(sandwich(a, b), x) - a * x * b)) < 1e-12);
}

TEST_CASE("choi of identity and trace maps") {
    for (Eigen::Index d : {2, 3, 4}) {
        const cmat c = choi(identity_superop(d));
        const auto es = eig_hermitian(c);
        CHECK(es.values(d * d - 1) == doctest::Approx(double(d)));
        CHECK(std::abs(es.values(d * d - 2)) < 1e-12);

        const Superop tr = superop_from_action(
            [d](const cmat& x) -> cmat { return x.trace() * maximally_mixed(d); }, d);
        CHECK(max_abs(cmat(choi(tr) - cmat::Identity(d * d, d * d) / double(d))) < 1e-14);
    }
}

TEST_CASE("choi matches the block oracle and inverts") {
    Rng rng(21);
    for (Eigen::Index d : {2, 3}) {
        const cmat k1 = ginibre(d, d, rng), k2 = ginibre(d, d, rng);
        auto action = [&](const cmat& x) -> cmat {
            return k1.adjoint() * x * k1 + k2.adjoint() * x * k2;
        };
        const Superop s = superop_from_action(action, d);
        CHECK(max_abs(cmat(choi(s) - oracle::choi_blocks(action, d))) < 1e-12);

        const Superop r = ginibre(d * d, d * d, rng);
        CHECK(max_abs(cmat(choi_inverse(choi(r)) - r)) < 1e-14);
        CHECK(max_abs(cmat(choi(choi_inverse(r)) - r)) < 1e-14);
    }
}

TEST_CASE("CP detection through the Choi matrix") {
    Rng rng(99);
    const Eigen::Index d = 3;
    // transpose has a negative Choi eigenvalue (-1): the swap operator
    const Superop transpose = superop_from_action([](const cmat& x) -> cmat { return x.transpose(); }, d);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<cmat> kraus;
        for (int k = 0; k < 2; ++k) kraus.push_back(ginibre(d, d, rng));
        Superop s = Superop::Zero(d * d, d * d);
        for (const auto& k : kraus) s += sandwich(cmat(k.adjoint()), k);
        CHECK(is_psd(choi(s), 1e-10));

        // Enough transpose to push the top of the swap spectrum below zero.
        const double shift = 1.0 + 2.0 * eig_hermitian(choi(s)).values.maxCoeff();
        CHECK_FALSE(is_psd(choi(cmat(s + shift * transpose)), 1e-10));
    }
}

TEST_CASE("adjoint_trace") {
    Rng rng(8);
    const Eigen::Index d = 3;
    const cmat v = ginibre(d, d, rng);
    const Superop s = sandwich(v, cmat(v.adjoint()));
    CHECK(max_abs(cmat(adjoint_trace(s) - sandwich(cmat(v.adjoint()), v))) < 1e-13);

    const Superop tr = superop_from_action(
        [d](const cmat& x) -> cmat { return x.trace() * maximally_mixed(d); }, d);
    CHECK(max_abs(cmat(adjoint_trace(tr) - tr)) < 1e-15);

    const Superop r = ginibre(d * d, d * d, rng);
    CHECK(max_abs(cmat(adjoint_trace(adjoint_trace(r)) - r)) < 1e-15);
    const cmat a = ginibre(d, d, rng), b = ginibre(d, d, rng);
    const cplx lhs = (a.adjoint() * apply_map(r, b)).trace();
    const cplx rhs = (apply_map(adjoint_trace(r), a).adjoint() * b).trace();
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::abs(lhs));
}

TEST_CASE("kms frame and symmetrization") {
    Rng rng(4);
    const Eigen::Index d = 3;
    const Superop s = ginibre(d * d, d * d, rng);
    CHECK(max_abs(cmat(kms_symmetrize(s, maximally_mixed(d)) - s)) < 1e-13);

    const cmat rho = random_state(d, rng);
    const auto f = kms_frame(rho);
    CHECK(max_abs(cmat(f.w * f.w_inv - cmat::Identity(d * d, d * d))) < 1e-12);

    // X -> d^{1/4} X d^{1/4}
    const cmat q = mat_pow(rho, 0.25);
    const cmat x = ginibre(d, d, rng);
    CHECK(max_abs(cmat(apply_map(f.w, x) - q * x * q)) < 1e-12);

    cmat singular = cmat::Zero(d, d);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(kms_frame(singular), SingularReference);
}

TEST_CASE("superoperator action agrees with the entrywise oracle") {
    Rng rng(13);
    for (Eigen::Index d : {2, 4}) {
        const Superop s = ginibre(d * d, d * d, rng);
        const cmat x = ginibre(d, d, rng);
        const cmat y = apply_map(s, x);
        CHECK(max_abs(cmat(y - oracle::act(s, x))) < 1e-12 * std::max(1.0, max_abs(y)));
    }
}

TEST_CASE("is_density") {
    CHECK(is_density(maximally_mixed(4)));
    cmat a = maximally_mixed(2);
    a(0, 0) += 0.1;
    CHECK_FALSE(is_density(a));
}
