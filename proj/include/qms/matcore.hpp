#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "qms/errors.hpp"

namespace qms {

using cplx = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using cmat = Matrix<cplx>;
using cvec = Vector<cplx>;
using rmat = Eigen::MatrixXd;
using rvec = Eigen::VectorXd;

// Superoperators are plain d^2 x d^2 matrices acting on column-stacked
// operators: vec(X)[j*d + i] = X(i, j). Choi matrices share the shape.
using Superop = cmat;

struct Tolerances {
    double hermitian = 1e-12;  // relative to max |entry|
    double psd = 1e-10;
    double trace = 1e-10;
    double support = 1e-14;
};

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

template <typename Derived>
double asymmetry(const Eigen::MatrixBase<Derived>& a) {
    return max_abs(a - a.adjoint());
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, const Tolerances& tol = {}) {
    return a.rows() == a.cols() && asymmetry(a) <= tol.hermitian * max_abs(a);
}

template <typename Derived>
Matrix<typename Derived::Scalar> hermitian_part(const Eigen::MatrixBase<Derived>& a) {
    return (a + a.adjoint()) / 2.0;
}

template <typename Scalar>
struct EigenSystem {
    rvec values;              // ascending
    Matrix<Scalar> vectors;   // orthonormal columns
    double asymmetry = 0.0;   // ||A - A*||_max of the input before symmetrizing
};

template <typename Derived>
EigenSystem<typename Derived::Scalar> eig_hermitian(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    if (a.rows() != a.cols())
        throw DimensionMismatch("eig_hermitian: matrix is not square");
    Matrix<Scalar> h = hermitian_part(a);
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(h);
    if (solver.info() != Eigen::Success)
        throw NonConvergence("eig_hermitian: eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors(), asymmetry(a)};
}

template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    Matrix<Scalar> h = hermitian_part(a);
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NonConvergence("min_eigenvalue: eigensolver did not converge");
    return solver.eigenvalues()(0);
}

template <typename Derived>
bool is_psd(const Eigen::MatrixBase<Derived>& a, double tol) {
    return min_eigenvalue(a) >= -tol;
}

// How mat_func treats the spectrum before applying f. `positive` is for
// log and fractional/negative powers: eigenvalues in (-psd, support) are
// lifted to the support cutoff, anything below -psd is an error.
enum class Spectrum { any, positive };

template <typename Scalar, typename F>
Matrix<Scalar> apply_spectral(const EigenSystem<Scalar>& es, F&& f,
                              Spectrum spectrum = Spectrum::any,
                              const Tolerances& tol = {}) {
    rvec fv(es.values.size());
    for (Eigen::Index i = 0; i < fv.size(); ++i) {
        double x = es.values(i);
        if (spectrum == Spectrum::positive) {
            if (x < -tol.psd)
                throw DomainError("mat_func: eigenvalue " + std::to_string(x) +
                                  " below -psd_tol");
            if (x < tol.support) x = tol.support;
        }
        fv(i) = f(x);
        if (!std::isfinite(fv(i)))
            throw DomainError("mat_func: f undefined at eigenvalue " + std::to_string(x));
    }
    return es.vectors * fv.asDiagonal() * es.vectors.adjoint();
}

template <typename Derived, typename F>
Matrix<typename Derived::Scalar> mat_func(const Eigen::MatrixBase<Derived>& a, F&& f,
                                          Spectrum spectrum = Spectrum::any,
                                          const Tolerances& tol = {}) {
    return apply_spectral(eig_hermitian(a), std::forward<F>(f), spectrum, tol);
}

template <typename Derived>
Matrix<typename Derived::Scalar> mat_log(const Eigen::MatrixBase<Derived>& a,
                                         const Tolerances& tol = {}) {
    return mat_func(a, [](double x) { return std::log(x); }, Spectrum::positive, tol);
}

template <typename Derived>
Matrix<typename Derived::Scalar> mat_pow(const Eigen::MatrixBase<Derived>& a, double p,
                                         const Tolerances& tol = {}) {
    return mat_func(a, [p](double x) { return std::pow(x, p); }, Spectrum::positive, tol);
}

// ---- vectorization ----

template <typename Derived>
Vector<typename Derived::Scalar> vec(const Eigen::MatrixBase<Derived>& x) {
    return x.reshaped();
}

template <typename Derived>
Matrix<typename Derived::Scalar> unvec(const Eigen::MatrixBase<Derived>& v) {
    const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(double(v.size()))));
    if (d * d != v.size()) throw DimensionMismatch("unvec: length is not a square");
    return v.reshaped(d, d);
}

template <typename Derived>
Eigen::Index superop_dim(const Eigen::MatrixBase<Derived>& s) {
    const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(double(s.rows()))));
    if (s.rows() != s.cols() || d * d != s.rows())
        throw DimensionMismatch("superoperator must be d^2 x d^2");
    return d;
}

template <typename DS, typename DX>
Matrix<typename DS::Scalar> apply_map(const Eigen::MatrixBase<DS>& s, const Eigen::MatrixBase<DX>& x) {
    if (s.cols() != x.size()) throw DimensionMismatch("apply: superoperator/operator size");
    Vector<typename DS::Scalar> v = s * vec(x);
    return unvec(v);
}

template <typename Scalar = cplx>
Matrix<Scalar> matrix_unit(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
    Matrix<Scalar> e = Matrix<Scalar>::Zero(d, d);
    e(i, j) = Scalar(1);
    return e;
}

template <typename Scalar = cplx>
Matrix<Scalar> identity_superop(Eigen::Index d) {
    return Matrix<Scalar>::Identity(d * d, d * d);
}

// Column j*d+i holds vec(action(e_ij)).
template <typename Scalar = cplx, typename F>
Matrix<Scalar> superop_from_action(F&& action, Eigen::Index d) {
    Matrix<Scalar> s(d * d, d * d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) {
            Matrix<Scalar> y = action(matrix_unit<Scalar>(d, i, j));
            if (y.rows() != d || y.cols() != d)
                throw DimensionMismatch("superop_from_action: action changed dimension");
            s.col(j * d + i) = vec(y);
        }
    return s;
}

// X -> A X B
template <typename DA, typename DB>
Matrix<typename DA::Scalar> sandwich(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    Matrix<typename DA::Scalar> bt = b.transpose();
    Matrix<typename DA::Scalar> am = a;
    return Eigen::kroneckerProduct(bt, am);
}

template <typename Derived>
Matrix<typename Derived::Scalar> left_mul(const Eigen::MatrixBase<Derived>& a) {
    return sandwich(a, Matrix<typename Derived::Scalar>::Identity(a.rows(), a.rows()));
}

template <typename Derived>
Matrix<typename Derived::Scalar> right_mul(const Eigen::MatrixBase<Derived>& b) {
    return sandwich(Matrix<typename Derived::Scalar>::Identity(b.rows(), b.rows()), b);
}

// C = sum_ij e_ij (x) T(e_ij); block (i, j) is T(e_ij).
template <typename Derived>
Matrix<typename Derived::Scalar> choi(const Eigen::MatrixBase<Derived>& s) {
    const auto d = superop_dim(s);
    Matrix<typename Derived::Scalar> c(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index a = 0; a < d; ++a)
                for (Eigen::Index b = 0; b < d; ++b)
                    c(i * d + a, j * d + b) = s(b * d + a, j * d + i);
    return c;
}

template <typename Derived>
Matrix<typename Derived::Scalar> choi_inverse(const Eigen::MatrixBase<Derived>& c) {
    const auto d = superop_dim(c);
    Matrix<typename Derived::Scalar> s(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index a = 0; a < d; ++a)
                for (Eigen::Index b = 0; b < d; ++b)
                    s(b * d + a, j * d + i) = c(i * d + a, j * d + b);
    return s;
}

// Adjoint under <A, B> = tr(A* B).
template <typename Derived>
Matrix<typename Derived::Scalar> adjoint_trace(const Eigen::MatrixBase<Derived>& s) {
    return s.adjoint();
}

// ---- KMS weighting ----

// W(X) = d^{1/4} X d^{1/4} and its inverse, as superoperators.
template <typename Scalar>
struct KmsFrame {
    Matrix<Scalar> w;
    Matrix<Scalar> w_inv;
};

template <typename Derived>
KmsFrame<typename Derived::Scalar> kms_frame(const Eigen::MatrixBase<Derived>& reference,
                                             const Tolerances& tol = {}) {
    auto es = eig_hermitian(reference);
    if (es.values(0) <= tol.support)
        throw SingularReference("reference density is not faithful (min eigenvalue " +
                                std::to_string(es.values(0)) + ")");
    auto q = apply_spectral(es, [](double x) { return std::pow(x, 0.25); });
    auto qi = apply_spectral(es, [](double x) { return std::pow(x, -0.25); });
    return {sandwich(q, q), sandwich(qi, qi)};
}

template <typename DS, typename DR>
Matrix<typename DS::Scalar> kms_symmetrize(const Eigen::MatrixBase<DS>& s,
                                           const Eigen::MatrixBase<DR>& reference,
                                           const Tolerances& tol = {}) {
    superop_dim(s);
    if (reference.rows() * reference.rows() != s.rows())
        throw DimensionMismatch("kms_symmetrize: reference dimension");
    auto f = kms_frame(reference, tol);
    return f.w * s * f.w_inv;
}

// ---- states ----

template <typename Derived>
bool is_density(const Eigen::MatrixBase<Derived>& a, const Tolerances& tol = {}) {
    if (a.rows() != a.cols() || !a.allFinite()) return false;
    if (!is_hermitian(a, tol)) return false;
    if (std::abs(a.trace() - typename Derived::Scalar(1)) > tol.trace) return false;
    return is_psd(a, tol.psd);
}

template <typename Scalar = cplx>
Matrix<Scalar> maximally_mixed(Eigen::Index d) {
    return Matrix<Scalar>::Identity(d, d) / double(d);
}

}  // namespace qms
