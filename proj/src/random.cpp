#include "qms/random.hpp"

#include <algorithm>
#include <cmath>

namespace qms {

cmat ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    cmat g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = n(rng);
            const double im = n(rng);
            g(i, j) = cplx(re, im);
        }
    return g;
}

cmat random_hermitian(Eigen::Index d, Rng& rng) { return hermitian_part(ginibre(d, d, rng)); }

cmat random_unitary(Eigen::Index d, Rng& rng) {
    Eigen::HouseholderQR<cmat> qr(ginibre(d, d, rng));
    cmat q = qr.householderQ();
    const cmat r = qr.matrixQR();
    for (Eigen::Index k = 0; k < d; ++k) {
        const cplx diag = r(k, k);
        if (std::abs(diag) > 0) q.col(k) *= diag / std::abs(diag);
    }
    return q;
}

cmat random_state(Eigen::Index d, Rng& rng, Eigen::Index rank) {
    const cmat a = ginibre(d, rank > 0 ? rank : d, rng);
    cmat rho = a * a.adjoint();
    rho /= rho.trace().real();
    return hermitian_part(rho);
}

cmat thermal_state(Eigen::Index d, double beta) {
    rvec w(d);
    for (Eigen::Index k = 0; k < d; ++k) w(k) = std::exp(-beta * double(k));
    w /= w.sum();
    return w.cast<cplx>().asDiagonal();
}

std::vector<cmat> random_unital_kraus(Eigen::Index d, int count, Rng& rng) {
    if (count < 1) throw DomainError("random_unital_kraus: need at least one operator");
    const cmat id = cmat::Identity(d, d);
    auto residual = [&](const std::vector<cmat>& ks) {
        cmat s = cmat::Zero(d, d), t = cmat::Zero(d, d);
        for (const auto& k : ks) {
            s += k.adjoint() * k;
            t += k * k.adjoint();
        }
        return std::max(max_abs(cmat(s - id)), max_abs(cmat(t - id)));
    };
    // Near-degenerate draws balance very slowly; redraw those.
    for (;;) {
        std::vector<cmat> ks;
        for (int j = 0; j < count; ++j) ks.push_back(ginibre(d, d, rng));
        for (int it = 0; it < 200; ++it) {
            cmat t = cmat::Zero(d, d);
            for (const auto& k : ks) t += k * k.adjoint();
            const cmat left = mat_pow(t, -0.5);
            for (auto& k : ks) k = left * k;
            cmat s = cmat::Zero(d, d);
            for (const auto& k : ks) s += k.adjoint() * k;
            const cmat right = mat_pow(s, -0.5);
            for (auto& k : ks) k = k * right;
            if (residual(ks) < 1e-13) return ks;
        }
    }
}

Superop random_trace_symmetric_channel(Eigen::Index d, Rng& rng, int kraus_count) {
    const auto ks = random_unital_kraus(d, kraus_count, rng);
    Superop s = Superop::Zero(d * d, d * d);
    for (const auto& k : ks) s += sandwich(k.adjoint(), k);
    return (s + adjoint_trace(s)) / 2.0;
}

Superop random_block_schur_channel(const std::vector<int>& block_sizes, Rng& rng) {
    Eigen::Index d = 0;
    for (int b : block_sizes) d += b;
    const auto blocks = static_cast<Eigen::Index>(block_sizes.size());
    // One unit vector per block, all rows of a block share it.
    std::normal_distribution<double> n(0.0, 1.0);
    rmat dirs(blocks, blocks + 1);
    for (Eigen::Index b = 0; b < blocks; ++b) {
        for (Eigen::Index k = 0; k < dirs.cols(); ++k) dirs(b, k) = n(rng);
        dirs.row(b).normalize();
    }
    rmat rows(d, dirs.cols());
    Eigen::Index r = 0;
    for (Eigen::Index b = 0; b < blocks; ++b)
        for (int k = 0; k < block_sizes[b]; ++k) rows.row(r++) = dirs.row(b);
    const rmat corr = rows * rows.transpose();
    Superop s = Superop::Zero(d * d, d * d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) s(j * d + i, j * d + i) = corr(i, j);
    return s;
}

}  // namespace qms
