#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qms/matcore.hpp"

namespace qms {

using Rng = std::mt19937_64;

cmat ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng);
cmat random_hermitian(Eigen::Index d, Rng& rng);
cmat random_unitary(Eigen::Index d, Rng& rng);

// Ginibre-induced state; rank < d gives a rank-deficient state.
cmat random_state(Eigen::Index d, Rng& rng, Eigen::Index rank = 0);

// Diagonal density proportional to exp(-beta k), k = 0..d-1.
cmat thermal_state(Eigen::Index d, double beta);

// Kraus operators with sum K*K = I and sum KK* = I, from Gaussian matrices
// balanced by alternating left/right normalization.
std::vector<cmat> random_unital_kraus(Eigen::Index d, int count, Rng& rng);

// Heisenberg superoperator of a random unital channel made trace-symmetric
// as (Phi + Phi^dagger)/2.
Superop random_trace_symmetric_channel(Eigen::Index d, Rng& rng, int kraus_count = 3);

// Schur multiplier X -> C o X with C a real correlation matrix that has unit
// entries exactly on the given blocks (sizes sum to d).
Superop random_block_schur_channel(const std::vector<int>& block_sizes, Rng& rng);

}  // namespace qms
