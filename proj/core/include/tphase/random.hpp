#pragma once

#include <cstdint>
#include <random>

#include "tphase/tensor.hpp"

namespace tphase {

using Rng = std::mt19937_64;

/// splitmix64 step; derives independent per-trial seeds from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Entries uniform in [-1, 1] (real and imaginary parts).
Tensor3 random_tensor(Index m, Index n, Index p, Rng& rng);
Tensor3 random_real_tensor(Index m, Index n, Index p, Rng& rng);

/// Random matrix U diag(s) V^H with singular values in [smin, smax].
CMatrix random_conditioned_matrix(Index n, double smin, double smax, Rng& rng);
CMatrix random_unitary(Index n, Rng& rng);

/// Nonsingular tensor whose Fourier slices have singular values in [0.5, 2].
Tensor3 random_nonsingular(Index n, Index p, Rng& rng);

/// Sectorial tensor with Fourier slices T_k^H diag(e^{i phi}) T_k, phases
/// drawn uniformly from [lo, hi] (hi - lo < pi).
Tensor3 random_sectorial(Index n, Index p, double lo, double hi, Rng& rng);

/// Strictly accretive tensor; phases uniform in [-1.3, 1.3].
Tensor3 random_accretive(Index n, Index p, Rng& rng);

/// T-Hermitian tensor with Hermitian Fourier slices of unit-scale entries.
Tensor3 random_hermitian(Index n, Index p, Rng& rng);

/// Tensor built in the Fourier domain from the given slices.
Tensor3 tensor_from_fourier(std::vector<CMatrix> slices);

}  // namespace tphase
