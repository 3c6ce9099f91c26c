#pragma once

#include "twist/clustering.hpp"
#include "twist/twist.hpp"

namespace twist {

/// Spectral clustering of the summed layers: top-kbar adjacency eigenvectors
/// (largest |eigenvalue|, no Laplacian normalization), rows clustered by K-means.
Partition sum_adj(const Tensor3d& a, int kbar, const KmeansConfig& config = {});

/// Unregularized Tucker power iterations started from the HOSVD factors
/// (top singular vectors of the mode-1 and mode-3 unfoldings). Both deltas are
/// forced to 1, which leaves every orthonormal factor's subspace unchanged.
EmbeddingPair hosvd_tucker(const Tensor3d& a, const TwistConfig& config);

/// Layer clustering from the top-m left singular vectors of the mode-3 unfolding.
Partition m3_spectral(const Tensor3d& a, int m, const KmeansConfig& config = {});

}  // namespace twist
