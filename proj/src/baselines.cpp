#include "twist/baselines.hpp"

namespace twist {

Partition sum_adj(const Tensor3d& a, int kbar, const KmeansConfig& config) {
  if (a.dims()[0] != a.dims()[1]) throw ContractViolation("sum_adj: slices must be square");
  if (kbar < 1 || kbar > a.dims()[0]) throw ContractViolation("sum_adj: Kbar must lie in [1, n]");
  return spectral_clustering(slice_sum(a), kbar, config);
}

EmbeddingPair hosvd_tucker(const Tensor3d& a, const TwistConfig& config) {
  TwistConfig plain = config;
  plain.delta1 = 1.0;
  plain.delta2 = 1.0;
  plain.validate(a.dims()[0], a.dims()[2]);
  return power_iterate(a, plain, hosvd_init(a, 1, config.r), hosvd_init(a, 3, config.m));
}

Partition m3_spectral(const Tensor3d& a, int m, const KmeansConfig& config) {
  if (m < 1 || m > a.dims()[2]) throw ContractViolation("m3_spectral: m must lie in [1, L]");
  const Factor w = hosvd_init(a, 3, m);
  return kmeans(w.matrix(), m, config).partition;
}

}  // namespace twist
