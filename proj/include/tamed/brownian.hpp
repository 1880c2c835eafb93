#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace tamed {

/// The correlated Wiener-increment pair over one step of length dt:
/// dW = W_{t+dt} - W_t and dZ = int_t^{t+dt} (W_s - W_t) ds.
struct IncrementPair {
  double dW = 0.0;
  double dZ = 0.0;
  double dt = 0.0;
};

/// Counter-based random substream. Substream `i` of master seed `s` produces
/// value k as
///   mix64(base(s, i) + (k+1) * GOLDEN),
/// where mix64 is the SplitMix64 finalizer (a 64-bit bijection) and
///   base(s, i) = mix64(s + GOLDEN) ^ mix64((i + 1) * GOLDEN).
/// Every value is a pure function of (seed, substream, k): streams can be
/// recreated anywhere, never share state, and are reproducible bit-for-bit.
/// This derivation is the documented contract; ports in other languages can
/// match it exactly.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t substream);

  std::uint64_t next_u64();
  /// Uniform strictly inside (0, 1): ((v >> 11) + 0.5) * 2^-53.
  double uniform01();
  /// Two independent standard normals via Box-Muller.
  std::pair<double, double> normal_pair();

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

/// Deterministic core of the pair construction: given standard normals
/// (u1, u2),
///   dW = sqrt(dt) u1,   dZ = dt^{3/2} (u1 + u2/sqrt(3)) / 2,
/// which realises Var(dW) = dt, Var(dZ) = dt^3/3, Cov(dZ, dW) = dt^2/2
/// exactly. Throws std::invalid_argument when dt <= 0.
IncrementPair make_increment_pair(double u1, double u2, double dt);

/// Draws (u1, u2) from the stream and applies make_increment_pair.
IncrementPair sample_increment_pair(RandomStream& stream, double dt);

/// All increments of one path on the uniform grid with N steps of dt = T/N.
struct PathIncrements {
  int N = 0;
  double T = 0.0;
  std::vector<IncrementPair> pairs;
  std::uint64_t master_seed = 0;  ///< seed lineage, for reproducibility
  std::int64_t path_index = 0;
};

/// Fills N pairs at dt = T/N from substream `path_index` of `master_seed`.
/// Deterministic: identical arguments give bit-identical output.
/// Throws std::invalid_argument when N < 1 or T <= 0.
PathIncrements generate_path(std::uint64_t master_seed, std::int64_t path_index,
                             int N, double T);

/// Exact fine-to-coarse aggregation over M consecutive fine pairs of equal
/// length delta:
///   dW = sum_i dW_i,
///   dZ = sum_i [ dZ_i + (sum_{j<i} dW_j) * delta ],
/// the decomposition of the double integral over the union interval; the
/// result has dt = M * delta. Throws std::invalid_argument on an empty list
/// or mixed dt values.
IncrementPair aggregate(const std::vector<IncrementPair>& fine);

/// Groups fine.pairs into blocks of M and aggregates each, producing the
/// same Brownian path at step count N/M. Requires M to divide fine.N.
PathIncrements coarsen(const PathIncrements& fine, int M);

}  // namespace tamed
