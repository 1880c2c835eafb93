#include "tamed/brownian.hpp"

#include <cmath>
#include <stdexcept>

namespace tamed {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer: a well-mixed 64-bit bijection.
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t substream)
    : base_(mix64(master_seed + kGolden) ^ mix64((substream + 1) * kGolden)) {}

std::uint64_t RandomStream::next_u64() {
  ++counter_;
  return mix64(base_ + counter_ * kGolden);
}

double RandomStream::uniform01() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::pair<double, double> RandomStream::normal_pair() {
  const double u = uniform01();
  const double v = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double angle = 2.0 * M_PI * v;
  return {r * std::cos(angle), r * std::sin(angle)};
}

IncrementPair make_increment_pair(double u1, double u2, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("make_increment_pair: dt must be > 0");
  const double sqrt_dt = std::sqrt(dt);
  IncrementPair p;
  p.dt = dt;
  p.dW = sqrt_dt * u1;
  p.dZ = 0.5 * dt * sqrt_dt * (u1 + u2 / std::sqrt(3.0));
  return p;
}

IncrementPair sample_increment_pair(RandomStream& stream, double dt) {
  const auto [u1, u2] = stream.normal_pair();
  return make_increment_pair(u1, u2, dt);
}

PathIncrements generate_path(std::uint64_t master_seed, std::int64_t path_index,
                             int N, double T) {
  if (N < 1) throw std::invalid_argument("generate_path: N must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("generate_path: T must be > 0");
  PathIncrements path;
  path.N = N;
  path.T = T;
  path.master_seed = master_seed;
  path.path_index = path_index;
  path.pairs.reserve(static_cast<std::size_t>(N));
  RandomStream stream(master_seed, static_cast<std::uint64_t>(path_index));
  const double dt = T / N;
  for (int i = 0; i < N; ++i) path.pairs.push_back(sample_increment_pair(stream, dt));
  return path;
}

IncrementPair aggregate(const std::vector<IncrementPair>& fine) {
  if (fine.empty()) throw std::invalid_argument("aggregate: empty increment list");
  const double delta = fine.front().dt;
  IncrementPair out;
  out.dt = delta * static_cast<double>(fine.size());
  double w_sum = 0.0;  // Brownian displacement accumulated before block i
  for (const IncrementPair& p : fine) {
    if (p.dt != delta)
      throw std::invalid_argument("aggregate: mixed step sizes in increment list");
    // int over block i of (W_s - W_start) ds = dZ_i + (W at block start) * delta.
    out.dZ += p.dZ + w_sum * delta;
    w_sum += p.dW;
  }
  out.dW = w_sum;
  return out;
}

PathIncrements coarsen(const PathIncrements& fine, int M) {
  if (M < 1) throw std::invalid_argument("coarsen: M must be >= 1");
  if (fine.N % M != 0)
    throw std::invalid_argument("coarsen: M must divide the fine step count");
  PathIncrements coarse;
  coarse.N = fine.N / M;
  coarse.T = fine.T;
  coarse.master_seed = fine.master_seed;
  coarse.path_index = fine.path_index;
  coarse.pairs.reserve(static_cast<std::size_t>(coarse.N));
  std::vector<IncrementPair> block(static_cast<std::size_t>(M));
  for (int i = 0; i < coarse.N; ++i) {
    for (int j = 0; j < M; ++j)
      block[static_cast<std::size_t>(j)] = fine.pairs[static_cast<std::size_t>(i * M + j)];
    coarse.pairs.push_back(aggregate(block));
  }
  return coarse;
}

}  // namespace tamed
