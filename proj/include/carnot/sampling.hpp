#pragma once

// Deterministic sharded randomness. Every sampling loop splits its budget
// over kShards fixed shards; shard s draws from an mt19937_64 seeded by
// splitmix64(seed, s), so results do not depend on the thread count.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace carnot {

inline constexpr int kShards = 8;

std::uint64_t splitmix64(std::uint64_t x);

std::mt19937_64 shard_rng(std::uint64_t seed, std::uint64_t shard);

/// Runs body(shard) for shard = 0..shards-1, on worker threads when the
/// machine has more than one core.
void run_shards(int shards, const std::function<void(int)>& body);

/// Number of items of `total` assigned to `shard`.
long shard_count(long total, int shard, int shards = kShards);

double uniform01(std::mt19937_64& rng);
double standard_normal(std::mt19937_64& rng);

/// Uniform point in the Euclidean ball (or max-norm cube) of radius r in R^n.
void uniform_in_ball(std::mt19937_64& rng, int n, double r, bool max_norm, double* out);

/// Uniform direction on the Euclidean unit sphere in R^n.
std::vector<double> unit_direction(std::mt19937_64& rng, int n);

}  // namespace carnot
