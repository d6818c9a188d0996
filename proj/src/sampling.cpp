#include "carnot/sampling.hpp"

#include <cmath>
#include <thread>

namespace carnot {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 shard_rng(std::uint64_t seed, std::uint64_t shard) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ (0x632be59bd9b4e019ULL * (shard + 1))));
}

void run_shards(int shards, const std::function<void(int)>& body) {
  if (std::thread::hardware_concurrency() <= 1 || shards <= 1) {
    for (int s = 0; s < shards; ++s) body(s);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(shards));
  workers.reserve(static_cast<std::size_t>(shards));
  for (int s = 0; s < shards; ++s) {
    workers.emplace_back([&, s] {
      try {
        body(s);
      } catch (...) {
        errors[static_cast<std::size_t>(s)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

long shard_count(long total, int shard, int shards) {
  return total / shards + (shard < total % shards ? 1 : 0);
}

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double standard_normal(std::mt19937_64& rng) {
  // Box-Muller keeps the stream identical across standard libraries.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<double> unit_direction(std::mt19937_64& rng, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (auto& c : v) {
      c = standard_normal(rng);
      norm += c * c;
    }
  }
  norm = std::sqrt(norm);
  for (auto& c : v) c /= norm;
  return v;
}

void uniform_in_ball(std::mt19937_64& rng, int n, double r, bool max_norm, double* out) {
  if (max_norm) {
    for (int i = 0; i < n; ++i) out[i] = r * (2.0 * uniform01(rng) - 1.0);
    return;
  }
  const auto dir = unit_direction(rng, n);
  const double radius = r * std::pow(uniform01(rng), 1.0 / n);
  for (int i = 0; i < n; ++i) out[i] = radius * dir[static_cast<std::size_t>(i)];
}

}  // namespace carnot
