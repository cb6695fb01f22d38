#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

namespace biaslin {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed for a named stochastic component, derived from one top-level seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view component) {
  return splitmix64(seed ^ fnv1a(component));
}

/// Welford accumulator; merge() uses the pairwise update so shard results
/// can be reduced in a fixed order.
class RunningMoments {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningMoments& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double n1 = static_cast<double>(count_);
    const double n2 = static_cast<double>(other.count_);
    const double delta = other.mean_ - mean_;
    const double total = n1 + n2;
    mean_ += delta * n2 / total;
    m2_ += other.m2_ + delta * delta * n1 * n2 / total;
    count_ += other.count_;
  }

  std::uint64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double std_error() const {
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

inline McEstimate to_estimate(const RunningMoments& m) {
  return {m.mean(), m.std_error(), m.count()};
}

/// Shard layout for Monte Carlo loops. Results depend on (seed, shards) only;
/// `threads` caps concurrency and never changes the output.
struct ShardPlan {
  std::size_t shards = 16;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Runs `fn(engine, count, shard_index)` once per shard with engine seeded by
/// seed + shard_index and returns the per-shard results in shard order.
template <class Result, class Fn>
std::vector<Result> run_shards(std::uint64_t total, std::uint64_t seed, const ShardPlan& plan,
                               Fn&& fn) {
  const std::size_t shards = std::max<std::size_t>(1, std::min<std::uint64_t>(plan.shards, std::max<std::uint64_t>(total, 1)));
  std::vector<Result> results(shards);
  auto run_one = [&](std::size_t s) {
    const std::uint64_t count = total / shards + (s < total % shards ? 1 : 0);
    Engine engine(seed + s);
    results[s] = fn(engine, count, s);
  };
  unsigned threads = plan.threads ? plan.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, shards));
  if (threads <= 1) {
    for (std::size_t s = 0; s < shards; ++s) run_one(s);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t s = next++; s < shards; s = next++) run_one(s);
    });
  }
  workers.clear();
  return results;
}

/// Sharded scalar Monte Carlo mean: `sample(engine)` draws one integrand value.
template <class SampleFn>
McEstimate mc_mean(std::uint64_t samples, std::uint64_t seed, const ShardPlan& plan,
                   SampleFn&& sample) {
  auto parts = run_shards<RunningMoments>(samples, seed, plan,
                                          [&](Engine& engine, std::uint64_t count, std::size_t) {
                                            RunningMoments m;
                                            for (std::uint64_t i = 0; i < count; ++i) m.add(sample(engine));
                                            return m;
                                          });
  RunningMoments total;
  for (const auto& p : parts) total.merge(p);
  return to_estimate(total);
}

inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace biaslin
