#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biaslin/bits.hpp"
#include "biaslin/cube.hpp"
#include "biaslin/distributions.hpp"
#include "biaslin/error.hpp"
#include "biaslin/random.hpp"
#include "biaslin/rational.hpp"

namespace biaslin {

inline constexpr double kEnumerationBudget = 1e8;

enum class TestMode { Exact, MonteCarlo };

inline const char* to_string(TestMode m) { return m == TestMode::Exact ? "exact" : "monte-carlo"; }

/// Outcome of running Lin(nu) on f: the raw product expectation
/// E_{nu^{(x)n}}[prod_i f(X_i)] and, for sign-valued f, the acceptance
/// probability (1 + E)/2.
struct TestReport {
  double product_expectation = 0.0;
  std::optional<Rational> exact_value;  // set when the whole computation stayed rational
  std::optional<double> acceptance_probability;
  double std_error = 0.0;
  TestMode mode = TestMode::Exact;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

struct ExactOptions {
  bool negate = false;             // query the coordinate-wise complement of each sample
  bool use_product_form = true;    // tensorize over j when f carries a product form
};

namespace detail {

inline void finish_report(TestReport& r, const CubeFunction& f) {
  if (f.range() == RangeTag::Signs) r.acceptance_probability = (1.0 + r.product_expectation) / 2.0;
}

inline std::vector<std::uint64_t> query_points(const BiasedDistribution& d, bool negate) {
  auto pts = d.support();
  if (negate) {
    const std::uint64_t mask = (std::uint64_t{1} << d.k()) - 1;
    for (auto& y : pts) y ^= mask;
  }
  return pts;
}

}  // namespace detail

/// Exact E_{nu^{(x)n}}[prod_i f(X_i)]. Product-form f factors over the n
/// coordinate blocks; otherwise all |supp(nu)|^n tuples are enumerated with
/// exact rational tuple probabilities.
inline TestReport product_expectation_exact(const CubeFunction& f, const BiasedDistribution& d, std::size_t n,
                                            const ExactOptions& opts = {}) {
  if (f.n() != n) throw SizeError("function arity differs from n");
  const unsigned k = d.k();
  const auto points = detail::query_points(d, opts.negate);
  const auto support = d.support();
  TestReport report;
  report.mode = TestMode::Exact;

  if (opts.use_product_form && f.product_form()) {
    const ProductForm& pf = *f.product_form();
    Rational total = 1;
    for (unsigned i = 0; i < k; ++i) total *= Rational(pf.scale);
    for (std::size_t j = 0; j < n; ++j) {
      const Rational f0(pf.factors[j][0]), f1(pf.factors[j][1]);
      Rational block = 0;
      for (std::size_t s = 0; s < points.size(); ++s) {
        Rational term = d.prob(support[s]);
        for (unsigned i = 0; i < k; ++i) term *= coord_bit(points[s], k, i) ? f1 : f0;
        block += term;
      }
      total *= block;
    }
    report.product_expectation = to_double(total);
    report.exact_value = std::move(total);
    detail::finish_report(report, f);
    return report;
  }

  if (std::pow(static_cast<double>(points.size()), static_cast<double>(n)) > kEnumerationBudget) {
    throw SizeError("exact enumeration needs |supp|^n <= 1e8 tuples; use Monte Carlo mode");
  }
  if (n > 63) throw SizeError("exact enumeration limited to n <= 63");
  std::vector<double> last_probs(points.size());
  for (std::size_t s = 0; s < points.size(); ++s) last_probs[s] = to_double(d.prob(support[s]));

  // queries[i] holds the table index of X_i built from the first j blocks.
  std::vector<std::uint64_t> queries(k, 0);
  double total = 0.0;
  auto recurse = [&](auto&& self, std::size_t j, const Rational& prefix) -> void {
    if (j + 1 == n) {
      double inner = 0.0;
      for (std::size_t s = 0; s < points.size(); ++s) {
        double prod = 1.0;
        for (unsigned i = 0; i < k; ++i) prod *= f.at_index((queries[i] << 1) | coord_bit(points[s], k, i));
        inner += last_probs[s] * prod;
      }
      total += to_double(prefix) * inner;
      return;
    }
    for (std::size_t s = 0; s < points.size(); ++s) {
      for (unsigned i = 0; i < k; ++i) queries[i] = (queries[i] << 1) | coord_bit(points[s], k, i);
      self(self, j + 1, prefix * d.prob(support[s]));
      for (unsigned i = 0; i < k; ++i) queries[i] >>= 1;
    }
  };
  recurse(recurse, 0, Rational(1));
  report.product_expectation = total;
  detail::finish_report(report, f);
  return report;
}

/// Cumulative table over supp(nu) for inverse-CDF sampling.
class SupportSampler {
 public:
  SupportSampler(const BiasedDistribution& d, bool negate) : points_(detail::query_points(d, negate)) {
    Rational acc = 0;
    for (auto x : d.support()) {
      acc += d.prob(x);
      cdf_.push_back(to_double(acc));
    }
    cdf_.back() = 1.0;
  }
  std::uint64_t draw(Engine& engine) const {
    const double u = uniform01(engine);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return points_[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), points_.size() - 1))];
  }

 private:
  std::vector<std::uint64_t> points_;
  std::vector<double> cdf_;
};

/// Draws X ~ nu^{(x)n} into the k query vectors.
inline void sample_queries(Engine& engine, const SupportSampler& sampler, unsigned k, std::vector<BitVector>& xs) {
  const std::size_t n = xs.front().size();
  const std::size_t words = xs.front().words().size();
  for (std::size_t w = 0; w < words; ++w) {
    std::vector<std::uint64_t> acc(k, 0);
    const std::size_t bits = std::min<std::size_t>(64, n - w * 64);
    for (std::size_t b = 0; b < bits; ++b) {
      const std::uint64_t y = sampler.draw(engine);
      for (unsigned i = 0; i < k; ++i) acc[i] |= static_cast<std::uint64_t>(coord_bit(y, k, i)) << b;
    }
    for (unsigned i = 0; i < k; ++i) xs[i].words()[w] = acc[i];
  }
}

inline TestReport product_expectation_mc(const CubeFunction& f, const BiasedDistribution& d, std::size_t n,
                                         std::uint64_t samples, std::uint64_t seed, const ShardPlan& plan = {},
                                         bool negate = false) {
  if (f.n() != n) throw SizeError("function arity differs from n");
  if (samples < 1) throw PreconditionError("samples must be >= 1");
  const unsigned k = d.k();
  const SupportSampler sampler(d, negate);
  const auto est = mc_mean(samples, seed, plan, [&](Engine& engine) {
    thread_local std::vector<BitVector> xs;
    if (xs.size() != k || xs.front().size() != n) xs.assign(k, BitVector(n));
    sample_queries(engine, sampler, k, xs);
    double prod = 1.0;
    for (unsigned i = 0; i < k; ++i) prod *= f(xs[i]);
    return prod;
  });
  TestReport report;
  report.mode = TestMode::MonteCarlo;
  report.product_expectation = est.estimate;
  report.std_error = est.std_error;
  report.samples = samples;
  report.seed = seed;
  detail::finish_report(report, f);
  return report;
}

struct McBudget {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  ShardPlan plan{};
};

/// Samples X ~ nu'^{(x)n} with nu' in D(1-p, k), negates all kn bits and
/// evaluates prod_i f(X'_i); each query is then mu_p^{(x)n}-distributed.
inline TestReport negated_test(const CubeFunction& f, const BiasedDistribution& d_prime, std::size_t n, TestMode mode,
                               const McBudget& budget = {}) {
  if (mode == TestMode::Exact) return product_expectation_exact(f, d_prime, n, {.negate = true});
  return product_expectation_mc(f, d_prime, n, budget.samples, budget.seed, budget.plan, true);
}

/// E_{Y ~ nu}[omega^{r * |Y|}] held exactly as probability mass per power of
/// omega = exp(2 pi i / modulus).
struct CyclotomicValue {
  unsigned modulus = 1;
  std::vector<Rational> mass;

  bool is_one() const { return !mass.empty() && mass[0] == 1; }
  std::complex<double> to_complex() const {
    const auto roots = roots_of_unity(modulus);
    std::complex<double> v = 0.0;
    for (unsigned a = 0; a < modulus; ++a) v += to_double(mass[a]) * roots[a];
    return v;
  }
};

/// Checks that the product character with exponent r passes Lin(nu) on one
/// coordinate block. Needs every support weight to be 0 mod (k-1) unless r = 0.
inline CyclotomicValue character_pass_check(const BiasedDistribution& d, unsigned r) {
  const unsigned k = d.k();
  if (k < 3) throw IndexError("character_pass_check needs k >= 3");
  if (r > k - 2) throw IndexError("r = " + std::to_string(r) + " outside [0, " + std::to_string(k - 2) + "]");
  const unsigned m = k - 1;
  if (r != 0) {
    for (auto y : d.support()) {
      if (hamming_weight(y) % m != 0) {
        throw PreconditionError("support weight " + std::to_string(hamming_weight(y)) + " is not 0 mod " +
                                std::to_string(m));
      }
    }
  }
  CyclotomicValue out;
  out.modulus = m;
  out.mass.assign(m, Rational(0));
  for (auto y : d.support()) out.mass[(static_cast<std::uint64_t>(r) * hamming_weight(y)) % m] += d.prob(y);
  return out;
}

}  // namespace biaslin
