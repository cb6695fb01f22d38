#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "biaslin/bits.hpp"
#include "biaslin/cube.hpp"
#include "biaslin/distributions.hpp"
#include "biaslin/error.hpp"
#include "biaslin/hermite.hpp"
#include "biaslin/lintest.hpp"
#include "biaslin/polyalg.hpp"
#include "biaslin/random.hpp"

namespace biaslin {

/// f_{s,alpha}(x) = sum_j alpha_j H_{s_j}(x) together with its exact product
/// moment E_{N(0,Sigma)}[prod_i f(Z_i)]. All s_j >= 1, so E_{N(0,1)}[f] = 0.
struct HermiteWitness {
  Exponent s;
  std::vector<Rational> alpha;
  Rational product_moment;
  unsigned degree = 0;        // d with |s| = 2d
  double alpha_const = 0.0;   // set once a truncation level is chosen

  double operator()(double x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (alpha[j] != 0) v += to_double(alpha[j]) * hermite_eval(s[j], x);
    }
    return v;
  }
  double derivative(double x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (alpha[j] != 0) v += to_double(alpha[j]) * hermite_derivative(s[j], x);
    }
    return v;
  }
  /// +1 if f is even, -1 if odd, 0 otherwise.
  int parity() const {
    bool odd = false, even = false;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (alpha[j] == 0) continue;
      (s[j] % 2 ? odd : even) = true;
    }
    return odd && even ? 0 : (odd ? -1 : 1);
  }
};

/// E[prod_i f_{s,alpha}(Z_i)], expanded multilinearly. Equal degrees are
/// merged first: f = sum_m beta_m H_m with beta_m the alpha-mass on degree m.
inline Rational witness_product_moment(HermiteMoments& moments, const Exponent& s, const std::vector<Rational>& alpha) {
  std::map<unsigned, Rational> beta;
  for (std::size_t j = 0; j < s.size(); ++j) beta[s[j]] += alpha[j];
  std::vector<std::pair<unsigned, Rational>> terms;
  for (const auto& [m, b] : beta) {
    if (b != 0) terms.emplace_back(m, b);
  }
  const std::size_t k = s.size();
  if (terms.empty()) return 0;
  Rational total = 0;
  std::vector<std::size_t> pick(k, 0);
  Exponent degrees(k);
  while (true) {
    Rational coeff = 1;
    for (std::size_t i = 0; i < k; ++i) {
      degrees[i] = terms[pick[i]].first;
      coeff *= terms[pick[i]].second;
    }
    total += coeff * moments.expectation(degrees);
    std::size_t i = 0;
    while (i < k && ++pick[i] == terms.size()) pick[i++] = 0;
    if (i == k) break;
  }
  return total;
}

inline HermiteWitness make_hermite_witness(const CovarianceMatrix& sigma, Exponent s, std::vector<Rational> alpha) {
  if (s.size() != sigma.k() || alpha.size() != sigma.k()) throw PreconditionError("s and alpha must have length k");
  if (std::any_of(s.begin(), s.end(), [](unsigned v) { return v < 1; })) {
    throw PreconditionError("witness degrees must all be >= 1");
  }
  HermiteMoments moments(sigma);
  HermiteWitness w;
  w.product_moment = witness_product_moment(moments, s, alpha);
  w.degree = std::accumulate(s.begin(), s.end(), 0U) / 2;
  w.s = std::move(s);
  w.alpha = std::move(alpha);
  return w;
}

inline void require_no_zero_row(const CovarianceMatrix& sigma) {
  const auto zero = sigma.zero_v_rows();
  if (!zero.empty()) {
    throw PairwiseIndependenceError("V = Sigma - I has an all-zero row at coordinate " + std::to_string(zero.front() + 1) +
                                    " (a pairwise independent coordinate); no Hermite witness exists");
  }
}

/// Locates (d, s) with a nonzero symmetrized coefficient of (t^T V t)^d, then
/// draws alpha in {-3..3}^k \ {0} until the product moment is nonzero.
inline HermiteWitness find_hermite_witness(const CovarianceMatrix& sigma, unsigned d_max = kDefaultSearchDegree,
                                           std::uint64_t seed = 0, unsigned max_alpha_draws = 10000) {
  require_no_zero_row(sigma);
  const SparsePoly form = quadratic_form(sigma.v_matrix());
  const auto hit = find_all_coordinates_monomial(form, d_max);
  if (!hit) {
    throw NotFoundError("no monomial divisible by t_1...t_k in Sym((t^T V t)^d) for d in [1, " +
                        std::to_string(d_max) + "]");
  }
  HermiteMoments moments(sigma);
  Engine engine(derive_seed(seed, "witness.alpha"));
  const std::size_t k = sigma.k();
  for (unsigned attempt = 0; attempt < max_alpha_draws; ++attempt) {
    std::vector<Rational> alpha(k);
    bool nonzero = false;
    for (auto& a : alpha) {
      a = static_cast<int>(engine() % 7) - 3;
      nonzero = nonzero || a != 0;
    }
    if (!nonzero) continue;
    Rational moment = witness_product_moment(moments, hit->exponent, alpha);
    if (moment == 0) continue;
    HermiteWitness w;
    w.s = hit->exponent;
    w.alpha = std::move(alpha);
    w.product_moment = std::move(moment);
    w.degree = hit->degree;
    return w;
  }
  throw NotFoundError("every drawn alpha gave a zero product moment");
}

/// h(x) = (clamp(f(x), -M, M) - c) / (2M) with c = E_{N(0,1)}[clamp(f, -M, M)].
struct BoundedWitnessFunction {
  HermiteWitness base;
  double M = 1.0;
  double center = 0.0;
  double center_check = 0.0;      // c recomputed with the 31-point Kronrod rule
  double lipschitz_bound = 0.0;
  std::string lipschitz_note;

  double clamped(double x) const { return std::clamp(base(x), -M, M); }
  double operator()(double x) const { return (clamped(x) - center) / (2.0 * M); }
  /// E_{N(0,1)}[h] according to the independent rule.
  double mean_residual() const { return (center_check - center) / (2.0 * M); }
};

namespace detail {

inline constexpr double kQuadratureHalfWidth = 12.0;

inline double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

/// Points in [-L, L] where f crosses +M or -M; the clamp has kinks there.
inline std::vector<double> clamp_breakpoints(const HermiteWitness& w, double M) {
  const double L = kQuadratureHalfWidth;
  const int grid = 9600;
  std::vector<double> out{-L, L};
  for (double level : {M, -M}) {
    auto g = [&](double x) { return w(x) - level; };
    double x0 = -L, g0 = g(x0);
    for (int i = 1; i <= grid; ++i) {
      const double x1 = -L + 2.0 * L * i / grid;
      const double g1 = g(x1);
      if (g0 == 0.0) out.push_back(x0);
      if ((g0 < 0) != (g1 < 0) && g0 != 0.0 && g1 != 0.0) {
        double a = x0, b = x1, ga = g0;
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
          const double mid = 0.5 * (a + b);
          const double gm = g(mid);
          if ((gm < 0) == (ga < 0)) {
            a = mid;
            ga = gm;
          } else {
            b = mid;
          }
        }
        out.push_back(0.5 * (a + b));
      }
      x0 = x1;
      g0 = g1;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <unsigned Points>
double gaussian_mean_clamped(const HermiteWitness& w, double M, const std::vector<double>& breaks) {
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&](double x) { return std::clamp(w(x), -M, M) * std_normal_pdf(x); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double err = 0.0;
    total += gauss_kronrod<double, Points>::integrate(integrand, breaks[i], breaks[i + 1], 12, 1e-13, &err);
  }
  return total;
}

}  // namespace detail

inline BoundedWitnessFunction truncate_and_center(const HermiteWitness& w, double M) {
  if (!(M > 0)) throw PreconditionError("truncation level M must be positive");
  BoundedWitnessFunction h;
  h.base = w;
  h.M = M;
  if (w.parity() == -1) {
    // Odd f: the clamped function is odd and its Gaussian mean vanishes.
    h.center = 0.0;
    h.center_check = 0.0;
  } else {
    const auto breaks = detail::clamp_breakpoints(w, M);
    h.center = detail::gaussian_mean_clamped<15>(w, M, breaks);
    h.center_check = detail::gaussian_mean_clamped<31>(w, M, breaks);
  }
  double slope = 0.0;
  const double L = detail::kQuadratureHalfWidth;
  for (int i = 0; i <= 24000; ++i) {
    const double x = -L + 2.0 * L * i / 24000;
    if (std::abs(w(x)) < M) slope = std::max(slope, std::abs(w.derivative(x)));
  }
  h.lipschitz_bound = slope / (2.0 * M);
  h.lipschitz_note = "max |f'| / (2M) over the unclamped part of a 24001-point grid on [-12, 12]";
  return h;
}

struct TruncationChoice {
  double M = 0.0;
  McEstimate gaussian_product;  // E_{N(0,Sigma)}[prod_i h(Z_i)]
  double alpha_const = 0.0;     // |estimate| / 2
};

inline constexpr unsigned kTruncationDoublings = 20;

/// First M on the doubling schedule where the Monte Carlo estimate of
/// |E[prod h(Z_i)]| keeps half of the untruncated normalized moment
/// |product_moment| / (2M)^k, within 3 standard errors.
inline TruncationChoice choose_truncation_level(const HermiteWitness& w, const CovarianceMatrix& sigma,
                                                std::uint64_t samples, std::uint64_t seed,
                                                const ShardPlan& plan = {}) {
  double max_alpha = 0.0;
  unsigned max_degree = 0;
  for (std::size_t j = 0; j < w.s.size(); ++j) {
    max_alpha = std::max(max_alpha, std::abs(to_double(w.alpha[j])));
    max_degree = std::max(max_degree, w.s[j]);
  }
  const double start = 2.0 * std::max(1.0, max_alpha * max_degree);
  const double target = 0.5 * std::abs(to_double(w.product_moment));
  const unsigned k = sigma.k();
  for (unsigned i = 0; i <= kTruncationDoublings; ++i) {
    const double M = std::ldexp(start, static_cast<int>(i));
    const BoundedWitnessFunction h = truncate_and_center(w, M);
    const McEstimate est = gaussian_mc_expectation(sigma, samples, derive_seed(seed, "witness.truncation"), plan,
                                                   [&](std::span<const double> z) {
                                                     double prod = 1.0;
                                                     for (double zi : z) prod *= h(zi);
                                                     return prod;
                                                   });
    const double threshold = target / std::pow(2.0 * M, static_cast<double>(k));
    if (std::abs(est.estimate) >= threshold - 3.0 * est.std_error) {
      return TruncationChoice{M, est, std::abs(est.estimate) / 2.0};
    }
  }
  throw ConvergenceError("no truncation level met the moment threshold after " +
                         std::to_string(kTruncationDoublings) + " doublings");
}

/// f(x) = h((1/sqrt n) sum_j (x_j - p) / sqrt(p - p^2)), linear-time evaluation.
template <class Bounded>
CubeFunction clt_cube_function(Bounded h, const Rational& p, std::size_t n) {
  if (n < 1) throw PreconditionError("n must be >= 1");
  const double pd = to_double(p);
  const double mean = static_cast<double>(n) * pd;
  const double scale = std::sqrt(static_cast<double>(n) * (pd - pd * pd));
  return CubeFunction::handle(
      n, [h = std::move(h), mean, scale](const BitVector& x) { return h((static_cast<double>(x.popcount()) - mean) / scale); },
      RangeTag::Interval);
}

/// Keyed hash of (seed, x) mapped to [0, 1).
inline double point_uniform(std::uint64_t seed, const BitVector& x) {
  std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL ^ x.size());
  for (auto w : x.words()) h = splitmix64(h ^ w);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// g(x) = +1 iff u(seed, x) < (1 + f(x)) / 2: a fixed sign function whose
/// average over seeds is f.
inline CubeFunction round_to_signs(const CubeFunction& f, std::uint64_t seed) {
  const std::uint64_t key = derive_seed(seed, "witness.rounding");
  return CubeFunction::handle(
      f.n(), [f, key](const BitVector& x) { return point_uniform(key, x) < (1.0 + f(x)) / 2.0 ? 1.0 : -1.0; },
      RangeTag::Signs);
}

struct CounterexampleConfig {
  unsigned d_max = kDefaultSearchDegree;
  std::uint64_t gaussian_samples = 100000;
  std::uint64_t seed = 0;
  ShardPlan plan{};
  std::optional<std::vector<Rational>> forced_alpha;  // skip the random alpha draw
};

struct Counterexample {
  CovarianceMatrix sigma;
  HermiteWitness witness;
  BoundedWitnessFunction bounded;
  TruncationChoice truncation;
};

/// Gaussian half of the pipeline: witness, truncation level, centered h.
inline Counterexample build_counterexample(const BiasedDistribution& d, const CounterexampleConfig& cfg) {
  CovarianceMatrix sigma = covariance_from_distribution(d);
  HermiteWitness w = find_hermite_witness(sigma, cfg.d_max, cfg.seed);
  if (cfg.forced_alpha) w = make_hermite_witness(sigma, w.s, *cfg.forced_alpha);
  if (w.product_moment == 0) throw NotFoundError("forced alpha gives a zero product moment");
  TruncationChoice choice = choose_truncation_level(w, sigma, cfg.gaussian_samples, cfg.seed, cfg.plan);
  w.alpha_const = choice.alpha_const;
  BoundedWitnessFunction h = truncate_and_center(w, choice.M);
  return Counterexample{std::move(sigma), std::move(w), std::move(h), choice};
}

/// Every singleton, `pairs` distinct random pairs, and the full set [n].
inline std::vector<Subset> probe_subsets(std::size_t n, std::size_t pairs, std::uint64_t seed) {
  std::vector<Subset> out;
  for (std::size_t j = 0; j < n; ++j) {
    Subset s(n);
    s.set(j, true);
    out.push_back(std::move(s));
  }
  if (n >= 2) {
    Engine engine(derive_seed(seed, "witness.pairs"));
    std::set<std::pair<std::size_t, std::size_t>> seen;
    const std::size_t max_pairs = std::min<std::size_t>(pairs, n * (n - 1) / 2);
    while (seen.size() < max_pairs) {
      std::size_t a = engine() % n, b = engine() % n;
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      if (!seen.insert({a, b}).second) continue;
      Subset s(n);
      s.set(a, true);
      s.set(b, true);
      out.push_back(std::move(s));
    }
  }
  Subset full(n);
  for (std::size_t j = 0; j < n; ++j) full.set(j, true);
  out.push_back(std::move(full));
  return out;
}

struct VerificationConfig {
  std::size_t n = 2000;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::size_t pairs = 100;
  ShardPlan plan{};
};

struct VerificationReport {
  double alpha_const = 0.0;
  Rational eta;
  TestReport product;          // Lin(nu) on the [-1,1]-valued f
  TestReport rounded_product;  // Lin(nu) on the rounded sign function g
  std::vector<McEstimate> correlations;  // E[f chi_S] over probe_subsets
  double max_abs_correlation = 0.0;
  bool product_ok = false;     // |E[prod f]| >= alpha_const - 3 se
  bool rounded_ok = false;     // |E[prod g]| >= alpha_const / 2 - 3 se
  bool correlations_ok = false;  // every |E[f chi_S]| <= bound
};

inline constexpr double kCorrelationBound = 0.05;

/// Cube half of the pipeline: embed h, round it, and measure both the test
/// statistic and the character correlations.
inline VerificationReport verify_counterexample(const BiasedDistribution& d, const Counterexample& ce,
                                                const VerificationConfig& cfg) {
  VerificationReport r;
  r.alpha_const = ce.witness.alpha_const;
  r.eta = eta(d);
  const CubeFunction f = clt_cube_function(ce.bounded, d.p(), cfg.n);
  r.product = product_expectation_mc(f, d, cfg.n, cfg.samples, derive_seed(cfg.seed, "verify.product"), cfg.plan);
  r.product_ok = std::abs(r.product.product_expectation) >= r.alpha_const - 3.0 * r.product.std_error;

  const auto subsets = probe_subsets(cfg.n, cfg.pairs, cfg.seed);
  r.correlations = mc_biased_correlations(f, subsets, d.p(), cfg.samples, derive_seed(cfg.seed, "verify.correlation"),
                                          cfg.plan);
  for (const auto& c : r.correlations) r.max_abs_correlation = std::max(r.max_abs_correlation, std::abs(c.estimate));
  r.correlations_ok = r.max_abs_correlation <= kCorrelationBound;

  if (r.eta < 1) {
    const CubeFunction g = round_to_signs(f, cfg.seed);
    r.rounded_product =
        product_expectation_mc(g, d, cfg.n, cfg.samples, derive_seed(cfg.seed, "verify.rounded"), cfg.plan);
    r.rounded_ok =
        std::abs(r.rounded_product.product_expectation) >= r.alpha_const / 2.0 - 3.0 * r.rounded_product.std_error;
  }
  return r;
}

}  // namespace biaslin
