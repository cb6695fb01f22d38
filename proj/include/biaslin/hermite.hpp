#pragma once

#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "biaslin/distributions.hpp"
#include "biaslin/error.hpp"
#include "biaslin/polyalg.hpp"
#include "biaslin/random.hpp"
#include "biaslin/rational.hpp"

namespace biaslin {

inline constexpr unsigned kMaxHermiteDegree = 64;
inline constexpr double kPsdTolerance = 1e-9;

/// Monic probabilists' Hermite polynomial: H_{j+1} = x H_j - j H_{j-1}.
inline double hermite_eval(unsigned j, double x) {
  if (j > kMaxHermiteDegree) {
    throw DegreeError("Hermite degree " + std::to_string(j) + " exceeds " + std::to_string(kMaxHermiteDegree));
  }
  double prev = 1.0;
  if (j == 0) return prev;
  double cur = x;
  for (unsigned i = 1; i < j; ++i) {
    const double next = x * cur - static_cast<double>(i) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Derivative H_j' = j H_{j-1}.
inline double hermite_derivative(unsigned j, double x) {
  return j == 0 ? 0.0 : static_cast<double>(j) * hermite_eval(j - 1, x);
}

/// Unit-diagonal symmetric PSD matrix, held exactly and as doubles. The
/// double copy carries a pivoted lower-triangular square-root factor.
class CovarianceMatrix {
 public:
  static CovarianceMatrix from_exact(std::vector<std::vector<Rational>> entries) {
    CovarianceMatrix m;
    m.k_ = static_cast<unsigned>(entries.size());
    if (m.k_ == 0) throw MatrixError("empty covariance matrix");
    for (unsigned i = 0; i < m.k_; ++i) {
      if (entries[i].size() != m.k_) throw MatrixError("covariance matrix is not square");
      if (entries[i][i] != 1) throw MatrixError("covariance diagonal entry " + std::to_string(i + 1) + " is not 1");
      for (unsigned j = 0; j < i; ++j) {
        if (entries[i][j] != entries[j][i]) throw MatrixError("covariance matrix is not symmetric");
      }
    }
    m.exact_ = std::move(entries);
    m.values_.assign(m.k_ * m.k_, 0.0);
    for (unsigned i = 0; i < m.k_; ++i) {
      for (unsigned j = 0; j < m.k_; ++j) m.values_[i * m.k_ + j] = to_double(m.exact_[i][j]);
    }
    m.factorize();
    return m;
  }

  static CovarianceMatrix identity(unsigned k) { return equicorrelated(k, Rational(0)); }

  /// All off-diagonal entries equal rho.
  static CovarianceMatrix equicorrelated(unsigned k, const Rational& rho) {
    std::vector<std::vector<Rational>> e(k, std::vector<Rational>(k, rho));
    for (unsigned i = 0; i < k; ++i) e[i][i] = 1;
    return from_exact(std::move(e));
  }

  unsigned k() const { return k_; }
  const Rational& exact(unsigned i, unsigned j) const { return exact_[i][j]; }
  const std::vector<std::vector<Rational>>& exact() const { return exact_; }
  double value(unsigned i, unsigned j) const { return values_[i * k_ + j]; }

  /// V = Sigma - I.
  std::vector<std::vector<Rational>> v_matrix() const {
    auto v = exact_;
    for (unsigned i = 0; i < k_; ++i) v[i][i] -= 1;
    return v;
  }

  /// 0-based rows of V that vanish (coordinates uncorrelated with all others).
  std::vector<unsigned> zero_v_rows() const {
    std::vector<unsigned> out;
    for (unsigned i = 0; i < k_; ++i) {
      bool zero = true;
      for (unsigned j = 0; j < k_; ++j) zero = zero && (i == j || exact_[i][j] == 0);
      if (zero) out.push_back(i);
    }
    return out;
  }

  /// Writes a draw from N(0, Sigma) into out, consuming k standard normals.
  void sample(Engine& engine, std::span<double> out) const {
    thread_local std::vector<double> g;
    g.resize(k_);
    std::normal_distribution<double> normal;
    for (auto& v : g) v = normal(engine);
    for (unsigned r = 0; r < k_; ++r) {
      double acc = 0.0;
      for (unsigned c = 0; c <= r; ++c) acc += factor_[r * k_ + c] * g[c];
      out[pivot_[r]] = acc;
    }
  }

 private:
  CovarianceMatrix() = default;

  void factorize() {
    const unsigned n = k_;
    std::vector<double> a = values_;
    pivot_.resize(n);
    std::iota(pivot_.begin(), pivot_.end(), 0U);
    factor_.assign(n * n, 0.0);
    auto at = [&](unsigned i, unsigned j) { return a[pivot_[i] * n + pivot_[j]]; };
    for (unsigned j = 0; j < n; ++j) {
      unsigned best = j;
      double best_d = -1e300;
      for (unsigned i = j; i < n; ++i) {
        double d = at(i, i);
        for (unsigned m = 0; m < j; ++m) d -= factor_[i * n + m] * factor_[i * n + m];
        if (d > best_d) {
          best_d = d;
          best = i;
        }
      }
      if (best != j) {
        std::swap(pivot_[j], pivot_[best]);
        for (unsigned m = 0; m < j; ++m) std::swap(factor_[j * n + m], factor_[best * n + m]);
      }
      if (best_d < -kPsdTolerance) throw MatrixError("covariance matrix is not positive semi-definite");
      if (best_d <= kPsdTolerance) {
        // Remaining Schur complement must vanish for a PSD matrix.
        for (unsigned i = j; i < n; ++i) {
          for (unsigned l = j; l < n; ++l) {
            double s = at(i, l);
            for (unsigned m = 0; m < j; ++m) s -= factor_[i * n + m] * factor_[l * n + m];
            if (std::abs(s) > 1e-7) throw MatrixError("covariance matrix is not positive semi-definite");
          }
        }
        return;
      }
      const double diag = std::sqrt(best_d);
      factor_[j * n + j] = diag;
      for (unsigned i = j + 1; i < n; ++i) {
        double s = at(i, j);
        for (unsigned m = 0; m < j; ++m) s -= factor_[i * n + m] * factor_[j * n + m];
        factor_[i * n + j] = s / diag;
      }
    }
  }

  unsigned k_ = 0;
  std::vector<std::vector<Rational>> exact_;
  std::vector<double> values_;
  std::vector<double> factor_;
  std::vector<unsigned> pivot_;
};

/// Sigma_ij = E[(X_i - p)(X_j - p)] / (p - p^2).
inline CovarianceMatrix covariance_from_distribution(const BiasedDistribution& d) {
  const unsigned k = d.k();
  const Rational& p = d.p();
  const Rational var = p - p * p;
  std::vector<std::vector<Rational>> e(k, std::vector<Rational>(k, Rational(1)));
  for (unsigned i = 0; i < k; ++i) {
    for (unsigned j = i + 1; j < k; ++j) e[i][j] = e[j][i] = (d.pair_moment(i, j) - p * p) / var;
  }
  return CovarianceMatrix::from_exact(std::move(e));
}

/// Exact E[prod_i H_{s_i}(X_i)] for X ~ N(0, Sigma), read off the coefficient
/// of t^s in (t^T V t)^d with 2d = |s|. Powers are cached across calls.
class HermiteMoments {
 public:
  explicit HermiteMoments(const CovarianceMatrix& sigma)
      : k_(sigma.k()), form_(quadratic_form(sigma.v_matrix())) {
    powers_.push_back(SparsePoly::constant(k_, Rational(1)));
  }

  Rational expectation(const Exponent& s) {
    if (s.size() != k_) throw PreconditionError("degree vector length differs from k");
    const unsigned total = std::accumulate(s.begin(), s.end(), 0U);
    if (total % 2 == 1) return 0;
    const unsigned d = total / 2;
    while (powers_.size() <= d) powers_.push_back(powers_.back() * form_);
    BigInt fact_s = 1;
    for (unsigned si : s) fact_s *= factorial(si);
    const BigInt denom = factorial(d) * (BigInt(1) << d);
    return Rational(fact_s, denom) * powers_[d].coefficient(s);
  }

 private:
  unsigned k_;
  SparsePoly form_;
  std::vector<SparsePoly> powers_;
};

inline Rational hermite_product_expectation(const Exponent& s, const CovarianceMatrix& sigma) {
  return HermiteMoments(sigma).expectation(s);
}

/// Sharded Monte Carlo of E[fn(Z)] for Z ~ N(0, Sigma).
template <class Fn>
McEstimate gaussian_mc_expectation(const CovarianceMatrix& sigma, std::uint64_t samples, std::uint64_t seed,
                                   const ShardPlan& plan, Fn&& fn) {
  if (samples < 1) throw PreconditionError("samples must be >= 1");
  return mc_mean(samples, seed, plan, [&](Engine& engine) {
    thread_local std::vector<double> z;
    z.resize(sigma.k());
    sigma.sample(engine, z);
    return fn(std::span<const double>(z));
  });
}

/// Monte Carlo cross-check of hermite_product_expectation.
inline McEstimate gaussian_mc_moment(const Exponent& s, const CovarianceMatrix& sigma, std::uint64_t samples,
                                     std::uint64_t seed, const ShardPlan& plan = {}) {
  if (s.size() != sigma.k()) throw PreconditionError("degree vector length differs from k");
  for (unsigned si : s) {
    if (si > kMaxHermiteDegree) throw DegreeError("Hermite degree exceeds cap");
  }
  return gaussian_mc_expectation(sigma, samples, seed, plan, [&](std::span<const double> z) {
    double prod = 1.0;
    for (std::size_t i = 0; i < s.size(); ++i) prod *= hermite_eval(s[i], z[i]);
    return prod;
  });
}

}  // namespace biaslin
