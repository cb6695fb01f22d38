#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "biaslin/error.hpp"
#include "biaslin/rational.hpp"

namespace biaslin {

inline constexpr unsigned kMaxTableArity = 24;

inline unsigned hamming_weight(std::uint64_t x) { return static_cast<unsigned>(std::popcount(x)); }

/// A distribution nu on {0,1}^k in the class D(p,k): every coordinate has
/// marginal P[X_i = 1] = p and the support lies in the even-weight vectors.
/// Table index i encodes x with coordinate 1 as the most significant bit.
/// Values are immutable once constructed and validated.
class BiasedDistribution {
 public:
  static BiasedDistribution from_table(unsigned k, Rational p, std::vector<Rational> probs,
                                       std::optional<std::vector<Rational>> q = std::nullopt) {
    BiasedDistribution d;
    d.k_ = k;
    d.p_ = std::move(p);
    d.probs_ = std::move(probs);
    d.q_ = std::move(q);
    d.validate();
    return d;
  }

  /// Hamming-symmetric member: every x of weight 2i gets probability q[i].
  static BiasedDistribution from_q(unsigned k, Rational p, std::vector<Rational> q) {
    check_arity(k);
    if (q.size() != k / 2 + 1) {
      throw InvalidDistributionError("q-vector must have floor(k/2)+1 entries");
    }
    std::vector<Rational> probs(std::size_t{1} << k);
    for (std::uint64_t x = 0; x < probs.size(); ++x) {
      const unsigned w = hamming_weight(x);
      if (w % 2 == 0) probs[x] = q[w / 2];
    }
    return from_table(k, std::move(p), std::move(probs), std::move(q));
  }

  unsigned k() const { return k_; }
  const Rational& p() const { return p_; }
  const std::vector<Rational>& probs() const { return probs_; }
  const Rational& prob(std::uint64_t x) const { return probs_[x]; }
  const std::optional<std::vector<Rational>>& q() const { return q_; }
  std::uint64_t table_size() const { return probs_.size(); }

  /// Support points in increasing table order.
  std::vector<std::uint64_t> support() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = 0; x < probs_.size(); ++x) {
      if (probs_[x] != 0) out.push_back(x);
    }
    return out;
  }

  bool has_full_even_weight_support() const {
    for (std::uint64_t x = 0; x < probs_.size(); ++x) {
      if (hamming_weight(x) % 2 == 0 && probs_[x] == 0) return false;
    }
    return true;
  }

  /// P[X_i = 1], 0-based coordinate.
  Rational marginal(unsigned i) const {
    Rational m = 0;
    for (std::uint64_t x = 0; x < probs_.size(); ++x) {
      if (bit(x, i)) m += probs_[x];
    }
    return m;
  }

  /// E[X_i X_j], 0-based coordinates.
  Rational pair_moment(unsigned i, unsigned j) const {
    Rational m = 0;
    for (std::uint64_t x = 0; x < probs_.size(); ++x) {
      if (bit(x, i) && bit(x, j)) m += probs_[x];
    }
    return m;
  }

  /// q-vector if the table is constant on every Hamming-weight class.
  std::optional<std::vector<Rational>> symmetric_q() const {
    if (q_) return q_;
    std::vector<std::optional<Rational>> seen(k_ + 1);
    for (std::uint64_t x = 0; x < probs_.size(); ++x) {
      auto& slot = seen[hamming_weight(x)];
      if (!slot) {
        slot = probs_[x];
      } else if (*slot != probs_[x]) {
        return std::nullopt;
      }
    }
    std::vector<Rational> q(k_ / 2 + 1);
    for (unsigned i = 0; i <= k_ / 2; ++i) q[i] = *seen[2 * i];
    return q;
  }

  bool operator==(const BiasedDistribution& o) const {
    return k_ == o.k_ && p_ == o.p_ && probs_ == o.probs_;
  }

  bool bit(std::uint64_t x, unsigned i) const { return (x >> (k_ - 1 - i)) & 1U; }

  /// Table index as a k-bit string, coordinate 1 leftmost.
  std::string bits(std::uint64_t x) const {
    std::string s(k_, '0');
    for (unsigned i = 0; i < k_; ++i) s[i] = bit(x, i) ? '1' : '0';
    return s;
  }

  static void check_arity(unsigned k) {
    if (k < 1 || k > kMaxTableArity) {
      throw InvalidArityError("k must be in [1, " + std::to_string(kMaxTableArity) +
                              "] for a materialized table, got " + std::to_string(k));
    }
  }

 private:
  BiasedDistribution() = default;

  void validate() const {
    check_arity(k_);
    if (p_ <= 0 || p_ >= 1) throw InvalidDistributionError("bias p must lie in (0,1)");
    if (probs_.size() != (std::size_t{1} << k_)) {
      throw InvalidDistributionError("probability table must have 2^k entries");
    }
    Rational total = 0;
    for (std::uint64_t x = 0; x < probs_.size(); ++x) {
      if (probs_[x] < 0) throw InvalidDistributionError("negative probability at " + bits(x));
      if (probs_[x] != 0 && hamming_weight(x) % 2 != 0) {
        throw InvalidDistributionError("odd-weight support point " + bits(x));
      }
      total += probs_[x];
    }
    if (total != 1) throw InvalidDistributionError("probabilities sum to " + to_string(total) + ", not 1");
    for (unsigned i = 0; i < k_; ++i) {
      const Rational m = marginal(i);
      if (m != p_) {
        throw InvalidDistributionError("coordinate " + std::to_string(i + 1) + " has marginal " +
                                       to_string(m) + ", expected " + to_string(p_));
      }
    }
    if (q_) {
      if (q_->size() != k_ / 2 + 1) throw InvalidDistributionError("q-vector has wrong length");
      for (std::uint64_t x = 0; x < probs_.size(); ++x) {
        const unsigned w = hamming_weight(x);
        if (w % 2 == 0 && probs_[x] != (*q_)[w / 2]) {
          throw InvalidDistributionError("table disagrees with q-vector at " + bits(x));
        }
      }
    }
  }

  unsigned k_ = 0;
  Rational p_;
  std::vector<Rational> probs_;
  std::optional<std::vector<Rational>> q_;
};

namespace detail {

/// Column i of the symmetric constraint system: the number of weight-2i
/// points in total, with X_1 = 1, and with X_1 = X_2 = 1.
inline std::array<Rational, 3> constraint_column(unsigned k, unsigned i) {
  const int ki = static_cast<int>(k);
  const int w = 2 * static_cast<int>(i);
  return {Rational(binomial(ki, w)), Rational(binomial(ki - 1, w - 1)),
          Rational(binomial(ki - 2, w - 2))};
}

/// Exact solve of the 3 x |cols| system restricted to `cols`. Returns the
/// unique solution when the columns are independent and the system is
/// consistent.
inline std::optional<std::vector<Rational>> solve_restricted(unsigned k, const std::vector<unsigned>& cols,
                                                             const std::array<Rational, 3>& rhs) {
  const std::size_t m = cols.size();
  std::vector<std::vector<Rational>> a(3, std::vector<Rational>(m + 1));
  for (std::size_t c = 0; c < m; ++c) {
    const auto col = constraint_column(k, cols[c]);
    for (int r = 0; r < 3; ++r) a[r][c] = col[r];
  }
  for (int r = 0; r < 3; ++r) a[r][m] = rhs[r];

  std::size_t row = 0;
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = row;
    while (piv < 3 && a[piv][c] == 0) ++piv;
    if (piv == 3) return std::nullopt;  // dependent columns
    std::swap(a[piv], a[row]);
    for (std::size_t r = 0; r < 3; ++r) {
      if (r == row || a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[row][c];
      for (std::size_t cc = c; cc <= m; ++cc) a[r][cc] -= f * a[row][cc];
    }
    ++row;
  }
  for (std::size_t r = row; r < 3; ++r) {
    if (a[r][m] != 0) return std::nullopt;  // inconsistent
  }
  std::vector<Rational> x(m);
  for (std::size_t c = 0; c < m; ++c) x[c] = a[c][m] / a[c][c];
  return x;
}

inline unsigned constraint_rank(unsigned k, const std::vector<unsigned>& cols) {
  std::vector<std::array<Rational, 3>> vs;
  for (unsigned c : cols) vs.push_back(constraint_column(k, c));
  unsigned rank = 0;
  std::vector<bool> used(vs.size(), false);
  for (int r = 0; r < 3; ++r) {
    std::size_t piv = vs.size();
    for (std::size_t c = 0; c < vs.size(); ++c) {
      if (!used[c] && vs[c][r] != 0) {
        piv = c;
        break;
      }
    }
    if (piv == vs.size()) continue;
    used[piv] = true;
    ++rank;
    for (std::size_t c = 0; c < vs.size(); ++c) {
      if (c == piv || vs[c][r] == 0) continue;
      const Rational f = vs[c][r] / vs[piv][r];
      for (int rr = 0; rr < 3; ++rr) vs[c][rr] -= f * vs[piv][rr];
    }
  }
  return rank;
}

inline std::vector<Rational> flip_table(unsigned k, const std::vector<Rational>& probs) {
  const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  std::vector<Rational> out(probs.size());
  for (std::uint64_t x = 0; x < probs.size(); ++x) out[x ^ mask] = probs[x];
  return out;
}

inline bool in_case_interval(unsigned k, const Rational& p) {
  const Rational lo(1, k - 1), hi(2, k - 1);
  return p >= lo && p < hi;
}

}  // namespace detail

/// Sums  sum C(k,2i) q_i,  sum C(k-1,2i-1) q_i,  sum C(k-2,2i-2) q_i.
/// For a Hamming-symmetric nu these are total mass, P[X_1=1], E[X_1 X_2].
inline std::array<Rational, 3> constraint_sums(unsigned k, const std::vector<Rational>& q) {
  std::array<Rational, 3> out{0, 0, 0};
  for (unsigned i = 0; i < q.size(); ++i) {
    const auto col = detail::constraint_column(k, i);
    for (int r = 0; r < 3; ++r) out[r] += col[r] * q[i];
  }
  return out;
}

inline BiasedDistribution make_uniform_even_weight(unsigned k) {
  if (k < 3) throw InvalidArityError("uniform even-weight distribution needs k >= 3, got " + std::to_string(k));
  BiasedDistribution::check_arity(k);
  std::vector<Rational> q(k / 2 + 1, Rational(1, std::int64_t{1} << (k - 1)));
  return BiasedDistribution::from_q(k, Rational(1, 2), std::move(q));
}

/// The classical BLR distribution: uniform on even-weight points of {0,1}^3.
inline BiasedDistribution make_blr() { return make_uniform_even_weight(3); }

/// Flips every coordinate. Only even k keeps the support on even weights.
inline BiasedDistribution flip_coordinates(const BiasedDistribution& d) {
  if (d.k() % 2 != 0) {
    throw UnsupportedShapeError("flipping an odd-arity distribution leaves the even-weight class");
  }
  std::optional<std::vector<Rational>> q;
  if (d.q()) {
    q = std::vector<Rational>(d.q()->rbegin(), d.q()->rend());
  }
  return BiasedDistribution::from_table(d.k(), 1 - d.p(), detail::flip_table(d.k(), d.probs()), std::move(q));
}

/// Explicit q-vectors for p in [1/(k-1), 2/(k-1)) or 1-p in that range.
inline BiasedDistribution make_case_distribution(unsigned k, const Rational& p) {
  if (k < 4) throw OutOfRangeError("case distributions need k >= 4, got k = " + std::to_string(k));
  BiasedDistribution::check_arity(k);
  const Rational kk(k);
  const unsigned s = k / 2;
  std::vector<Rational> q(s + 1, Rational(0));
  if (detail::in_case_interval(k, p)) {
    if (k % 2 == 1) {
      q[0] = 1 + kk * p * p / 2 - kk * kk * p / (2 * (kk - 1));
      q[1] = ((kk - 2) * p - (kk - 1) * p * p) / ((kk - 1) * (kk - 3));
      q[(k - 1) / 2] = ((kk - 1) * p * p - p) / ((kk - 1) * (kk - 3));
    } else {
      q[0] = ((kk - 1) * p * p - (kk + 1) * p + 2) / 2;
      q[1] = (p - p * p) / (kk - 2);
      q[k / 2] = ((kk - 1) * p * p - p) / (kk - 2);
    }
    return BiasedDistribution::from_q(k, p, std::move(q));
  }
  if (detail::in_case_interval(k, 1 - p)) {
    if (k % 2 == 1) {
      q[0] = 1 + kk * p * p / (kk - 3) - kk * (2 * kk - 5) * p / ((kk - 1) * (kk - 3));
      q[(k - 3) / 2] = (3 * (kk - 2) * p - 3 * (kk - 1) * p * p) / ((kk - 1) * (kk - 2) * (kk - 3));
      q[(k - 1) / 2] = ((kk - 1) * p * p - (kk - 4) * p) / (2 * (kk - 1));
      return BiasedDistribution::from_q(k, p, std::move(q));
    }
    return flip_coordinates(make_case_distribution(k, 1 - p));
  }
  throw OutOfRangeError("p = " + to_string(p) + " outside [1/(k-1), 2/(k-1)) U (1-2/(k-1), 1-1/(k-1)] = [" +
                        to_string(Rational(1, k - 1)) + ", " + to_string(Rational(2, k - 1)) + ") U (" +
                        to_string(1 - Rational(2, k - 1)) + ", " + to_string(1 - Rational(1, k - 1)) +
                        "] for k = " + std::to_string(k));
}

/// Indices i (0-based) with E[X_i X_j] = p^2 for every j != i.
inline std::vector<unsigned> pairwise_independent_coordinates(const BiasedDistribution& d) {
  const unsigned k = d.k();
  const Rational p2 = d.p() * d.p();
  std::vector<std::vector<bool>> ok(k, std::vector<bool>(k, true));
  for (unsigned i = 0; i < k; ++i) {
    for (unsigned j = i + 1; j < k; ++j) ok[i][j] = ok[j][i] = d.pair_moment(i, j) == p2;
  }
  std::vector<unsigned> out;
  for (unsigned i = 0; i < k; ++i) {
    bool all = true;
    for (unsigned j = 0; j < k; ++j) all = all && (i == j || ok[i][j]);
    if (all) out.push_back(i);
  }
  return out;
}

inline bool is_pairwise_independent(const BiasedDistribution& d) {
  return pairwise_independent_coordinates(d).size() == d.k();
}

/// max over i != j of P[X_i = X_j].
inline Rational eta(const BiasedDistribution& d) {
  const unsigned k = d.k();
  if (k < 2) throw InvalidArityError("eta needs k >= 2");
  Rational best = 0;
  for (unsigned i = 0; i < k; ++i) {
    for (unsigned j = i + 1; j < k; ++j) {
      Rational agree = 0;
      for (std::uint64_t x = 0; x < d.table_size(); ++x) {
        if (d.bit(x, i) == d.bit(x, j)) agree += d.prob(x);
      }
      best = std::max(best, agree);
    }
  }
  return best;
}

/// Makes every q entry strictly positive: moves along a direction that keeps
/// all three constraint sums fixed, with step half the largest admissible one.
inline BiasedDistribution make_full_support_perturbation(const BiasedDistribution& d) {
  const unsigned k = d.k();
  const auto sym = d.symmetric_q();
  if (!sym) throw UnsupportedShapeError("full-support perturbation needs a Hamming-symmetric distribution");
  const Rational& p = d.p();
  if (k > 3 && (p == Rational(1, k - 1) || p == 1 - Rational(1, k - 1))) {
    throw BoundaryInfeasibleError("p = " + to_string(p) + " is on the boundary {1/(k-1), 1-1/(k-1)} for k = " +
                                  std::to_string(k) +
                                  ": a pairwise independent distribution cannot have full even-weight support");
  }
  if (!is_pairwise_independent(d)) {
    throw PreconditionError("full-support perturbation needs a pairwise independent input");
  }
  const std::vector<Rational>& q = *sym;
  if (std::all_of(q.begin(), q.end(), [](const Rational& v) { return v > 0 && v < 1; })) {
    return BiasedDistribution::from_q(k, p, q);
  }

  std::vector<unsigned> all(q.size());
  std::iota(all.begin(), all.end(), 0U);
  const unsigned target_rank = detail::constraint_rank(k, all);
  std::vector<unsigned> basis;
  for (unsigned i = 0; i < q.size() && basis.size() < target_rank; ++i) {
    if (q[i] <= 0) continue;
    auto trial = basis;
    trial.push_back(i);
    if (detail::constraint_rank(k, trial) == trial.size()) basis = std::move(trial);
  }
  if (basis.size() != target_rank) {
    throw InternalError("positive entries of q do not span the constraint columns");
  }

  std::vector<Rational> dir(q.size(), Rational(1));
  std::array<Rational, 3> rhs{0, 0, 0};
  for (unsigned i = 0; i < q.size(); ++i) {
    if (std::find(basis.begin(), basis.end(), i) != basis.end()) continue;
    const auto col = detail::constraint_column(k, i);
    for (int r = 0; r < 3; ++r) rhs[r] -= col[r];
  }
  const auto sol = detail::solve_restricted(k, basis, rhs);
  if (!sol) throw InternalError("homogeneous direction system is inconsistent");
  for (std::size_t b = 0; b < basis.size(); ++b) dir[basis[b]] = (*sol)[b];

  std::optional<Rational> max_step;
  for (unsigned i = 0; i < q.size(); ++i) {
    std::optional<Rational> bound;
    if (dir[i] < 0) bound = q[i] / -dir[i];
    if (dir[i] > 0) bound = (1 - q[i]) / dir[i];
    if (bound && (!max_step || *bound < *max_step)) max_step = bound;
  }
  if (!max_step || *max_step <= 0) throw InternalError("no admissible perturbation step");
  const Rational step = *max_step / 2;
  std::vector<Rational> out(q.size());
  for (unsigned i = 0; i < q.size(); ++i) {
    out[i] = q[i] + step * dir[i];
    if (out[i] <= 0 || out[i] >= 1) throw InternalError("perturbed q entry left (0,1)");
  }
  return BiasedDistribution::from_q(k, p, std::move(out));
}

/// Smallest odd integer strictly above 1 + 1/min(p, 1-p).
inline unsigned composition_block_size(const Rational& p) {
  const Rational m = rational_min(p, 1 - p);
  const Rational t = 1 + 1 / m;
  BigInt fl = numerator(t) / denominator(t);
  unsigned ell = static_cast<unsigned>(fl) + 1;
  if (ell % 2 == 0) ++ell;
  return ell;
}

/// Pairwise independent member of D(p,k) with full even-weight support for
/// p in [2/(k-1), 1-2/(k-1)], p != 1/2: the first l coordinates follow a
/// parity-selected l-query distribution, the rest are i.i.d. mu_p.
inline BiasedDistribution make_composed_distribution(unsigned k, const Rational& p) {
  if (k < 6) throw OutOfRangeError("composed distributions need k >= 6, got k = " + std::to_string(k));
  BiasedDistribution::check_arity(k);
  if (p == Rational(1, 2)) throw PreconditionError("p = 1/2 is served by make_uniform_even_weight");
  const Rational lo(2, k - 1);
  if (p < lo || p > 1 - lo) {
    throw OutOfRangeError("p = " + to_string(p) + " outside [2/(k-1), 1-2/(k-1)] = [" + to_string(lo) + ", " +
                          to_string(1 - lo) + "] for k = " + std::to_string(k));
  }
  const unsigned ell = composition_block_size(p);
  if (ell >= k) throw InternalError("block size l = " + std::to_string(ell) + " does not fit in k = " + std::to_string(k));

  auto full = [](const BiasedDistribution& d) {
    return d.has_full_even_weight_support() ? d : make_full_support_perturbation(d);
  };
  const BiasedDistribution even_block = full(make_case_distribution(ell, p));
  const std::vector<Rational> odd_block =
      detail::flip_table(ell, full(make_case_distribution(ell, 1 - p)).probs());

  const unsigned tail = k - ell;
  std::vector<Rational> probs(std::size_t{1} << k);
  for (std::uint64_t z = 0; z < (std::uint64_t{1} << tail); ++z) {
    const unsigned wz = hamming_weight(z);
    Rational pz = 1;
    for (unsigned j = 0; j < tail; ++j) pz *= (j < wz ? p : 1 - p);
    const auto& block = (wz % 2 == 0) ? even_block.probs() : odd_block;
    for (std::uint64_t y = 0; y < (std::uint64_t{1} << ell); ++y) {
      probs[(y << tail) | z] = pz * block[y];
    }
  }
  return BiasedDistribution::from_table(k, p, std::move(probs));
}

/// Average over all coordinate permutations: each weight class gets its mean mass.
inline BiasedDistribution permutation_average(const BiasedDistribution& d) {
  const unsigned k = d.k();
  std::vector<Rational> mass(k + 1, Rational(0));
  for (std::uint64_t x = 0; x < d.table_size(); ++x) mass[hamming_weight(x)] += d.prob(x);
  std::vector<Rational> q(k / 2 + 1);
  for (unsigned i = 0; i <= k / 2; ++i) q[i] = mass[2 * i] / binomial(static_cast<int>(k), static_cast<int>(2 * i));
  return BiasedDistribution::from_q(k, d.p(), std::move(q));
}

/// Mixture: all-zeros w.p. p0, all-ones w.p. p1, uniform even-weight on {0,1}^4
/// otherwise, with p0 = 1 - 2p + p1. Default p1 = max(0, 2p - 1).
inline BiasedDistribution make_dfh19(const Rational& p, std::optional<Rational> p1_in = std::nullopt) {
  if (p <= 0 || p >= 1) throw InvalidMixtureError("p must lie in (0,1)");
  const Rational p1 = p1_in ? *p1_in : std::max(Rational(0), Rational(2 * p - 1));
  const Rational p0 = 1 - 2 * p + p1;
  if (p1 < 0 || p1 > 1 || p0 < 0 || p0 > 1 - p1) {
    throw InvalidMixtureError("mixture weights p0 = " + to_string(p0) + ", p1 = " + to_string(p1) + " are not valid");
  }
  const Rational rest = (1 - p0 - p1) / 8;
  std::vector<Rational> probs(16, Rational(0));
  for (std::uint64_t x = 0; x < 16; ++x) {
    if (hamming_weight(x) % 2 == 0) probs[x] = rest;
  }
  probs[0] += p0;
  probs[15] += p1;
  return BiasedDistribution::from_table(4, p, std::move(probs));
}

/// Pairwise independent, Hamming-symmetric member of D(p,k) whenever
/// 1/(k-1) <= p <= 1-1/(k-1); full even-weight support off the boundary.
inline BiasedDistribution construct_pairwise_independent(unsigned k, const Rational& p) {
  if (k < 3) throw OutOfRangeError("no pairwise independent distribution exists for k < 3");
  const Rational lo(1, k - 1);
  if (p < lo || p > 1 - lo) {
    throw OutOfRangeError("p = " + to_string(p) + " outside [1/(k-1), 1-1/(k-1)] = [" + to_string(lo) + ", " +
                          to_string(1 - lo) + "]");
  }
  if (p == Rational(1, 2)) return make_uniform_even_weight(k);
  if (detail::in_case_interval(k, p) || detail::in_case_interval(k, 1 - p)) {
    auto d = make_case_distribution(k, p);
    if (p == lo || p == 1 - lo) return d;
    return make_full_support_perturbation(d);
  }
  return permutation_average(make_composed_distribution(k, p));
}

struct BlrWitness {
  unsigned b = 0;
  std::vector<unsigned> z;
  std::array<unsigned, 3> triple{0, 1, 2};  // 0-based coordinates

  bool operator==(const BlrWitness&) const = default;
};

namespace detail {

inline unsigned gf2_rank(std::vector<std::uint64_t> rows) {
  unsigned rank = 0;
  for (int b = 63; b >= 0; --b) {
    const std::uint64_t mask = std::uint64_t{1} << b;
    auto it = std::find_if(rows.begin() + rank, rows.end(), [&](std::uint64_t r) { return r & mask; });
    if (it == rows.end()) continue;
    std::iter_swap(rows.begin() + rank, it);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && (rows[r] & mask)) rows[r] ^= rows[rank];
    }
    ++rank;
  }
  return rank;
}

inline std::optional<BlrWitness> blr_pattern(const BiasedDistribution& d, const std::array<unsigned, 3>& triple) {
  const unsigned k = d.k();
  std::vector<unsigned> rest;
  for (unsigned i = 0; i < k; ++i) {
    if (i != triple[0] && i != triple[1] && i != triple[2]) rest.push_back(i);
  }
  auto point = [&](unsigned x1, unsigned x2, unsigned x3, std::uint64_t z) {
    std::uint64_t x = 0;
    auto put = [&](unsigned coord, unsigned v) {
      if (v) x |= std::uint64_t{1} << (k - 1 - coord);
    };
    put(triple[0], x1);
    put(triple[1], x2);
    put(triple[2], x3);
    for (std::size_t r = 0; r < rest.size(); ++r) put(rest[r], (z >> (rest.size() - 1 - r)) & 1U);
    return x;
  };
  for (unsigned b = 0; b < 2; ++b) {
    for (std::uint64_t z = 0; z < (std::uint64_t{1} << rest.size()); ++z) {
      bool all = true;
      for (unsigned x1 = 0; x1 < 2 && all; ++x1) {
        for (unsigned x2 = 0; x2 < 2 && all; ++x2) all = d.prob(point(x1, x2, x1 ^ x2 ^ b, z)) != 0;
      }
      if (all) {
        BlrWitness w;
        w.b = b;
        w.triple = triple;
        for (std::size_t r = 0; r < rest.size(); ++r) w.z.push_back((z >> (rest.size() - 1 - r)) & 1U);
        return w;
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Whether supp(nu) contains a BLR pattern (x1, x2, x1^x2^b, z) and spans the
/// even-weight space over GF(2). By default only coordinates (1,2,3) are tried.
inline std::optional<BlrWitness> contains_blr(const BiasedDistribution& d, bool up_to_permutation = false) {
  const unsigned k = d.k();
  if (k < 3) throw InvalidArityError("contains_blr needs k >= 3");
  if (detail::gf2_rank(d.support()) != k - 1) return std::nullopt;
  if (!up_to_permutation) return detail::blr_pattern(d, {0, 1, 2});
  for (unsigned a = 0; a < k; ++a) {
    for (unsigned b = 0; b < k; ++b) {
      for (unsigned c = 0; c < k; ++c) {
        if (a == b || b == c || a == c) continue;
        if (auto w = detail::blr_pattern(d, {a, b, c})) return w;
      }
    }
  }
  return std::nullopt;
}

struct FeasibilityCertificate {
  bool feasible = false;
  bool bound_check = false;  // k >= 1 + 1/min(p, 1-p)
  std::optional<std::vector<Rational>> q;
  std::optional<BiasedDistribution> witness;
};

/// Whether some Hamming-symmetric q >= 0 meets the three constraint sums
/// (1, p, p^2), decided by enumerating basic solutions of the system.
/// Permutation averaging makes the symmetric restriction lossless.
inline FeasibilityCertificate feasibility_search(unsigned k, const Rational& p) {
  if (k < 1) throw InvalidArityError("k must be positive");
  if (p <= 0 || p >= 1) throw OutOfRangeError("p must lie in (0,1)");
  FeasibilityCertificate cert;
  cert.bound_check = (Rational(k) - 1) * rational_min(p, 1 - p) >= 1;

  const unsigned vars = k / 2 + 1;
  const std::array<Rational, 3> rhs{Rational(1), p, p * p};
  for (unsigned size = 1; size <= std::min(3U, vars) && !cert.feasible; ++size) {
    std::vector<bool> pick(vars, false);
    std::fill(pick.begin(), pick.begin() + size, true);
    do {
      std::vector<unsigned> cols;
      for (unsigned i = 0; i < vars; ++i) {
        if (pick[i]) cols.push_back(i);
      }
      const auto sol = detail::solve_restricted(k, cols, rhs);
      if (!sol || std::any_of(sol->begin(), sol->end(), [](const Rational& v) { return v < 0; })) continue;
      std::vector<Rational> q(vars, Rational(0));
      for (std::size_t c = 0; c < cols.size(); ++c) q[cols[c]] = (*sol)[c];
      cert.feasible = true;
      cert.q = q;
      if (k <= kMaxTableArity) cert.witness = BiasedDistribution::from_q(k, p, std::move(q));
      break;
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return cert;
}

}  // namespace biaslin
