#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "biaslin/error.hpp"
#include "biaslin/rational.hpp"

namespace biaslin {

using Exponent = std::vector<unsigned>;

inline constexpr unsigned kMaxSymmetrizeArity = 10;
inline constexpr unsigned kDefaultSearchDegree = 12;

/// Multivariate polynomial with exact rational coefficients. Terms are keyed
/// by dense exponent vectors; zero coefficients are never stored.
class SparsePoly {
 public:
  explicit SparsePoly(unsigned nvars) : nvars_(nvars) {}

  static SparsePoly constant(unsigned nvars, const Rational& c) {
    SparsePoly f(nvars);
    f.add_term(Exponent(nvars, 0), c);
    return f;
  }
  static SparsePoly monomial(Exponent e, const Rational& c) {
    SparsePoly f(static_cast<unsigned>(e.size()));
    f.add_term(std::move(e), c);
    return f;
  }
  static SparsePoly variable(unsigned nvars, unsigned i) {
    Exponent e(nvars, 0);
    e.at(i) = 1;
    return monomial(std::move(e), Rational(1));
  }

  unsigned nvars() const { return nvars_; }
  const std::map<Exponent, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(Exponent e, const Rational& c) {
    if (e.size() != nvars_) throw PreconditionError("exponent vector length differs from nvars");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(std::move(e), c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Rational coefficient(const Exponent& s) const {
    if (s.size() != nvars_) throw PreconditionError("exponent vector length differs from nvars");
    auto it = terms_.find(s);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// True when the partial derivative in variable i is not identically zero.
  bool depends_on(unsigned i) const {
    return std::any_of(terms_.begin(), terms_.end(), [i](const auto& t) { return t.first[i] > 0; });
  }

  Rational evaluate(std::span<const Rational> x) const {
    if (x.size() != nvars_) throw PreconditionError("point dimension differs from nvars");
    Rational total = 0;
    for (const auto& [e, c] : terms_) {
      Rational term = c;
      for (unsigned i = 0; i < nvars_; ++i) {
        for (unsigned r = 0; r < e[i]; ++r) term *= x[i];
      }
      total += term;
    }
    return total;
  }

  SparsePoly& operator+=(const SparsePoly& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  SparsePoly& operator-=(const SparsePoly& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  SparsePoly& operator*=(const Rational& c) {
    if (c == 0) {
      terms_.clear();
    } else {
      for (auto& [e, v] : terms_) v *= c;
    }
    return *this;
  }

  friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) { return a += b; }
  friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) { return a -= b; }
  friend SparsePoly operator*(SparsePoly a, const Rational& c) { return a *= c; }

  friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
    a.check_same(b);
    SparsePoly out(a.nvars_);
    Exponent e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (unsigned i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }

  bool operator==(const SparsePoly&) const = default;

 private:
  void check_same(const SparsePoly& o) const {
    if (o.nvars_ != nvars_) throw PreconditionError("polynomials over different variable counts");
  }

  unsigned nvars_;
  std::map<Exponent, Rational> terms_;
};

inline SparsePoly poly_pow(const SparsePoly& q, unsigned d) {
  SparsePoly out = SparsePoly::constant(q.nvars(), Rational(1));
  for (unsigned i = 0; i < d; ++i) out = out * q;
  return out;
}

/// Sum of f over all k! coordinate permutations (no 1/k! normalization).
inline SparsePoly symmetrize(const SparsePoly& f) {
  const unsigned k = f.nvars();
  if (k > kMaxSymmetrizeArity) {
    throw InvalidArityError("symmetrize enumerates k! permutations; k = " + std::to_string(k) + " exceeds " +
                            std::to_string(kMaxSymmetrizeArity));
  }
  std::vector<unsigned> perm(k);
  std::iota(perm.begin(), perm.end(), 0U);
  SparsePoly out(k);
  Exponent moved(k);
  do {
    for (const auto& [e, c] : f.terms()) {
      for (unsigned i = 0; i < k; ++i) moved[perm[i]] = e[i];
      out.add_term(moved, c);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

inline Rational coefficient(const SparsePoly& f, const Exponent& s) { return f.coefficient(s); }

/// t^T V t for a symmetric k x k matrix V.
inline SparsePoly quadratic_form(const std::vector<std::vector<Rational>>& v) {
  const auto k = static_cast<unsigned>(v.size());
  SparsePoly q(k);
  for (unsigned i = 0; i < k; ++i) {
    Exponent e(k, 0);
    e[i] = 2;
    q.add_term(e, v[i][i]);
    for (unsigned j = i + 1; j < k; ++j) {
      Exponent ej(k, 0);
      ej[i] = ej[j] = 1;
      q.add_term(ej, v[i][j] + v[j][i]);
    }
  }
  return q;
}

struct AllCoordinatesMonomial {
  unsigned degree = 0;  // the power d
  Exponent exponent;    // s, every entry >= 1
  Rational coefficient; // coefficient of s in Sym(q^d)
};

/// Smallest d <= d_max (then lexicographically smallest s) such that Sym(q^d)
/// has a nonzero coefficient on a monomial divisible by x_1 x_2 ... x_k.
inline std::optional<AllCoordinatesMonomial> find_all_coordinates_monomial(const SparsePoly& q,
                                                                         unsigned d_max = kDefaultSearchDegree) {
  const unsigned k = q.nvars();
  for (unsigned i = 0; i < k; ++i) {
    if (!q.depends_on(i)) {
      throw PreconditionError("polynomial does not depend on variable " + std::to_string(i + 1) +
                              " (its partial derivative vanishes identically)");
    }
  }
  SparsePoly power = SparsePoly::constant(k, Rational(1));
  for (unsigned d = 1; d <= d_max; ++d) {
    power = power * q;
    // Sym maps monomials with all exponents >= 1 to such monomials, so it is
    // enough to symmetrize that part of q^d.
    SparsePoly full_support(k);
    for (const auto& [e, c] : power.terms()) {
      if (std::all_of(e.begin(), e.end(), [](unsigned v) { return v >= 1; })) full_support.add_term(e, c);
    }
    if (full_support.is_zero()) continue;
    const SparsePoly sym = symmetrize(full_support);
    if (!sym.is_zero()) {
      const auto& [s, c] = *sym.terms().begin();
      return AllCoordinatesMonomial{d, s, c};
    }
  }
  return std::nullopt;
}

}  // namespace biaslin
