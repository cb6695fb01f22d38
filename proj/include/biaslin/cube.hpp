#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "biaslin/bits.hpp"
#include "biaslin/error.hpp"
#include "biaslin/random.hpp"
#include "biaslin/rational.hpp"

namespace biaslin {

inline constexpr std::size_t kMaxDenseArity = 24;
inline constexpr std::size_t kAutoDenseArity = 16;

enum class RangeTag { Interval, Signs };

/// f(x) = scale * prod_j factors[j][x_j]. Lets expectations over nu^{(x)n}
/// factor coordinate by coordinate.
struct ProductForm {
  double scale = 1.0;
  std::vector<std::array<double, 2>> factors;

  double operator()(const BitVector& x) const {
    double v = scale;
    for (std::size_t j = 0; j < factors.size(); ++j) v *= factors[j][x.get(j) ? 1 : 0];
    return v;
  }
};

/// Function on {0,1}^n with values in [-1,1] (or {-1,1}): either a dense
/// table of 2^n values or a pure evaluation handle.
class CubeFunction {
 public:
  using Handle = std::function<double(const BitVector&)>;

  static CubeFunction dense(std::vector<double> values, RangeTag range = RangeTag::Interval,
                            std::optional<ProductForm> product = std::nullopt) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < values.size()) ++n;
    if (values.size() < 2 || (std::size_t{1} << n) != values.size()) {
      throw SizeError("dense table length must be a power of two, at least 2");
    }
    if (n > kMaxDenseArity) throw SizeError("dense tables are limited to n <= 24");
    for (double v : values) check_value(v, range);
    CubeFunction f;
    f.n_ = n;
    f.range_ = range;
    f.table_ = std::move(values);
    f.product_ = std::move(product);
    return f;
  }

  static CubeFunction handle(std::size_t n, Handle fn, RangeTag range = RangeTag::Interval,
                             std::optional<ProductForm> product = std::nullopt) {
    if (n < 1) throw SizeError("n must be positive");
    CubeFunction f;
    f.n_ = n;
    f.range_ = range;
    f.handle_ = std::move(fn);
    f.product_ = std::move(product);
    return f;
  }

  std::size_t n() const { return n_; }
  bool is_dense() const { return !handle_; }
  RangeTag range() const { return range_; }
  const std::optional<ProductForm>& product_form() const { return product_; }

  const std::vector<double>& table() const {
    if (!is_dense()) throw ModeError("operation needs a dense table; got an evaluation handle");
    return table_;
  }

  double operator()(const BitVector& x) const {
    if (x.size() != n_) throw SizeError("point dimension differs from n");
    return handle_ ? handle_(x) : table_[x.to_index()];
  }

  double at_index(std::uint64_t idx) const {
    return handle_ ? handle_(BitVector::from_index(idx, n_)) : table_[idx];
  }

  CubeFunction as_handle() const {
    if (!is_dense()) return *this;
    auto table = std::make_shared<const std::vector<double>>(table_);
    return handle(n_, [table](const BitVector& x) { return (*table)[x.to_index()]; }, range_, product_);
  }

  CubeFunction to_dense() const {
    if (is_dense()) return *this;
    if (n_ > kMaxDenseArity) throw SizeError("cannot materialize n > 24");
    std::vector<double> values(std::size_t{1} << n_);
    for (std::uint64_t i = 0; i < values.size(); ++i) values[i] = handle_(BitVector::from_index(i, n_));
    return dense(std::move(values), range_, product_);
  }

 private:
  CubeFunction() = default;

  static void check_value(double v, RangeTag range) {
    if (range == RangeTag::Signs ? (v != 1.0 && v != -1.0) : !(v >= -1.0 && v <= 1.0)) {
      throw PreconditionError("function value " + std::to_string(v) + " outside the declared range");
    }
  }

  std::size_t n_ = 0;
  RangeTag range_ = RangeTag::Interval;
  std::vector<double> table_;
  Handle handle_;
  std::optional<ProductForm> product_;
};

/// Subset of [n] from a table-order mask (coordinate 1 = most significant bit).
inline Subset subset_from_mask(std::uint64_t mask, std::size_t n) { return BitVector::from_index(mask, n); }

inline ProductForm character_product_form(const Subset& s, double scale = 1.0) {
  ProductForm pf;
  pf.scale = scale;
  pf.factors.resize(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) pf.factors[j] = s.get(j) ? std::array{1.0, -1.0} : std::array{1.0, 1.0};
  return pf;
}

/// chi_S(x) = prod_{i in S} (-1)^{x_i}, scaled by `sign` (+1 or -1). Dense
/// for n <= 16, a handle otherwise; both carry the product form.
inline CubeFunction signed_character(const Subset& s, double sign) {
  const std::size_t n = s.size();
  auto pf = character_product_form(s, sign);
  if (n <= kAutoDenseArity) {
    std::vector<double> values(std::size_t{1} << n);
    const std::uint64_t mask = s.to_index();
    for (std::uint64_t x = 0; x < values.size(); ++x) values[x] = (std::popcount(mask & x) & 1) ? -sign : sign;
    return CubeFunction::dense(std::move(values), RangeTag::Signs, std::move(pf));
  }
  return CubeFunction::handle(n, [s, sign](const BitVector& x) { return x.and_parity(s) ? -sign : sign; },
                              RangeTag::Signs, std::move(pf));
}

inline CubeFunction character(const Subset& s) { return signed_character(s, 1.0); }
inline CubeFunction character(std::uint64_t mask, std::size_t n) { return character(subset_from_mask(mask, n)); }

inline CubeFunction constant_function(std::size_t n, double c) {
  ProductForm pf;
  pf.scale = c;
  pf.factors.assign(n, {1.0, 1.0});
  const RangeTag tag = (c == 1.0 || c == -1.0) ? RangeTag::Signs : RangeTag::Interval;
  if (n <= kAutoDenseArity) return CubeFunction::dense(std::vector<double>(std::size_t{1} << n, c), tag, pf);
  return CubeFunction::handle(n, [c](const BitVector&) { return c; }, tag, pf);
}

/// Uniformly random +-1 table.
inline CubeFunction random_sign_function(std::size_t n, std::uint64_t seed) {
  if (n > kMaxDenseArity) throw SizeError("random tables are limited to n <= 24");
  Engine engine(seed);
  std::vector<double> values(std::size_t{1} << n);
  for (auto& v : values) v = (engine() >> 63) ? 1.0 : -1.0;
  return CubeFunction::dense(std::move(values), RangeTag::Signs);
}

/// mu_p^{(x)n}(x) as a function of |x|.
inline std::vector<double> biased_weight_by_popcount(std::size_t n, double p) {
  std::vector<double> w(n + 1);
  for (std::size_t h = 0; h <= n; ++h) {
    w[h] = std::pow(p, static_cast<double>(h)) * std::pow(1.0 - p, static_cast<double>(n - h));
  }
  return w;
}

/// E_{x ~ mu_p^{(x)n}}[f(x) chi_S(x)], exact sum over the dense table.
inline double biased_correlation(const CubeFunction& f, std::uint64_t mask, const Rational& p) {
  const auto& t = f.table();
  const auto w = biased_weight_by_popcount(f.n(), to_double(p));
  double acc = 0.0;
  for (std::uint64_t x = 0; x < t.size(); ++x) {
    const double term = w[std::popcount(x)] * t[x];
    acc += (std::popcount(mask & x) & 1) ? -term : term;
  }
  return acc;
}

inline double biased_correlation(const CubeFunction& f, const Subset& s, const Rational& p) {
  return biased_correlation(f, s.to_index(), p);
}

/// All 2^n biased correlations at once: Walsh-Hadamard transform of mu_p * f.
/// Entry S (table-order mask) equals biased_correlation(f, S, p).
inline std::vector<double> biased_spectrum(const CubeFunction& f, const Rational& p) {
  if (f.n() > kMaxDenseArity) throw SizeError("spectrum needs n <= 24");
  const auto& t = f.table();
  const auto w = biased_weight_by_popcount(f.n(), to_double(p));
  std::vector<double> a(t.size());
  for (std::uint64_t x = 0; x < t.size(); ++x) a[x] = w[std::popcount(x)] * t[x];
  for (std::size_t h = 1; h < a.size(); h <<= 1) {
    for (std::size_t i = 0; i < a.size(); i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double u = a[j], v = a[j + h];
        a[j] = u + v;
        a[j + h] = u - v;
      }
    }
  }
  return a;
}

/// Draws x ~ mu_p^{(x)n} into `x` (resized as needed).
inline void sample_biased_point(Engine& engine, double p, BitVector& x) {
  // P[u < threshold] = p for u uniform on 64 bits, up to 2^-64.
  const double scaled = std::ldexp(p, 64);
  const std::uint64_t threshold =
      scaled >= 18446744073709551615.0 ? ~std::uint64_t{0} : static_cast<std::uint64_t>(scaled);
  auto& words = x.words();
  const std::size_t n = x.size();
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    std::uint64_t word = 0;
    const std::size_t bits = std::min<std::size_t>(64, n - wi * 64);
    for (std::size_t b = 0; b < bits; ++b) word |= static_cast<std::uint64_t>(engine() < threshold) << b;
    words[wi] = word;
  }
}

/// Monte Carlo estimates of E[f chi_S] for many S, sharing the sample points.
inline std::vector<McEstimate> mc_biased_correlations(const CubeFunction& f, const std::vector<Subset>& subsets,
                                                      const Rational& p, std::uint64_t samples, std::uint64_t seed,
                                                      const ShardPlan& plan = {}) {
  if (samples < 1) throw PreconditionError("samples must be >= 1");
  for (const auto& s : subsets) {
    if (s.size() != f.n()) throw IndexError("subset dimension differs from n");
  }
  const double pd = to_double(p);
  auto parts = run_shards<std::vector<RunningMoments>>(
      samples, seed, plan, [&](Engine& engine, std::uint64_t count, std::size_t) {
        std::vector<RunningMoments> m(subsets.size());
        BitVector x(f.n());
        for (std::uint64_t i = 0; i < count; ++i) {
          sample_biased_point(engine, pd, x);
          const double fx = f(x);
          for (std::size_t s = 0; s < subsets.size(); ++s) m[s].add(x.and_parity(subsets[s]) ? -fx : fx);
        }
        return m;
      });
  std::vector<McEstimate> out;
  out.reserve(subsets.size());
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    RunningMoments total;
    for (const auto& part : parts) total.merge(part[s]);
    out.push_back(to_estimate(total));
  }
  return out;
}

inline McEstimate mc_biased_correlation(const CubeFunction& f, const Subset& s, const Rational& p,
                                        std::uint64_t samples, std::uint64_t seed, const ShardPlan& plan = {}) {
  return mc_biased_correlations(f, {s}, p, samples, seed, plan).front();
}

/// Powers of omega = exp(2 pi i / m).
inline std::vector<std::complex<double>> roots_of_unity(unsigned m) {
  std::vector<std::complex<double>> w(m);
  for (unsigned a = 0; a < m; ++a) w[a] = std::polar(1.0, 2.0 * std::numbers::pi * a / m);
  return w;
}

/// Complex-valued function on {0,1}^n given by an evaluation handle.
class ComplexCubeFunction {
 public:
  using Handle = std::function<std::complex<double>(const BitVector&)>;
  ComplexCubeFunction(std::size_t n, Handle fn) : n_(n), fn_(std::move(fn)) {}
  std::size_t n() const { return n_; }
  std::complex<double> operator()(const BitVector& x) const { return fn_(x); }

 private:
  std::size_t n_;
  Handle fn_;
};

namespace detail {
inline void check_zk_index(const std::vector<unsigned>& r, unsigned k) {
  if (k < 3) throw IndexError("Z/(k-1)Z characters need k >= 3");
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (r[j] > k - 2) {
      throw IndexError("r[" + std::to_string(j + 1) + "] = " + std::to_string(r[j]) + " outside [0, " +
                       std::to_string(k - 2) + "]");
    }
  }
}
}  // namespace detail

/// phi_r(x) = omega^{sum_j r_j x_j}, omega a primitive (k-1)-th root of unity.
inline ComplexCubeFunction zk_character(const std::vector<unsigned>& r, unsigned k, std::size_t n) {
  if (r.size() != n) throw IndexError("r must have length n");
  detail::check_zk_index(r, k);
  const auto roots = roots_of_unity(k - 1);
  return ComplexCubeFunction(n, [r, roots, k](const BitVector& x) {
    unsigned e = 0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (x.get(j)) e = (e + r[j]) % (k - 1);
    }
    return roots[e];
  });
}

inline constexpr std::size_t kMaxZkArity = 20;

/// E_{mu_p}[f(x) phi_r(x)] by exact enumeration of the dense table.
inline std::complex<double> zk_correlation(const CubeFunction& f, const std::vector<unsigned>& r, unsigned k,
                                           const Rational& p) {
  const std::size_t n = f.n();
  if (n > kMaxZkArity) throw SizeError("zk_correlation enumerates 2^n points; n must be <= 20");
  if (r.size() != n) throw IndexError("r must have length n");
  detail::check_zk_index(r, k);
  const auto& t = f.table();
  const auto roots = roots_of_unity(k - 1);
  const auto w = biased_weight_by_popcount(n, to_double(p));
  std::complex<double> acc = 0.0;
  for (std::uint64_t x = 0; x < t.size(); ++x) {
    unsigned e = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if ((x >> (n - 1 - j)) & 1U) e = (e + r[j]) % (k - 1);
    }
    acc += w[std::popcount(x)] * t[x] * roots[e];
  }
  return acc;
}

}  // namespace biaslin
