#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "biaslin/cube.hpp"

using namespace biaslin;

namespace {

Rational r(const char* s) { return parse_rational(s); }

CubeFunction random_dense(Engine& engine, std::size_t n) {
  std::vector<double> v(std::size_t{1} << n);
  for (auto& x : v) x = 2.0 * uniform01(engine) - 1.0;
  return CubeFunction::dense(std::move(v));
}

BitVector random_point(Engine& engine, std::size_t n) {
  BitVector x(n);
  for (std::size_t j = 0; j < n; ++j) x.set(j, engine() & 1U);
  return x;
}

BitVector xor_of(const BitVector& a, const BitVector& b) {
  BitVector out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out.set(j, a.get(j) != b.get(j));
  return out;
}

}  // namespace

TEST(Character, EmptySetAndSingleton) {
  const auto one = character(0, 5);
  for (std::uint64_t x = 0; x < 32; ++x) EXPECT_EQ(one.at_index(x), 1.0);
  const auto chi1 = character(0b100, 3);
  EXPECT_EQ(chi1(BitVector::from_index(0b100, 3)), -1.0);
  EXPECT_EQ(chi1(BitVector::from_index(0b011, 3)), 1.0);
  EXPECT_EQ(chi1.range(), RangeTag::Signs);
}

TEST(Character, HomomorphismExhaustiveAndSampled) {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const auto chi = character(s, 3);
    for (std::uint64_t x = 0; x < 8; ++x) {
      for (std::uint64_t y = 0; y < 8; ++y) EXPECT_EQ(chi.at_index(x) * chi.at_index(y), chi.at_index(x ^ y));
    }
  }
  Engine engine(2);
  const auto chi = character(random_point(engine, 8));
  for (int t = 0; t < 200; ++t) {
    const auto x = random_point(engine, 8), y = random_point(engine, 8);
    EXPECT_EQ(chi(x) * chi(y), chi(xor_of(x, y)));
  }
}

TEST(Character, GroupLawInS) {
  for (std::uint64_t s = 0; s < 16; ++s) {
    for (std::uint64_t t = 0; t < 16; ++t) {
      const auto a = character(s, 4), b = character(t, 4), c = character(s ^ t, 4);
      for (std::uint64_t x = 0; x < 16; ++x) EXPECT_EQ(a.at_index(x) * b.at_index(x), c.at_index(x));
    }
  }
}

TEST(Character, LargeNUsesHandleWithSameValues) {
  Engine engine(4);
  const auto s = random_point(engine, 100);
  const auto chi = character(s);
  EXPECT_FALSE(chi.is_dense());
  for (int t = 0; t < 50; ++t) {
    const auto x = random_point(engine, 100);
    std::size_t overlap = 0;
    for (std::size_t j = 0; j < 100; ++j) overlap += (x.get(j) && s.get(j)) ? 1 : 0;
    EXPECT_EQ(chi(x), overlap % 2 ? -1.0 : 1.0);
  }
}

TEST(CubeFunction, RangeAndSizeValidation) {
  EXPECT_THROW(CubeFunction::dense({0.5, 1.5}), PreconditionError);
  EXPECT_THROW(CubeFunction::dense({0.5, 1.0}, RangeTag::Signs), PreconditionError);
  EXPECT_THROW(CubeFunction::dense({0.5, 1.0, 0.0}), SizeError);
  const auto h = CubeFunction::dense({0.5, -0.5}).as_handle();
  EXPECT_THROW(h.table(), ModeError);
  EXPECT_THROW(biased_correlation(h, 0, r("1/2")), ModeError);
  EXPECT_EQ(h.to_dense().table(), (std::vector<double>{0.5, -0.5}));
}

TEST(BiasedCorrelation, KnownValues) {
  for (const char* p : {"1/2", "2/5", "1/10"}) {
    EXPECT_NEAR(biased_correlation(character(0b1011, 4), 0b1011, r(p)), 1.0, 1e-14);
    const auto one = constant_function(4, 1.0);
    for (unsigned i = 0; i < 4; ++i) {
      EXPECT_NEAR(biased_correlation(one, std::uint64_t{1} << i, r(p)), 1.0 - 2.0 * to_double(r(p)), 1e-14);
    }
  }
  const auto f = random_sign_function(12, 77);
  EXPECT_LE(std::abs(biased_correlation(f, 0b101010101010, r("1/2"))), 0.1);
}

TEST(BiasedSpectrum, KnownValues) {
  const auto spec = biased_spectrum(character(0b0110, 4), r("1/2"));
  for (std::uint64_t s = 0; s < 16; ++s) EXPECT_NEAR(spec[s], s == 0b0110 ? 1.0 : 0.0, 1e-14);
  const double p = 0.3;
  const auto flat = biased_spectrum(constant_function(5, 1.0), r("3/10"));
  for (std::uint64_t s = 0; s < 32; ++s) EXPECT_NEAR(flat[s], std::pow(1 - 2 * p, std::popcount(s)), 1e-14);
}

TEST(BiasedSpectrum, MatchesDirectSumAndIsLinear) {
  Engine engine(6);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 3 + engine() % 6;
    const auto f = random_dense(engine, n);
    const Rational p(1 + engine() % 9, 10);
    const auto spec = biased_spectrum(f, p);
    const std::uint64_t s = engine() % (std::uint64_t{1} << n);
    EXPECT_NEAR(spec[s], biased_correlation(f, s, p), 1e-12);

    const auto g = random_dense(engine, n);
    std::vector<double> sum(f.table().size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = (f.table()[i] + g.table()[i]) / 2.0;
    const auto spec_g = biased_spectrum(g, p);
    const auto spec_sum = biased_spectrum(CubeFunction::dense(sum), p);
    for (std::size_t i = 0; i < spec.size(); ++i) EXPECT_NEAR(spec_sum[i], (spec[i] + spec_g[i]) / 2.0, 1e-12);
  }
}

TEST(BiasedSpectrum, ParsevalAtHalf) {
  Engine engine(7);
  for (std::size_t n = 1; n <= 12; ++n) {
    const auto f = random_dense(engine, n);
    const auto spec = biased_spectrum(f, r("1/2"));
    double lhs = 0.0, rhs = 0.0;
    for (double v : spec) lhs += v * v;
    for (double v : f.table()) rhs += v * v;
    rhs /= static_cast<double>(f.table().size());
    EXPECT_NEAR(lhs, rhs, 1e-10) << "n = " << n;
  }
  EXPECT_THROW(biased_spectrum(CubeFunction::handle(30, [](const BitVector&) { return 0.0; }), r("1/2")), SizeError);
}

TEST(McCorrelation, ConstantIntegrands) {
  const Subset s = subset_from_mask(0b1010, 4);
  const auto chi = character(s).as_handle();
  const auto est = mc_biased_correlation(chi, s, r("2/5"), 1000, 1);
  EXPECT_EQ(est.estimate, 1.0);
  EXPECT_EQ(est.std_error, 0.0);
  const auto zero = mc_biased_correlation(constant_function(4, 0.0), s, r("2/5"), 1000, 1);
  EXPECT_EQ(zero.estimate, 0.0);
}

TEST(McCorrelation, AgreesWithExactOverSeeds) {
  Engine engine(8);
  const auto f = random_dense(engine, 12);
  const auto h = f.as_handle();
  const std::uint64_t mask = 0b000000001011;
  const double exact = biased_correlation(f, mask, r("3/10"));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto est = mc_biased_correlation(h, subset_from_mask(mask, 12), r("3/10"), 20000, seed);
    EXPECT_LE(std::abs(est.estimate - exact), 4 * est.std_error) << "seed " << seed;
  }
}

TEST(McCorrelation, SampledBiasMatches) {
  Engine engine(10);
  BitVector x(1000);
  std::size_t ones = 0;
  for (int t = 0; t < 100; ++t) {
    sample_biased_point(engine, 0.3, x);
    ones += x.popcount();
  }
  EXPECT_NEAR(static_cast<double>(ones) / 100000.0, 0.3, 0.005);
}

TEST(ZkCharacter, KnownValues) {
  const auto trivial = zk_character({0, 0, 0}, 5, 3);
  for (std::uint64_t x = 0; x < 8; ++x) EXPECT_EQ(trivial(BitVector::from_index(x, 3)), std::complex<double>(1.0));

  const auto k3 = zk_character({1, 0, 1}, 3, 3);
  const auto chi = character(0b101, 3);
  for (std::uint64_t x = 0; x < 8; ++x) {
    EXPECT_NEAR(std::abs(k3(BitVector::from_index(x, 3)) - chi.at_index(x)), 0.0, 1e-15);
  }

  Engine engine(12);
  std::vector<unsigned> rv(6);
  for (auto& v : rv) v = engine() % 4;
  const auto phi = zk_character(rv, 5, 6);
  for (std::uint64_t x = 0; x < 64; ++x) EXPECT_NEAR(std::abs(phi(BitVector::from_index(x, 6))), 1.0, 1e-15);

  EXPECT_THROW(zk_character({4, 0}, 5, 2), IndexError);
  EXPECT_THROW(zk_character({0}, 2, 1), IndexError);
}

TEST(ZkCharacter, MultiplicativeInR) {
  const unsigned k = 5, m = k - 1;
  for (unsigned code_a = 0; code_a < 64; ++code_a) {
    for (unsigned code_b = 0; code_b < 64; code_b += 5) {
      std::vector<unsigned> a(3), b(3), c(3);
      for (unsigned j = 0; j < 3; ++j) {
        a[j] = (code_a >> (2 * j)) & 3U;
        b[j] = (code_b >> (2 * j)) & 3U;
        c[j] = (a[j] + b[j]) % m;
      }
      const auto fa = zk_character(a, k, 3), fb = zk_character(b, k, 3), fc = zk_character(c, k, 3);
      for (std::uint64_t x = 0; x < 8; ++x) {
        const auto pt = BitVector::from_index(x, 3);
        EXPECT_NEAR(std::abs(fa(pt) * fb(pt) - fc(pt)), 0.0, 1e-12);
      }
    }
  }
}

TEST(ZkCorrelation, KnownValues) {
  const auto one = constant_function(3, 1.0);
  const auto v0 = zk_correlation(one, {0, 0, 0}, 5, r("1/4"));
  EXPECT_NEAR(std::abs(v0 - 1.0), 0.0, 1e-14);
  const auto roots = roots_of_unity(4);
  const auto v1 = zk_correlation(one, {0, 3, 0}, 5, r("1/4"));
  EXPECT_NEAR(std::abs(v1 - (0.75 + 0.25 * roots[3])), 0.0, 1e-14);
  const auto chi = character(0b110, 3);
  const auto v2 = zk_correlation(chi, {1, 1, 0}, 3, r("2/5"));
  EXPECT_NEAR(std::abs(v2 - 1.0), 0.0, 1e-14);
}
