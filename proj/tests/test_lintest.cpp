#include <gtest/gtest.h>

#include <cmath>

#include "biaslin/distributions.hpp"
#include "biaslin/lintest.hpp"

using namespace biaslin;

namespace {

Rational r(const char* s) { return parse_rational(s); }

std::vector<BiasedDistribution> constructed() {
  std::vector<BiasedDistribution> out;
  for (auto [k, p] : std::vector<std::pair<unsigned, const char*>>{
           {3, "1/2"}, {4, "1/3"}, {4, "2/5"}, {4, "1/2"}, {5, "1/4"}, {5, "2/5"}, {6, "2/5"}, {7, "2/5"}}) {
    out.push_back(construct_pairwise_independent(k, r(p)));
  }
  return out;
}

CubeFunction random_dense(Engine& engine, std::size_t n) {
  std::vector<double> v(std::size_t{1} << n);
  for (auto& x : v) x = 2.0 * uniform01(engine) - 1.0;
  return CubeFunction::dense(std::move(v));
}

// Brute-force oracle: enumerate supp^n with rational tuple weights, no
// product-form shortcut and no incremental index bookkeeping.
double brute_force(const CubeFunction& f, const BiasedDistribution& d, std::size_t n, bool negate = false) {
  const auto support = d.support();
  const unsigned k = d.k();
  std::vector<std::size_t> pick(n, 0);
  double total = 0.0;
  while (true) {
    Rational w = 1;
    for (auto s : pick) w *= d.prob(support[s]);
    double prod = 1.0;
    for (unsigned i = 0; i < k; ++i) {
      BitVector x(n);
      for (std::size_t j = 0; j < n; ++j) {
        bool bit = (support[pick[j]] >> (k - 1 - i)) & 1U;
        x.set(j, negate ? !bit : bit);
      }
      prod *= f(x);
    }
    total += to_double(w) * prod;
    std::size_t j = 0;
    while (j < n && ++pick[j] == support.size()) pick[j++] = 0;
    if (j == n) break;
  }
  return total;
}

}  // namespace

TEST(Exact, CharactersPassEveryConstructedDistribution) {
  for (const auto& d : constructed()) {
    for (std::size_t n = 1; n <= 5; ++n) {
      for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        const auto rep = product_expectation_exact(character(s, n), d, n);
        ASSERT_TRUE(rep.exact_value);
        EXPECT_EQ(*rep.exact_value, 1);
        EXPECT_EQ(rep.acceptance_probability, 1.0);
        EXPECT_EQ(rep.std_error, 0.0);
      }
    }
  }
}

TEST(Exact, EnumerationPathAgreesWithTensorization) {
  const auto d = make_case_distribution(4, r("2/5"));
  for (std::uint64_t s = 0; s < 16; ++s) {
    const auto rep = product_expectation_exact(character(s, 4), d, 4, {.use_product_form = false});
    EXPECT_NEAR(rep.product_expectation, 1.0, 1e-12);
    EXPECT_FALSE(rep.exact_value);
  }
}

TEST(Exact, ConstantAndNegatedCharacters) {
  const auto even_k = make_case_distribution(4, r("2/5"));
  const auto odd_k = construct_pairwise_independent(5, r("2/5"));
  EXPECT_EQ(*product_expectation_exact(constant_function(3, 1.0), odd_k, 3).exact_value, 1);
  const auto neg = signed_character(subset_from_mask(0b101, 3), -1.0);
  EXPECT_EQ(*product_expectation_exact(neg, even_k, 3).exact_value, 1);
  EXPECT_EQ(*product_expectation_exact(neg, odd_k, 3).exact_value, -1);
  EXPECT_EQ(product_expectation_exact(neg, odd_k, 3).acceptance_probability, 0.0);
}

TEST(Exact, MatchesBruteForceOnRandomFunctions) {
  Engine engine(31);
  const std::vector<BiasedDistribution> ds = {make_dfh19(r("2/5")), make_uniform_even_weight(3),
                                              construct_pairwise_independent(5, r("1/4"))};
  for (const auto& d : ds) {
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto f = random_dense(engine, n);
      EXPECT_NEAR(product_expectation_exact(f, d, n).product_expectation, brute_force(f, d, n), 1e-12);
      EXPECT_NEAR(product_expectation_exact(f, d, n, {.negate = true}).product_expectation,
                  brute_force(f, d, n, true), 1e-12);
    }
  }
}

TEST(Exact, TensorizesOverCoordinateBlocks) {
  Engine engine(32);
  const auto d = make_dfh19(r("2/5"));
  const std::size_t n = 3;
  ProductForm pf;
  pf.factors.resize(n);
  for (auto& f : pf.factors) f = {2.0 * uniform01(engine) - 1.0, 2.0 * uniform01(engine) - 1.0};
  std::vector<double> values(8);
  for (std::uint64_t x = 0; x < 8; ++x) values[x] = pf(BitVector::from_index(x, n));
  const auto f = CubeFunction::dense(values, RangeTag::Interval, pf);
  double expected = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double block = 0.0;
    for (auto y : d.support()) {
      double prod = 1.0;
      for (unsigned i = 0; i < 4; ++i) prod *= pf.factors[j][(y >> (3 - i)) & 1U];
      block += to_double(d.prob(y)) * prod;
    }
    expected *= block;
  }
  const auto rep = product_expectation_exact(f, d, n);
  EXPECT_NEAR(rep.product_expectation, expected, 1e-14);
  EXPECT_NEAR(product_expectation_exact(f, d, n, {.use_product_form = false}).product_expectation, expected, 1e-14);
}

TEST(Exact, BudgetAndArity) {
  const auto d = construct_pairwise_independent(7, r("2/5"));
  Engine engine(1);
  const auto f = random_dense(engine, 6);
  EXPECT_THROW(product_expectation_exact(f, d, 6), SizeError);
  EXPECT_THROW(product_expectation_exact(f, d, 5), SizeError);
}

TEST(MonteCarlo, ConstantIntegrandAtLargeN) {
  const auto d = make_dfh19(r("2/5"));
  Engine engine(2);
  BitVector s(50);
  for (std::size_t j = 0; j < 50; ++j) s.set(j, engine() & 1U);
  const auto rep = product_expectation_mc(character(s), d, 50, 2000, 9);
  EXPECT_EQ(rep.product_expectation, 1.0);
  EXPECT_EQ(rep.std_error, 0.0);
  EXPECT_EQ(rep.acceptance_probability, 1.0);
  EXPECT_EQ(rep.mode, TestMode::MonteCarlo);
}

TEST(MonteCarlo, AgreesWithExactOverSeeds) {
  Engine engine(33);
  const auto d = make_dfh19(r("2/5"));
  const auto f = random_dense(engine, 4);
  const double exact = product_expectation_exact(f, d, 4).product_expectation;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto mc = product_expectation_mc(f, d, 4, 20000, seed);
    EXPECT_LE(std::abs(mc.product_expectation - exact), 4 * mc.std_error) << "seed " << seed;
  }
}

TEST(MonteCarlo, AgreesOnTwentyRandomFunctions) {
  Engine engine(34);
  for (const auto& d : {make_dfh19(r("2/5")), construct_pairwise_independent(4, r("2/5"))}) {
    for (int t = 0; t < 20; ++t) {
      const auto f = random_dense(engine, 4);
      const double exact = product_expectation_exact(f, d, 4).product_expectation;
      const auto mc = product_expectation_mc(f, d, 4, 20000, 500 + t);
      EXPECT_LE(std::abs(mc.product_expectation - exact), 4 * mc.std_error);
    }
  }
}

TEST(MonteCarlo, AcceptanceIdentityForSigns) {
  const auto d = make_dfh19(r("2/5"));
  const auto f = random_sign_function(5, 4);
  const auto mc = product_expectation_mc(f, d, 5, 5000, 1);
  ASSERT_TRUE(mc.acceptance_probability);
  EXPECT_DOUBLE_EQ(*mc.acceptance_probability, (1.0 + mc.product_expectation) / 2.0);
  const auto ex = product_expectation_exact(f, d, 5);
  EXPECT_DOUBLE_EQ(*ex.acceptance_probability, (1.0 + ex.product_expectation) / 2.0);
  Engine engine(1);
  EXPECT_FALSE(product_expectation_mc(random_dense(engine, 5), d, 5, 100, 1).acceptance_probability);
}

TEST(MonteCarlo, ThreadCountDoesNotMatter) {
  Engine engine(35);
  const auto d = make_dfh19(r("2/5"));
  const auto f = random_dense(engine, 6);
  const auto a = product_expectation_mc(f, d, 6, 3000, 4, ShardPlan{16, 1});
  const auto b = product_expectation_mc(f, d, 6, 3000, 4, ShardPlan{16, 4});
  EXPECT_EQ(a.product_expectation, b.product_expectation);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Negated, CornerCaseAcceptsSignedCharacters) {
  const Rational p = r("3/4");
  const auto d_prime = construct_pairwise_independent(5, 1 - p);
  for (std::uint64_t s = 0; s < 8; ++s) {
    const int size = std::popcount(s);
    const auto signed_chi = signed_character(subset_from_mask(s, 3), size % 2 ? -1.0 : 1.0);
    EXPECT_EQ(*negated_test(signed_chi, d_prime, 3, TestMode::Exact).exact_value, 1);
    const auto plain = negated_test(character(s, 3), d_prime, 3, TestMode::Exact);
    EXPECT_EQ(*plain.exact_value, size % 2 ? -1 : 1);
  }
  EXPECT_EQ(*negated_test(constant_function(3, 1.0), d_prime, 3, TestMode::Exact).exact_value, 1);
}

TEST(Negated, MonteCarloQueriesHaveTargetBias) {
  const auto d_prime = construct_pairwise_independent(5, r("1/4"));
  const std::size_t n = 6;
  // f(x) = 1 - 2 x_1 has mean 1 - 2p under mu_p; a single query's first bit.
  std::vector<double> v(std::size_t{1} << n);
  for (std::uint64_t x = 0; x < v.size(); ++x) v[x] = ((x >> (n - 1)) & 1U) ? -0.5 : 0.5;
  const auto f = CubeFunction::dense(v);
  const auto exact = negated_test(f, d_prime, n, TestMode::Exact).product_expectation;
  const auto mc = negated_test(f, d_prime, n, TestMode::MonteCarlo, {20000, 3, {}});
  EXPECT_NEAR(exact, brute_force(f, d_prime, n, true), 1e-12);
  EXPECT_LE(std::abs(mc.product_expectation - exact), 4 * mc.std_error);
}

TEST(CharacterPass, CornerCaseIsExactlyOne) {
  const auto d = construct_pairwise_independent(5, r("3/4"));
  for (unsigned rr = 0; rr <= 3; ++rr) {
    const auto v = character_pass_check(d, rr);
    EXPECT_TRUE(v.is_one());
    EXPECT_NEAR(std::abs(v.to_complex() - 1.0), 0.0, 1e-15);
  }
}

TEST(CharacterPass, ZeroExponentAndPrecondition) {
  const auto u = make_uniform_even_weight(4);
  EXPECT_TRUE(character_pass_check(u, 0).is_one());
  try {
    (void)character_pass_check(u, 1);
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("weight 2"), std::string::npos);
  }
  EXPECT_THROW(character_pass_check(u, 3), IndexError);
}
