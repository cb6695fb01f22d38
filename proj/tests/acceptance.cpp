// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "biaslin/biaslin.hpp"

using namespace biaslin;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

struct Criterion {
  const char* id;
  const char* title;
  double time_limit_s;
  std::function<Outcome()> run;
};

Rational r(const char* s) { return parse_rational(s); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Case {
  unsigned k;
  const char* p;
};

const std::vector<Case> kSuite = {{3, "1/2"}, {4, "1/3"}, {4, "2/5"}, {4, "1/2"},
                                  {5, "1/4"}, {5, "2/5"}, {6, "2/5"}, {7, "2/5"}};

// Coordinate i (0-based) of a k-bit table index, coordinate 0 most significant.
unsigned bit_of(std::uint64_t x, unsigned k, unsigned i) { return (x >> (k - 1 - i)) & 1U; }

Outcome exact_distribution_suite() {
  Outcome out;
  for (const auto& c : kSuite) {
    const Rational p = r(c.p);
    const auto d = construct_pairwise_independent(c.k, p);
    const std::string tag = "(k=" + std::to_string(c.k) + ", p=" + c.p + ")";
    Rational total = 0;
    std::vector<Rational> marg(c.k, Rational(0));
    std::vector<std::vector<Rational>> pair(c.k, std::vector<Rational>(c.k, Rational(0)));
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << c.k); ++x) {
      const Rational& w = d.prob(x);
      if (w == 0) continue;
      out.require(w > 0, tag + " negative mass");
      out.require(std::popcount(x) % 2 == 0, tag + " odd-weight support point");
      total += w;
      for (unsigned i = 0; i < c.k; ++i) {
        if (!bit_of(x, c.k, i)) continue;
        marg[i] += w;
        for (unsigned j = 0; j < c.k; ++j) {
          if (j != i && bit_of(x, c.k, j)) pair[i][j] += w;
        }
      }
    }
    out.require(total == 1, tag + " total mass " + to_string(total));
    for (unsigned i = 0; i < c.k; ++i) {
      out.require(marg[i] == p, tag + " marginal " + std::to_string(i + 1) + " = " + to_string(marg[i]));
      for (unsigned j = 0; j < c.k; ++j) {
        if (i != j) out.require(pair[i][j] == p * p, tag + " E[X_i X_j] != p^2");
      }
    }
  }
  if (out.ok) out.detail = std::to_string(kSuite.size()) + " distributions";
  return out;
}

Outcome feasibility_frontier_grid() {
  Outcome out;
  unsigned points = 0;
  for (unsigned k = 2; k <= 6; ++k) {
    for (int i = 1; i <= 19; ++i) {
      const Rational p(i, 20);
      const bool predicate = Rational(1, k - 1) <= p && p <= 1 - Rational(1, k - 1);
      const auto cert = feasibility_search(k, p);
      out.require(cert.feasible == predicate,
                  "k=" + std::to_string(k) + " p=" + to_string(p) + " feasible=" + std::to_string(cert.feasible));
      ++points;
    }
  }
  out.require(points == 95, "grid size " + std::to_string(points));
  if (out.ok) out.detail = "95/95 grid points agree";
  return out;
}

Outcome boundary_behavior() {
  Outcome out;
  const auto d = make_case_distribution(4, r("1/3"));
  out.require(d.q() && (*d.q())[2] == 0, "q_2 != 0 at (4, 1/3)");
  try {
    (void)make_full_support_perturbation(d);
    out.require(false, "perturbation did not raise");
  } catch (const BoundaryInfeasibleError&) {
  }
  if (out.ok) out.detail = "q_2 = 0, perturbation refused";
  return out;
}

Outcome hermite_moment_identity() {
  Outcome out;
  for (const char* rho_s : {"1/6", "-1/3"}) {
    const Rational rho = r(rho_s);
    const auto sigma = CovarianceMatrix::equicorrelated(2, rho);
    out.require(hermite_product_expectation({1, 1}, sigma) == rho, std::string("E[H1 H1] at rho=") + rho_s);
    out.require(hermite_product_expectation({2, 2}, sigma) == 2 * rho * rho, std::string("E[H2 H2] at rho=") + rho_s);
  }

  // Odd total degree vanishes: every s with |s| <= 7, k <= 4.
  unsigned odd_cases = 0;
  for (unsigned k = 1; k <= 4; ++k) {
    std::vector<std::vector<Rational>> e(k, std::vector<Rational>(k, Rational(1, 5)));
    for (unsigned i = 0; i < k; ++i) e[i][i] = 1;
    if (k >= 2) e[0][1] = e[1][0] = Rational(-1, 7);
    HermiteMoments moments(CovarianceMatrix::from_exact(e));
    Exponent s(k, 0);
    while (true) {
      const unsigned total = std::accumulate(s.begin(), s.end(), 0U);
      if (total % 2 == 1 && total <= 7) {
        ++odd_cases;
        out.require(moments.expectation(s) == 0, "odd-degree moment nonzero");
      }
      std::size_t i = 0;
      while (i < k && ++s[i] > 7) s[i++] = 0;
      if (i == k) break;
    }
  }

  // Monte Carlo oracle on random (s, Sigma).
  Engine engine(20261019);
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    const unsigned k = 2 + engine() % 3;
    std::vector<std::vector<Rational>> e(k, std::vector<Rational>(k, Rational(1)));
    for (unsigned i = 0; i < k; ++i) {
      for (unsigned j = i + 1; j < k; ++j) {
        // |rho| <= 1 / (2(k-1)) keeps Sigma diagonally dominant.
        e[i][j] = e[j][i] = Rational(static_cast<int>(engine() % 5) - 2, 4 * (k - 1));
      }
    }
    const auto sigma = CovarianceMatrix::from_exact(e);
    Exponent s(k);
    unsigned total = 0;
    do {
      total = 0;
      for (auto& v : s) total += (v = engine() % 4);
    } while (total % 2 == 1 || total == 0);
    const double exact = to_double(hermite_product_expectation(s, sigma));
    const auto mc = gaussian_mc_moment(s, sigma, 1000000, 1000 + c);
    const double z = std::abs(mc.estimate - exact) / mc.std_error;
    worst = std::max(worst, z);
    out.require(z <= 4.0, "MC case " + std::to_string(c) + " off by " + fmt(z) + " standard errors");
  }
  if (out.ok) {
    out.detail = std::to_string(odd_cases) + " odd-degree cases zero; worst MC deviation " + fmt(worst) + " se";
  }
  return out;
}

Outcome witness_dichotomy() {
  Outcome out;
  const auto sigma = covariance_from_distribution(make_dfh19(r("2/5")));
  const auto w = find_hermite_witness(sigma, 4, 7);
  out.require(w.degree <= 4 && w.product_moment != 0, "no witness at d <= 4");
  const auto forced = make_hermite_witness(sigma, {1, 1, 1, 1}, {1, 0, 0, 0});
  out.require(forced.product_moment == Rational(1, 12), "moment " + to_string(forced.product_moment) + " != 1/12");

  auto refuses = [](const CovarianceMatrix& m) {
    try {
      (void)find_hermite_witness(m, 4, 7);
    } catch (const PairwiseIndependenceError&) {
      return true;
    }
    return false;
  };
  out.require(refuses(CovarianceMatrix::identity(4)), "identity not refused");
  std::vector<std::vector<Rational>> e(4, std::vector<Rational>(4, Rational(1, 4)));
  for (unsigned i = 0; i < 4; ++i) e[i][i] = 1;
  for (unsigned j = 0; j < 4; ++j) {
    if (j != 2) e[2][j] = e[j][2] = 0;
  }
  out.require(refuses(CovarianceMatrix::from_exact(e)), "zero V row not refused");
  if (out.ok) out.detail = "d = " + std::to_string(w.degree) + ", E[prod H1] = 1/12, both refusals raised";
  return out;
}

Outcome end_to_end_counterexample() {
  Outcome out;
  const auto d = make_dfh19(r("2/5"));
  const Rational eta_value = eta(d);
  out.require(eta_value == Rational(3, 5), "eta = " + to_string(eta_value));
  CounterexampleConfig cfg;
  cfg.seed = 2026;
  cfg.gaussian_samples = 100000;
  const auto ce = build_counterexample(d, cfg);
  VerificationConfig vcfg;
  vcfg.n = 2000;
  vcfg.samples = 100000;
  vcfg.seed = 2026;
  vcfg.pairs = 100;
  const auto rep = verify_counterexample(d, ce, vcfg);
  out.require(rep.correlations.size() == 2000 + 100 + 1, "probe count " + std::to_string(rep.correlations.size()));
  out.require(rep.product_ok, "|E[prod f]| = " + fmt(std::abs(rep.product.product_expectation)) + " < alpha_const " +
                                  fmt(rep.alpha_const) + " - 3 se");
  out.require(rep.correlations_ok, "max |E[f chi_S]| = " + fmt(rep.max_abs_correlation));
  out.require(rep.rounded_ok, "|E[prod g]| = " + fmt(std::abs(rep.rounded_product.product_expectation)) +
                                  " < alpha_const/2 - 3 se");
  if (out.ok) {
    out.detail = "alpha_const=" + fmt(rep.alpha_const) + " E[prod f]=" + fmt(rep.product.product_expectation) +
                 " E[prod g]=" + fmt(rep.rounded_product.product_expectation) +
                 " max|corr|=" + fmt(rep.max_abs_correlation);
  }
  return out;
}

Outcome completeness() {
  Outcome out;
  unsigned checked = 0;
  for (const auto& c : kSuite) {
    const auto d = construct_pairwise_independent(c.k, r(c.p));
    for (std::size_t n = 1; n <= 5; ++n) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const auto rep = product_expectation_exact(character(mask, n), d, n);
        out.require(rep.exact_value && *rep.exact_value == 1, "chi_S not accepted with certainty at k=" +
                                                                  std::to_string(c.k) + " p=" + c.p);
        ++checked;
      }
    }
  }
  if (out.ok) out.detail = std::to_string(checked) + " (nu, S) pairs";
  return out;
}

Outcome corner_case() {
  Outcome out;
  const Rational p = r("3/4");
  const auto d = construct_pairwise_independent(5, p);
  for (auto x : d.support()) {
    const int w = std::popcount(x);
    out.require(w == 0 || w == 4, "support weight " + std::to_string(w));
  }
  for (unsigned rr = 0; rr <= 3; ++rr) {
    out.require(character_pass_check(d, rr).is_one(), "character check r=" + std::to_string(rr));
  }
  const auto d_prime = construct_pairwise_independent(5, 1 - p);
  const std::size_t n = 3;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const double sign = std::popcount(mask) % 2 ? -1.0 : 1.0;
    const auto f = signed_character(subset_from_mask(mask, n), sign);
    const auto rep = negated_test(f, d_prime, n, TestMode::Exact);
    out.require(rep.exact_value && *rep.exact_value == 1, "negated test on S mask " + std::to_string(mask));
  }
  if (out.ok) out.detail = "weights {0,4}, 4 characters pass, 8 negated tests exact 1";
  return out;
}

Outcome mode_agreement() {
  Outcome out;
  const std::vector<BiasedDistribution> dists = {make_dfh19(r("2/5")), construct_pairwise_independent(5, r("1/4"))};
  Engine engine(99);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  int comparisons = 0;
  for (std::size_t di = 0; di < dists.size(); ++di) {
    const auto& d = dists[di];
    for (int t = 0; t < 20; ++t) {
      std::vector<double> values(16);
      for (auto& v : values) v = unit(engine);
      const auto f = CubeFunction::dense(values);
      const auto exact = product_expectation_exact(f, d, 4);
      const auto mc = product_expectation_mc(f, d, 4, 200000, derive_seed(di * 100 + t, "acceptance.product"));
      const double z1 = std::abs(exact.product_expectation - mc.product_expectation) / mc.std_error;
      const std::uint64_t mask = engine() % 16;
      const double corr = biased_correlation(f, mask, d.p());
      const auto corr_mc = mc_biased_correlation(f, subset_from_mask(mask, 4), d.p(), 200000,
                                                 derive_seed(di * 100 + t, "acceptance.correlation"));
      const double z2 = std::abs(corr - corr_mc.estimate) / corr_mc.std_error;
      worst = std::max({worst, z1, z2});
      comparisons += 2;
      out.require(z1 <= 4.0, "product mismatch " + fmt(z1) + " se");
      out.require(z2 <= 4.0, "correlation mismatch " + fmt(z2) + " se");
    }
  }
  if (out.ok) out.detail = std::to_string(comparisons) + " comparisons, worst " + fmt(worst) + " se";
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"AC1", "exact distribution suite", 5, exact_distribution_suite},
      {"AC2", "feasibility frontier", 10, feasibility_frontier_grid},
      {"AC3", "boundary behavior", 1, boundary_behavior},
      {"AC4", "Hermite moment identity", 60, hermite_moment_identity},
      {"AC5", "witness vs pairwise independence", 5, witness_dichotomy},
      {"AC6", "end-to-end counterexample", 300, end_to_end_counterexample},
      {"AC7", "completeness of Lin(nu)", 30, completeness},
      {"AC8", "odd-k corner case", 5, corner_case},
      {"AC9", "exact vs Monte Carlo agreement", 60, mode_agreement},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.ok && secs >= c.time_limit_s) {
      out.ok = false;
      out.detail = "took " + fmt(secs) + " s, limit " + fmt(c.time_limit_s) + " s";
    }
    failures += out.ok ? 0 : 1;
    std::printf("%s %s  %s: %s [%.2f s]\n", c.id, out.ok ? "PASS" : "FAIL", c.title, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
