// biaslin: command-line front end for the biaslin library.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "biaslin/biaslin.hpp"

using namespace biaslin;

namespace {

// Reads CLI11 configuration from JSON. Top-level keys mirror global flags;
// nested objects address subcommands, e.g. {"test": {"run": {"fn": "chi:0b1"}}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::stringstream buf;
    buf << input.rdbuf();
    Json j;
    try {
      j = Json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

  static void collect(const Json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto next = parents;
        next.push_back(key);
        collect(value, next, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      out.push_back(std::move(item));
    }
  }
};

struct Globals {
  std::uint64_t seed = 0;
  std::uint64_t samples = 100000;
  std::optional<std::size_t> n;
  unsigned threads = 0;
  std::string out;
  std::string format;
  bool error_json = false;

  ShardPlan plan() const { return ShardPlan{16, threads}; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw ParseError("cannot write '" + g.out + "'");
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string format_or(const Globals& g, const char* fallback, std::initializer_list<const char*> allowed,
                      const char* command) {
  const std::string f = g.format.empty() ? fallback : g.format;
  for (const char* a : allowed) {
    if (f == a) return f;
  }
  throw PreconditionError(std::string(command) + " does not support --format " + f);
}

BiasedDistribution load_distribution(const std::string& path) { return distribution_from_json(parse_json(read_file(path))); }

std::string coord_set(const std::vector<unsigned>& zero_based) {
  std::string s = "{";
  for (std::size_t i = 0; i < zero_based.size(); ++i) s += (i ? "," : "") + std::to_string(zero_based[i] + 1);
  return s + "}";
}

std::uint64_t parse_uint(const std::string& s, const char* what) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || s.front() == '-') throw ParseError(std::string(what) + " '" + s + "' is not a nonnegative integer");
  return v;
}

// S is either "0b..." (coordinate 1 leftmost, right-aligned into n bits) or a
// 1-based coordinate list "{1,3}".
Subset parse_subset(const std::string& text, std::optional<std::size_t> n) {
  if (text.rfind("0b", 0) == 0) {
    const std::string digits = text.substr(2);
    if (digits.empty() || digits.find_first_not_of("01") != std::string::npos) {
      throw ParseError("subset '" + text + "' is not a binary literal");
    }
    const std::size_t size = n.value_or(digits.size());
    if (digits.size() > size) throw SizeError("subset '" + text + "' has more than n = " + std::to_string(size) + " digits");
    Subset s(size);
    for (std::size_t i = 0; i < digits.size(); ++i) s.set(size - digits.size() + i, digits[i] == '1');
    return s;
  }
  std::string body = text;
  if (body.size() >= 2 && body.front() == '{' && body.back() == '}') body = body.substr(1, body.size() - 2);
  std::vector<std::size_t> coords;
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) coords.push_back(parse_uint(tok, "coordinate"));
  }
  std::size_t top = 0;
  for (auto c : coords) {
    if (c < 1) throw IndexError("coordinates are 1-based");
    top = std::max(top, c);
  }
  const std::size_t size = n.value_or(top);
  if (size < 1) throw SizeError("empty coordinate list needs --n");
  Subset s(size);
  for (auto c : coords) {
    if (c > size) throw IndexError("coordinate " + std::to_string(c) + " exceeds n = " + std::to_string(size));
    s.set(c - 1, true);
  }
  return s;
}

// Builtins chi:S, neg-chi:S and random:SEED; anything else is a function file.
CubeFunction parse_function(const std::string& spec, std::optional<std::size_t> n) {
  if (spec.rfind("chi:", 0) == 0) return character(parse_subset(spec.substr(4), n));
  if (spec.rfind("neg-chi:", 0) == 0) return signed_character(parse_subset(spec.substr(8), n), -1.0);
  if (spec.rfind("random:", 0) == 0) {
    if (!n) throw PreconditionError("random:SEED needs --n");
    return random_sign_function(*n, parse_uint(spec.substr(7), "function seed"));
  }
  auto f = function_from_json(parse_json(read_file(spec)));
  if (n && *n != f.n()) throw SizeError("function file has n = " + std::to_string(f.n()) + ", --n says " + std::to_string(*n));
  return f;
}

// "a" or "a:b" (inclusive).
std::vector<unsigned> parse_k_grid(const std::vector<std::string>& specs) {
  std::vector<unsigned> ks;
  for (const auto& s : specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
      ks.push_back(static_cast<unsigned>(parse_uint(s, "k")));
      continue;
    }
    const auto lo = parse_uint(s.substr(0, colon), "k"), hi = parse_uint(s.substr(colon + 1), "k");
    if (lo > hi) throw OutOfRangeError("empty k range '" + s + "'");
    for (auto k = lo; k <= hi; ++k) ks.push_back(static_cast<unsigned>(k));
  }
  return ks;
}

// "a/b" or "lo:hi:step" (inclusive, exact).
std::vector<Rational> parse_p_grid(const std::vector<std::string>& specs) {
  std::vector<Rational> ps;
  for (const auto& s : specs) {
    const auto c1 = s.find(':');
    if (c1 == std::string::npos) {
      ps.push_back(parse_rational(s));
      continue;
    }
    const auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ParseError("p range must be lo:hi:step, got '" + s + "'");
    const Rational lo = parse_rational(s.substr(0, c1)), hi = parse_rational(s.substr(c1 + 1, c2 - c1 - 1));
    const Rational step = parse_rational(s.substr(c2 + 1));
    if (step <= 0) throw OutOfRangeError("p step must be positive");
    for (Rational p = lo; p <= hi; p += step) ps.push_back(p);
  }
  return ps;
}

std::string bit_string(std::uint64_t idx, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t i = 0; i < n; ++i) s[i] = ((idx >> (n - 1 - i)) & 1U) ? '1' : '0';
  return s;
}

// ---- dist ------------------------------------------------------------------

struct DistArgs {
  std::string family;
  std::optional<unsigned> k;
  std::string p, p1, input;
  bool any_triple = false;
};

BiasedDistribution make_family(const DistArgs& a) {
  auto need_k = [&] {
    if (!a.k) throw PreconditionError("family '" + a.family + "' needs --k");
    return *a.k;
  };
  auto need_p = [&] {
    if (a.p.empty()) throw PreconditionError("family '" + a.family + "' needs --p");
    return parse_rational(a.p);
  };
  if (a.family == "uniform") return make_uniform_even_weight(need_k());
  if (a.family == "blr") return make_blr();
  if (a.family == "case") return make_case_distribution(need_k(), need_p());
  if (a.family == "composed") return make_composed_distribution(need_k(), need_p());
  if (a.family == "construct") return construct_pairwise_independent(need_k(), need_p());
  if (a.family == "dfh19") {
    std::optional<Rational> p1;
    if (!a.p1.empty()) p1 = parse_rational(a.p1);
    return make_dfh19(need_p(), p1);
  }
  throw PreconditionError("unknown family '" + a.family + "'");
}

void dist_check(const Globals& g, const DistArgs& a) {
  const auto d = load_distribution(a.input);
  const unsigned k = d.k();
  std::vector<std::string> marginals;
  for (unsigned i = 0; i < k; ++i) marginals.push_back(to_string(d.marginal(i)));
  const auto pic = pairwise_independent_coordinates(d);
  std::optional<Rational> eta_value;
  if (k >= 2) eta_value = eta(d);
  std::optional<BlrWitness> blr;
  if (k >= 3) blr = contains_blr(d, a.any_triple);
  const auto support = d.support();

  const std::string fmt = format_or(g, "text", {"text", "json"}, "dist check");
  if (fmt == "json") {
    Json j;
    j["k"] = k;
    j["p"] = to_string(d.p());
    j["marginals"] = marginals;
    j["support_size"] = support.size();
    j["support_parity"] = "even";
    j["full_even_support"] = d.has_full_even_weight_support();
    Json coords = Json::array();
    for (auto c : pic) coords.push_back(c + 1);
    j["pairwise_independent"] = coords;
    j["eta"] = eta_value ? Json(to_string(*eta_value)) : Json(nullptr);
    if (blr) {
      Json w;
      w["triple"] = {blr->triple[0] + 1, blr->triple[1] + 1, blr->triple[2] + 1};
      w["b"] = blr->b;
      w["z"] = blr->z;
      j["contains_blr"] = w;
    } else {
      j["contains_blr"] = nullptr;
    }
    emit(g, dump(j));
    return;
  }
  std::ostringstream out;
  out << "k: " << k << "\np: " << to_string(d.p()) << "\nmarginals:";
  for (const auto& m : marginals) out << ' ' << m;
  out << "\nsupport: " << support.size() << " points, parity even"
      << (d.has_full_even_weight_support() ? ", full even-weight support" : "") << '\n';
  out << "pairwise independent: " << coord_set(pic) << '\n';
  out << "eta: " << (eta_value ? to_string(*eta_value) : std::string("n/a (k < 2)")) << '\n';
  out << "contains BLR" << (a.any_triple ? " (any triple)" : " (coordinates 1,2,3)") << ": ";
  if (k < 3) {
    out << "n/a (k < 3)\n";
  } else if (!blr) {
    out << "no\n";
  } else {
    out << "yes, triple " << coord_set({blr->triple[0], blr->triple[1], blr->triple[2]}) << ", b = " << blr->b << ", z = ";
    for (auto z : blr->z) out << z;
    out << (blr->z.empty() ? "(empty)\n" : "\n");
  }
  emit(g, out.str());
}

// ---- test ------------------------------------------------------------------

struct TestArgs {
  std::string dist, fn;
  bool exact = false, mc = false, negated = false;
};

void test_run(const Globals& g, const TestArgs& a) {
  if (a.exact && a.mc) throw PreconditionError("--exact and --mc are exclusive");
  const auto d = load_distribution(a.dist);
  const auto f = parse_function(a.fn, g.n);
  const std::size_t n = f.n();
  // The negated variant samples from D(1-p, k) and complements every query.
  const auto used = a.negated ? construct_pairwise_independent(d.k(), 1 - d.p()) : d;
  const std::uint64_t mc_seed = derive_seed(g.seed, "test.mc");

  TestReport rep;
  auto run_mc = [&] { return product_expectation_mc(f, used, n, g.samples, mc_seed, g.plan(), a.negated); };
  if (a.mc) {
    rep = run_mc();
  } else {
    try {
      rep = product_expectation_exact(f, used, n, {.negate = a.negated});
    } catch (const SizeError&) {
      if (a.exact) throw;
      rep = run_mc();
    }
  }

  const std::string fmt = format_or(g, "json", {"json", "csv"}, "test run");
  if (fmt == "csv") {
    std::ostringstream out;
    out << "expectation,stderr,acceptance,mode,samples,seed\n";
    const Json j = report_to_json(rep);
    out << j["expectation"].dump() << ',' << j["stderr"].dump() << ','
        << (rep.acceptance_probability ? j["acceptance"].dump() : "") << ',' << to_string(rep.mode) << ','
        << rep.samples << ',' << rep.seed << '\n';
    emit(g, out.str());
    return;
  }
  Json j = report_to_json(rep);
  j["exact_value"] = rep.exact_value ? Json(to_string(*rep.exact_value)) : Json(nullptr);
  j["n"] = n;
  j["k"] = used.k();
  j["p"] = to_string(used.p());
  j["negated"] = a.negated;
  j["function"] = a.fn;
  emit(g, dump(j));
}

// ---- witness ---------------------------------------------------------------

struct WitnessArgs {
  std::string dist, report;
  unsigned d_max = kDefaultSearchDegree;
  std::size_t pairs = 100;
};

void witness_build(const Globals& g, const WitnessArgs& a) {
  format_or(g, "json", {"json"}, "witness build");
  const auto d = load_distribution(a.dist);
  const auto pic = pairwise_independent_coordinates(d);
  if (!pic.empty()) {
    throw PairwiseIndependenceError("coordinates " + coord_set(pic) +
                                    " are pairwise independent of all others; the Gaussian witness needs none");
  }
  CounterexampleConfig cfg;
  cfg.d_max = a.d_max;
  cfg.gaussian_samples = g.samples;
  cfg.seed = g.seed;
  cfg.plan = g.plan();
  const auto ce = build_counterexample(d, cfg);

  VerificationConfig vcfg;
  vcfg.n = g.n.value_or(2000);
  vcfg.samples = g.samples;
  vcfg.seed = g.seed;
  vcfg.pairs = a.pairs;
  vcfg.plan = g.plan();
  const auto rep = verify_counterexample(d, ce, vcfg);

  Json w = witness_to_json(ce, g.seed);
  w["degree"] = ce.witness.degree;
  w["alpha_const"] = ce.witness.alpha_const;
  w["gaussian_product"] = {{"estimate", ce.truncation.gaussian_product.estimate},
                           {"stderr", ce.truncation.gaussian_product.std_error}};
  w["center_check"] = ce.bounded.center_check;
  w["lipschitz_bound"] = ce.bounded.lipschitz_bound;
  const Json v = verification_to_json(rep, vcfg);
  if (!a.report.empty()) {
    Globals side = g;
    side.out = a.report;
    emit(side, dump(v));
    emit(g, dump(w));
    return;
  }
  emit(g, dump(Json{{"witness", w}, {"verification", v}}));
}

// ---- hermite ---------------------------------------------------------------

struct HermiteArgs {
  std::vector<unsigned> s;
  std::string rho, sigma, dist;
  bool mc = false;
};

CovarianceMatrix sigma_from_json(const Json& j) {
  const Json& rows = j.is_object() && j.contains("sigma") ? j.at("sigma") : j;
  if (!rows.is_array()) throw ParseError("covariance file needs a 'sigma' array of rows");
  std::vector<std::vector<Rational>> e;
  for (const auto& row : rows) {
    if (!row.is_array()) throw ParseError("covariance rows must be arrays");
    auto& r = e.emplace_back();
    for (const auto& v : row) r.push_back(detail::json_rational(v));
  }
  return CovarianceMatrix::from_exact(std::move(e));
}

void hermite_moment(const Globals& g, const HermiteArgs& a) {
  format_or(g, "json", {"json"}, "hermite moment");
  const int sources = !a.rho.empty() + !a.sigma.empty() + !a.dist.empty();
  if (sources != 1) throw PreconditionError("give exactly one of --rho, --sigma, --dist");
  if (a.s.empty()) throw PreconditionError("--s needs at least one degree");
  const Exponent s(a.s.begin(), a.s.end());
  CovarianceMatrix sigma = !a.rho.empty()    ? CovarianceMatrix::equicorrelated(static_cast<unsigned>(s.size()),
                                                                                parse_rational(a.rho))
                           : !a.sigma.empty() ? sigma_from_json(parse_json(read_file(a.sigma)))
                                              : covariance_from_distribution(load_distribution(a.dist));
  if (sigma.k() != s.size()) {
    throw PreconditionError("degree vector has " + std::to_string(s.size()) + " entries but Sigma is " +
                            std::to_string(sigma.k()) + "x" + std::to_string(sigma.k()));
  }
  const Rational moment = hermite_product_expectation(s, sigma);
  Json j;
  j["s"] = s;
  j["moment"] = to_string(moment);
  j["moment_float"] = to_double(moment);
  if (a.mc) {
    const std::uint64_t seed = derive_seed(g.seed, "hermite.mc");
    const auto est = gaussian_mc_moment(s, sigma, g.samples, seed, g.plan());
    j["mc"] = {{"estimate", est.estimate}, {"stderr", est.std_error}, {"samples", g.samples}, {"seed", seed}};
  }
  emit(g, dump(j));
}

// ---- fourier ---------------------------------------------------------------

void fourier_spectrum(const Globals& g, const std::string& fn, const std::string& p_text) {
  const Rational p = parse_rational(p_text);
  const auto f = parse_function(fn, g.n);
  const auto spec = biased_spectrum(f.is_dense() ? f : f.to_dense(), p);
  const std::size_t n = f.n();
  const std::string fmt = format_or(g, "json", {"json", "csv"}, "fourier spectrum");
  if (fmt == "csv") {
    std::ostringstream out;
    out << "S,value\n";
    for (std::uint64_t s = 0; s < spec.size(); ++s) out << bit_string(s, n) << ',' << Json(spec[s]).dump() << '\n';
    emit(g, out.str());
    return;
  }
  Json coeffs = Json::object();
  for (std::uint64_t s = 0; s < spec.size(); ++s) coeffs[bit_string(s, n)] = spec[s];
  emit(g, dump(Json{{"n", n}, {"p", to_string(p)}, {"coefficients", coeffs}}));
}

// ---- feasibility -----------------------------------------------------------

void feasibility_scan(const Globals& g, const std::vector<std::string>& k_specs, const std::vector<std::string>& p_specs) {
  const auto rows = feasibility_frontier(parse_k_grid(k_specs), parse_p_grid(p_specs));
  for (const auto& r : rows) {
    if (r.feasible != r.bound_check) {
      throw InternalError("feasibility search and analytic bound disagree at k = " + std::to_string(r.k) +
                          ", p = " + to_string(r.p));
    }
  }
  const std::string fmt = format_or(g, "csv", {"csv", "json"}, "feasibility scan");
  if (fmt == "csv") {
    emit(g, frontier_to_csv(rows));
    return;
  }
  Json a = Json::array();
  for (const auto& r : rows) {
    a.push_back({{"k", r.k},
                 {"p", to_string(r.p)},
                 {"feasible", r.feasible},
                 {"bound_check", r.bound_check},
                 {"q", detail::rational_array(r.q)}});
  }
  emit(g, dump(a));
}

int report_error(const Globals& g, const std::string& kind, const std::string& message, int status) {
  if (g.error_json) {
    std::cerr << error_to_json(kind, message, status).dump() << '\n';
  } else {
    std::cerr << "error (" << kind << "): " << message << '\n';
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biased linearity testing: distributions, tests, Hermite witnesses and frontiers"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file mirroring the command-line flags; flags win");

  Globals g;
  app.add_option("--seed", g.seed, "Master seed; subroutine seeds are derived from it");
  app.add_option("--samples", g.samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
  app.add_option("--n", g.n, "Cube dimension");
  app.add_option("--threads", g.threads, "Worker cap (0: all cores); never changes results");
  app.add_option("--out", g.out, "Write the primary output here instead of stdout");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_flag("--error-json", g.error_json, "Report errors as a JSON object on stderr");

  auto* dist = app.add_subcommand("dist", "Construct and inspect biased distributions");
  dist->require_subcommand(1);
  DistArgs da;
  auto* dist_make = dist->add_subcommand("make", "Write a distribution JSON");
  dist_make->add_option("--family", da.family, "uniform|case|composed|construct|dfh19|blr")
      ->required()
      ->check(CLI::IsMember({"uniform", "case", "composed", "construct", "dfh19", "blr"}));
  dist_make->add_option("--k", da.k, "Number of queries");
  dist_make->add_option("--p", da.p, "Bias as a/b");
  dist_make->add_option("--p1", da.p1, "dfh19 only: bias of the inner block");
  auto* dist_check_cmd = dist->add_subcommand("check", "Print marginals, independence, eta and BLR structure");
  dist_check_cmd->add_option("input", da.input, "Distribution JSON")->required();
  dist_check_cmd->add_flag("--any-triple", da.any_triple, "Search every coordinate triple for a BLR pattern");
  auto* dist_perturb = dist->add_subcommand("perturb", "Move to full even-weight support");
  dist_perturb->add_option("input", da.input, "Distribution JSON")->required();

  std::vector<std::string> k_specs{"3:8"}, p_specs{"1/20:19/20:1/20"};
  auto* feas = app.add_subcommand("feasibility", "Queries-vs-bias frontier");
  feas->require_subcommand(1);
  auto* feas_scan = feas->add_subcommand("scan", "One row per (k, p)");
  feas_scan->add_option("--k", k_specs, "k values or inclusive ranges a:b")->delimiter(',');
  feas_scan->add_option("--p", p_specs, "p values or inclusive ranges lo:hi:step")->delimiter(',');

  TestArgs ta;
  auto* test = app.add_subcommand("test", "Run the k-query linearity test");
  test->require_subcommand(1);
  auto* test_run_cmd = test->add_subcommand("run", "Report E[prod f(X_i)] and the acceptance probability");
  test_run_cmd->add_option("--dist", ta.dist, "Distribution JSON")->required();
  test_run_cmd->add_option("--fn", ta.fn, "chi:S | neg-chi:S | random:SEED | function JSON")->required();
  test_run_cmd->add_flag("--exact", ta.exact, "Require exact enumeration");
  test_run_cmd->add_flag("--mc", ta.mc, "Force Monte Carlo");
  test_run_cmd->add_flag("--negated", ta.negated, "Sample from D(1-p, k) and complement every query");

  WitnessArgs wa;
  auto* wit = app.add_subcommand("witness", "Gaussian counterexample pipeline");
  wit->require_subcommand(1);
  auto* wit_build = wit->add_subcommand("build", "Find, truncate, embed and verify a witness");
  wit_build->add_option("--dist", wa.dist, "Distribution JSON")->required();
  wit_build->add_option("--d-max", wa.d_max, "Largest monomial degree d searched");
  wit_build->add_option("--pairs", wa.pairs, "Random coordinate pairs probed");
  wit_build->add_option("--report", wa.report, "Write the verification report here, the witness to --out");

  HermiteArgs ha;
  auto* herm = app.add_subcommand("hermite", "Exact Gaussian Hermite moments");
  herm->require_subcommand(1);
  auto* herm_moment = herm->add_subcommand("moment", "E[prod H_{s_i}(Z_i)] for Z ~ N(0, Sigma)");
  herm_moment->add_option("--s", ha.s, "Degrees, comma separated")->required()->delimiter(',');
  herm_moment->add_option("--rho", ha.rho, "Equicorrelated Sigma with this off-diagonal");
  herm_moment->add_option("--sigma", ha.sigma, "Covariance JSON {\"sigma\": [[\"1\", \"a/b\"], ...]}");
  herm_moment->add_option("--dist", ha.dist, "Use the covariance of this distribution");
  herm_moment->add_flag("--mc", ha.mc, "Add a Monte Carlo cross-check");

  std::string spec_fn, spec_p;
  auto* four = app.add_subcommand("fourier", "p-biased Fourier analysis");
  four->require_subcommand(1);
  auto* four_spec = four->add_subcommand("spectrum", "All p-biased coefficients of a dense function");
  four_spec->add_option("--fn", spec_fn, "chi:S | neg-chi:S | random:SEED | function JSON")->required();
  four_spec->add_option("--p", spec_p, "Bias as a/b")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report_error(g, "usage", e.what(), 1);
  }

  try {
    if (dist_make->parsed()) {
      emit(g, dump(distribution_to_json(make_family(da))));
    } else if (dist_check_cmd->parsed()) {
      dist_check(g, da);
    } else if (dist_perturb->parsed()) {
      emit(g, dump(distribution_to_json(make_full_support_perturbation(load_distribution(da.input)))));
    } else if (feas_scan->parsed()) {
      feasibility_scan(g, k_specs, p_specs);
    } else if (test_run_cmd->parsed()) {
      test_run(g, ta);
    } else if (wit_build->parsed()) {
      witness_build(g, wa);
    } else if (herm_moment->parsed()) {
      hermite_moment(g, ha);
    } else if (four_spec->parsed()) {
      fourier_spectrum(g, spec_fn, spec_p);
    }
  } catch (const ValidationError& e) {
    return report_error(g, e.kind(), e.what(), 1);
  } catch (const ComputationError& e) {
    return report_error(g, e.kind(), e.what(), 2);
  } catch (const std::exception& e) {
    return report_error(g, "internal", e.what(), 2);
  }
  return 0;
}
