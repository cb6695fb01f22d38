#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "biaslin/cube.hpp"
#include "biaslin/distributions.hpp"
#include "biaslin/error.hpp"
#include "biaslin/lintest.hpp"
#include "biaslin/rational.hpp"
#include "biaslin/witness.hpp"

namespace biaslin {

using Json = nlohmann::ordered_json;

namespace detail {

template <class T>
T json_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

inline Rational json_rational(const Json& v) {
  if (!v.is_string()) throw ParseError("rationals must be \"a/b\" strings, got " + v.dump());
  return parse_rational(v.get<std::string>());
}

inline Json rational_array(const std::vector<Rational>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(to_string(x));
  return a;
}

}  // namespace detail

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

/// {"k", "p", "probs": {bits: "a/b"}, "q"?}; only support points are listed.
inline Json distribution_to_json(const BiasedDistribution& d) {
  Json j;
  j["k"] = d.k();
  j["p"] = to_string(d.p());
  Json probs = Json::object();
  for (auto x : d.support()) probs[d.bits(x)] = to_string(d.prob(x));
  j["probs"] = std::move(probs);
  if (d.q()) j["q"] = detail::rational_array(*d.q());
  return j;
}

inline BiasedDistribution distribution_from_json(const Json& j) {
  const auto k = detail::json_field<unsigned>(j, "k");
  BiasedDistribution::check_arity(k);
  if (!j.contains("p")) throw ParseError("missing field 'p'");
  const Rational p = detail::json_rational(j.at("p"));
  if (!j.contains("probs") || !j.at("probs").is_object()) throw ParseError("'probs' must be an object");
  std::vector<Rational> probs(std::uint64_t{1} << k, Rational(0));
  for (const auto& [bits, value] : j.at("probs").items()) {
    if (bits.size() != k || bits.find_first_not_of("01") != std::string::npos) {
      throw ParseError("probability key '" + bits + "' is not a " + std::to_string(k) + "-bit string");
    }
    probs[std::stoull(bits, nullptr, 2)] = detail::json_rational(value);
  }
  std::optional<std::vector<Rational>> q;
  if (j.contains("q")) {
    if (!j.at("q").is_array()) throw ParseError("'q' must be an array");
    q.emplace();
    for (const auto& v : j.at("q")) q->push_back(detail::json_rational(v));
  }
  return BiasedDistribution::from_table(k, p, std::move(probs), std::move(q));
}

inline Json function_to_json(const CubeFunction& f) {
  Json j;
  j["n"] = f.n();
  j["values"] = f.table();
  return j;
}

inline CubeFunction function_from_json(const Json& j) {
  const auto n = detail::json_field<std::size_t>(j, "n");
  auto values = detail::json_field<std::vector<double>>(j, "values");
  if (n < 1 || n > kMaxDenseArity) throw SizeError("function files need 1 <= n <= 24");
  if (values.size() != (std::size_t{1} << n)) throw SizeError("'values' must have 2^n entries");
  return CubeFunction::dense(std::move(values));
}

inline Json witness_to_json(const Counterexample& ce, std::uint64_t seed) {
  Json j;
  j["s"] = ce.witness.s;
  j["alpha"] = detail::rational_array(ce.witness.alpha);
  j["product_moment"] = to_string(ce.witness.product_moment);
  j["M"] = ce.bounded.M;
  j["center"] = ce.bounded.center;
  j["seed"] = seed;
  return j;
}

inline Json report_to_json(const TestReport& r) {
  Json j;
  j["expectation"] = r.product_expectation;
  j["stderr"] = r.std_error;
  j["acceptance"] = r.acceptance_probability ? Json(*r.acceptance_probability) : Json(nullptr);
  j["mode"] = to_string(r.mode);
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  return j;
}

inline Json verification_to_json(const VerificationReport& r, const VerificationConfig& cfg) {
  Json j;
  j["n"] = cfg.n;
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["alpha_const"] = r.alpha_const;
  j["eta"] = to_string(r.eta);
  j["product"] = report_to_json(r.product);
  j["product_ok"] = r.product_ok;
  if (r.eta < 1) {
    j["rounded_product"] = report_to_json(r.rounded_product);
    j["rounded_ok"] = r.rounded_ok;
  } else {
    j["rounded_product"] = nullptr;
    j["rounded_ok"] = nullptr;
  }
  j["probes"] = r.correlations.size();
  j["max_abs_correlation"] = r.max_abs_correlation;
  j["correlation_bound"] = kCorrelationBound;
  j["correlations_ok"] = r.correlations_ok;
  return j;
}

inline Json error_to_json(const std::string& kind, const std::string& message, int status) {
  Json j;
  j["error"] = kind;
  j["message"] = message;
  j["status"] = status;
  return j;
}

struct FrontierRow {
  unsigned k = 0;
  Rational p;
  bool feasible = false;
  bool bound_check = false;
  std::vector<Rational> q;  // empty when infeasible

  bool operator==(const FrontierRow&) const = default;
};

inline std::vector<FrontierRow> feasibility_frontier(const std::vector<unsigned>& ks, const std::vector<Rational>& ps) {
  std::vector<FrontierRow> rows;
  for (unsigned k : ks) {
    for (const auto& p : ps) {
      const auto cert = feasibility_search(k, p);
      rows.push_back({k, p, cert.feasible, cert.bound_check, cert.q.value_or(std::vector<Rational>{})});
    }
  }
  return rows;
}

inline constexpr const char* kFrontierHeader = "k,p,feasible,bound_check,q";

/// One row per (k, p); q entries are ';'-separated "a/b" strings.
inline std::string frontier_to_csv(const std::vector<FrontierRow>& rows) {
  std::ostringstream out;
  out << kFrontierHeader << '\n';
  for (const auto& r : rows) {
    out << r.k << ',' << to_string(r.p) << ',' << (r.feasible ? 1 : 0) << ',' << (r.bound_check ? 1 : 0) << ',';
    for (std::size_t i = 0; i < r.q.size(); ++i) out << (i ? ";" : "") << to_string(r.q[i]);
    out << '\n';
  }
  return out.str();
}

inline std::vector<FrontierRow> frontier_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kFrontierHeader) throw ParseError("frontier CSV header mismatch");
  auto parse_flag = [](const std::string& s) {
    if (s != "0" && s != "1") throw ParseError("frontier flag must be 0 or 1, got '" + s + "'");
    return s == "1";
  };
  std::vector<FrontierRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 5) throw ParseError("frontier CSV row needs 5 cells: '" + line + "'");
    FrontierRow r;
    try {
      r.k = static_cast<unsigned>(std::stoul(cells[0]));
    } catch (const std::exception&) {
      throw ParseError("frontier k is not an integer: '" + cells[0] + "'");
    }
    r.p = parse_rational(cells[1]);
    r.feasible = parse_flag(cells[2]);
    r.bound_check = parse_flag(cells[3]);
    std::istringstream qs(cells[4]);
    std::string entry;
    while (std::getline(qs, entry, ';')) r.q.push_back(parse_rational(entry));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace biaslin
