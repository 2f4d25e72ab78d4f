#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dwpf/dwpf.hpp"
#include "json.hpp"

namespace dwpf::harness {

using nlohmann::json;

// Bad configuration: maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json to_json(cplx v) { return json::array({v.real(), v.imag()}); }

inline cplx complex_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(what + ": expected a number or [re, im]");
}

inline BracketMode mode_from_string(const std::string& s) {
  if (s == "trig" || s == "trigonometric") return BracketMode::Trigonometric;
  if (s == "elliptic") return BracketMode::Elliptic;
  if (s == "rational") return BracketMode::Rational;
  throw ConfigError("unknown mode '" + s + "' (trig|elliptic|rational)");
}

// A complex list/scalar that is either given explicitly, drawn at random, or absent.
template <class T>
struct Spec {
  enum class Kind { Absent, Random, Given } kind = Kind::Absent;
  T value{};
};

struct BenchConfig {
  int L_min = 1;
  int L_max = 8;
  std::vector<std::string> methods;  // empty: all methods of the chosen family
  std::string family = "six_vertex";
};

struct JobConfig {
  BracketMode mode = BracketMode::Trigonometric;
  cplx gamma{0.7, 0.0};
  cplx tau{0.1, 0.7};
  int L = 3;
  Spec<std::vector<cplx>> x, y;
  Spec<cplx> z, kappa;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> formulas;
  std::optional<double> tolerance;
  std::optional<unsigned> threads;
  BenchConfig bench;

  bool uses_random() const {
    return x.kind == Spec<std::vector<cplx>>::Kind::Random || y.kind == Spec<std::vector<cplx>>::Kind::Random ||
           z.kind == Spec<cplx>::Kind::Random || kappa.kind == Spec<cplx>::Kind::Random;
  }

  BracketContext context() const {
    switch (mode) {
      case BracketMode::Trigonometric: return BracketContext::trigonometric(gamma);
      case BracketMode::Rational: return BracketContext::rational();
      case BracketMode::Elliptic: return BracketContext::elliptic(gamma, tau);
    }
    return BracketContext::rational();
  }
};

inline Spec<std::vector<cplx>> list_spec(const json& j, const std::string& what) {
  Spec<std::vector<cplx>> s;
  if (j.is_string()) {
    if (j.get<std::string>() != "random") throw ConfigError(what + ": only \"random\" is accepted as a string");
    s.kind = Spec<std::vector<cplx>>::Kind::Random;
    return s;
  }
  if (!j.is_array()) throw ConfigError(what + ": expected a list of [re, im] or \"random\"");
  s.kind = Spec<std::vector<cplx>>::Kind::Given;
  for (std::size_t i = 0; i < j.size(); ++i) s.value.push_back(complex_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  return s;
}

inline Spec<cplx> scalar_spec(const json& j, const std::string& what) {
  Spec<cplx> s;
  if (j.is_null()) return s;
  if (j.is_string()) {
    if (j.get<std::string>() != "random") throw ConfigError(what + ": only \"random\" is accepted as a string");
    s.kind = Spec<cplx>::Kind::Random;
    return s;
  }
  s.kind = Spec<cplx>::Kind::Given;
  s.value = complex_from_json(j, what);
  return s;
}

// Parses a config document. Key checks happen here so that later failures are numeric only.
inline JobConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  JobConfig c;
  try {
    if (j.contains("schema") && j["schema"] != 1) throw ConfigError("unsupported schema (expected 1)");
    if (j.contains("mode")) c.mode = mode_from_string(j["mode"].get<std::string>());
    if (j.contains("gamma")) c.gamma = complex_from_json(j["gamma"], "gamma");
    if (j.contains("tau")) c.tau = complex_from_json(j["tau"], "tau");
    if (j.contains("L")) c.L = j["L"].get<int>();
    if (j.contains("x")) c.x = list_spec(j["x"], "x");
    if (j.contains("y")) c.y = list_spec(j["y"], "y");
    if (j.contains("z")) c.z = scalar_spec(j["z"], "z");
    if (j.contains("kappa")) c.kappa = scalar_spec(j["kappa"], "kappa");
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("formula")) c.formulas.push_back(j["formula"].get<std::string>());
    if (j.contains("formulas")) c.formulas = j["formulas"].get<std::vector<std::string>>();
    if (j.contains("tolerance")) c.tolerance = j["tolerance"].get<double>();
    if (j.contains("threads")) c.threads = j["threads"].get<unsigned>();
    if (j.contains("bench")) {
      const json& b = j["bench"];
      if (b.contains("L_min")) c.bench.L_min = b["L_min"].get<int>();
      if (b.contains("L_max")) c.bench.L_max = b["L_max"].get<int>();
      if (b.contains("methods")) c.bench.methods = b["methods"].get<std::vector<std::string>>();
      if (b.contains("family")) c.bench.family = b["family"].get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }
  if (c.L < 1) throw ConfigError("L must be >= 1");
  if (c.x.kind == Spec<std::vector<cplx>>::Kind::Given) c.L = int(c.x.value.size());
  if (c.x.kind == Spec<std::vector<cplx>>::Kind::Given && c.y.kind == Spec<std::vector<cplx>>::Kind::Given &&
      c.x.value.size() != c.y.value.size())
    throw ConfigError("x and y must have the same length");
  if (c.y.kind == Spec<std::vector<cplx>>::Kind::Given && int(c.y.value.size()) != c.L)
    throw ConfigError("y length must equal L");
  for (const auto& f : c.formulas)
    if (!method_from_string(f)) throw ConfigError("unknown formula '" + f + "'");
  return c;
}

inline bool is_reflecting(Method m) {
  switch (m) {
    case Method::ReflContract:
    case Method::TfkDeterminant:
    case Method::ReflSymmetrizedSum:
    case Method::CrossingSymmetrizedSum:
    case Method::SixVertexReflFormula: return true;
    default: return false;
  }
}

inline PartitionValue evaluate(Method m, const ModelParams& p, const Parallelism& par) {
  switch (m) {
    case Method::Enumerate: return dwpf_enumerate(p);
    case Method::Contract: return dwpf_contract(p);
    case Method::ReflContract: return refl_contract(p);
    case Method::Izergin: return izergin_determinant(p);
    case Method::SymmetrizedSum: return symmetrized_sum(p, par);
    case Method::AntisymSum: return antisym_sum(p, par);
    case Method::LagrangeSum: return lagrange_sum(p, par);
    case Method::TfkDeterminant: return tfk_determinant(p);
    case Method::ReflSymmetrizedSum: return refl_symmetrized_sum(p, par);
    case Method::ZEll: return z_ell(p, par);
    case Method::CrossingSymmetrizedSum: return crossing_symmetrized_sum(p, par);
    case Method::SixVertexReflFormula: return six_vertex_refl_formula(p, par);
    case Method::Recipe: return recipe_build(p);
  }
  throw Error(ErrorKind::InvalidContext, "unknown method");
}

// Turns a config into concrete parameters. Random pieces come from `seed`.
// z: absent means dropped, except in elliptic mode where the reflecting family draws it.
inline ModelParams build_params(const JobConfig& c, bool reflecting, std::uint64_t seed) {
  using LK = Spec<std::vector<cplx>>::Kind;
  using SK = Spec<cplx>::Kind;
  const BracketContext ctx = c.context();
  DrawOptions opt;
  opt.family = reflecting ? Family::Reflecting : Family::SixVertex;
  opt.with_z = reflecting && (c.z.kind == SK::Random || (c.z.kind == SK::Absent && c.mode == BracketMode::Elliptic));
  Rng rng(seed);
  ModelParams p = random_params(rng, ctx, c.L, opt);  // baseline; explicit values override below
  if (c.x.kind == LK::Given) p.x = c.x.value;
  if (c.y.kind == LK::Given) p.y = c.y.value;
  if (c.z.kind == SK::Given) p.z = c.z.value;
  if (c.kappa.kind == SK::Given) p.kappa = c.kappa.value;
  if (!reflecting) {
    if (c.z.kind != SK::Given) p.z.reset();
    if (c.kappa.kind != SK::Given) p.kappa.reset();
  }
  if (int(p.x.size()) != int(p.y.size())) throw ConfigError("x and y must have the same length");
  return p;
}

inline json params_to_json(const ModelParams& p) {
  json j;
  j["x"] = json::array();
  j["y"] = json::array();
  for (cplx v : p.x) j["x"].push_back(to_json(v));
  for (cplx v : p.y) j["y"].push_back(to_json(v));
  j["z"] = p.z ? to_json(*p.z) : json(nullptr);
  j["kappa"] = p.kappa ? to_json(*p.kappa) : json(nullptr);
  return j;
}

}  // namespace dwpf::harness
