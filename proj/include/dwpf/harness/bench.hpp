#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "dwpf/harness/config.hpp"

namespace dwpf::harness {

struct BenchRow {
  Method method;
  int L;
  double ms;  // median per evaluation
  int repeats;
  std::optional<std::uint64_t> terms;
  std::optional<std::uint64_t> inner_terms;
};

inline int max_bench_L(Method m) {
  switch (m) {
    case Method::Enumerate: return kMaxEnumerateL;
    case Method::Contract: return kMaxContractL;
    case Method::ReflContract: return kMaxReflContractL;
    case Method::SymmetrizedSum:
    case Method::AntisymSum:
    case Method::LagrangeSum:
    case Method::ReflSymmetrizedSum: return 9;
    case Method::CrossingSymmetrizedSum:
    case Method::ZEll: return 6;
    case Method::SixVertexReflFormula: return 16;
    default: return 20;
  }
}

inline std::vector<Method> default_bench_methods(bool reflecting) {
  if (reflecting)
    return {Method::TfkDeterminant, Method::ReflContract, Method::ReflSymmetrizedSum, Method::CrossingSymmetrizedSum};
  return {Method::Izergin,    Method::Contract,    Method::Enumerate, Method::SymmetrizedSum,
          Method::AntisymSum, Method::LagrangeSum, Method::Recipe};
}

// Median wall time of one evaluation; repeats until ~20 ms are spent (at least 3, at most 200 runs).
inline BenchRow time_method(Method m, const ModelParams& p, const Parallelism& par) {
  using clock = std::chrono::steady_clock;
  std::vector<double> samples;
  double spent = 0.0;
  volatile double sink = 0.0;
  std::uint64_t evaluated_terms = 0;
  while (samples.size() < 3 || (spent < 20.0 && samples.size() < 200)) {
    const auto t0 = clock::now();
    const PartitionValue v = evaluate(m, p, par);
    const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    sink = sink + v.value.real();
    evaluated_terms = v.terms;
    samples.push_back(ms);
    spent += ms;
  }
  std::nth_element(samples.begin(), samples.begin() + std::ptrdiff_t(samples.size() / 2), samples.end());
  BenchRow row{m, p.size(), samples[samples.size() / 2], int(samples.size()), std::nullopt, std::nullopt};
  // counters come from the formulas themselves: L! for permutation sums, 2^L for reflection sums
  if (evaluated_terms) row.terms = evaluated_terms;
  if (m == Method::CrossingSymmetrizedSum) row.inner_terms = factorial(p.size());
  return row;
}

struct BenchResult {
  std::vector<BenchRow> rows;
  json ordering = json::array();
  bool ordering_ok = true;
};

// At every L >= 8 the determinant must beat every other method available at that L.
inline BenchResult run_bench(const JobConfig& c, std::uint64_t seed, const Parallelism& par) {
  const bool reflecting = c.bench.family == "reflecting";
  std::vector<Method> methods;
  for (const auto& s : c.bench.methods) methods.push_back(*method_from_string(s));
  if (methods.empty()) methods = default_bench_methods(reflecting);
  const Method det = reflecting ? Method::TfkDeterminant : Method::Izergin;

  BenchResult out;
  for (int L = c.bench.L_min; L <= c.bench.L_max; ++L) {
    JobConfig cl = c;
    cl.L = L;
    cl.x = {};
    cl.y = {};
    const ModelParams p = build_params(cl, reflecting, derive_seed(seed, std::uint64_t(L)));
    std::vector<const BenchRow*> at_L;
    const std::size_t first = out.rows.size();
    for (Method m : methods)
      if (L <= max_bench_L(m)) out.rows.push_back(time_method(m, p, par));
    for (std::size_t i = first; i < out.rows.size(); ++i) at_L.push_back(&out.rows[i]);
    if (at_L.empty()) continue;
    const BenchRow* fastest = at_L.front();
    const BenchRow* slowest = at_L.front();
    for (const BenchRow* r : at_L) {
      if (r->ms < fastest->ms) fastest = r;
      if (r->ms > slowest->ms) slowest = r;
    }
    json o{{"L", L},
           {"fastest", std::string(to_string(fastest->method))},
           {"slowest", std::string(to_string(slowest->method))}};
    if (L >= 8 && at_L.size() > 1) {
      const BenchRow* d = nullptr;
      for (const BenchRow* r : at_L)
        if (r->method == det) d = r;
      if (d) {
        bool ok = true;
        for (const BenchRow* r : at_L)
          if (r != d && !(d->ms < r->ms)) ok = false;
        o["determinant_fastest"] = ok;
        out.ordering_ok = out.ordering_ok && ok;
      }
    }
    out.ordering.push_back(o);
  }
  return out;
}

inline json bench_json(const BenchResult& b, std::uint64_t seed, unsigned threads) {
  json j;
  j["schema"] = 1;
  j["command"] = "bench";
  j["seed"] = seed;
  j["threads"] = threads;
  j["rows"] = json::array();
  for (const auto& r : b.rows) {
    json row{{"method", std::string(to_string(r.method))}, {"L", r.L}, {"wall_time_ms", r.ms}, {"repeats", r.repeats}};
    row["terms"] = r.terms ? json(*r.terms) : json(nullptr);
    if (r.inner_terms) row["inner_terms"] = *r.inner_terms;
    j["rows"].push_back(row);
  }
  j["ordering"] = b.ordering;
  j["ordering_ok"] = b.ordering_ok;
  return j;
}

inline std::string bench_table(const BenchResult& b) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-26s %3s %14s %12s\n", "method", "L", "ms/eval", "terms");
  out += buf;
  for (const auto& r : b.rows) {
    const std::string terms = r.terms ? std::to_string(*r.terms) : "-";
    std::snprintf(buf, sizeof buf, "%-26s %3d %14.6f %12s\n", std::string(to_string(r.method)).c_str(), r.L, r.ms,
                  terms.c_str());
    out += buf;
  }
  out += std::string("ordering ") + (b.ordering_ok ? "ok" : "VIOLATED") + "\n";
  return out;
}

}  // namespace dwpf::harness
