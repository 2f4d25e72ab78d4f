#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "dwpf/harness/config.hpp"

namespace dwpf::harness {

enum class Expect { Below, Above };

// Accumulates wall time per method name inside one check.
class MethodTimer {
 public:
  template <class F>
  auto time(const std::string& method, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto out = f();
    ms_[method] += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }
  const std::map<std::string, double>& ms() const { return ms_; }

 private:
  std::map<std::string, double> ms_;
};

using CheckFn = std::function<double(std::uint64_t seed, MethodTimer& timer)>;

struct CheckSpec {
  std::string id, lhs, rhs;
  int L = 0;
  double tolerance = 0.0;
  Expect expect = Expect::Below;
  CheckFn run;
};

struct CheckResult {
  const CheckSpec* spec = nullptr;
  std::uint64_t seed = 0;
  double residual = 0.0;
  bool pass = false;
  std::string error;
  std::map<std::string, double> method_ms;
  double wall_ms = 0.0;
};

struct ValidateOptions {
  BracketMode six_vertex_mode = BracketMode::Trigonometric;  // Elliptic: six-vertex family skipped
  cplx gamma{0.7, 0.0};
  cplx tau{0.1, 0.7};
  std::optional<double> tolerance;  // overrides every identity (expect-below) tolerance
  bool controls_only = false;
  int draws = 3;
};

namespace detail {

inline std::string nm(Method m) { return std::string(to_string(m)); }

inline double max_over_draws(int draws, std::uint64_t seed, const std::function<double(Rng&)>& one) {
  Rng rng(seed);
  double worst = 0.0;
  for (int d = 0; d < draws; ++d) worst = std::max(worst, one(rng));
  return worst;
}

inline const Parallelism kSerial{1, 7};

class MatrixBuilder {
 public:
  explicit MatrixBuilder(const ValidateOptions& o) : o_(o) {}

  std::vector<CheckSpec> build() {
    if (!o_.controls_only) {
      if (o_.six_vertex_mode != BracketMode::Elliptic) six_vertex_family();
      reflecting_family();
      structural();
    }
    controls();
    return std::move(out_);
  }

 private:
  const ValidateOptions& o_;
  std::vector<CheckSpec> out_;

  BracketContext sv() const {
    return o_.six_vertex_mode == BracketMode::Rational ? BracketContext::rational()
                                                       : BracketContext::trigonometric(o_.gamma);
  }
  BracketContext ell() const { return BracketContext::elliptic(o_.gamma, o_.tau); }
  double tol(double t) const { return o_.tolerance.value_or(t); }

  void add(std::string id, std::string lhs, std::string rhs, int L, double t, CheckFn fn) {
    out_.push_back({std::move(id), std::move(lhs), std::move(rhs), L, tol(t), Expect::Below, std::move(fn)});
  }
  void control(std::string id, std::string lhs, std::string rhs, int L, double threshold, CheckFn fn) {
    out_.push_back({std::move(id), std::move(lhs), std::move(rhs), L, threshold, Expect::Above, std::move(fn)});
  }

  // residual between two methods on random draws of the given family
  CheckFn pair(BracketContext ctx, int L, Method a, Method b, DrawOptions opt = {}) const {
    const int draws = o_.draws;
    return [=](std::uint64_t seed, MethodTimer& t) {
      return max_over_draws(draws, seed, [&](Rng& rng) {
        const ModelParams p = random_params(rng, ctx, L, opt);
        const auto va = t.time(nm(a), [&] { return evaluate(a, p, kSerial); });
        const auto vb = t.time(nm(b), [&] { return evaluate(b, p, kSerial); });
        return relative_residual(va, vb);
      });
    };
  }

  void six_vertex_family() {
    const BracketContext ctx = sv();
    const int draws = o_.draws;
    for (int L = 1; L <= 4; ++L)
      add("oracle.enumerate_vs_contract.L" + std::to_string(L), nm(Method::Enumerate), nm(Method::Contract), L, 1e-10,
          pair(ctx, L, Method::Enumerate, Method::Contract));
    for (int L = 2; L <= 6; ++L)
      for (Method m : {Method::Izergin, Method::SymmetrizedSum, Method::AntisymSum, Method::LagrangeSum, Method::Recipe})
        add("agreement." + nm(m) + ".L" + std::to_string(L), nm(m), nm(Method::Contract), L,
            m == Method::Recipe ? 1e-9 : 1e-8, pair(ctx, L, m, Method::Contract));
    for (int L = 1; L <= 6; ++L)
      add("functional.six_vertex.L" + std::to_string(L), "functional_residual", nm(Method::Izergin), L, 1e-9,
          [=](std::uint64_t seed, MethodTimer& t) {
            return max_over_draws(draws, seed, [&](Rng& rng) {
              ModelParams p = random_params(rng, ctx, L);
              p.x.insert(p.x.begin(), random_extra_x(rng, p, Family::SixVertex));
              return t.time("functional_residual", [&] {
                return functional_residual(p, [](const ModelParams& q) { return izergin_determinant(q).value; });
              });
            });
          });
    for (int L = 2; L <= 4; ++L)
      for (KorepinVariant v : {KorepinVariant::X1EqY1, KorepinVariant::XLEqY1Minus1, KorepinVariant::XLEqYL})
        add("korepin." + std::string(to_string(v)) + ".L" + std::to_string(L), nm(Method::Contract), "korepin_factor",
            L, 1e-9, [=](std::uint64_t seed, MethodTimer& t) {
              return max_over_draws(draws, seed, [&](Rng& rng) {
                const ModelParams p = random_params(rng, ctx, L);
                const ModelParams sp = specialize(p, v);
                const cplx lhs = t.time(nm(Method::Contract), [&] { return dwpf_contract(sp).value; });
                const cplx rhs = korepin_factor(sp, v) * dwpf_contract(reduced(p, v)).value;
                return relative_residual(lhs, rhs);
              });
            });
    for (int L : {4, 6})
      add("recipe.k_order.L" + std::to_string(L), "recipe_build(reversed)", nm(Method::Recipe), L, 1e-10,
          [=](std::uint64_t seed, MethodTimer& t) {
            return max_over_draws(draws, seed, [&](Rng& rng) {
              const ModelParams p = random_params(rng, ctx, L);
              std::vector<int> rev(static_cast<std::size_t>(L));
              for (int i = 0; i < L; ++i) rev[std::size_t(i)] = L - 1 - i;
              return t.time(nm(Method::Recipe), [&] { return relative_residual(recipe_build(p, rev), recipe_build(p)); });
            });
          });
    for (int L = 2; L <= 4; ++L)
      add("special_zero.six_vertex.L" + std::to_string(L), nm(Method::SymmetrizedSum), "0", L, 1e-9,
          [=](std::uint64_t seed, MethodTimer& t) {
            return max_over_draws(draws, seed, [&](Rng& rng) {
              const ModelParams p = random_params(rng, ctx, L);
              double worst = 0.0;
              for (int k = 0; k < L; ++k)
                worst = std::max(worst, t.time(nm(Method::SymmetrizedSum), [&] { return special_zero_check(p, k); }));
              return worst;
            });
          });
    add("symmetry.double.L4", nm(Method::Contract), nm(Method::Contract), 4, 1e-10,
        [=](std::uint64_t seed, MethodTimer& t) {
          return max_over_draws(draws, seed, [&](Rng& rng) {
            const ModelParams p = random_params(rng, ctx, 4);
            ModelParams q = p;
            std::swap(q.x[0], q.x[3]);
            std::rotate(q.x.begin(), q.x.begin() + 1, q.x.end());
            std::swap(q.y[1], q.y[2]);
            return t.time(nm(Method::Contract), [&] { return relative_residual(dwpf_contract(p), dwpf_contract(q)); });
          });
        });
    if (o_.six_vertex_mode == BracketMode::Trigonometric)
      add("symmetry.duality.L4", nm(Method::Contract), nm(Method::Contract), 4, 1e-10,
          [=](std::uint64_t seed, MethodTimer& t) {
            return max_over_draws(draws, seed, [&](Rng& rng) {
              const ModelParams p = random_params(rng, ctx, 4);
              ModelParams q = p;
              for (int i = 0; i < 4; ++i) {
                q.x[std::size_t(i)] = p.y[std::size_t(i)] - 1.0;
                q.y[std::size_t(i)] = p.x[std::size_t(i)];
              }
              return t.time(nm(Method::Contract), [&] { return relative_residual(dwpf_contract(q), dwpf_contract(p)); });
            });
          });
    DrawOptions drop{Family::Reflecting, false};
    for (int L = 1; L <= 4; ++L)
      add("six_vertex_refl.L" + std::to_string(L), nm(Method::SixVertexReflFormula), nm(Method::TfkDeterminant), L,
          1e-9, pair(ctx, L, Method::SixVertexReflFormula, Method::TfkDeterminant, drop));
  }

  void reflecting_family() {
    const BracketContext ctx = ell();
    const int draws = o_.draws;
    const DrawOptions refl{Family::Reflecting, true};
    for (int L = 1; L <= 4; ++L) {
      if (L <= 3)
        add("elliptic.refl_contract.L" + std::to_string(L), nm(Method::ReflContract), nm(Method::TfkDeterminant), L,
            1e-8, pair(ctx, L, Method::ReflContract, Method::TfkDeterminant, refl));
      add("elliptic.refl_symmetrized_sum.L" + std::to_string(L), nm(Method::ReflSymmetrizedSum),
          nm(Method::TfkDeterminant), L, 1e-8, pair(ctx, L, Method::ReflSymmetrizedSum, Method::TfkDeterminant, refl));
      add("elliptic.crossing_symmetrized_sum.L" + std::to_string(L), nm(Method::CrossingSymmetrizedSum),
          nm(Method::TfkDeterminant), L, 1e-8,
          pair(ctx, L, Method::CrossingSymmetrizedSum, Method::TfkDeterminant, refl));
    }
    add("elliptic.crossing_signed.L3", "crossing_symmetrized_sum_signed", nm(Method::CrossingSymmetrizedSum), 3, 1e-9,
        [=](std::uint64_t seed, MethodTimer& t) {
          return max_over_draws(draws, seed, [&](Rng& rng) {
            const ModelParams p = random_params(rng, ctx, 3, refl);
            return t.time(nm(Method::CrossingSymmetrizedSum), [&] {
              return relative_residual(crossing_symmetrized_sum_signed(p), crossing_symmetrized_sum(p));
            });
          });
        });
    for (int L : {2, 3})
      for (KorepinVariant v : {KorepinVariant::ReflPlus, KorepinVariant::ReflMinus})
        add("tfk_recurrence." + std::string(v == KorepinVariant::ReflPlus ? "plus" : "minus") + ".L" +
                std::to_string(L),
            nm(Method::ReflContract), "korepin_factor", L, 1e-8, [=](std::uint64_t seed, MethodTimer& t) {
              return max_over_draws(draws, seed, [&](Rng& rng) {
                const ModelParams p = random_params(rng, ctx, L, refl);
                const ModelParams sp = specialize(p, v);
                const cplx lhs = t.time(nm(Method::ReflContract), [&] { return refl_contract(sp).value; });
                const cplx rhs = korepin_factor(sp, v) * refl_contract(reduced(p, v)).value;
                return relative_residual(lhs, rhs);
              });
            });
    add("crossing.renormalized.L3", nm(Method::ReflContract), nm(Method::ReflContract), 3, 1e-9,
        [=](std::uint64_t seed, MethodTimer& t) {
          return max_over_draws(draws, seed, [&](Rng& rng) {
            const ModelParams p = random_params(rng, ctx, 3, refl);
            const cplx base = renormalized(p, refl_contract(p).value);
            double worst = 0.0;
            for (int i = 0; i < 3; ++i) {
              ModelParams q = p;
              q.x[std::size_t(i)] = -q.x[std::size_t(i)] - 1.0;
              const cplx v = t.time(nm(Method::ReflContract), [&] { return renormalized(q, refl_contract(q).value); });
              worst = std::max(worst, relative_residual(v, base));
            }
            return worst;
          });
        });
    for (int L = 1; L <= 4; ++L)
      add("functional.reflecting.L" + std::to_string(L), "functional_residual", nm(Method::TfkDeterminant), L, 1e-8,
          [=](std::uint64_t seed, MethodTimer& t) {
            return max_over_draws(draws, seed, [&](Rng& rng) {
              ModelParams p = random_params(rng, ctx, L, refl);
              p.x.insert(p.x.begin(), random_extra_x(rng, p, Family::Reflecting));
              return t.time("functional_residual", [&] {
                return functional_residual(
                    p, [](const ModelParams& q) { return tfk_determinant(q).value; }, CoeffKind::Reflecting);
              });
            });
          });
    add("kappa_z_independence.L3", nm(Method::CrossingSymmetrizedSum), nm(Method::TfkDeterminant), 3, 1e-8,
        [=](std::uint64_t seed, MethodTimer& t) {
          Rng rng(seed);
          const ModelParams base = random_params(rng, ctx, 3, refl);
          double worst = 0.0;
          for (int d = 0; d < 3; ++d) {
            ModelParams p = base;
            for (int attempt = 0;; ++attempt) {
              p.kappa = rng.spectral();
              p.z = rng.spectral();
              if (well_separated(p, Family::Reflecting, guard::kDrawMargin)) break;
              if (attempt > 1000) throw Error(ErrorKind::GenericPositionViolation, "no generic (kappa, z) draw");
            }
            const auto a = t.time(nm(Method::CrossingSymmetrizedSum), [&] { return crossing_symmetrized_sum(p); });
            const auto b = t.time(nm(Method::TfkDeterminant), [&] { return tfk_determinant(p); });
            worst = std::max(worst, relative_residual(a, b));
          }
          return worst;
        });
  }

  void structural() {
    const BracketContext six = o_.six_vertex_mode == BracketMode::Elliptic ? BracketContext::trigonometric(o_.gamma)
                                                                            : sv();
    const BracketContext ctx = ell();
    constexpr int kDraws = 20;
    add("structural.ybe", "R12 R13 R23", "R23 R13 R12", 3, 1e-12, [=](std::uint64_t seed, MethodTimer& t) {
      return max_over_draws(kDraws, seed, [&](Rng& rng) {
        const cplx a = rng.spectral(), b = rng.spectral(), c = rng.spectral();
        return t.time("ybe_residual", [&] { return ybe_residual(six, a, b, c); });
      });
    });
    add("structural.dynamical_ybe", "dynamical YBE lhs", "dynamical YBE rhs", 3, 1e-12,
        [=](std::uint64_t seed, MethodTimer& t) {
          return max_over_draws(kDraws, seed, [&](Rng& rng) {
            const cplx a = rng.spectral(), b = rng.spectral(), c = rng.spectral(), z = rng.spectral();
            return t.time("dyn_ybe_residual", [&] { return dyn_ybe_residual(ctx, a, b, c, z); });
          });
        });
    add("structural.reflection", "R K R K", "K R K R", 2, 1e-12, [=](std::uint64_t seed, MethodTimer& t) {
      return max_over_draws(kDraws, seed, [&](Rng& rng) {
        const cplx u = rng.spectral(), v = rng.spectral(), z = rng.spectral(), k = rng.spectral();
        return t.time("reflection_residual", [&] { return reflection_residual(ctx, u, v, z, k); });
      });
    });
  }

  // Negative controls: each perturbs one ingredient and must push its residual above the threshold.
  void controls() {
    const BracketContext six = o_.six_vertex_mode == BracketMode::Rational ? BracketContext::rational()
                                                                            : BracketContext::trigonometric(o_.gamma);
    const BracketContext ctx = ell();
    control("control.ybe_c_doubled", "R12 R13 R23 (c doubled)", "R23 R13 R12", 3, 1e-3,
            [=](std::uint64_t seed, MethodTimer& t) {
              Rng rng(seed);
              SixVertexWeights w(six);
              w.c_scale = 2.0;
              const cplx a = rng.spectral(), b = rng.spectral(), c = rng.spectral();
              return t.time("ybe_residual", [&] { return ybe_residual(w, a, b, c); });
            });
    control("control.dynamical_ybe_flipped_shift", "dynamical YBE lhs (s=+1)", "dynamical YBE rhs", 3, 1e-3,
            [=](std::uint64_t seed, MethodTimer& t) {
              Rng rng(seed);
              const cplx a = rng.spectral(), b = rng.spectral(), c = rng.spectral(), z = rng.spectral();
              return t.time("dyn_ybe_residual", [&] { return dyn_ybe_residual(ctx, a, b, c, z, -kDynamicalShift); });
            });
    control("control.reflection_kappa_perturbed", "R K R K (kappa+0.1 in K2)", "K R K R", 2, 1e-3,
            [=](std::uint64_t seed, MethodTimer& t) {
              Rng rng(seed);
              const cplx u = rng.spectral(), v = rng.spectral(), z = rng.spectral(), k = rng.spectral();
              return t.time("reflection_residual", [&] { return reflection_residual(ctx, u, v, z, k, k + 0.1); });
            });
    control("control.functional_perturbed_weight", "functional_residual", "dwpf_contract(a*1.01)", 3, 1e-4,
            [=](std::uint64_t seed, MethodTimer& t) {
              Rng rng(seed);
              ModelParams p = random_params(rng, six, 3);
              p.x.insert(p.x.begin(), random_extra_x(rng, p, Family::SixVertex));
              SixVertexWeights w(six);
              w.a_scale = 1.01;
              return t.time("functional_residual", [&] {
                return functional_residual(p, [&](const ModelParams& q) { return dwpf_contract(q, w).value; });
              });
            });
    control("control.nonsymmetric_trial", "functional_residual", "izergin*(1+[x1]/2)", 2, 1e-3,
            [=](std::uint64_t seed, MethodTimer& t) {
              Rng rng(seed);
              ModelParams p = random_params(rng, six, 2);
              p.x.insert(p.x.begin(), random_extra_x(rng, p, Family::SixVertex));
              return t.time("functional_residual", [&] {
                return functional_residual(p, [](const ModelParams& q) {
                  return izergin_determinant(q).value * (1.0 + 0.5 * q.br(q.x[0]));
                });
              });
            });
    control("control.special_zero_off", nm(Method::SymmetrizedSum), "0 (x2 = y_k + 0.1)", 3, 1e-3,
            [=](std::uint64_t seed, MethodTimer& t) {
              Rng rng(seed);
              const ModelParams p = random_params(rng, six, 3);
              return t.time(nm(Method::SymmetrizedSum),
                            [&] { return special_zero_check(p, 1, Family::SixVertex, 0, 0.1); });
            });
  }
};

}  // namespace detail

inline std::vector<CheckSpec> build_check_matrix(const ValidateOptions& o) { return detail::MatrixBuilder(o).build(); }

inline bool judge(double residual, double tolerance, Expect e) {
  if (!std::isfinite(residual)) return false;
  return e == Expect::Below ? residual < tolerance : residual > tolerance;
}

// Runs every check on a pool of `threads` workers; results come back in matrix order.
inline std::vector<CheckResult> run_checks(const std::vector<CheckSpec>& checks, std::uint64_t seed, unsigned threads) {
  std::vector<CheckResult> res(checks.size());
  auto one = [&](std::size_t i) {
    CheckResult& r = res[i];
    r.spec = &checks[i];
    r.seed = derive_seed(seed, i);
    MethodTimer timer;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.residual = checks[i].run(r.seed, timer);
      r.pass = judge(r.residual, checks[i].tolerance, checks[i].expect);
    } catch (const std::exception& e) {
      r.residual = std::numeric_limits<double>::quiet_NaN();
      r.pass = false;
      r.error = e.what();
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    r.method_ms = timer.ms();
  };
  threads = std::max(1U, std::min<unsigned>(threads, unsigned(checks.size())));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < checks.size(); i = next++) one(i);
      });
  }
  return res;
}

inline json report_json(const std::vector<CheckResult>& res, std::uint64_t seed, unsigned threads,
                        BracketMode mode, bool timings) {
  json j;
  j["schema"] = 1;
  j["command"] = "validate";
  j["seed"] = seed;
  j["threads"] = threads;
  j["mode"] = std::string(to_string(mode));
  j["checks"] = json::array();
  int passed = 0;
  std::map<std::string, double> per_method;
  for (const auto& r : res) {
    json c;
    c["id"] = r.spec->id;
    c["lhs"] = r.spec->lhs;
    c["rhs"] = r.spec->rhs;
    c["L"] = r.spec->L;
    c["seed"] = r.seed;
    c["residual"] = std::isfinite(r.residual) ? json(r.residual) : json(nullptr);
    c["tolerance"] = r.spec->tolerance;
    c["expect"] = r.spec->expect == Expect::Below ? "below" : "above";
    c["pass"] = r.pass;
    if (!r.error.empty()) c["error"] = r.error;
    if (timings) c["wall_time_ms"] = r.wall_ms;
    j["checks"].push_back(c);
    passed += r.pass;
    for (const auto& [m, ms] : r.method_ms) per_method[m] += ms;
  }
  j["summary"] = {{"total", res.size()}, {"passed", passed}, {"failed", int(res.size()) - passed}};
  if (timings) j["method_wall_time_ms"] = per_method;
  return j;
}

inline std::string report_table(const std::vector<CheckResult>& res) {
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-44s %3s %11s %9s %6s %5s %9s\n", "check", "L", "residual", "tol", "expect", "ok",
                "ms");
  out += buf;
  int passed = 0;
  for (const auto& r : res) {
    std::snprintf(buf, sizeof buf, "%-44s %3d %11.3e %9.1e %6s %5s %9.2f\n", r.spec->id.c_str(), r.spec->L,
                  r.residual, r.spec->tolerance, r.spec->expect == Expect::Below ? "<" : ">",
                  r.pass ? "PASS" : "FAIL", r.wall_ms);
    out += buf;
    if (!r.error.empty()) out += "    error: " + r.error + "\n";
    passed += r.pass;
  }
  std::snprintf(buf, sizeof buf, "%d/%zu checks passed\n", passed, res.size());
  out += buf;
  return out;
}

}  // namespace dwpf::harness
