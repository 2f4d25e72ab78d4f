#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dwpf/numerics.hpp"

namespace dwpf {

namespace guard {
inline constexpr double kPole = 1e-12;     // |[.]| below this is a pole
inline constexpr double kGeneric = 1e-9;   // generic-position band
inline constexpr double kDrawMargin = 1e-3; // random draws stay this far from every guard
}  // namespace guard

// Index into the 2^L basis; bit j set means the arrow on vertical line j points up.
using SpinState = std::uint32_t;

struct ModelParams {
  BracketContext ctx = BracketContext::trigonometric(1.0);
  std::vector<cplx> x, y;
  std::optional<cplx> z;      // absent: every z-dependent bracket is dropped
  std::optional<cplx> kappa;
  bool allow_special = false; // bypasses the generic-position guard for specialisations

  int size() const { return int(x.size()); }
  cplx br(cplx w) const { return bracket(ctx, w); }

  // [z + offset], or 1 when z is dropped
  cplx zbr(cplx offset) const { return z ? bracket(ctx, *z + offset) : cplx(1.0); }

  cplx kappa_or_throw() const {
    if (!kappa) throw Error(ErrorKind::MissingParameter, "kappa is required");
    return *kappa;
  }
};

enum class Method {
  Enumerate,
  Contract,
  ReflContract,
  Izergin,
  SymmetrizedSum,
  AntisymSum,
  LagrangeSum,
  TfkDeterminant,
  ReflSymmetrizedSum,
  ZEll,
  CrossingSymmetrizedSum,
  SixVertexReflFormula,
  Recipe,
};

constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::Enumerate: return "dwpf_enumerate";
    case Method::Contract: return "dwpf_contract";
    case Method::ReflContract: return "refl_contract";
    case Method::Izergin: return "izergin_determinant";
    case Method::SymmetrizedSum: return "symmetrized_sum";
    case Method::AntisymSum: return "antisym_sum";
    case Method::LagrangeSum: return "lagrange_sum";
    case Method::TfkDeterminant: return "tfk_determinant";
    case Method::ReflSymmetrizedSum: return "refl_symmetrized_sum";
    case Method::ZEll: return "z_ell";
    case Method::CrossingSymmetrizedSum: return "crossing_symmetrized_sum";
    case Method::SixVertexReflFormula: return "six_vertex_refl_formula";
    case Method::Recipe: return "recipe_build";
  }
  return "?";
}

inline std::optional<Method> method_from_string(std::string_view s) {
  for (int i = 0; i <= int(Method::Recipe); ++i)
    if (to_string(Method(i)) == s) return Method(i);
  return std::nullopt;
}

struct PartitionValue {
  cplx value{0.0};
  Method method = Method::Izergin;
  double scale = 1.0;  // max summand magnitude; denominator for relative comparisons
  std::uint64_t terms = 0;  // summands evaluated by sum formulas (outer sum for nested ones); 0 otherwise
};

namespace detail {
inline double positive_scale(double s, cplx v) {
  s = std::max(s, std::abs(v));
  return s > 0.0 ? s : 1e-300;
}
}  // namespace detail

inline double relative_residual(const PartitionValue& a, const PartitionValue& b) {
  return std::abs(a.value - b.value) / std::max(a.scale, b.scale);
}

inline double relative_residual(cplx a, cplx b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

// Throws when |[w]| < threshold; `what` names the guard in the message.
inline void require_bracket(const ModelParams& p, cplx w, double threshold, ErrorKind kind,
                            const std::string& what) {
  if (std::abs(p.br(w)) < threshold) throw Error(kind, "guard " + what + " violated");
}

inline void require_zbracket(const ModelParams& p, cplx offset, ErrorKind kind, const std::string& what) {
  if (p.z && std::abs(p.br(*p.z + offset)) < guard::kPole) throw Error(kind, "guard " + what + " violated");
}

inline void require_sizes(const ModelParams& p) {
  if (p.x.empty() || p.x.size() != p.y.size())
    throw Error(ErrorKind::InvalidContext, "need |x| = |y| = L >= 1");
}

// Generic-position guards. Skipped when p.allow_special is set.
inline void require_distinct_x(const ModelParams& p) {
  if (p.allow_special) return;
  const int L = p.size();
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j)
      require_bracket(p, p.x[i] - p.x[j], guard::kGeneric, ErrorKind::GenericPositionViolation,
                      "[x" + std::to_string(i + 1) + "-x" + std::to_string(j + 1) + "]");
}

inline void require_distinct_y(const ModelParams& p) {
  if (p.allow_special) return;
  const int L = p.size();
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j)
      require_bracket(p, p.y[i] - p.y[j], guard::kGeneric, ErrorKind::GenericPositionViolation,
                      "[y" + std::to_string(i + 1) + "-y" + std::to_string(j + 1) + "]");
}

inline void require_reflecting_generic(const ModelParams& p) {
  if (p.allow_special) return;
  const int L = p.size();
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j) {
      require_bracket(p, p.x[i] + p.x[j] + 1.0, guard::kGeneric, ErrorKind::GenericPositionViolation,
                      "[x" + std::to_string(i + 1) + "+x" + std::to_string(j + 1) + "+1]");
      require_bracket(p, p.y[i] + p.y[j], guard::kGeneric, ErrorKind::GenericPositionViolation,
                      "[y" + std::to_string(i + 1) + "+y" + std::to_string(j + 1) + "]");
    }
}

// Six-vertex modes only (trig / rational).
inline void require_six_vertex_mode(const ModelParams& p, std::string_view op) {
  if (p.ctx.mode() == BracketMode::Elliptic)
    throw Error(ErrorKind::InvalidContext, std::string(op) + " needs trig or rational mode");
}

// ---- deterministic random draws ----

// mt19937_64 with a hand-rolled uniform map so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) {
    const double u = double(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  cplx spectral() { return {uniform(-1.5, 1.5), uniform(-0.2, 0.2)}; }
  std::uint64_t next() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Seed for sub-stream `k` of `seed` (splitmix64 finaliser).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class Family { SixVertex, Reflecting };

struct DrawOptions {
  Family family = Family::SixVertex;
  bool with_z = true;  // reflecting family: draw z (false = z dropped)
  double margin = guard::kDrawMargin;
  int max_retries = 1000;
};

// Every bracket argument that appears in a denominator (or as a specialisation hazard)
// for the given family at size L.
inline std::vector<cplx> guarded_arguments(const ModelParams& p, Family fam) {
  std::vector<cplx> a;
  const int L = p.size();
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      a.push_back(p.x[i] - p.y[j]);
      a.push_back(p.x[i] - p.y[j] + 1.0);
      if (i < j) {
        a.push_back(p.x[i] - p.x[j]);
        a.push_back(p.y[i] - p.y[j]);
      }
    }
  if (fam == Family::Reflecting) {
    const cplx k = p.kappa.value_or(0.0);
    for (int i = 0; i < L; ++i) {
      a.push_back(2.0 * p.x[i]);
      a.push_back(2.0 * p.x[i] + 1.0);
      a.push_back(k + p.y[i]);
      a.push_back(k - p.y[i]);
      a.push_back(k + p.x[i]);
      a.push_back(k - p.x[i]);
      for (int j = 0; j < L; ++j) {
        a.push_back(p.x[i] + p.y[j]);
        a.push_back(p.x[i] + p.y[j] + 1.0);
        if (i < j) {
          a.push_back(p.x[i] + p.x[j] + 1.0);
          a.push_back(p.x[i] + p.x[j]);
          a.push_back(p.y[i] + p.y[j]);
        }
      }
      if (p.z) {
        const cplx z = *p.z;
        a.push_back(z + k + p.x[i]);
        a.push_back(z + k - p.x[i]);
        a.push_back(z + k + p.y[i]);
        a.push_back(z + k - p.y[i]);
      }
    }
    if (p.z)
      for (int n = -2 * L - 2; n <= 2 * L + 2; ++n) a.push_back(*p.z + double(n));
  }
  return a;
}

inline bool well_separated(const ModelParams& p, Family fam, double margin) {
  for (cplx w : guarded_arguments(p, fam))
    if (std::abs(p.br(w)) < margin) return false;
  return true;
}

// Random x, y (and kappa, z for the reflecting family), resampled until well separated.
inline ModelParams random_params(Rng& rng, const BracketContext& ctx, int L, const DrawOptions& opt = {}) {
  if (L < 1) throw Error(ErrorKind::InvalidContext, "L must be >= 1");
  for (int attempt = 0; attempt < opt.max_retries; ++attempt) {
    ModelParams p;
    p.ctx = ctx;
    for (int i = 0; i < L; ++i) p.x.push_back(rng.spectral());
    for (int i = 0; i < L; ++i) p.y.push_back(rng.spectral());
    if (opt.family == Family::Reflecting) {
      p.kappa = rng.spectral();
      if (opt.with_z) p.z = rng.spectral();
    }
    if (well_separated(p, opt.family, opt.margin)) return p;
  }
  throw Error(ErrorKind::GenericPositionViolation, "no generic draw within retry budget");
}

// A single extra spectral parameter x0 that keeps p well separated when appended.
inline cplx random_extra_x(Rng& rng, const ModelParams& p, Family fam, double margin = guard::kDrawMargin,
                           int max_retries = 1000) {
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    const cplx x0 = rng.spectral();
    bool ok = true;
    const int L = p.size();
    for (int i = 0; i < L && ok; ++i) {
      for (cplx w : {x0 - p.x[i], x0 - p.x[i] + 1.0, p.x[i] - x0 + 1.0, x0 + p.x[i] + 1.0, x0 + p.x[i],
                     x0 + p.x[i] + 2.0})
        if (std::abs(p.br(w)) < margin) ok = false;
      for (cplx w : {x0 - p.y[i], x0 - p.y[i] + 1.0, x0 + p.y[i], x0 + p.y[i] + 1.0})
        if (std::abs(p.br(w)) < margin) ok = false;
    }
    if (fam == Family::Reflecting) {
      const cplx k = p.kappa.value_or(0.0);
      for (cplx w : {2.0 * x0, 2.0 * x0 + 1.0, k + x0, k - x0})
        if (std::abs(p.br(w)) < margin) ok = false;
      if (p.z)
        for (cplx w : {*p.z + k + x0, *p.z + k - x0})
          if (std::abs(p.br(w)) < margin) ok = false;
      for (int i = 0; i < L && ok; ++i)
        for (int s : {-1, 1})
          if (p.z && std::abs(p.br(*p.z + double(s) * double(L) + x0 - p.x[i])) < margin) ok = false;
    }
    if (ok) return x0;
  }
  throw Error(ErrorKind::GenericPositionViolation, "no generic x0 within retry budget");
}

}  // namespace dwpf
