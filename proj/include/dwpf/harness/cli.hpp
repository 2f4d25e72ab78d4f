#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dwpf/harness/bench.hpp"
#include "dwpf/harness/config.hpp"
#include "dwpf/harness/validate.hpp"

namespace dwpf::harness {

enum ExitCode : int { kOk = 0, kChecksFailed = 1, kConfigError = 2, kNumericGuard = 3 };

inline constexpr std::uint64_t kDefaultSeed = 1;

struct CliOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> tol;
  std::optional<std::string> mode;
  bool json_out = false;
  bool table_out = false;
  bool timings = false;
  bool inject_perturbation = false;
};

inline JobConfig load_config(const CliOptions& o) {
  JobConfig c;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw ConfigError("cannot open config file '" + o.config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    c = parse_config(ss.str());
  }
  if (o.mode) c.mode = mode_from_string(*o.mode);
  if (o.tol) c.tolerance = *o.tol;
  return c;
}

// A config file that draws anything at random must say which seed; bare CLI runs fall back to kDefaultSeed.
inline std::uint64_t resolve_seed(const CliOptions& o, const JobConfig& c, bool draws_random) {
  if (o.seed) return *o.seed;
  if (c.seed) return *c.seed;
  if (draws_random && !o.config_path.empty())
    throw ConfigError("config uses random parameters but no seed is given (set \"seed\" or --seed)");
  return kDefaultSeed;
}

inline unsigned resolve_threads(const CliOptions& o, const JobConfig& c) {
  if (o.threads) return std::max(1U, *o.threads);
  if (c.threads) return std::max(1U, *c.threads);
  if (const char* env = std::getenv("DWPF_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) throw ConfigError("DWPF_THREADS must be a positive integer");
    return unsigned(v);
  }
  return Parallelism{}.resolved_threads();
}

inline int cmd_compute(const CliOptions& o, std::ostream& out, std::ostream& err) {
  const JobConfig c = load_config(o);
  std::vector<Method> methods;
  for (const auto& f : c.formulas) methods.push_back(*method_from_string(f));
  if (methods.empty())
    methods = c.mode == BracketMode::Elliptic
                  ? std::vector<Method>{Method::TfkDeterminant, Method::ReflSymmetrizedSum}
                  : std::vector<Method>{Method::Izergin, Method::SymmetrizedSum};
  bool reflecting = false;
  for (Method m : methods) reflecting = reflecting || is_reflecting(m);

  using LK = Spec<std::vector<cplx>>::Kind;
  const bool draws = c.x.kind != LK::Given || c.y.kind != LK::Given || c.z.kind == Spec<cplx>::Kind::Random ||
                     c.kappa.kind == Spec<cplx>::Kind::Random ||
                     (reflecting && c.kappa.kind == Spec<cplx>::Kind::Absent);
  const std::uint64_t seed = resolve_seed(o, c, draws);
  const unsigned threads = resolve_threads(o, c);
  const ModelParams p = build_params(c, reflecting, seed);

  json j;
  j["schema"] = 1;
  j["command"] = "compute";
  j["mode"] = std::string(to_string(c.mode));
  j["L"] = p.size();
  j["seed"] = seed;
  j["params"] = params_to_json(p);
  j["results"] = json::array();
  const Parallelism par{threads};
  for (Method m : methods) {
    const auto t0 = std::chrono::steady_clock::now();
    const PartitionValue v = evaluate(m, p, par);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    j["results"].push_back(
        {{"method", std::string(to_string(m))}, {"value", to_json(v.value)}, {"scale", v.scale}, {"wall_time_ms", ms}});
  }
  if (o.table_out) {
    char buf[256];
    for (const auto& r : j["results"]) {
      std::snprintf(buf, sizeof buf, "%-26s %+.15e %+.15ei  (%.3f ms)\n", r["method"].get<std::string>().c_str(),
                    r["value"][0].get<double>(), r["value"][1].get<double>(), r["wall_time_ms"].get<double>());
      out << buf;
    }
  } else {
    out << j.dump(2) << "\n";
  }
  (void)err;
  return kOk;
}

inline int cmd_validate(const CliOptions& o, std::ostream& out, std::ostream& err) {
  const JobConfig c = load_config(o);
  ValidateOptions vo;
  vo.six_vertex_mode = c.mode;
  vo.gamma = c.gamma;
  vo.tau = c.tau;
  vo.tolerance = c.tolerance;
  vo.controls_only = o.inject_perturbation;
  const std::uint64_t seed = resolve_seed(o, c, false);
  const unsigned threads = resolve_threads(o, c);
  const auto checks = build_check_matrix(vo);
  err << "validate: " << checks.size() << " checks, seed " << seed << ", " << threads << " threads\n";
  const auto res = run_checks(checks, seed, threads);
  if (o.table_out)
    out << report_table(res);
  else
    out << report_json(res, seed, threads, c.mode, o.timings).dump(2) << "\n";
  if (!o.json_out && !o.table_out) err << report_table(res);
  for (const auto& r : res)
    if (!r.pass) return kChecksFailed;
  return kOk;
}

inline int cmd_bench(const CliOptions& o, std::ostream& out, std::ostream& err) {
  JobConfig c = load_config(o);
  const std::uint64_t seed = resolve_seed(o, c, false);
  const unsigned threads = resolve_threads(o, c);
  for (const auto& m : c.bench.methods)
    if (!method_from_string(m)) throw ConfigError("unknown bench method '" + m + "'");
  if (c.bench.family != "six_vertex" && c.bench.family != "reflecting")
    throw ConfigError("bench.family must be six_vertex or reflecting");
  if (c.bench.L_min < 1 || c.bench.L_max < c.bench.L_min) throw ConfigError("bad bench L range");
  if (c.bench.family == "reflecting" && c.mode != BracketMode::Elliptic && c.z.kind == Spec<cplx>::Kind::Absent)
    err << "bench: reflecting family without z (trigonometric limit)\n";
  const BenchResult b = run_bench(c, seed, Parallelism{threads});
  if (o.table_out)
    out << bench_table(b);
  else
    out << bench_json(b, seed, threads).dump(2) << "\n";
  return b.ordering_ok ? kOk : kChecksFailed;
}

inline void add_common(CLI::App* sub, CliOptions& o) {
  sub->add_option("--config", o.config_path, "JSON job config");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--threads", o.threads, "worker threads (fallback: DWPF_THREADS, then hardware)");
  sub->add_option("--tol", o.tol, "tolerance override");
  sub->add_option("--mode", o.mode, "bracket mode")->check(CLI::IsMember({"trig", "elliptic", "rational"}));
  auto* j = sub->add_flag("--json", o.json_out, "JSON report on stdout (default)");
  auto* t = sub->add_flag("--table", o.table_out, "human-readable table on stdout");
  j->excludes(t);
  sub->add_flag("--timings", o.timings, "include wall times in the validate report");
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Domain-wall partition functions: compute, cross-validate, benchmark", "dwpf"};
  app.require_subcommand(1);
  CliOptions o;
  auto* compute = app.add_subcommand("compute", "evaluate formulas for one parameter set");
  auto* validate = app.add_subcommand("validate", "run the cross-validation matrix");
  auto* bench = app.add_subcommand("bench", "time every method over a range of L");
  for (auto* s : {compute, validate, bench}) add_common(s, o);
  validate->add_flag("--inject-perturbation", o.inject_perturbation, "run only the perturbed negative controls");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    if (*compute) return cmd_compute(o, out, err);
    if (*validate) return cmd_validate(o, out, err);
    return cmd_bench(o, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << (e.is_numeric_guard() ? "numeric guard violated: " : "invalid request: ") << e.what() << "\n";
    return e.is_numeric_guard() ? kNumericGuard : kConfigError;
  }
}

}  // namespace dwpf::harness
