#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <iostream>
#include <memory>
#include <optional>

#include "cli_util.hpp"
#include "drgcn/error.hpp"
#include "drgcn/meanfield/fixed_point.hpp"
#include "drgcn/meanfield/k_measure.hpp"
#include "drgcn/meanfield/operator.hpp"
#include "drgcn/meanfield/report_io.hpp"
#include "drgcn/meanfield/theorems.hpp"
#include "drgcn/meanfield/vphi.hpp"

namespace drgcn::cli {
namespace {

struct MeanfieldArgs {
  std::size_t d = 8;
  double sigma_b2 = 1.0;
  std::vector<double> s;
  std::vector<std::string> verify{"bsb1", "theorem3"};
  std::size_t trials = 100;
  std::size_t samples = 1000000;
  std::uint64_t seed = 0;
  double eps = 1e-4;
  std::size_t steps = 5;
  double h = 1e-5;
  bool richardson = false;
  std::size_t threads = 1;
  std::string out = "out";
  std::string config;
  ConfigurableOptions opts;
};

struct Check {
  bool passed = false;
  ordered_json body;
  std::string summary;
};

mf::MeanFieldConfig make_cfg(const MeanfieldArgs& a, bool normalized) {
  auto cfg = mf::MeanFieldConfig::make(a.d, a.sigma_b2, normalized);
  if (!a.s.empty()) cfg.s = a.s;
  cfg.validate();
  return cfg;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Check check_bsb1(const MeanfieldArgs& a) {
  const auto cfg = make_cfg(a, false);
  const auto p = mf::find_bsb1_fixed_point(cfg);
  Check c;
  c.body = ordered_json::parse(mf::to_json(p));
  const auto star = mf::bsb1_matrix(a.d, p.q, p.c);
  num::RngStream rng(a.seed, 11);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto r = mf::iterate_full_map(cfg, mf::random_wishart(a.d, a.d + 2, rng));
    worst = std::max(worst, r.converged ? num::frobenius_norm(r.c - star) : INFINITY);
  }
  c.body["full_map_max_distance"] = worst;
  const bool q_ok = !cfg.identity_scaling() || std::abs(p.q - 2.0 * a.sigma_b2) <= 1e-10;
  c.passed = p.residual < 1e-8 && q_ok && worst < 1e-6;
  c.summary = "q* " + fmt(p.q) + " c* " + fmt(p.c) + " residual " + fmt(p.residual) + " full-map gap " + fmt(worst);
  return c;
}

Check check_theorem3(const MeanfieldArgs& a, mf::SpectralReport* keep = nullptr) {
  const auto cfg = make_cfg(a, true);
  const auto p = mf::find_bsb1_fixed_point(cfg);
  mf::SpectralOptions opt;
  opt.h = a.h;
  opt.richardson = a.richardson;
  const auto r = mf::theorem3_verify(cfg, p, opt);
  if (keep) *keep = r;
  Check c;
  c.body = ordered_json::parse(mf::to_json(r));
  c.passed = r.verified();
  c.summary = "lambda_G " + fmt(r.lambda_g) + " lambda_L " + fmt(r.lambda_l) + " lambda_M " + fmt(r.lambda_m) +
              " residuals " + fmt(std::max({r.residual_g, r.residual_l, r.residual_m})) +
              (r.dim_m == 0 ? " (V_M empty)" : "");
  for (const auto& f : r.failures) c.summary += "; " + f;
  return c;
}

Check check_theorem1(const MeanfieldArgs& a) {
  const auto cfg = make_cfg(a, false);
  num::RngStream rng(a.seed, 12);
  std::size_t strict = 0;
  ordered_json ratios = ordered_json::array();
  for (std::size_t t = 0; t < a.trials; ++t) {
    const auto r = mf::theorem1_search(mf::random_wishart(a.d, a.d + 2, rng), cfg);
    ratios.push_back(r.ratio);
    if (r.ratio <= 1.0 - 1e-4) ++strict;
  }
  const auto id = mf::theorem1_search(num::SymmetricMatrix::identity(a.d), cfg);
  const auto needed = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(a.trials)));
  Check c;
  c.body = {{"trials", a.trials}, {"strict_improvements", strict}, {"required", needed},
            {"identity_ratio", id.ratio}, {"ratios", ratios}};
  c.passed = strict >= needed && id.ratio == 1.0;
  c.summary = std::to_string(strict) + "/" + std::to_string(a.trials) + " strict, identity ratio " + fmt(id.ratio);
  return c;
}

Check check_theorem2(const MeanfieldArgs& a, const mf::SpectralReport& spec, std::string* csv) {
  const auto cfg = make_cfg(a, true);
  const auto p = mf::find_bsb1_fixed_point(cfg);
  num::RngStream rng(a.seed, 13);
  double worst_identity = 0.0;
  for (std::size_t t = 0; t < a.trials; ++t) {
    const auto c = mf::random_wishart(a.d, a.d + 2, rng);
    std::vector<double> s(a.d);
    double ss = 0.0;
    for (double& x : s) {
      x = 0.2 + rng.uniform();
      ss += x * x;
    }
    for (double& x : s) x *= std::sqrt(static_cast<double>(a.d) / ss);
    worst_identity = std::max(worst_identity, std::abs(mf::initial_g_ratio(c, s) - mf::k_measure(c, s)));
  }
  const auto tr = mf::theorem2_growth(cfg, p, num::SymmetricMatrix::centering(a.d), a.eps, a.steps);
  *csv = mf::growth_csv(tr);
  const double gap = std::abs(tr.growth - spec.lambda_g);
  const double allowed = 0.02 * std::abs(spec.lambda_g) + 1e-6;
  Check c;
  c.body = {{"k_identity_max_error", worst_identity},
            {"lambda_g", spec.lambda_g},
            {"growth", tr.growth},
            {"growth_gap", gap},
            {"growth_allowed", allowed},
            {"trace", ordered_json::parse(mf::to_json(tr))}};
  c.passed = worst_identity <= 1e-10 && gap <= allowed && !tr.rows.empty();
  c.summary = "K identity error " + fmt(worst_identity) + ", growth " + fmt(tr.growth) + " vs lambda_G " +
              fmt(spec.lambda_g);
  return c;
}

Check check_dos(const MeanfieldArgs& a) {
  num::RngStream rng(a.seed, 14);
  std::size_t ok = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t < a.trials; ++t) {
    mf::DosOperator op{rng.normal(), rng.normal(), rng.normal(), 2 + rng.below(a.d)};
    if (op.w == op.u) op.w += 1.0;
    const auto r = mf::dos_eigencheck(op);
    ok += r.ok;
    worst = std::max({worst, r.m_residual, r.l_residual});
  }
  const auto cfg = mf::MeanFieldConfig::make(a.d, a.sigma_b2);
  const auto fit = mf::dos_fit(mf::jacobian_fd([&](const num::SymmetricMatrix& x) { return mf::cov_map_step(cfg, x); },
                                               num::SymmetricMatrix::identity(a.d), a.h));
  Check c;
  c.body = {{"trials", a.trials}, {"passed", ok}, {"max_residual", worst},
            {"jacobian_at_identity", {{"u", fit.op.u}, {"v", fit.op.v}, {"w", fit.op.w}, {"residual", fit.residual}}}};
  c.passed = ok == a.trials && fit.residual < 1e-6;
  c.summary = std::to_string(ok) + "/" + std::to_string(a.trials) + " eigenchecks, max residual " + fmt(worst) +
              ", DOS pattern residual at I " + fmt(fit.residual);
  return c;
}

Check check_vphi(const MeanfieldArgs& a) {
  num::RngStream rng(a.seed, 15);
  double worst_z = 0.0;
  for (std::size_t t = 0; t < a.trials; ++t) {
    auto cfg = mf::MeanFieldConfig::make(a.d, a.sigma_b2);
    for (double& x : cfg.s) x = 0.3 + rng.uniform();
    const auto c = mf::random_wishart(a.d, a.d + 2, rng);
    const auto closed = mf::v_phi_closed(cfg, c);
    const auto est = mf::v_phi_mc(cfg, c, a.samples, rng.substream(t), a.threads);
    for (std::size_t i = 0; i < a.d; ++i)
      for (std::size_t j = i; j < a.d; ++j) {
        const double gap = std::abs(est.mean(i, j) - closed(i, j));
        const double se = est.stderr_(i, j);
        worst_z = std::max(worst_z, se > 0.0 ? gap / se : (gap > 1e-12 ? INFINITY : 0.0));
      }
  }
  Check c;
  c.body = {{"trials", a.trials}, {"samples", a.samples}, {"max_z", worst_z}};
  c.passed = worst_z <= 5.0;
  c.summary = "max |closed - MC| / stderr = " + fmt(worst_z);
  return c;
}

void run(MeanfieldArgs& a, int& exit_code) {
  if (!a.config.empty()) a.opts.apply_file(a.config);
  RunManifest m;
  m.command = "meanfield";
  m.config = a.opts.resolved();
  m.seeds = {a.seed};
  const std::filesystem::path out(a.out);
  m.outputs.push_back((out / "meanfield.json").string());
  const bool wants_growth = std::find(a.verify.begin(), a.verify.end(), "theorem2") != a.verify.end();
  if (wants_growth) m.outputs.push_back((out / "growth.csv").string());

  const std::string started = utc_now();
  ordered_json checks = ordered_json::object();
  ordered_json seconds = ordered_json::object();
  bool all = true;
  std::optional<mf::SpectralReport> spectrum;
  for (const auto& name : a.verify) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    if (name == "bsb1") c = check_bsb1(a);
    else if (name == "theorem3") {
      spectrum.emplace();
      c = check_theorem3(a, &*spectrum);
    } else if (name == "theorem1") c = check_theorem1(a);
    else if (name == "theorem2") {
      if (!spectrum) {
        spectrum.emplace();
        check_theorem3(a, &*spectrum);
      }
      std::string csv;
      c = check_theorem2(a, *spectrum, &csv);
      write_text(out / "growth.csv", csv);
    } else if (name == "dos") c = check_dos(a);
    else if (name == "vphi") c = check_vphi(a);
    else throw Error(ErrorCode::invalid_input, "unknown check '" + name + "' (bsb1 theorem1 theorem2 theorem3 dos vphi)");
    seconds[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.body["passed"] = c.passed;
    checks[name] = c.body;
    all = all && c.passed;
    (c.passed ? std::cout : std::cerr) << (c.passed ? "ok   " : "FAIL ") << name << ": " << c.summary << "\n";
  }
  write_text(out / "meanfield.json",
             wrap_report(m, "checks", checks,
                         ordered_json{{"started_at", started}, {"finished_at", utc_now()}, {"seconds", seconds}}));
  exit_code = all ? kExitOk : kExitVerification;
}

}  // namespace

void register_meanfield(CLI::App& app, int& exit_code) {
  auto a = std::make_shared<MeanfieldArgs>();
  CLI::App* sub = app.add_subcommand("meanfield", "Mean-field covariance dynamics checks");
  auto& o = a->opts;
  o.add(sub, "d", a->d, "Width");
  o.add(sub, "sigma-b2", a->sigma_b2, "Bias variance");
  o.add(sub, "s", a->s, "Scaling vector (default all ones)");
  o.add(sub, "verify", a->verify, "Checks to run: bsb1 theorem1 theorem2 theorem3 dos vphi");
  o.add(sub, "trials", a->trials, "Random trials for theorem1, theorem2, dos and vphi");
  o.add(sub, "samples", a->samples, "Monte Carlo samples per matrix (vphi)");
  o.add(sub, "seed", a->seed, "Seed for random matrices");
  o.add(sub, "eps", a->eps, "Perturbation size for theorem2");
  o.add(sub, "steps", a->steps, "Map iterations for theorem2");
  o.add(sub, "fd-step", a->h, "Finite-difference step");
  o.add_flag(sub, "richardson", a->richardson, "Richardson-extrapolated Jacobian");
  o.add(sub, "threads", a->threads, "Monte Carlo threads");
  sub->add_option("--out", a->out, "Output directory")->capture_default_str();
  sub->add_option("--config", a->config, "JSON file with option values; flags win");
  sub->callback([a, &exit_code] { run(*a, exit_code); });
}

}  // namespace drgcn::cli
