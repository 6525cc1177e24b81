// Acceptance suite: one pass/fail line per criterion. Exit 0 iff all pass.
//
// Usage: sep_acceptance [--cli /path/to/sep]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "oracles.hpp"
#include "sep/clutter.hpp"
#include "sep/diagnostics.hpp"
#include "sep/epadmm.hpp"
#include "sep/epmc.hpp"
#include "sep/epmcmc.hpp"
#include "sep/experiments.hpp"
#include "sep/io.hpp"
#include "sep/mcmc_baseline.hpp"
#include "sep/rng.hpp"

namespace fs = std::filesystem;
using namespace sep;

namespace {

struct Harness {
  int failures = 0;
  int index = 0;

  void report(const std::string& title, bool pass, const std::string& detail) {
    ++index;
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", index, title.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

double now_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// --- criterion 1: PSRF formula fixture ------------------------------------

void criterion_psrf_fixture(Harness& h) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t m = 10, n = 1000;
  const double w_target = 98.53, b_over_n_target = 68.32;

  // Chains alternating mu_j +/- d have per-chain variance exactly d^2 n/(n-1)
  // and chain means exactly mu_j; mu_j standardized * sqrt(B/n) pins the
  // between-chain variance.
  std::vector<double> mu(m);
  double mean_mu = 0.0;
  for (std::size_t j = 0; j < m; ++j) mean_mu += static_cast<double>(j);
  mean_mu /= static_cast<double>(m);
  double ss = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    ss += (static_cast<double>(j) - mean_mu) * (static_cast<double>(j) - mean_mu);
  const double z = std::sqrt(ss / static_cast<double>(m - 1));
  for (std::size_t j = 0; j < m; ++j)
    mu[j] = (static_cast<double>(j) - mean_mu) / z * std::sqrt(b_over_n_target);

  const double d = std::sqrt(w_target * static_cast<double>(n - 1) / static_cast<double>(n));
  ChainSet c;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> chain(n);
    for (std::size_t t = 0; t < n; ++t) chain[t] = mu[j] + (t % 2 == 0 ? d : -d);
    c.chains.push_back(std::move(chain));
  }

  const double w = within_chain_var(c);
  const double b_over_n = between_chain_var(c);
  const auto pooled = pooled_estimates(b_over_n, w, m, n);
  const double dt = now_seconds(t0);
  const bool pass = std::abs(pooled.sigma2_plus - 166.75) <= 0.01 &&
                    std::abs(pooled.v_hat - 173.58) <= 0.01 && dt < 1.0;
  h.report("PSRF formula fixture (tabulated W, B/n)", pass,
           "sigma2_plus=" + fmt(pooled.sigma2_plus) + " V_hat=" + fmt(pooled.v_hat) +
               " runtime=" + fmt(dt) + "s");
}

// --- criterion 2: PSRF identity for identical chains -----------------------

void criterion_psrf_identity(Harness& h) {
  auto rng = make_stream(2024, 2);
  std::uniform_int_distribution<std::size_t> um(2, 12), un(2, 700);
  std::normal_distribution<double> g(0.0, 3.0);
  bool pass = true;
  double worst = 0.0;
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t m = um(rng), n = un(rng);
    std::vector<double> base(n);
    for (auto& v : base) v = g(rng);
    ChainSet c;
    for (std::size_t j = 0; j < m; ++j) c.chains.push_back(base);
    const double want = (static_cast<double>(n) - 1.0) / static_cast<double>(n);
    const double got = psrf(c).psrf_paper;
    worst = std::max(worst, std::abs(got - want));
    if (!(std::abs(got - want) <= 1e-12)) pass = false;
  }
  h.report("PSRF identity (identical chains -> (n-1)/n)", pass,
           "worst deviation=" + fmt(worst));
}

// --- criteria 3/4: clutter oracle and Gaussian reduction -------------------

std::vector<double> clutter_data(std::size_t n, double w, double theta, std::uint64_t seed) {
  ClutterModel cm;
  cm.w = w;
  auto rng = make_stream(seed, 0x636c);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> data(n);
  for (auto& y : data)
    y = u(rng) < w ? std::sqrt(cm.clutter_var) * n01(rng) : theta + n01(rng);
  return data;
}

void criterion_clutter_oracle(Harness& h) {
  const auto t0 = std::chrono::steady_clock::now();
  ClutterModel cm;
  cm.w = 0.5;
  const auto data = clutter_data(10, cm.w, 2.0, 7);
  const auto exact = exact_posterior(data, cm, default_theta_grid(data, cm, 101));

  const auto ep = ep_clutter(data, cm);
  ClutterMcConfig mc;
  mc.samples = 10000;
  mc.seed = 11;
  const auto epmc = epmc_clutter(data, cm, mc);
  const auto admm = epadmm_clutter(data, cm, ClutterAdmmConfig{});

  const double ep_gap = std::abs(ep.mean - exact.mean);
  const double mc_gap = std::abs(epmc.mean - exact.mean);
  const double admm_gap =
      std::max(std::abs(admm.mean - ep.mean), std::abs(admm.var - ep.var));
  const double dt = now_seconds(t0);
  const bool pass = ep.ok && epmc.ok && admm.ok && ep_gap <= 0.15 && mc_gap <= 0.20 &&
                    admm_gap <= 1e-10 && dt < 10.0;
  h.report("clutter oracle (EP/EP-MC vs exact enumeration, EP-ADMM == EP)", pass,
           "|ep-exact|=" + fmt(ep_gap) + " |epmc-exact|=" + fmt(mc_gap) +
               " |admm-ep|=" + fmt(admm_gap) + " runtime=" + fmt(dt) + "s");
}

void criterion_gaussian_reduction(Harness& h) {
  ClutterModel cm;
  cm.w = 0.0;
  const auto data = clutter_data(10, cm.w, 2.0, 3);

  double prec = 1.0 / cm.prior_var, pm = 0.0;
  for (double y : data) {
    prec += 1.0;
    pm += y;
  }
  const double conj_mean = pm / prec, conj_var = 1.0 / prec;

  const auto ep = ep_clutter(data, cm);
  const auto admm = epadmm_clutter(data, cm, ClutterAdmmConfig{});
  const double ep_gap =
      std::max(std::abs(ep.mean - conj_mean), std::abs(ep.var - conj_var));
  const double admm_gap =
      std::max(std::abs(admm.mean - conj_mean), std::abs(admm.var - conj_var));

  // EP-MC is Monte Carlo: 1e-8 equality is not achievable at finite K, so it
  // is held to a 3-standard-error band instead (see the decisions ledger).
  ClutterMcConfig mc;
  mc.samples = 200000;
  mc.seed = 5;
  const auto mc1 = epmc_clutter(data, cm, mc);
  mc.seed = 6;
  const auto mc2 = epmc_clutter(data, cm, mc);
  const double se_est = std::max(std::abs(mc1.mean - mc2.mean) / std::sqrt(2.0), 1e-4);
  const double mc_gap = std::abs(mc1.mean - conj_mean);

  const bool pass = ep_gap <= 1e-8 && admm_gap <= 1e-8 && mc_gap <= 3.0 * se_est;
  h.report("fully Gaussian reduction (w=0 matches conjugate posterior)", pass,
           "ep_gap=" + fmt(ep_gap) + " admm_gap=" + fmt(admm_gap) + " mc_gap=" +
               fmt(mc_gap) + " (3se=" + fmt(3.0 * se_est) + ")");
}

// --- criterion 5: closed-form Z_x vs quadrature -----------------------------

void criterion_zx(Harness& h) {
  auto rng = make_stream(55, 1);
  std::normal_distribution<double> ny(0.0, 2.0);
  std::uniform_real_distribution<double> ug(-2.0, 2.0);
  std::uniform_real_distribution<double> uv(0.05, 3.0);
  double worst_rel = 0.0, worst_grad = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const double y = ny(rng), g = ug(rng), m = ny(rng), v = uv(rng), lam = uv(rng);
    const auto zx = closed_form_zx(y, g, m, v, lam);
    auto f = [&](double x) { return normal_pdf(y, g * x, lam) * normal_pdf(x, m, v); };
    const double lo = m - 14.0 * std::sqrt(v), hi = m + 14.0 * std::sqrt(v);
    const double quad = oracle::integrate(f, lo, hi, 1e-14, 128);
    worst_rel = std::max(worst_rel, std::abs(zx.z - quad) / quad);

    const double analytic = zx_dlogz_dmean(y, g, m, v, lam);
    const double fd = oracle::central_difference(
        [&](double mc2) { return std::log(closed_form_zx(y, g, mc2, v, lam).z); }, m, 1e-6);
    worst_grad = std::max(worst_grad, std::abs(fd - analytic));
  }
  const bool pass = worst_rel < 1e-6 && worst_grad < 1e-6;
  h.report("closed-form Z_x vs quadrature and mean-shift gradient", pass,
           "worst_rel=" + fmt(worst_rel) + " worst_grad_gap=" + fmt(worst_grad));
}

// --- criterion 6: tilted moment matching ------------------------------------

void criterion_tilted_moments(Harness& h) {
  ClutterModel cm;
  cm.w = 0.5;
  auto rng = make_stream(66, 1);
  std::normal_distribution<double> n(0.0, 2.5);
  std::uniform_real_distribution<double> uv(0.2, 6.0);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const double y = n(rng);
    const GaussianMoments cavity{n(rng), uv(rng)};
    const auto got = clutter_tilted_moments(y, cavity, cm);
    if (!got) {
      worst = 1.0;
      break;
    }
    auto tilted = [&](double th) {
      return std::exp(clutter_loglik(y, th, cm) +
                      log_normal_pdf(th, cavity.mean, cavity.var));
    };
    const double lo = cavity.mean - 13.0 * std::sqrt(cavity.var);
    const double hi = cavity.mean + 13.0 * std::sqrt(cavity.var);
    const double z = oracle::integrate(tilted, lo, hi, 1e-14, 128);
    const double mean =
        oracle::integrate([&](double t) { return t * tilted(t); }, lo, hi, 1e-14, 128) / z;
    const double second =
        oracle::integrate([&](double t) { return t * t * tilted(t); }, lo, hi, 1e-14, 128) /
        z;
    worst = std::max(worst, std::abs(got->mean - mean));
    worst = std::max(worst, std::abs(got->var - (second - mean * mean)));
  }
  h.report("tilted moment matching vs quadrature (50 random sites)", worst <= 1e-8,
           "worst gap=" + fmt(worst));
}

// --- criterion 7: SNIS gradient vs CRN finite difference --------------------

void criterion_snis_gradient(Harness& h) {
  McConfig cfg;
  cfg.samples = 100000;
  cfg.seed = 21;
  const double lx = 0.5, rate = 8.0;

  auto rng = make_stream(cfg.seed, 0x7a75);
  std::exponential_distribution<double> cavity(rate);
  std::vector<double> w(cfg.samples), tau(cfg.samples);
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    tau[k] = cavity(rng);
    w[k] = normal_pdf(lx, 0.0, tau[k]);
  }
  const double analytic = 1.0 / rate - snis_gradient(w, tau);
  const double hstep = 1e-5 * rate;
  const double fd = (std::log(mc_normalizer_tau_at(lx, rate + hstep, rate, cfg)) -
                     std::log(mc_normalizer_tau_at(lx, rate - hstep, rate, cfg))) /
                    (2.0 * hstep);
  const double rel = std::abs(fd - analytic) / std::abs(analytic);
  h.report("SNIS rate gradient vs CRN finite difference of log Z", rel < 1e-3,
           "rel_err=" + fmt(rel));
}

// --- criteria 8/9: synthetic recovery and positivity ------------------------

void criterion_recovery_and_positivity(Harness& h) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto setup = make_recovery_setup(64, 64, 9);

  // EP-MC with full instrumentation for the positivity criterion.
  McConfig mc;
  mc.samples = 4096;
  mc.learning_rate = 0.35;
  mc.seed = 17;
  EpConfig ep;
  ep.max_sweeps = 220;
  EpMcOptions mc_opt;
  mc_opt.x_samples = 256;
  const EpMcReport mc_fit = epmc_fit(setup.observation, setup.model, mc, ep, mc_opt);
  const std::size_t tail = mc_fit.tau_trace.size() / 4;
  double tau_mc = 0.0, lambda_mc = 0.0;
  for (std::size_t i = mc_fit.tau_trace.size() - tail; i < mc_fit.tau_trace.size(); ++i) {
    tau_mc += mc_fit.tau_trace[i];
    lambda_mc += mc_fit.lambda_trace[i];
  }
  tau_mc /= static_cast<double>(tail);
  lambda_mc /= static_cast<double>(tail);
  const double mc_precision = reported_precision(tau_mc);
  const double mc_sd = reported_sd(lambda_mc);

  const auto mcmc_est = recover_with_epmcmc(setup, 21, 1000, 10);

  BaselineConfig base_cfg;
  base_cfg.iters = 1000;
  base_cfg.burn_in = 500;
  base_cfg.thin = 10;
  base_cfg.seed = 31;
  const BaselineReport base = run_full_mcmc(setup.observation, setup.model, base_cfg);

  const double dt = now_seconds(t0);
  const bool recovery_pass =
      mc_precision >= 80.0 && mc_precision <= 120.0 && mc_sd >= 0.08 && mc_sd <= 0.12 &&
      mcmc_est.precision >= 80.0 && mcmc_est.precision <= 120.0 && mcmc_est.sd >= 0.08 &&
      mcmc_est.sd <= 0.12 && base.kept == 50 && dt < 300.0;
  h.report("synthetic recovery at 64x64 (precision 100, sd 0.1, +-20%)", recovery_pass,
           "ep-mc prec=" + fmt(mc_precision) + " sd=" + fmt(mc_sd) + "; ep-mcmc prec=" +
               fmt(mcmc_est.precision) + " sd=" + fmt(mcmc_est.sd) + "; mcmc kept=" +
               std::to_string(base.kept) + "; runtime=" + fmt(dt) + "s");

  // Positivity invariants over the full reconstructions above plus the
  // EP-ADMM improvement runs.
  bool positivity = true;
  double min_var = 1e300;
  for (double v : mc_fit.var.values()) min_var = std::min(min_var, v);
  positivity = positivity && min_var >= mc_opt.bound_b;
  positivity = positivity && mc_fit.alpha_tau > 0.0 && mc_fit.alpha_lambda > 0.0;
  for (double v : mc_fit.tau_trace) positivity = positivity && v > 0.0;
  for (double v : mc_fit.lambda_trace) positivity = positivity && v > 0.0;

  double min_var_admm = 1e300;
  for (const auto kind : {PhantomKind::Cylinder, PhantomKind::FourCircles}) {
    const auto res = improvement_experiment(kind, 64, 64, 0.25, 13);
    min_var_admm = std::min(min_var_admm, res.min_variance);
  }
  positivity = positivity && min_var_admm >= 1e-6;
  h.report("positivity invariants (belief variance >= b, rates > 0)", positivity,
           "min ep-mc var=" + fmt(min_var) + " min ep-admm var=" + fmt(min_var_admm) +
               " clamps=" + std::to_string(mc_fit.clamps));
}

// --- criterion 10: reconstruction improvement --------------------------------

void criterion_improvement(Harness& h) {
  bool pass = true;
  std::string detail;
  for (const auto kind : {PhantomKind::Cylinder, PhantomKind::FourCircles}) {
    const auto res = improvement_experiment(kind, 64, 64, 0.25, 13);
    pass = pass && res.reconstruction_error < res.observation_error;
    detail += (kind == PhantomKind::Cylinder ? std::string("cylinder ")
                                             : std::string("four-circles ")) +
              fmt(res.reconstruction_error) + "<" + fmt(res.observation_error) + " ";
  }
  h.report("EP-ADMM reconstruction beats the noisy observation", pass, detail);
}

// --- criterion 11: MH calibration --------------------------------------------

void criterion_mh_calibration(Harness& h) {
  auto rng = make_stream(1234, 8);
  auto target = [](double x) { return -0.5 * x * x; };
  double step = 25.0;
  double x = 0.0;
  AcceptanceWindow window, last;
  for (int t = 1; t <= 5000; ++t) {
    const auto r = mh_step(x, target, step, rng);
    x = r.next;
    window.record(r.accepted);
    if (window.proposals == 100) {
      step = tune_step(window, step);
      last = window;
      window.reset();
    }
  }
  const double acc = last.rate();

  // Moments of a longer run at the tuned step, with ESS-adjusted bands.
  std::vector<double> long_chain;
  long_chain.reserve(60000);
  for (int t = 0; t < 60000; ++t) {
    x = mh_step(x, target, step, rng).next;
    long_chain.push_back(x);
  }
  double rho_sum = 0.0;
  for (std::size_t lag = 1; lag < 300; ++lag) {
    const double rho = autocorrelation(long_chain, lag);
    if (rho < 0.01) break;
    rho_sum += rho;
  }
  const double ess = static_cast<double>(long_chain.size()) / (1.0 + 2.0 * rho_sum);
  double mean = 0.0, second = 0.0;
  for (double v : long_chain) {
    mean += v;
    second += v * v;
  }
  mean /= static_cast<double>(long_chain.size());
  const double var = second / static_cast<double>(long_chain.size()) - mean * mean;

  const bool pass = acc >= 0.184 && acc <= 0.284 &&
                    std::abs(mean) <= 3.0 * std::sqrt(1.0 / ess) &&
                    std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0 / ess);
  h.report("MH step tuning reaches [0.184, 0.284]; moments within 3 SE", pass,
           "acceptance=" + fmt(acc) + " mean=" + fmt(mean) + " var=" + fmt(var) +
               " ess=" + fmt(ess));
}

// --- criterion 12: CLI determinism --------------------------------------------

int run_cli(const std::string& cli, const std::string& args, const fs::path& log) {
  const std::string cmd = cli + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return status < 0 ? status : WEXITSTATUS(status);
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

void criterion_cli_determinism(Harness& h, const std::string& cli) {
  if (cli.empty()) {
    h.report("CLI determinism (bitwise-identical CSVs)", false, "no --cli path given");
    return;
  }
  const fs::path root = fs::temp_directory_path() / "sep_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path log = root / "log.txt";

  const std::string phantom_dir = (root / "phantom").string();
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen-phantom",
       "gen-phantom --kind cylinder --rows 32 --cols 32 --noise-sd 0.1 --seed 7"},
      {"reconstruct-ep-admm",
       "reconstruct --method ep-admm --input " + phantom_dir +
           "/noisy.csv --l laplacian --tau 0.25 --lambda 0.01 --seed 4"},
      {"reconstruct-ep-mc",
       "reconstruct --method ep-mc --input " + phantom_dir +
           "/noisy.csv --mc.samples 1024 --mc.sweeps 25 --seed 3"},
      {"reconstruct-ep-mcmc",
       "reconstruct --method ep-mcmc --input " + phantom_dir +
           "/noisy.csv --mh.iters 60 --mh.replications 2 --seed 5"},
      {"reconstruct-mcmc",
       "reconstruct --method mcmc --input " + phantom_dir +
           "/noisy.csv --baseline.iters 60 --baseline.burn-in 20 --baseline.thin 4 "
           "--seed 2"},
      {"clutter", "clutter --n 10 --w 0.5 --methods ep,ep-mc,ep-admm,exact --seed 1"},
      {"compare",
       "compare --rows 24 --cols 24 --seed 7 --mh.iters 80 --mh.replications 2 "
       "--mc.sweeps 40 --mc.samples 512 --mc.x-samples 128 --baseline.iters 60 "
       "--baseline.burn-in 20 --baseline.thin 4"},
  };

  // The phantom must exist before the reconstruct runs read it.
  if (run_cli(cli,
              "gen-phantom --kind cylinder --rows 32 --cols 32 --noise-sd 0.1 --seed 7 "
              "--out-dir " + phantom_dir,
              log) != 0) {
    h.report("CLI determinism (bitwise-identical CSVs)", false,
             "phantom generation failed");
    return;
  }

  bool pass = true;
  std::string detail;
  std::size_t compared = 0;
  for (const auto& [name, args] : commands) {
    const fs::path out_a = root / (name + "_a");
    const fs::path out_b = root / (name + "_b");
    if (run_cli(cli, args + " --out-dir " + out_a.string(), log) != 0 ||
        run_cli(cli, args + " --out-dir " + out_b.string(), log) != 0) {
      pass = false;
      detail += name + ":run-failed ";
      continue;
    }
    for (const auto& entry : fs::directory_iterator(out_a)) {
      if (entry.path().extension() != ".csv") continue;
      // Wall-clock timings are inherently non-reproducible and live in their
      // own file; every other CSV must be bitwise identical.
      if (entry.path().filename() == "timings.csv") continue;
      const fs::path twin = out_b / entry.path().filename();
      ++compared;
      if (!same_bytes(entry.path(), twin)) {
        pass = false;
        detail += name + "/" + entry.path().filename().string() + ":differs ";
      }
    }
  }
  if (pass) detail = std::to_string(compared) + " CSV files bitwise identical";
  h.report("CLI determinism (bitwise-identical CSVs)", pass, detail);
  fs::remove_all(root);
}

// --- supplementary: exit codes and speed ordering ---------------------------

void supplementary_cli_contract(Harness& h, const std::string& cli) {
  if (cli.empty()) {
    h.report("supplementary: CLI exit codes and engine speed ordering", false,
             "no --cli path given");
    return;
  }
  const fs::path root = fs::temp_directory_path() / "sep_acceptance_contract";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path log = root / "log.txt";

  const int usage = run_cli(cli, "gen-phantom", log);           // missing --kind
  const int numeric = run_cli(cli, "diagnose --chains " + (root / "nope.csv").string(), log);
  const int okrun = run_cli(cli,
                            "gen-phantom --kind cylinder --rows 16 --cols 16 "
                            "--noise-sd 0.1 --seed 1 --out-dir " + (root / "p").string(),
                            log);

  // Matched budgets: the EP pipeline must be faster than the sampling baseline.
  const auto setup = make_recovery_setup(48, 48, 5);
  const auto t_ep = std::chrono::steady_clock::now();
  AdmmSettings settings;
  settings.tau = setup.target_field_var;
  settings.lambda = setup.noise_sd * setup.noise_sd;
  epadmm_reconstruct(setup.observation, setup.model, settings, EpConfig{});
  const double ep_seconds = now_seconds(t_ep);
  const auto t_mcmc = std::chrono::steady_clock::now();
  BaselineConfig base;
  base.iters = 1000;
  base.burn_in = 500;
  base.thin = 10;
  base.seed = 3;
  run_full_mcmc(setup.observation, setup.model, base);
  const double mcmc_seconds = now_seconds(t_mcmc);

  const bool pass =
      usage == 2 && numeric == 3 && okrun == 0 && ep_seconds < mcmc_seconds;
  h.report("supplementary: CLI exit codes and engine speed ordering", pass,
           "usage=" + std::to_string(usage) + " numeric=" + std::to_string(numeric) +
               " ok=" + std::to_string(okrun) + " ep=" + fmt(ep_seconds) + "s mcmc=" +
               fmt(mcmc_seconds) + "s");
  fs::remove_all(root);
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

  Harness h;
  criterion_psrf_fixture(h);
  criterion_psrf_identity(h);
  criterion_clutter_oracle(h);
  criterion_gaussian_reduction(h);
  criterion_zx(h);
  criterion_tilted_moments(h);
  criterion_snis_gradient(h);
  criterion_recovery_and_positivity(h);  // criteria 8 and 9
  criterion_improvement(h);
  criterion_mh_calibration(h);
  criterion_cli_determinism(h, cli);
  supplementary_cli_contract(h, cli);

  if (h.failures == 0) {
    std::puts("acceptance: all criteria passed");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", h.failures);
  return 1;
}
