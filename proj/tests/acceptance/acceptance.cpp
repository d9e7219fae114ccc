// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
#include "cli.hpp"
#include "pcarisk/harness.hpp"
#include "pcarisk/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace pcarisk;
namespace fs = std::filesystem;

namespace {

// Criterion 1
constexpr int kIdentityInstances = 200;
constexpr double kSplitRel = 1e-8;
constexpr double kExpansionRel = 1e-6;
// Criterion 2
constexpr int kInequalityInstances = 10000;
constexpr double kSlack = 1e-9;
// Criterion 3
constexpr int kNullReps = 500;
constexpr double kNullTol = 1e-9;
// Criterion 4
constexpr double kAnchorTol = 1e-9;
// Criterion 5
constexpr double kLimitMeanRel = 0.03;
constexpr double kKsThreshold = 0.08;
constexpr int kBatchReps = 200000;
constexpr int kBatchLimitDraws = 1000000;
constexpr int kBatches = 5;
// Criterion 7
constexpr double kPilotSeMargin = 3.0;
constexpr double kCalibrationFactor = 1.5;
constexpr double kMonotoneSlackSe = 2.0;
constexpr std::uint64_t kPilotSeed = 7000;
constexpr std::uint64_t kEvalSeed = 8000;
// Criterion 8
constexpr double kOracleK = 1.1;

fs::path out_dir = "acceptance_out";

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string csv_of(const SweepTable& t) {
  std::ostringstream s;
  t.write_csv(s);
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

// Mixed spectra: decays, two-level spikes, ties, random levels; half rotated.
CovModel mixed_model(int p, RngStream& rng) {
  const int kind = static_cast<int>(rng.next_u64() % 5);
  std::vector<double> v(static_cast<std::size_t>(p));
  const int cut = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(p - 1));
  for (int j = 0; j < p; ++j) {
    switch (kind) {
      case 0: v[j] = std::exp(-(0.2 + rng.uniform()) * (j + 1)); break;
      case 1: v[j] = std::pow(j + 1.0, -1.0 - 2.0 * rng.uniform()); break;
      case 2: v[j] = j < cut ? 1.0 + 3.0 * rng.uniform() : 1.0; break;
      case 3: v[j] = 1.0 + std::floor(3.0 * rng.uniform()); break;
      default: v[j] = 0.05 + 5.0 * rng.uniform(); break;
    }
  }
  std::sort(v.begin(), v.end(), std::greater<>());
  CovModel m = make_custom_model(Spectrum(v));
  if (rng.uniform() < 0.5) m = m.with_basis(random_orthonormal_frame(p, rng));
  return m;
}

int draw_int(RngStream& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

Outcome identities_suite() {
  RngStream rng(101, 0);
  int split_fail = 0, inter_fail = 0, exp_fail = 0, checks = 0, degenerate = 0;
  double worst_split = 0.0, worst_exp = 0.0;
  for (int i = 0; i < kIdentityInstances; ++i) {
    const int p = draw_int(rng, 3, 10);
    const int d = draw_int(rng, 1, p - 1);
    const int n = draw_int(rng, 20, 100);
    const CovModel m = mixed_model(p, rng);
    const Realization r(m, empirical_covariance(draw_gaussian_samples(m, n, 101, static_cast<std::uint64_t>(i))), d);
    const std::vector<double> mus{-1.0, 0.0, r.lambda(d + 1), r.lambda(d), 1.0};
    for (const auto& c : verify_identities(r, mus)) {
      ++checks;
      if (c.name.starts_with("spectral_split")) {
        worst_split = std::max(worst_split, c.rel_err);
        split_fail += c.rel_err > kSplitRel;
      } else if (c.name.starts_with("interaction")) {
        inter_fail += c.abs_err > c.tol;
      } else if (c.degenerate) {
        ++degenerate;
      } else {
        worst_exp = std::max(worst_exp, c.rel_err);
        exp_fail += c.rel_err > kExpansionRel;
      }
    }
  }
  Outcome o;
  o.pass = split_fail == 0 && inter_fail == 0 && exp_fail == 0;
  o.detail = fmt("%d checks; failures split=%d interaction=%d expansion=%d; degenerate=%d; max rel split=%.2e "
                 "expansion=%.2e",
                 checks, split_fail, inter_fail, exp_fail, degenerate, worst_split, worst_exp);
  return o;
}

Outcome inequality_suite() {
  RngStream rng(202, 0);
  int v_order = 0, v_crude = 0, v_chain = 0, v_quad = 0, v_hs = 0, quad_checked = 0, hs_checked = 0;
  for (int i = 0; i < kInequalityInstances; ++i) {
    const int p = draw_int(rng, 2, 10);
    const int d = draw_int(rng, 1, p - 1);
    const int n = draw_int(rng, 3, 300);
    const CovModel m = mixed_model(p, rng);
    const Realization r(m, empirical_covariance(draw_gaussian_samples(m, n, 202, static_cast<std::uint64_t>(i))), d);
    const double e = excess_risk(r);
    if (e < -kSlack || e > erm_gap(r) + kSlack) ++v_order;
    if (e > crude_deterministic(r).value + kSlack) ++v_crude;
    if (r.lambda(d) > r.lambda(d + 1)) {
      const auto c = davis_kahan_chain(r);
      if (c.hs_sq > c.mid + kSlack || c.mid > c.right + kSlack) ++v_chain;
      ++quad_checked;
      if (quadexp_excess_bound(r).value < e - kSlack) ++v_quad;
      const auto hb = quadexp_hs_bound(r);
      if (hb.condition_ok) {
        ++hs_checked;
        if (hb.value < c.hs_sq - kSlack) ++v_hs;
      }
    }
  }
  Outcome o;
  o.pass = v_order + v_crude + v_chain + v_quad + v_hs == 0;
  o.detail = fmt("%d instances; violations order=%d crude=%d chain=%d quadexp=%d (of %d) quadexp_hs=%d (of %d)",
                 kInequalityInstances, v_order, v_crude, v_chain, v_quad, quad_checked, v_hs, hs_checked);
  return o;
}

Outcome isotropic_null() {
  ExperimentConfig cfg;
  cfg.model.kind = ModelKind::isotropic;
  cfg.model.params.sigma2 = 2.5;
  cfg.model.p = 20;
  cfg.n = 50;
  cfg.d = 5;
  cfg.replications = kNullReps;
  cfg.base_seed = 303;
  const MCResult r = run_replications(cfg, "excess_risk", true);
  double worst = 0.0;
  for (double v : r.values) worst = std::max(worst, std::abs(v));
  return {worst <= kNullTol, fmt("%d replications, max |excess| = %.2e", kNullReps, worst)};
}

Outcome figure1() {
  ExperimentConfig cfg;
  cfg.model.kind = ModelKind::spiked;
  cfg.model.p = 40;
  cfg.n = 500;
  cfg.d = 15;
  cfg.replications = 1000;
  cfg.base_seed = 7;
  cfg.constants.C2 = 1.0;
  cfg.constants.C_display = 1.1;
  const auto start = std::chrono::steady_clock::now();
  const SweepTable t = figure1_sweep(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(out_dir / "figure1.csv", csv_of(t));
  std::ofstream(out_dir / "figure1_manifest.json") << make_manifest(cfg, "figure1", secs).dump(2) << '\n';
  int violations = 0;
  double tightest = kInf;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double mc = t.at(i, "mc_mean");
    for (const char* col : {"erm_curve", "global_curve", "scm_curve"}) violations += mc > t.at(i, col);
    if (t.at(i, "scm_curve") > 0.0) tightest = std::min(tightest, t.at(i, "scm_curve") - mc);
  }
  const bool anchored = std::abs(t.at(0, "mc_mean")) <= kAnchorTol && t.at(0, "x") == 0.0;
  return {violations == 0 && anchored && t.rows.size() == 21,
          fmt("%zu grid points, %d dominance violations, mc(0) = %.2e, min envelope margin %.3f", t.rows.size(),
              violations, t.at(0, "mc_mean"), tightest)};
}

Spectrum five_levels() { return Spectrum({5.0, 4.0, 3.0, 2.0, 1.0}); }

ExperimentConfig asymptotic_config(const std::vector<double>& values, int d) {
  ExperimentConfig cfg;
  cfg.model.kind = ModelKind::custom;
  cfg.model.custom_values = values;
  cfg.model.p = static_cast<int>(values.size());
  cfg.d = d;
  return cfg;
}

Outcome asymptotic_law() {
  const Spectrum s = five_levels();
  double oracle = 0.0;
  for (int j = 1; j <= 2; ++j)
    for (int k = 3; k <= 5; ++k) oracle += s.lambda(j) * s.lambda(k) / (s.lambda(j) - s.lambda(k));
  const LimitLawSpec law = make_excess_law(s, 2);
  const double mean = mean_of(limit_law_draws(law, 100000, 501, 0));
  const bool pass_a = std::abs(mean - oracle) <= kLimitMeanRel * oracle;

  ExperimentConfig cfg = asymptotic_config(s.values(), 2);
  cfg.replications = 2000;
  cfg.n_grid = {4000};
  cfg.base_seed = 502;
  const double ks_b = asymptotic_experiment(cfg).at(0, "ks");
  const bool pass_b = ks_b <= kKsThreshold;

  cfg.source = SigmaSource::wishart;
  cfg.replications = kBatchReps;
  cfg.limit_draws = kBatchLimitDraws;
  cfg.n_grid = {500, 2000, 8000};
  std::vector<std::vector<double>> ks(3);
  for (int b = 0; b < kBatches; ++b) {
    cfg.base_seed = 9100 + static_cast<std::uint64_t>(b);
    const SweepTable t = asymptotic_experiment(cfg);
    for (std::size_t i = 0; i < 3; ++i) ks[i].push_back(t.at(i, "ks"));
  }
  std::vector<double> med;
  for (auto& v : ks) {
    std::sort(v.begin(), v.end());
    med.push_back(v[v.size() / 2]);
  }
  const bool pass_c = med[0] > med[1] && med[1] > med[2];
  return {pass_a && pass_b && pass_c,
          fmt("(a) mean %.4f vs %.4f; (b) KS %.4f <= %.2f; (c) median KS %.4f > %.4f > %.4f", mean, oracle, ks_b,
              kKsThreshold, med[0], med[1], med[2])};
}

Outcome tied_eigenvalues() {
  const std::vector<double> values{3.0, 2.0, 2.0, 1.0};
  const LimitLawSpec law = make_excess_law(Spectrum(values), 2);
  const bool excluded = law.pairs.size() == 3 &&
                        std::find(law.pairs.begin(), law.pairs.end(), std::pair{2, 3}) == law.pairs.end();
  ExperimentConfig cfg = asymptotic_config(values, 2);
  cfg.replications = 2000;
  cfg.n_grid = {4000};
  cfg.base_seed = 601;
  const SweepTable t = asymptotic_experiment(cfg);
  const double ks = t.at(0, "ks");
  return {excluded && ks <= kKsThreshold,
          fmt("pair (2,3) excluded: %s; KS at n=4000 = %.4f <= %.2f; scaled mean %.3f vs limit %.3f",
              excluded ? "yes" : "no", ks, kKsThreshold, t.at(0, "mc_mean_scaled"), t.at(0, "limit_mean"))};
}

struct ConcentrationModel {
  std::string name;
  ExperimentConfig cfg;
};

std::vector<ConcentrationModel> concentration_models() {
  ExperimentConfig spiked;
  spiked.model.kind = ModelKind::spiked;
  spiked.model.p = 20;
  // At x = 1 the upward bias of the sample spikes makes the left tail rise from n = 100 to 400.
  spiked.model.params.x = 2.0;
  spiked.model.params.d = 3;
  spiked.d = 3;
  spiked.x_grid = {0.5, 1.0, 2.0, 4.0};
  ExperimentConfig expo;
  expo.model.kind = ModelKind::exponential;
  expo.model.p = 20;
  expo.model.params.alpha = 0.5;
  expo.d = 3;
  expo.x_grid = {0.025, 0.05, 0.1, 0.2};
  std::vector<ConcentrationModel> out{{"spiked", spiked}, {"exponential", expo}};
  for (auto& m : out) {
    m.cfg.n_grid = {100, 400, 1600};
    m.cfg.replications = 2000;
  }
  return out;
}

// Counts (checked points, violations) of bound >= freq + margin * se at condition_ok points.
std::pair<int, int> dominance(const SweepTable& t, const Spectrum& spec, int d, double c3, double margin) {
  BoundConstants k;
  k.C3 = c3;
  int checked = 0, bad = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const int n = static_cast<int>(t.at(i, "n"));
    const double x = t.at(i, "x");
    const DeviationBound br = right_deviation_bound(spec, n, d, x, k);
    const DeviationBound bl = left_deviation_bound(spec, n, d, x, k);
    if (br.condition_ok) {
      ++checked;
      bad += br.prob_bound < t.at(i, "freq_right") + margin * t.at(i, "stderr_right");
    }
    if (bl.condition_ok) {
      ++checked;
      bad += bl.prob_bound < t.at(i, "freq_left") + margin * t.at(i, "stderr_left");
    }
  }
  return {checked, bad};
}

// Violations of monotonicity in x (exact) and in n (binomial slack).
std::pair<int, int> monotone_violations(const SweepTable& t) {
  int in_x = 0, in_n = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < t.rows.size(); ++j) {
      for (const char* side : {"right", "left"}) {
        const std::string f = std::string("freq_") + side, se = std::string("stderr_") + side;
        if (t.at(i, "n") == t.at(j, "n") && t.at(i, "x") < t.at(j, "x")) in_x += t.at(j, f) > t.at(i, f);
        if (t.at(i, "x") == t.at(j, "x") && t.at(i, "n") < t.at(j, "n")) {
          const double slack = kMonotoneSlackSe * std::hypot(t.at(i, se), t.at(j, se));
          in_n += t.at(j, f) > t.at(i, f) + slack;
        }
      }
    }
  return {in_x, in_n};
}

Outcome concentration_suite() {
  const std::vector<double> c3_grid{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0};
  Outcome o;
  for (auto& [name, cfg] : concentration_models()) {
    const Spectrum spec = cfg.model.build().spectrum();
    cfg.base_seed = kPilotSeed;
    const SweepTable pilot = deviation_frequency_experiment(cfg);
    double pilot_min = kInf;
    for (double c3 : c3_grid)
      if (dominance(pilot, spec, cfg.d, c3, kPilotSeMargin).second == 0) {
        pilot_min = c3;
        break;
      }
    const double c3 = kCalibrationFactor * pilot_min;
    cfg.base_seed = kEvalSeed;
    cfg.constants.C3 = std::isfinite(c3) ? c3 : c3_grid.back();
    cfg.annotations = {{"C3_pilot_min", pilot_min},
                       {"C3_calibrated", c3},
                       {"calibration_factor", kCalibrationFactor},
                       {"pilot_seed", double(kPilotSeed)},
                       {"pilot_se_margin", kPilotSeMargin}};
    const auto start = std::chrono::steady_clock::now();
    const SweepTable eval = deviation_frequency_experiment(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(out_dir / ("concentration_" + name + ".csv"), csv_of(eval));
    std::ofstream(out_dir / ("concentration_" + name + "_manifest.json"))
        << make_manifest(cfg, "concentration", secs).dump(2) << '\n';
    const auto [checked, bad] = dominance(eval, spec, cfg.d, cfg.constants.C3, 0.0);
    const auto [in_x, in_n] = monotone_violations(eval);
    const bool ok = std::isfinite(c3) && checked > 0 && bad == 0 && in_x == 0 && in_n == 0;
    o.pass = o.pass && ok;
    o.detail += fmt("%s%s: C3 %.2f (pilot min %.2f), %d/%d condition_ok points dominated, monotone violations "
                    "x=%d n=%d",
                    o.detail.empty() ? "" : "; ", name.c_str(), c3, pilot_min, checked - bad, checked, in_x, in_n);
  }
  return o;
}

Outcome oracle_ratio() {
  ExperimentConfig cfg;
  cfg.model.kind = ModelKind::exponential;
  cfg.model.params.alpha = 1.0;
  cfg.model.p = 20;
  cfg.n = 2000;
  cfg.d = 2;
  cfg.d_grid = {2, 5, 10};
  cfg.replications = 1000;
  cfg.base_seed = 6100;
  cfg.annotations = {{"K", kOracleK}, {"pilot_seed", 6000.0}};
  const auto start = std::chrono::steady_clock::now();
  const SweepTable t = oracle_ratio_grid(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(out_dir / "oracle_ratio.csv", csv_of(t));
  std::ofstream(out_dir / "oracle_ratio_manifest.json") << make_manifest(cfg, "oracle-ratio", secs).dump(2) << '\n';
  double worst = 0.0;
  for (double r : t.column("ratio")) worst = std::max(worst, r);
  cfg.source = SigmaSource::population;
  cfg.replications = 20;
  bool exact = true;
  for (double r : oracle_ratio_grid(cfg).column("ratio")) exact = exact && r == 1.0;
  const auto ratios = t.column("ratio");
  return {worst <= kOracleK && exact,
          fmt("ratios %.4f %.4f %.4f <= K = %.2f; injection ratio exactly 1: %s", ratios[0], ratios[1], ratios[2],
              kOracleK, exact ? "yes" : "no")};
}

std::string run_cli_to_file(std::vector<std::string> args, const fs::path& file) {
  args.insert(args.begin(), "pcarisk");
  args.insert(args.end(), {"--out", file.string()});
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  if (cli::run(static_cast<int>(argv.size()), argv.data(), out, err) != cli::kOk) return "<failed: " + err.str() + ">";
  std::ifstream f(file, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> runs = {
      {"figure1", "--p", "10", "--d", "3", "--n", "60", "--reps", "80", "--seed", "11", "--x-grid", "0,0.5,1"},
      {"concentration", "--p", "10", "--d", "3", "--x-grid", "0.2,0.5", "--n-grid", "50,100", "--reps", "100",
       "--seed", "12"},
      {"asymptotics", "--spectrum", "5,4,3,2,1", "--d", "2", "--n-grid", "100,400", "--reps", "100", "--seed", "13"},
      {"oracle-ratio", "--model", "exponential", "--p", "12", "--d", "2", "--d-grid", "2,4", "--n", "100", "--reps",
       "60", "--seed", "14"},
      {"excess-risk", "--model", "polynomial", "--alpha", "2", "--p", "8", "--d", "2", "--n", "40", "--reps", "50",
       "--seed", "15", "--sigma-source", "wishart"}};
  int mismatches = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::set<std::string> outputs;
    for (const char* threads : {"1", "3", "8"})
      for (int repeat = 0; repeat < 2; ++repeat) {
        auto args = runs[i];
        args.insert(args.end(), {"--threads", threads});
        outputs.insert(run_cli_to_file(args, out_dir / fmt("determinism_%zu_%s_%d.out", i, threads, repeat)));
      }
    const bool ok = outputs.size() == 1 && !outputs.begin()->starts_with("<failed");
    mismatches += !ok;
  }
  return {mismatches == 0, fmt("%zu experiments x 3 thread counts x 2 runs; %d with differing bytes", runs.size(),
                               mismatches)};
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out-dir" && i + 1 < argc) out_dir = argv[++i];
    else if (a == "--only" && i + 1 < argc) only.insert(std::stoi(argv[++i]));
  }
  fs::create_directories(out_dir);

  const std::vector<Criterion> criteria = {
      {1, "exact identities", 30, identities_suite},
      {2, "per-realization inequalities", 120, inequality_suite},
      {3, "isotropic null", 60, isotropic_null},
      {4, "figure 1 dominance", 300, figure1},
      {5, "asymptotic law", 300, asymptotic_law},
      {6, "tied eigenvalues", 300, tied_eigenvalues},
      {7, "concentration", 300, concentration_suite},
      {8, "oracle ratio", 300, oracle_ratio},
      {9, "determinism", 300, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %d (%s): %s  %s  [%.1fs / %.0fs budget]\n", c.id, c.title, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
