#include "cli.hpp"

#include "pcarisk/harness.hpp"
#include "pcarisk/identities.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace pcarisk::cli {

namespace {

struct Options {
  std::string model = "spiked";
  int p = 40;
  double x = 1.0;
  double kappa = 1.0;
  double alpha = 1.0;
  double sigma2 = 1.0;
  std::string spectrum;
  bool random_basis = false;
  std::uint64_t basis_seed = 0;
  int n = 500;
  int d = 15;
  int reps = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string constants_path;
  std::string config_path;
  std::string out;
  std::string manifest;

  std::vector<double> x_grid;
  std::vector<double> y_grid;
  std::vector<int> n_grid;
  std::vector<int> d_grid;
  std::vector<double> mus;
  std::string which = "all";
  std::optional<double> mu;
  std::optional<int> r_idx;
  std::optional<int> s_idx;
  std::optional<int> l_idx;
  std::string estimator = "excess_risk";
  std::string values_path;
  int limit_draws = 0;
  bool inject = false;
  std::string source = "samples";
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw std::invalid_argument("bad number for " + what + ": " + text);
  return v;
}

std::vector<double> parse_spectrum(const std::string& text) {
  if (std::filesystem::is_regular_file(text)) return read_spectrum_file(text).values();
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(parse_double(trim(item), "--spectrum"));
  return values;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model, "exponential | polynomial | spiked | isotropic")
      ->check(CLI::IsMember({"exponential", "polynomial", "spiked", "isotropic"}));
  cmd->add_option("--p", o.p, "dimension");
  cmd->add_option("--x", o.x, "spiked gap");
  cmd->add_option("--kappa", o.kappa, "spiked width");
  cmd->add_option("--alpha", o.alpha, "decay rate");
  cmd->add_option("--sigma2", o.sigma2, "isotropic level");
  cmd->add_option("--spectrum", o.spectrum, "eigenvalues, comma-separated or a file; overrides --model");
  cmd->add_flag("--random-basis", o.random_basis, "rotate the model by a Haar frame");
  cmd->add_option("--basis-seed", o.basis_seed, "seed of the random frame");
  cmd->add_option("--n", o.n, "sample size");
  cmd->add_option("--d", o.d, "projection rank");
  cmd->add_option("--reps", o.reps, "Monte Carlo replications");
  cmd->add_option("--seed", o.seed, "base seed (default: $PCA_RISK_SEED or 0)");
  cmd->add_option("--threads", o.threads, "worker threads (0: all cores)");
  cmd->add_option("--constants", o.constants_path, "key=value file with C1 C2 C3 C_display c c1 c_lower");
  cmd->add_option("--config", o.config_path, "flat key=value file of flag values");
  cmd->add_option("--out", o.out, "data output file (default: stdout)");
  cmd->add_option("--manifest", o.manifest, "JSON manifest output file");
  cmd->add_option("--sigma-source", o.source, "samples | wishart | population")
      ->check(CLI::IsMember({"samples", "wishart", "population"}));
}

ExperimentConfig resolve(const Options& o, const std::string& verb) {
  ExperimentConfig cfg;
  if (!o.spectrum.empty()) {
    cfg.model.kind = ModelKind::custom;
    cfg.model.custom_values = parse_spectrum(o.spectrum);
    cfg.model.p = static_cast<int>(cfg.model.custom_values.size());
  } else {
    cfg.model.kind = parse_model_kind(o.model);
    cfg.model.p = o.p;
  }
  cfg.model.params.x = o.x;
  cfg.model.params.kappa = o.kappa;
  cfg.model.params.alpha = o.alpha;
  cfg.model.params.sigma2 = o.sigma2;
  cfg.model.params.d = o.d;
  cfg.model.random_basis = o.random_basis;
  cfg.model.basis_seed = o.basis_seed;
  cfg.n = o.n;
  cfg.d = o.d;
  cfg.replications = o.reps;
  cfg.base_seed = o.seed;
  cfg.threads = o.threads;
  cfg.x_grid = o.x_grid;
  cfg.y_grid = o.y_grid;
  cfg.n_grid = o.n_grid;
  cfg.d_grid = o.d_grid;
  cfg.limit_draws = o.limit_draws;
  cfg.source = o.inject ? SigmaSource::population : parse_sigma_source(o.source);
  cfg.output_path = o.out;
  if (verb == "figure1") cfg.constants.C_display = 1.1;
  if (!o.constants_path.empty()) read_constants_file(o.constants_path, cfg.constants);
  if (cfg.d < 1 || cfg.d >= cfg.model.p) throw std::invalid_argument("need 1 <= d < p");
  cfg.validate();
  return cfg;
}

Json resolved_json(const std::string& verb, const ExperimentConfig& cfg, const Options& o) {
  Json out;
  out["verb"] = verb;
  out["config"] = config_to_json(cfg);
  out["constants"] = to_json(cfg.constants);
  out["threads"] = cfg.threads;
  out["out"] = o.out;
  out["manifest"] = o.manifest;
  if (verb == "bounds") {
    out["which"] = o.which;
    out["mu"] = o.mu ? Json(*o.mu) : Json(nullptr);
    out["r"] = o.r_idx ? Json(*o.r_idx) : Json(nullptr);
    out["s"] = o.s_idx ? Json(*o.s_idx) : Json(nullptr);
    out["l"] = o.l_idx ? Json(*o.l_idx) : Json(nullptr);
  }
  if (verb == "excess-risk") out["estimator"] = o.estimator;
  if (verb == "verify-identities") out["mu"] = o.mus;
  return out;
}

void emit(const std::string& data, const Options& o, std::ostream& out) {
  if (o.out.empty()) {
    out << data;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + o.out);
  f << data;
}

void write_manifest(const Options& o, const ExperimentConfig& cfg, const std::string& verb, double seconds,
                    const Json& summary) {
  if (o.manifest.empty()) return;
  Json m = make_manifest(cfg, verb, seconds);
  m["summary"] = summary;
  std::ofstream f(o.manifest, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + o.manifest);
  f << m.dump(2) << '\n';
}

std::string table_csv(const SweepTable& t) {
  std::ostringstream s;
  t.write_csv(s);
  return s.str();
}

// ---------------------------------------------------------------------------
// Verbs. Each returns the exit status and fills `summary`.

int verify_identities_verb(const ExperimentConfig& cfg, const Options& o, std::ostream& out, Json& summary) {
  const CovModel model = cfg.model.build();
  struct Stat {
    int count = 0, degenerate = 0, failed = 0;
    double max_rel = 0.0;
  };
  std::map<std::string, Stat> stats;
  std::vector<std::vector<IdentityCheck>> per_rep(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, cfg.threads, [&](int i) {
    const Realization r = make_replication(model, cfg.n, cfg.d, cfg.base_seed, static_cast<std::uint64_t>(i));
    std::vector<double> mus = o.mus;
    if (mus.empty()) mus = {-1.0, 0.0, r.lambda(cfg.d + 1), r.lambda(cfg.d), 1.0};
    per_rep[static_cast<std::size_t>(i)] = verify_identities(r, mus);
  });
  Json failures = Json::array();
  for (std::size_t i = 0; i < per_rep.size(); ++i)
    for (const auto& c : per_rep[i]) {
      Stat& st = stats[c.name.substr(0, c.name.find('('))];
      ++st.count;
      if (c.degenerate) ++st.degenerate;
      if (!c.degenerate) st.max_rel = std::max(st.max_rel, c.rel_err);
      if (!c.passed && !c.degenerate) {
        ++st.failed;
        if (failures.size() < 20) {
          Json f = to_json(c);
          f["replication"] = i;
          failures.push_back(f);
        }
      }
    }
  int failed = 0;
  Json groups = Json::object();
  for (const auto& [name, st] : stats) {
    failed += st.failed;
    groups[name] = Json{{"checks", st.count}, {"degenerate", st.degenerate}, {"failed", st.failed},
                        {"max_rel_err", json_number(st.max_rel)}};
  }
  summary = Json{{"replications", cfg.replications}, {"failed", failed}, {"groups", groups}, {"failures", failures}};
  emit(summary.dump(2) + "\n", o, out);
  if (!o.out.empty()) out << (failed == 0 ? "all non-degenerate checks passed\n" : "identity checks failed\n");
  return failed == 0 ? kOk : kInvariantViolation;
}

int excess_risk_verb(const ExperimentConfig& cfg, const Options& o, std::ostream& out, Json& summary) {
  const MCResult res = run_replications(cfg, o.estimator, !o.values_path.empty());
  summary = Json{{"estimator", o.estimator},
                 {"estimate", json_number(res.estimate)},
                 {"stderr", json_number(res.std_error)},
                 {"replications", res.replications},
                 {"base_seed", res.base_seed}};
  emit(summary.dump(2) + "\n", o, out);
  if (!o.values_path.empty()) {
    std::ofstream f(o.values_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + o.values_path);
    SweepTable t;
    t.columns = {"replication", "value"};
    for (std::size_t i = 0; i < res.values.size(); ++i) t.rows.push_back({double(i), res.values[i]});
    t.write_csv(f);
  }
  if (!o.out.empty()) out << o.estimator << " = " << res.estimate << " +- " << res.std_error << '\n';
  return kOk;
}

const std::vector<std::string>& bound_names() {
  static const std::vector<std::string> names = {"crude",    "global",        "local_leq", "local_gt",
                                                 "local_leq_best", "minima",  "local_global", "weighted",
                                                 "weighted_pair",  "oracle",  "spiked"};
  return names;
}

int bounds_verb(const ExperimentConfig& cfg, const Options& o, std::ostream& out, Json& summary) {
  const CovModel model = cfg.model.build();
  const Spectrum& spec = model.spectrum();
  const int n = cfg.n, d = cfg.d, p = spec.dim();
  const BoundConstants& k = cfg.constants;
  const double mu = o.mu.value_or(spec.lambda(d + 1));
  const int r_idx = o.r_idx.value_or(d);
  const int s_idx = o.s_idx.value_or(d);
  const int l_idx = o.l_idx.value_or(p + 1);

  std::vector<std::string> which;
  if (o.which == "all") {
    which = bound_names();
    if (cfg.model.kind != ModelKind::spiked) which.pop_back();
  } else {
    std::stringstream ss(o.which);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (std::find(bound_names().begin(), bound_names().end(), item) == bound_names().end())
        throw std::invalid_argument("unknown bound: " + item);
      which.push_back(item);
    }
  }
  Json arr = Json::array();
  for (const auto& name : which) {
    if (name == "crude") arr.push_back(to_json(crude_expectation(spec, n, d, k)));
    if (name == "global") arr.push_back(to_json(global_expectation_bound(spec, n, d, k)));
    if (name == "local_leq") arr.push_back(to_json(local_leq_bound(spec, n, d, mu, r_idx, k)));
    if (name == "local_gt") arr.push_back(to_json(local_gt_bound(spec, n, d, mu, l_idx, k)));
    if (name == "local_leq_best") arr.push_back(to_json(best_local_leq(spec, n, d, k)));
    if (name == "weighted") arr.push_back(to_json(weighted_bound(spec, n, d, s_idx, std::min(r_idx, s_idx), k)));
    if (name == "oracle") arr.push_back(to_json(oracle_bound(spec, n, d, s_idx, k)));
    BoundPair pair;
    bool is_pair = true;
    if (name == "minima") {
      pair = minima_bound(spec, n, d, k);
    } else if (name == "local_global") {
      pair = local_global_bounds(spec, n, d, k);
    } else if (name == "weighted_pair") {
      pair = weighted_pair_bounds(spec, n, d, k);
    } else if (name == "spiked") {
      if (cfg.model.kind != ModelKind::spiked) throw std::invalid_argument("spiked bound needs --model spiked");
      pair = spiked_bounds(cfg.model.params.x, cfg.model.params.kappa, p, d, n, k);
    } else {
      is_pair = false;
    }
    if (is_pair) {
      arr.push_back(to_json(pair.first));
      arr.push_back(to_json(pair.second));
    }
  }
  summary = Json{{"bounds", arr.size()}};
  emit(arr.dump(2) + "\n", o, out);
  if (!o.out.empty())
    for (const auto& b : arr) out << b["name"].get<std::string>() << " = " << b["value"].dump() << '\n';
  return kOk;
}

int figure1_verb(const ExperimentConfig& cfg, const Options& o, std::ostream& out, Json& summary) {
  const SweepTable t = figure1_sweep(cfg);
  int violations = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double mc = t.at(i, "mc_mean");
    if (mc > t.at(i, "erm_curve") || mc > t.at(i, "global_curve")) ++violations;
    if (t.at(i, "scm_condition_ok") == 1.0 && mc > t.at(i, "scm_curve")) ++violations;
  }
  summary = Json{{"rows", t.rows.size()}, {"dominance_violations", violations}};
  emit(table_csv(t), o, out);
  if (!o.out.empty()) out << t.rows.size() << " grid points, " << violations << " dominance violations\n";
  return violations == 0 ? kOk : kInvariantViolation;
}

int concentration_verb(const ExperimentConfig& cfg, const Options& o, std::ostream& out, Json& summary) {
  if (cfg.x_grid.empty() && cfg.y_grid.empty()) throw std::invalid_argument("concentration needs --x-grid or --y-grid");
  const SweepTable t = deviation_frequency_experiment(cfg);
  summary = Json{{"rows", t.rows.size()}};
  emit(table_csv(t), o, out);
  if (!o.out.empty()) out << t.rows.size() << " rows written\n";
  return kOk;
}

int asymptotics_verb(const ExperimentConfig& cfg, const Options& o, std::ostream& out, Json& summary) {
  const SweepTable t = asymptotic_experiment(cfg);
  Json ks = Json::array();
  for (double v : t.column("ks")) ks.push_back(v);
  summary = Json{{"ks", ks}};
  emit(table_csv(t), o, out);
  if (!o.out.empty()) out << "KS per n: " << ks.dump() << '\n';
  return kOk;
}

int oracle_ratio_verb(const ExperimentConfig& cfg, const Options& o, std::ostream& out, Json& summary) {
  const SweepTable t = oracle_ratio_grid(cfg);
  Json ratios = Json::array();
  for (double v : t.column("ratio")) ratios.push_back(v);
  summary = Json{{"ratio", ratios}};
  emit(table_csv(t), o, out);
  if (!o.out.empty()) out << "ratio per d: " << ratios.dump() << '\n';
  return kOk;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("PCA_RISK_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("PCA_RISK_SEED is not an unsigned integer: ") + env);
  }
}

// Inserts the tokens of every --config file right after the verb, so flags
// given on the command line win (options take their last value).
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out(args.begin(), args.begin() + std::min<std::size_t>(2, args.size()));
  std::vector<std::string> injected;
  for (std::size_t i = 2; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    if (!path.empty())
      for (auto& t : config_file_tokens(path)) injected.push_back(std::move(t));
  }
  out.insert(out.end(), injected.begin(), injected.end());
  if (args.size() > 2) out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace

void read_constants_file(const std::string& path, BoundConstants& k) {
  for (const auto& [key, value] : read_key_values(path)) {
    const double v = parse_double(value, key);
    if (key == "C1") k.C1 = v;
    else if (key == "C2") k.C2 = v;
    else if (key == "C3") k.C3 = v;
    else if (key == "C_display" || key == "C") k.C_display = v;
    else if (key == "c") k.c_dev = v;
    else if (key == "c1") k.c1 = v;
    else if (key == "c_lower") k.c_lower = v;
    else throw std::invalid_argument(path + ": unknown constant " + key);
  }
  k.validate();
}

std::vector<std::string> config_file_tokens(const std::string& path) {
  std::vector<std::string> out;
  for (const auto& [key, value] : read_key_values(path)) {
    if (key == "config") throw std::invalid_argument(path + ": nested config files are not supported");
    if (value == "true") {
      out.push_back("--" + key);
    } else if (value != "false") {
      out.push_back("--" + key);
      out.push_back(value);
    }
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo and bound evaluation for the excess risk of PCA", "pcarisk"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  Options o;
  struct Verb {
    const char* name;
    const char* help;
    int (*fn)(const ExperimentConfig&, const Options&, std::ostream&, Json&);
  };
  const std::vector<Verb> verbs = {
      {"verify-identities", "check the exact perturbation identities on random realizations", verify_identities_verb},
      {"excess-risk", "Monte Carlo estimate of a per-realization functional", excess_risk_verb},
      {"bounds", "evaluate expectation bounds for a model", bounds_verb},
      {"figure1", "excess risk and three upper bounds across the spiked gap", figure1_verb},
      {"concentration", "eigenvalue deviation frequencies against their tail bounds", concentration_verb},
      {"asymptotics", "KS distance of n * excess risk to its limit law", asymptotics_verb},
      {"oracle-ratio", "excess plus oracle risk over oracle risk across d", oracle_ratio_verb},
  };
  std::map<CLI::App*, const Verb*> by_cmd;
  for (const auto& v : verbs) {
    CLI::App* cmd = app.add_subcommand(v.name, v.help);
    add_common(cmd, o);
    by_cmd[cmd] = &v;
    const std::string name = v.name;
    if (name == "verify-identities") cmd->add_option("--mu", o.mus, "split levels")->delimiter(',');
    if (name == "excess-risk") {
      cmd->add_option("--estimator", o.estimator, "functional name");
      cmd->add_option("--values", o.values_path, "per-replication CSV");
      cmd->add_flag("--inject", o.inject, "use Sigma_hat = Sigma");
    }
    if (name == "bounds") {
      cmd->add_option("--which", o.which, "all or a comma list");
      cmd->add_option("--mu", o.mu, "split level (default lambda_{d+1})");
      cmd->add_option("--r", o.r_idx, "top cut r (default d)");
      cmd->add_option("--s", o.s_idx, "weighted block size s (default d)");
      cmd->add_option("--l", o.l_idx, "bottom cut l in d+1..p+1 (default p+1)");
    }
    if (name == "figure1") cmd->add_option("--x-grid", o.x_grid, "gap values")->delimiter(',');
    if (name == "concentration") {
      cmd->add_option("--x-grid", o.x_grid, "absolute deviations")->delimiter(',');
      cmd->add_option("--y-grid", o.y_grid, "relative deviations")->delimiter(',');
      cmd->add_option("--n-grid", o.n_grid, "sample sizes")->delimiter(',');
    }
    if (name == "asymptotics") {
      cmd->add_option("--n-grid", o.n_grid, "sample sizes")->delimiter(',');
      cmd->add_option("--limit-draws", o.limit_draws, "limit-law draws (default: reps)");
    }
    if (name == "oracle-ratio") {
      cmd->add_option("--d-grid", o.d_grid, "ranks")->delimiter(',');
      cmd->add_flag("--inject", o.inject, "use Sigma_hat = Sigma");
    }
  }

  std::vector<std::string> args(argv, argv + argc);
  try {
    o.seed = default_seed();
    args = expand_config(args);
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? version_string() + "\n" : app.help());
      return kOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const Verb& verb = *by_cmd.at(cmd);
  ExperimentConfig cfg;
  try {
    cfg = resolve(o, verb.name);
    cfg.model.build();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n\n" << cmd->help();
    return kUsage;
  }
  out << "resolved config:\n" << resolved_json(verb.name, cfg, o).dump(2) << '\n';

  try {
    const auto start = std::chrono::steady_clock::now();
    Json summary;
    const int code = verb.fn(cfg, o, out, summary);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(o, cfg, verb.name, seconds, summary);
    return code;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kInvariantViolation;
  }
}

}  // namespace pcarisk::cli
