#include "pcarisk/harness.hpp"
#include "pcarisk/sampling.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pcarisk;

namespace {

py::dict bound_dict(const BoundValue& b) {
  py::dict d;
  d["name"] = b.name;
  d["value"] = b.value;
  d["params"] = b.params;
  d["condition_ok"] = b.condition_ok;
  d["condition_lhs"] = b.condition_lhs ? py::cast(*b.condition_lhs) : py::none();
  d["condition_rhs"] = b.condition_rhs ? py::cast(*b.condition_rhs) : py::none();
  return d;
}

py::dict deviation_dict(const DeviationBound& b) {
  py::dict d;
  d["name"] = b.name;
  d["value"] = b.prob_bound;
  d["x_or_y"] = b.x_or_y;
  d["params"] = b.params;
  d["condition_ok"] = b.condition_ok;
  d["condition_lhs"] = b.condition_lhs;
  d["condition_rhs"] = b.condition_rhs;
  return d;
}

py::dict table_dict(const SweepTable& t) {
  py::dict d;
  for (const auto& c : t.columns) d[py::str(c)] = t.column(c);
  return d;
}

py::list pair_list(const BoundPair& p) {
  py::list l;
  l.append(bound_dict(p.first));
  l.append(bound_dict(p.second));
  return l;
}

CovModel model_from(const std::string& kind, int p, double alpha, double x, double kappa, int d, double sigma2,
                    std::vector<double> values, std::optional<Matrix> basis) {
  if (kind == "custom") return make_custom_model(Spectrum(std::move(values)), std::move(basis));
  ModelParams prm;
  prm.alpha = alpha;
  prm.x = x;
  prm.kappa = kappa;
  prm.d = d;
  prm.sigma2 = sigma2;
  CovModel m = make_model(parse_model_kind(kind), prm, p);
  return basis ? m.with_basis(std::move(*basis)) : m;
}

}  // namespace

PYBIND11_MODULE(_pcarisk, m) {
  m.doc() = "Excess risk of PCA: exact risk metrics, bounds and Monte Carlo experiments";
  m.attr("__version__") = version_string();

  py::register_exception<EigenSolverError>(m, "EigenSolverError");

  m.def("sym_eig", [](const Matrix& a) {
    const auto e = sym_eig(SymMatrix(a));
    return py::make_tuple(e.values, e.vectors);
  }, py::arg("a"), "Eigenvalues (non-increasing) and eigenvectors of the symmetric part of a.");

  py::class_<CovModel>(m, "CovModel")
      .def(py::init(&model_from), py::arg("kind") = "spiked", py::arg("p") = 40, py::arg("alpha") = 1.0,
           py::arg("x") = 1.0, py::arg("kappa") = 1.0, py::arg("d") = 1, py::arg("sigma2") = 1.0,
           py::arg("values") = std::vector<double>{}, py::arg("basis") = py::none())
      .def_property_readonly("dim", &CovModel::dim)
      .def_property_readonly("eigenvalues", [](const CovModel& c) { return c.spectrum().values(); })
      .def_property_readonly("basis", &CovModel::basis)
      .def_property_readonly("covariance", [](const CovModel& c) { return c.covariance().matrix(); })
      .def_property_readonly("kind", [](const CovModel& c) { return std::string(to_string(c.kind())); })
      .def("tr_gt", [](const CovModel& c, int r) { return c.spectrum().tr_gt(r); })
      .def("effective_rank", [](const CovModel& c) { return c.spectrum().effective_rank(); });

  m.def("draw_samples", [](const CovModel& model, int n, std::uint64_t seed, std::uint64_t stream) {
    return draw_gaussian_samples(model, n, seed, stream).rows;
  }, py::arg("model"), py::arg("n"), py::arg("seed") = 0, py::arg("stream") = 0);
  m.def("empirical_covariance", [](const Matrix& rows) {
    SampleSet s{static_cast<int>(rows.rows()), static_cast<int>(rows.cols()), rows, 0, 0};
    return empirical_covariance(s).matrix();
  }, py::arg("rows"));
  m.def("draw_wishart_covariance", [](const CovModel& model, int n, std::uint64_t seed, std::uint64_t stream) {
    return draw_wishart_covariance(model, n, seed, stream).matrix();
  }, py::arg("model"), py::arg("n"), py::arg("seed") = 0, py::arg("stream") = 0);

  py::class_<Realization>(m, "Realization")
      .def(py::init([](const CovModel& model, const Matrix& sigma_hat, int d) {
             return Realization(model, SymMatrix(sigma_hat), d);
           }),
           py::arg("model"), py::arg("sigma_hat"), py::arg("d"))
      .def_property_readonly("d", &Realization::d)
      .def_property_readonly("p", &Realization::p)
      .def_property_readonly("delta", [](const Realization& r) { return r.delta().matrix(); })
      .def_property_readonly("empirical_eigenvalues", [](const Realization& r) { return r.emp().values; })
      .def("excess_risk", &excess_risk)
      .def("erm_gap", &erm_gap)
      .def("hs_distance_sq", [](const Realization& r) { return hs_distance_sq(r.pop_leq(), r.emp_leq()); })
      .def("risk_parts", [](const Realization& r, double mu) {
        const auto parts = risk_parts(r, mu);
        return py::make_tuple(parts.leq, parts.gt);
      }, py::arg("mu"))
      .def("report", [](const Realization& r, std::optional<double> mu) {
        const RiskReport rep = risk_report(r, mu.value_or(r.lambda(r.d() + 1)));
        py::dict d;
        d["excess"] = rep.excess;
        d["part_leq"] = rep.part_leq;
        d["part_gt"] = rep.part_gt;
        d["mu"] = rep.mu;
        d["hs_sq"] = rep.hs_sq;
        d["erm_gap"] = rep.erm_gap;
        return d;
      }, py::arg("mu") = py::none())
      .def("verify_identities", [](const Realization& r, const std::vector<double>& mus) {
        py::list out;
        for (const auto& c : verify_identities(r, mus)) {
          py::dict d;
          d["name"] = c.name;
          d["abs_err"] = c.abs_err;
          d["rel_err"] = c.rel_err;
          d["degenerate"] = c.degenerate;
          d["passed"] = c.passed;
          out.append(d);
        }
        return out;
      }, py::arg("mus") = std::vector<double>{0.0})
      .def("crude_bound", [](const Realization& r) { return bound_dict(crude_deterministic(r)); })
      .def("empirical_global_bound", [](const Realization& r) { return bound_dict(empirical_global_bound(r)); });

  py::class_<BoundConstants>(m, "BoundConstants")
      .def(py::init<>())
      .def_readwrite("C1", &BoundConstants::C1)
      .def_readwrite("C2", &BoundConstants::C2)
      .def_readwrite("C3", &BoundConstants::C3)
      .def_readwrite("C_display", &BoundConstants::C_display)
      .def_readwrite("c1", &BoundConstants::c1)
      .def_readwrite("c", &BoundConstants::c_dev)
      .def_readwrite("c_lower", &BoundConstants::c_lower);

  auto spec_of = [](const CovModel& model) { return model.spectrum(); };
  m.def("bounds", [spec_of](const CovModel& model, int n, int d, const BoundConstants& k) {
    const Spectrum s = spec_of(model);
    py::list out;
    out.append(bound_dict(crude_expectation(s, n, d, k)));
    out.append(bound_dict(global_expectation_bound(s, n, d, k)));
    out.append(bound_dict(best_local_leq(s, n, d, k)));
    out.append(bound_dict(local_gt_bound(s, n, d, s.lambda(d + 1), s.dim() + 1, k)));
    for (auto item : pair_list(minima_bound(s, n, d, k))) out.append(item);
    for (auto item : pair_list(local_global_bounds(s, n, d, k))) out.append(item);
    out.append(bound_dict(weighted_bound(s, n, d, d, d, k)));
    for (auto item : pair_list(weighted_pair_bounds(s, n, d, k))) out.append(item);
    out.append(bound_dict(oracle_bound(s, n, d, d, k)));
    return out;
  }, py::arg("model"), py::arg("n"), py::arg("d"), py::arg("constants") = BoundConstants{});
  m.def("spiked_bounds", [](double x, double kappa, int p, int d, int n, const BoundConstants& k) {
    return pair_list(spiked_bounds(x, kappa, p, d, n, k));
  }, py::arg("x"), py::arg("kappa"), py::arg("p"), py::arg("d"), py::arg("n"), py::arg("constants") = BoundConstants{});
  m.def("right_deviation_bound", [](const CovModel& model, int n, int d, double x, const BoundConstants& k) {
    return deviation_dict(right_deviation_bound(model.spectrum(), n, d, x, k));
  }, py::arg("model"), py::arg("n"), py::arg("d"), py::arg("x"), py::arg("constants") = BoundConstants{});
  m.def("left_deviation_bound", [](const CovModel& model, int n, int d, double x, const BoundConstants& k) {
    return deviation_dict(left_deviation_bound(model.spectrum(), n, d, x, k));
  }, py::arg("model"), py::arg("n"), py::arg("d"), py::arg("x"), py::arg("constants") = BoundConstants{});

  m.def("limit_law_mean", [](const CovModel& model, int d) { return make_excess_law(model.spectrum(), d).mean(); },
        py::arg("model"), py::arg("d"));
  m.def("limit_law_draws", [](const CovModel& model, int d, int count, std::uint64_t seed) {
    return limit_law_draws(make_excess_law(model.spectrum(), d), count, seed, kLimitStream);
  }, py::arg("model"), py::arg("d"), py::arg("count"), py::arg("seed") = 0);
  m.def("ks_statistic", [](std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return ks_statistic(a, b);
  }, py::arg("a"), py::arg("b"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init([](const std::string& kind, int p, double alpha, double x, double kappa, double sigma2,
                       std::vector<double> values, int n, int d, int replications, std::uint64_t seed, int threads,
                       const std::string& source) {
             ExperimentConfig cfg;
             if (!values.empty()) {
               cfg.model.kind = ModelKind::custom;
               cfg.model.p = static_cast<int>(values.size());
               cfg.model.custom_values = std::move(values);
             } else {
               cfg.model.kind = parse_model_kind(kind);
               cfg.model.p = p;
             }
             cfg.model.params.alpha = alpha;
             cfg.model.params.x = x;
             cfg.model.params.kappa = kappa;
             cfg.model.params.sigma2 = sigma2;
             cfg.model.params.d = d;
             cfg.n = n;
             cfg.d = d;
             cfg.replications = replications;
             cfg.base_seed = seed;
             cfg.threads = threads;
             cfg.source = parse_sigma_source(source);
             return cfg;
           }),
           py::arg("kind") = "spiked", py::arg("p") = 40, py::arg("alpha") = 1.0, py::arg("x") = 1.0,
           py::arg("kappa") = 1.0, py::arg("sigma2") = 1.0, py::arg("values") = std::vector<double>{},
           py::arg("n") = 500, py::arg("d") = 15, py::arg("replications") = 1000, py::arg("seed") = 0,
           py::arg("threads") = 0, py::arg("source") = "samples")
      .def_readwrite("n", &ExperimentConfig::n)
      .def_readwrite("d", &ExperimentConfig::d)
      .def_readwrite("replications", &ExperimentConfig::replications)
      .def_readwrite("base_seed", &ExperimentConfig::base_seed)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def_readwrite("constants", &ExperimentConfig::constants)
      .def_readwrite("x_grid", &ExperimentConfig::x_grid)
      .def_readwrite("n_grid", &ExperimentConfig::n_grid)
      .def_readwrite("y_grid", &ExperimentConfig::y_grid)
      .def_readwrite("d_grid", &ExperimentConfig::d_grid)
      .def_readwrite("limit_draws", &ExperimentConfig::limit_draws)
      .def("model", [](const ExperimentConfig& c) { return c.model.build(); })
      .def("to_json", [](const ExperimentConfig& c) { return config_to_json(c).dump(); });

  m.def("estimator_names", &estimator_names);
  m.def("run_replications", [](const ExperimentConfig& cfg, const std::string& estimator, bool keep_values) {
    MCResult r;
    {
      py::gil_scoped_release release;
      r = run_replications(cfg, estimator, keep_values);
    }
    py::dict d;
    d["estimate"] = r.estimate;
    d["stderr"] = r.std_error;
    d["replications"] = r.replications;
    d["base_seed"] = r.base_seed;
    d["values"] = r.values;
    return d;
  }, py::arg("config"), py::arg("estimator") = "excess_risk", py::arg("keep_values") = false);

  auto sweep = [](SweepTable (*fn)(const ExperimentConfig&)) {
    return [fn](const ExperimentConfig& cfg) {
      SweepTable t;
      {
        py::gil_scoped_release release;
        t = fn(cfg);
      }
      return table_dict(t);
    };
  };
  m.def("figure1_sweep", sweep(&figure1_sweep), py::arg("config"));
  m.def("deviation_frequency_experiment", sweep(&deviation_frequency_experiment), py::arg("config"));
  m.def("oracle_ratio_grid", sweep(&oracle_ratio_grid), py::arg("config"));
  m.def("asymptotic_experiment", sweep(&asymptotic_experiment), py::arg("config"));
}
