#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ergoperturb/ar_model.hpp"
#include "ergoperturb/ergodicity.hpp"
#include "ergoperturb/grid.hpp"
#include "ergoperturb/harness.hpp"
#include "ergoperturb/kernel.hpp"
#include "ergoperturb/noise.hpp"
#include "ergoperturb/perturbation.hpp"
#include "ergoperturb/version.hpp"

#include <json.hpp>

namespace py = pybind11;
using namespace ergo;

PYBIND11_MODULE(_core, m) {
  m.doc() = "drift certificates, ergodicity rates and perturbation bounds "
            "for AR(1) chains on a quadrature grid";
  m.attr("__version__") = kVersion;

  py::class_<Grid>(m, "Grid")
      .def_static("uniform", &Grid::uniform, py::arg("n"), py::arg("x_max"))
      .def_readonly("nodes", &Grid::nodes)
      .def_readonly("weights", &Grid::weights)
      .def_readonly("x_max", &Grid::x_max)
      .def("size", &Grid::size)
      .def("spacing", &Grid::spacing)
      .def("__repr__", [](const Grid& g) {
        return "Grid(n=" + std::to_string(g.size()) +
               ", x_max=" + std::to_string(g.x_max) + ")";
      });

  py::class_<WeightSpec>(m, "WeightSpec")
      .def(py::init<double, double>(), py::arg("r"), py::arg("beta"))
      .def_readwrite("r", &WeightSpec::r)
      .def_readwrite("beta", &WeightSpec::beta);

  py::class_<WeightedFunction>(m, "WeightedFunction")
      .def(py::init([](Grid grid, Eigen::VectorXd values) {
             return WeightedFunction{std::move(grid), std::move(values)};
           }),
           py::arg("grid"), py::arg("values"))
      .def_readonly("grid", &WeightedFunction::grid)
      .def_readonly("values", &WeightedFunction::values);

  py::class_<SignedDensity>(m, "SignedDensity")
      .def(py::init([](Grid grid, Eigen::VectorXd values) {
             return SignedDensity{std::move(grid), std::move(values)};
           }),
           py::arg("grid"), py::arg("values"))
      .def_readonly("grid", &SignedDensity::grid)
      .def_readonly("values", &SignedDensity::values);

  m.def("weight_value", &weight_value, py::arg("x"), py::arg("r"));
  m.def("weight_vector", &weight_vector, py::arg("grid"), py::arg("r"));
  m.def("weighted_norm", &weighted_norm, py::arg("f"), py::arg("weight"));
  m.def("dual_distance", &dual_distance, py::arg("p"), py::arg("q"),
        py::arg("weight"));
  m.def("integrate", &integrate, py::arg("f"), py::arg("p"));
  m.def("total_mass", &total_mass, py::arg("p"));

  py::class_<NoiseModel>(m, "NoiseModel")
      .def_static("student_t", &NoiseModel::student_t, py::arg("dof"),
                  py::arg("moment_order"))
      .def_static("gaussian", &NoiseModel::gaussian, py::arg("sigma"),
                  py::arg("moment_order"))
      .def("pdf", &NoiseModel::pdf)
      .def("derivative", &NoiseModel::derivative, py::arg("j"), py::arg("x"))
      .def("cdf", &NoiseModel::cdf)
      .def("quantile", &NoiseModel::quantile)
      .def("tail_mass", &NoiseModel::tail_mass)
      .def("abs_moment", &NoiseModel::abs_moment)
      .def("moment_order", &NoiseModel::moment_order)
      .def("moment_r", &NoiseModel::moment_r)
      .def("ratio_bound", &NoiseModel::ratio_bound, py::arg("j"))
      .def("expansion_eligible", &NoiseModel::expansion_eligible)
      .def("name", &NoiseModel::name);

  py::class_<DiscretizedKernel>(m, "DiscretizedKernel")
      .def_static("from_action", &DiscretizedKernel::from_action, py::arg("grid"),
                  py::arg("action"), py::arg("markov_tol") = 1e-6)
      .def_static("from_kernel_values", &DiscretizedKernel::from_kernel_values,
                  py::arg("grid"), py::arg("k"), py::arg("markov_tol") = 1e-6)
      .def_static("identity", &DiscretizedKernel::identity, py::arg("grid"))
      .def_property_readonly("grid", &DiscretizedKernel::grid)
      .def_property_readonly("action", &DiscretizedKernel::action)
      .def("is_markov", &DiscretizedKernel::is_markov)
      .def("markov_defect", &DiscretizedKernel::markov_defect)
      .def("kernel_value", &DiscretizedKernel::kernel_value)
      .def("kernel_matrix", &DiscretizedKernel::kernel_matrix);

  m.def("apply", &apply, py::arg("t"), py::arg("f"));
  m.def("adjoint_apply", &adjoint_apply, py::arg("t"), py::arg("p"));
  m.def("operator_norm",
        py::overload_cast<const DiscretizedKernel&, const WeightSpec&,
                          const WeightSpec&>(&operator_norm),
        py::arg("t"), py::arg("from_space"), py::arg("to_space"));
  m.def("compose", &compose, py::arg("s"), py::arg("t"));
  m.def("power", &power, py::arg("t"), py::arg("n"));
  m.def("kernel_sum", [](const DiscretizedKernel& a, const DiscretizedKernel& b) {
    return a + b;
  });
  m.def("kernel_diff", [](const DiscretizedKernel& a, const DiscretizedKernel& b) {
    return a - b;
  });
  m.def("scale", &scale, py::arg("t"), py::arg("c"));

  py::class_<DriftCertificate>(m, "DriftCertificate")
      .def_readonly("certified", &DriftCertificate::certified)
      .def_readonly("N", &DriftCertificate::N)
      .def_readonly("delta", &DriftCertificate::delta)
      .def_readonly("L", &DriftCertificate::L)
      .def_readonly("residual", &DriftCertificate::residual)
      .def_readonly("message", &DriftCertificate::message);

  m.def("fit_drift", &fit_drift, py::arg("t"), py::arg("weight"), py::arg("N"),
        py::arg("L_cap"), py::arg("delta_floor") = 1e-8);
  m.def("drift_residual", &drift_residual, py::arg("t"), py::arg("weight"),
        py::arg("N"), py::arg("delta"), py::arg("L"));

  py::class_<ARKernelSpec>(m, "ARKernelSpec")
      .def(py::init([](double alpha, const NoiseModel& noise, const Grid& grid,
                       double tau_trunc, double max_row_defect, double markov_tol) {
             return ARKernelSpec{alpha, noise, grid, tau_trunc, max_row_defect,
                                 markov_tol};
           }),
           py::arg("alpha"), py::arg("noise"), py::arg("grid"),
           py::arg("tau_trunc") = 1e-8, py::arg("max_row_defect") = 1e-3,
           py::arg("markov_tol") = 1e-6)
      .def_readwrite("alpha", &ARKernelSpec::alpha)
      .def_readonly("grid", &ARKernelSpec::grid)
      .def_readwrite("tau_trunc", &ARKernelSpec::tau_trunc)
      .def_readwrite("max_row_defect", &ARKernelSpec::max_row_defect)
      .def_readwrite("markov_tol", &ARKernelSpec::markov_tol);

  py::class_<TruncationReport>(m, "TruncationReport")
      .def_readonly("noise_tail", &TruncationReport::noise_tail)
      .def_readonly("max_row_defect", &TruncationReport::max_row_defect)
      .def_readonly("rows_renormalized", &TruncationReport::rows_renormalized);

  m.def(
      "build_kernel",
      [](const ARKernelSpec& spec) {
        TruncationReport report;
        DiscretizedKernel k = build_kernel(spec, &report);
        return py::make_tuple(std::move(k), report);
      },
      py::arg("spec"));
  m.def("derivative_kernel", &derivative_kernel, py::arg("spec"), py::arg("k"));

  py::class_<HolderModulusResult>(m, "HolderModulusResult")
      .def_readonly("sigma", &HolderModulusResult::sigma)
      .def_readonly("max_ratio", &HolderModulusResult::max_ratio)
      .def_readonly("bound_2AB", &HolderModulusResult::bound_2AB)
      .def_readonly("ratios", &HolderModulusResult::ratios);

  m.def("holder_modulus_check", &holder_modulus_check, py::arg("noise"),
        py::arg("grid"), py::arg("k"), py::arg("beta"), py::arg("beta_prime"),
        py::arg("alpha_pairs"), py::arg("tau_trunc") = 1e-8);

  py::class_<CounterexampleResult>(m, "CounterexampleResult")
      .def_readonly("a", &CounterexampleResult::a)
      .def_readonly("I_a", &CounterexampleResult::I_a)
      .def_readonly("limit_value", &CounterexampleResult::limit_value)
      .def_readonly("ratios", &CounterexampleResult::ratios)
      .def_readonly("limit_check", &CounterexampleResult::limit_check);

  m.def("run_counterexample", &run_counterexample, py::arg("noise"),
        py::arg("alpha0"), py::arg("alphas"));

  py::class_<ExpansionCoefficients>(m, "ExpansionCoefficients")
      .def_readonly("alpha", &ExpansionCoefficients::alpha)
      .def_readonly("beta_r", &ExpansionCoefficients::beta_r)
      .def_readonly("pi", &ExpansionCoefficients::pi)
      .def_readonly("mu", &ExpansionCoefficients::mu)
      .def_readonly("mu_masses", &ExpansionCoefficients::mu_masses)
      .def_readonly("mu_dual_norms", &ExpansionCoefficients::mu_dual_norms);

  m.def("taylor_expansion", &taylor_expansion, py::arg("spec"), py::arg("order"),
        py::arg("beta_r"));
  m.def("taylor_partial_sum", &taylor_partial_sum, py::arg("coeffs"),
        py::arg("eps"), py::arg("order"));

  py::class_<InvariantOptions>(m, "InvariantOptions")
      .def(py::init<>())
      .def_readwrite("residual_tol", &InvariantOptions::residual_tol)
      .def_readwrite("negative_tol", &InvariantOptions::negative_tol)
      .def_readwrite("uniqueness_tol", &InvariantOptions::uniqueness_tol)
      .def_readwrite("max_iterations", &InvariantOptions::max_iterations);

  py::class_<InvariantMeasure>(m, "InvariantMeasure")
      .def_readonly("density", &InvariantMeasure::density)
      .def_readonly("pi_V", &InvariantMeasure::pi_V)
      .def_readonly("residual", &InvariantMeasure::residual)
      .def_readonly("subdominant", &InvariantMeasure::subdominant);

  m.def("invariant_measure", &invariant_measure, py::arg("p"), py::arg("weight"),
        py::arg("opts") = InvariantOptions{});

  py::enum_<RateStatus>(m, "RateStatus")
      .value("ok", RateStatus::ok)
      .value("degenerate", RateStatus::degenerate)
      .value("not_decaying", RateStatus::not_decaying)
      .value("insufficient", RateStatus::insufficient);

  py::class_<RateFitOptions>(m, "RateFitOptions")
      .def(py::init<>())
      .def_readwrite("burn_in", &RateFitOptions::burn_in)
      .def_readwrite("n_max", &RateFitOptions::n_max)
      .def_readwrite("floor", &RateFitOptions::floor)
      .def_readwrite("min_points", &RateFitOptions::min_points);

  py::class_<RateEstimate>(m, "RateEstimate")
      .def_readonly("kappa_hat", &RateEstimate::kappa_hat)
      .def_readonly("c_hat", &RateEstimate::c_hat)
      .def_readonly("n_lo", &RateEstimate::n_lo)
      .def_readonly("n_hi", &RateEstimate::n_hi)
      .def_readonly("residual", &RateEstimate::residual)
      .def_readonly("decay", &RateEstimate::decay)
      .def_readonly("status", &RateEstimate::status);

  m.def("estimate_rate", &estimate_rate, py::arg("p"), py::arg("weight"),
        py::arg("opts") = RateFitOptions{});

  py::class_<Resolvent>(m, "Resolvent")
      .def_readonly("grid", &Resolvent::grid)
      .def_readonly("z", &Resolvent::z)
      .def_readonly("action", &Resolvent::action)
      .def_readonly("residual", &Resolvent::residual);

  m.def("resolvent", &resolvent, py::arg("p"), py::arg("z"),
        py::arg("residual_tol") = 1e-8);
  m.def("resolvent_norm",
        py::overload_cast<const Resolvent&, const WeightSpec&,
                          const WeightSpec&>(&operator_norm),
        py::arg("t"), py::arg("from_space"), py::arg("to_space"));

  py::class_<ProjectionDiagnostics>(m, "ProjectionDiagnostics")
      .def_readonly("imag_residue", &ProjectionDiagnostics::imag_residue)
      .def_readonly("idempotency_defect",
                    &ProjectionDiagnostics::idempotency_defect)
      .def_readonly("rank_one_defect", &ProjectionDiagnostics::rank_one_defect);

  m.def(
      "spectral_projection",
      [](const DiscretizedKernel& p, std::complex<double> center, double radius,
         int n_points) {
        ProjectionDiagnostics diag;
        DiscretizedKernel proj = spectral_projection(p, center, radius, n_points,
                                                     &diag);
        return py::make_tuple(std::move(proj), diag);
      },
      py::arg("p"), py::arg("center"), py::arg("radius"), py::arg("n_points"));

  py::class_<PotentialOperator>(m, "PotentialOperator")
      .def_readonly("R", &PotentialOperator::R)
      .def_readonly("pi", &PotentialOperator::pi)
      .def_readonly("identity_residual", &PotentialOperator::identity_residual)
      .def_readonly("fixed_residual", &PotentialOperator::fixed_residual);

  m.def("generalized_potential", &generalized_potential, py::arg("p"),
        py::arg("weight"), py::arg("opts") = InvariantOptions{});

  py::class_<PerturbationReport>(m, "PerturbationReport")
      .def_readonly("eps", &PerturbationReport::eps)
      .def_readonly("cont_norm_01", &PerturbationReport::cont_norm_01)
      .def_readonly("cont_norm_beta1", &PerturbationReport::cont_norm_beta1)
      .def_readonly("cont_norm_11", &PerturbationReport::cont_norm_11)
      .def_readonly("tv_gap", &PerturbationReport::tv_gap)
      .def_readonly("beta_gap", &PerturbationReport::beta_gap);

  m.def("continuity_profile", &continuity_profile, py::arg("family"),
        py::arg("weight"));

  py::enum_<CheckStatus>(m, "CheckStatus")
      .value("ok", CheckStatus::ok)
      .value("insufficient_signal", CheckStatus::insufficient_signal);

  py::class_<HolderBoundCheck>(m, "HolderBoundCheck")
      .def_readonly("delta", &HolderBoundCheck::delta)
      .def_readonly("rho", &HolderBoundCheck::rho)
      .def_readonly("eta", &HolderBoundCheck::eta)
      .def_readonly("fitted_exponent", &HolderBoundCheck::fitted_exponent)
      .def_readonly("D_hat", &HolderBoundCheck::D_hat)
      .def_readonly("envelope_holds", &HolderBoundCheck::envelope_holds)
      .def_readonly("n_used", &HolderBoundCheck::n_used)
      .def_readonly("status", &HolderBoundCheck::status);

  m.def("check_holder_bound", &check_holder_bound, py::arg("profile"),
        py::arg("delta"), py::arg("rho"));

  py::class_<LipschitzCheck>(m, "LipschitzCheck")
      .def_readonly("C_hat", &LipschitzCheck::C_hat)
      .def_readonly("ratios", &LipschitzCheck::ratios)
      .def_readonly("excluded", &LipschitzCheck::excluded)
      .def_readonly("status", &LipschitzCheck::status);

  m.def("check_lipschitz_bound", &check_lipschitz_bound, py::arg("profile"));

  py::class_<KartashovExpansion>(m, "KartashovExpansion")
      .def_readonly("convergent", &KartashovExpansion::convergent)
      .def_readonly("dr_norm", &KartashovExpansion::dr_norm)
      .def_readonly("tail_bound", &KartashovExpansion::tail_bound)
      .def_readonly("partial_sum", &KartashovExpansion::partial_sum)
      .def_readonly("partial_mass", &KartashovExpansion::partial_mass)
      .def_readonly("term_masses", &KartashovExpansion::term_masses)
      .def_readonly("term_norms", &KartashovExpansion::term_norms);

  m.def("kartashov_expansion", &kartashov_expansion, py::arg("p0"),
        py::arg("p_eps"), py::arg("order"), py::arg("weight"));

  py::class_<McOracleResult>(m, "McOracleResult")
      .def_readonly("samples", &McOracleResult::samples)
      .def_readonly("histogram", &McOracleResult::histogram)
      .def_readonly("invariant", &McOracleResult::invariant)
      .def_readonly("tv", &McOracleResult::tv)
      .def_readonly("half_width", &McOracleResult::half_width)
      .def_readonly("seed", &McOracleResult::seed)
      .def_readonly("rng", &McOracleResult::rng);

  m.def("mc_oracle", &mc_oracle, py::arg("spec"), py::arg("n_samples"),
        py::arg("burn_in"), py::arg("seed"));

  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& out_dir) {
        std::vector<std::string> errors;
        ExperimentConfig cfg = ExperimentConfig::from_json(
            nlohmann::json::parse(config_json), &errors);
        for (const auto& e : cfg.validate()) errors.push_back(e);
        if (!errors.empty()) {
          std::string msg = "invalid config:";
          for (const auto& e : errors) msg += "\n  " + e;
          throw std::invalid_argument(msg);
        }
        return run_experiment(cfg, out_dir);
      },
      py::arg("config_json"), py::arg("out_dir"),
      "run a named experiment from a flat JSON config string");
}
