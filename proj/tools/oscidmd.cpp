// oscidmd: simulate, fit, predict, run preset experiments and benchmarks.
//
// Exit codes: 0 success, 2 usage or validation error, 3 numerical degeneracy.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oscidmd/config.hpp"
#include "oscidmd/diagnostics.hpp"
#include "oscidmd/dmd.hpp"
#include "oscidmd/experiments.hpp"
#include "oscidmd/model_io.hpp"
#include "oscidmd/snapshot_io.hpp"

namespace fs = std::filesystem;
using namespace oscidmd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDegenerate = 3;
constexpr Index kPiDmdWarnDim = 5000;

struct GlobalOptions {
  double tol = kDefaultTol;
  std::uint64_t seed = 20240601;
  std::string out = ".";
  unsigned threads = 1;
  std::string format = "table";
};

std::string num(double v) { return experiments::format_number(v); }

fs::path output_path(const GlobalOptions& g, const std::string& explicit_path, const char* default_name) {
  if (!explicit_path.empty()) return explicit_path;
  fs::create_directories(g.out);
  return fs::path(g.out) / default_name;
}

Method require_method(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw ValidationError("unknown method '" + name + "' (expected classical, pidmd, cn or si)");
  return *m;
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
  std::string config;
  std::string output;
};

int cmd_simulate(const GlobalOptions& g, const SimulateArgs& a) {
  const SimulationConfig cfg = load_simulation_config(a.config);
  const SnapshotMatrix X = run_simulation(cfg);
  const fs::path path = output_path(g, a.output, "snapshots.bin");
  write_snapshots(path, X);
  const PotentialSpec V = cfg.data.potential();
  const ComplexVector u0 = X.column(0);
  std::cout << "n " << X.dim() << "\nm " << X.snapshots() << "\ntau " << num(X.tau) << "\nh " << num(X.grid.h())
            << "\neps " << num(X.eps) << "\nmass " << num(mass(u0, X.grid)) << "\nenergy "
            << num(energy(u0, X.grid, X.eps, V)) << "\nwrote " << path.string() << '\n';
  return kExitOk;
}

// ----------------------------------------------------------------------- fit

struct FitArgs {
  std::string snapshots;
  std::string method;
  std::string output;
  Index first = 0;
  Index count = -1;
};

void print_model_summary(const AnyModel& model) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ClassicalDmdModel>) {
          std::cout << "rank " << v.rank() << '\n';
          const Index shown = std::min<Index>(v.rank(), 8);
          for (Index i = 0; i < shown; ++i)
            std::cout << "lambda[" << i << "] " << num(v.eigenvalues(i).real()) << ' ' << num(v.eigenvalues(i).imag())
                      << " |lambda| " << num(std::abs(v.eigenvalues(i))) << '\n';
          if (v.has_undefined_frequency()) std::cout << "note: zero eigenvalue, continuous frequency undefined\n";
          if (v.amplitudes_rank_deficient) std::cout << "note: amplitude solve is rank deficient\n";
        } else if constexpr (std::is_same_v<T, UnitaryModel>) {
          std::cout << "rank " << v.L.rows() << "\nunique " << (v.unique ? "yes" : "no") << '\n';
          const double defect = (v.L.adjoint() * v.L - ComplexMatrix::Identity(v.L.rows(), v.L.cols())).norm();
          std::cout << "unitarity_defect " << num(defect) << '\n';
        } else {
          std::cout << "rank " << v.rank() << '\n';
          if (v.rank() > 0)
            std::cout << "lambda_max " << num(v.eigenvalues(0)) << "\nlambda_min " << num(v.eigenvalues(v.rank() - 1))
                      << '\n';
          double defect = 0.0;
          for (Index i = 0; i < v.rank(); ++i) defect = std::max(defect, std::abs(std::abs(v.factors(i)) - 1.0));
          std::cout << "factor_modulus_defect " << num(defect) << '\n';
        }
      },
      model);
}

int cmd_fit(const GlobalOptions& g, const FitArgs& a) {
  const Method method = require_method(a.method);
  SnapshotMatrix X = read_snapshots(a.snapshots);
  const Index count = a.count < 0 ? X.snapshots() - a.first : a.count;
  X = X.slice(a.first, count);
  if (method == Method::kPiDmd && X.dim() >= kPiDmdWarnDim)
    std::cerr << "warning: piDMD requests a full O(n^3) solve at n = " << X.dim() << '\n';
  AnyModel model;
  const double seconds = time_seconds([&] { model = experiments::fit_model(method, X, g.tol); });
  const fs::path path = output_path(g, a.output, "model.bin");
  write_model(path, model);
  std::cout << "method " << method_name(method) << '\n';
  print_model_summary(model);
  std::cout << "fit_seconds " << num(seconds) << "\nwrote " << path.string() << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------- predict

struct PredictArgs {
  std::string model;
  std::string initial;
  Index initial_first = 0;
  Index steps = 0;
  std::string mode = "block";
  std::string truth;
  Index truth_first = 0;
  std::string output;
  std::string metrics_output;
  std::string potential;
  double potential_value = 0.0;
  double potential_center = 0.0;
};

ComplexMatrix predict_single(const AnyModel& model, const ComplexVector& x0, const std::optional<ComplexVector>& x1,
                             Index N) {
  ComplexMatrix out(x0.size(), N + 1);
  for (Index k = 0; k <= N; ++k) {
    out.col(k) = std::visit(
        [&](const auto& v) -> ComplexVector {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, ClassicalDmdModel>) return predict_classical(v, k);
          else if constexpr (std::is_same_v<T, UnitaryModel>) return predict_pidmd(v, x0, k);
          else return predict_structured(v, x0, x1, k);
        },
        model);
  }
  return out;
}

int cmd_predict(const GlobalOptions& g, const PredictArgs& a) {
  const AnyModel model = read_model(a.model);
  const SnapshotMatrix init = read_snapshots(a.initial);
  detail::require(a.steps >= 0, "predict: --steps must be nonnegative");
  detail::require(a.initial_first >= 0 && a.initial_first < init.snapshots(), "predict: --initial-first out of range");
  const Method method = model_method(model);
  const ComplexVector x0 = init.column(a.initial_first);
  std::optional<ComplexVector> x1;
  if (a.initial_first + 1 < init.snapshots()) x1 = init.column(a.initial_first + 1);
  if (method == Method::kSemiImplicit && a.steps >= 1 && !x1)
    throw ValidationError("predict: semi-implicit models need two initial states (x0 and x1)");
  const Index N = a.steps;

  ComplexMatrix traj;
  const double seconds = time_seconds([&] {
    if (a.mode == "single") {
      traj = predict_single(model, x0, x1, N);
    } else if (a.mode == "block" || a.mode == "parallel") {
      if (const auto* m = std::get_if<ReducedHermitianModel>(&model)) {
        traj.resize(x0.size(), N + 1);
        traj.col(0) = x0;
        if (N > 0) {
          const std::optional<ComplexVector> second = method == Method::kSemiImplicit ? x1 : std::nullopt;
          traj.rightCols(N) = a.mode == "block" ? predict_block(*m, x0, second, N)
                                                : predict_parallel(*m, x0, second, N, g.threads);
        }
      } else {
        ComplexMatrix initial(x0.size(), 1);
        initial.col(0) = x0;
        traj = experiments::predict_model(model, initial, N + 1);
      }
    } else {
      throw ValidationError("predict: --mode must be block, single or parallel");
    }
  });

  const fs::path path = output_path(g, a.output, "prediction.bin");
  write_snapshots(path, SnapshotMatrix{traj, init.tau, init.grid, init.eps});
  std::cout << "wrote " << path.string() << '\n';

  if (!a.truth.empty()) {
    const SnapshotMatrix truth = read_snapshots(a.truth);
    detail::require(truth.dim() == traj.rows(), "predict: truth dimension mismatch");
    detail::require(a.truth_first >= 0 && a.truth_first + N + 1 <= truth.snapshots(),
                    "predict: truth file has too few snapshots for the requested horizon");
    const ComplexMatrix ref = truth.data.middleCols(a.truth_first, N + 1);
    EnergyFunctional E;
    if (const auto* m = std::get_if<ReducedHermitianModel>(&model)) {
      E = [m](const ComplexVector& x) { return discretized_energy(*m, x); };
    } else if (!a.potential.empty()) {
      experiments::DataSpec d;
      d.potential_kind = a.potential;
      d.potential_value = a.potential_value;
      d.potential_center = a.potential_center;
      E = [V = d.potential(), grid = truth.grid, eps = truth.eps](const ComplexVector& x) {
        return energy(x, grid, eps, V);
      };
    }
    const MetricSeries s = metrics(traj, ref, E);
    const fs::path mpath = output_path(g, a.metrics_output, "metrics.csv");
    {
      std::ofstream os(mpath, std::ios::trunc);
      write_metric_csv(os, s);
    }
    experiments::RunResult row;
    row.label = std::string(method_name(method));
    row.metrics = s;
    row.predict_seconds = seconds;
    std::cout << "method,e_rel,dM_final,dE_final,fit_seconds,predict_seconds\n"
              << row.label << ',' << num(s.e_rel) << ',' << num(s.final_dM()) << ',' << num(s.final_dE()) << ','
              << num(0.0) << ',' << num(seconds) << '\n';
    std::cout << "wrote " << mpath.string() << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string preset;
  std::string manifest;
  std::vector<std::string> methods;
  std::vector<double> noise;
  bool full_pidmd = false;
  bool no_timings = false;
  bool tol_set = false;
  bool seed_set = false;
};

experiments::ExperimentSpec build_spec(const GlobalOptions& g, const ExperimentArgs& a) {
  experiments::ExperimentSpec spec;
  if (!a.manifest.empty()) {
    std::ifstream is(a.manifest);
    if (!is) throw ValidationError("cannot open manifest: " + a.manifest);
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("manifest: ") + e.what());
    }
    spec = experiments::from_json(j.contains("spec") ? j.at("spec") : j);
  } else {
    if (a.preset.empty()) throw ValidationError("experiment: give a preset name or --manifest");
    spec = experiments::preset(a.preset);
  }
  if (a.tol_set) spec.tol = g.tol;
  if (a.seed_set) spec.seed = g.seed;
  if (!a.methods.empty()) {
    spec.methods.clear();
    for (const auto& m : a.methods) spec.methods.push_back(require_method(m));
  }
  if (!a.noise.empty()) spec.noise_levels = a.noise;
  if (a.full_pidmd) spec.pidmd_space_stride = 1;
  if (a.no_timings) spec.record_timings = false;
  return spec;
}

void print_runs(const GlobalOptions& g, const std::vector<experiments::RunResult>& runs) {
  if (g.format == "csv") {
    std::cout << "method,e_rel,dM_final,dE_final,fit_seconds,predict_seconds\n";
    for (const auto& r : runs)
      std::cout << r.label << ',' << num(r.metrics.e_rel) << ',' << num(r.metrics.final_dM()) << ','
                << num(r.metrics.final_dE()) << ',' << num(r.fit_seconds) << ',' << num(r.predict_seconds) << '\n';
  } else {
    experiments::print_table(std::cout, runs);
  }
}

int cmd_experiment(const GlobalOptions& g, const ExperimentArgs& a) {
  const experiments::ExperimentSpec spec = build_spec(g, a);
  const fs::path dir = fs::path(g.out) / spec.name;
  const auto report = experiments::run_experiment(spec, dir, &std::cerr);
  print_runs(g, report.runs);
  std::cout << "wrote " << report.files.size() << " files to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_bench(const GlobalOptions& g, const ExperimentArgs& a) {
  const experiments::ExperimentSpec spec = build_spec(g, a);
  const auto report = experiments::run_experiment(spec, {}, &std::cerr);
  const bool csv = g.format == "csv";
  char buf[256];
  if (csv) std::cout << "method,n,rank,fit_seconds,predict_seconds\n";
  else {
    std::snprintf(buf, sizeof buf, "%-24s %7s %6s %12s %12s\n", "method", "n", "rank", "fit[s]", "predict[s]");
    std::cout << buf;
  }
  for (const auto& r : report.runs) {
    if (csv) {
      std::cout << r.label << ',' << r.n << ',' << r.rank << ',' << num(r.fit_seconds) << ',' << num(r.predict_seconds)
                << '\n';
    } else {
      std::snprintf(buf, sizeof buf, "%-24s %7lld %6lld %12.4g %12.4g\n", r.label.c_str(), static_cast<long long>(r.n),
                    static_cast<long long>(r.rank), r.fit_seconds, r.predict_seconds);
      std::cout << buf;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving DMD for semiclassical Schroedinger dynamics"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  auto* tol_opt = app.add_option("--tol", g.tol, "Relative SVD truncation tolerance")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", g.seed, "Noise seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for parallel prediction")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--format", g.format, "Standard-output format")
      ->check(CLI::IsMember({"table", "csv"}))
      ->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate ground-truth snapshots from an INI config");
  simulate->add_option("config", sim.config, "Config file")->required()->check(CLI::ExistingFile);
  simulate->add_option("-o,--output", sim.output, "Snapshot file (default <out>/snapshots.bin)");

  FitArgs fit;
  auto* fitc = app.add_subcommand("fit", "Fit a DMD model to a snapshot file");
  fitc->add_option("snapshots", fit.snapshots, "Snapshot file")->required()->check(CLI::ExistingFile);
  fitc->add_option("-m,--method", fit.method, "classical | pidmd | cn | si")->required();
  fitc->add_option("--first", fit.first, "First training column")->check(CLI::NonNegativeNumber);
  fitc->add_option("--count", fit.count, "Number of training columns (default: all)");
  fitc->add_option("-o,--output", fit.output, "Model file (default <out>/model.bin)");

  PredictArgs pred;
  auto* predc = app.add_subcommand("predict", "Predict from a fitted model");
  predc->add_option("model", pred.model, "Model file")->required()->check(CLI::ExistingFile);
  predc->add_option("-i,--initial", pred.initial, "Snapshot file holding x0 (and x1)")
      ->required()
      ->check(CLI::ExistingFile);
  predc->add_option("--initial-first", pred.initial_first, "Column of x0 in the initial file");
  predc->add_option("-N,--steps", pred.steps, "Prediction horizon N")->required();
  predc->add_option("--mode", pred.mode, "block | single | parallel")
      ->check(CLI::IsMember({"block", "single", "parallel"}))
      ->capture_default_str();
  predc->add_option("--truth", pred.truth, "Snapshot file with the reference trajectory")->check(CLI::ExistingFile);
  predc->add_option("--truth-first", pred.truth_first, "Column of the truth aligned with x0");
  predc->add_option("--potential", pred.potential, "Potential for the physical energy (constant | harmonic)");
  predc->add_option("--potential-value", pred.potential_value, "Potential constant or coefficient");
  predc->add_option("--potential-center", pred.potential_center, "Center of the harmonic well");
  predc->add_option("-o,--output", pred.output, "Prediction file (default <out>/prediction.bin)");
  predc->add_option("--metrics", pred.metrics_output, "Metrics CSV (default <out>/metrics.csv)");

  ExperimentArgs exp;
  auto add_experiment_options = [&](CLI::App* sub) {
    sub->add_option("preset", exp.preset, "exp-4.1 | exp-4.2 | exp-4.3 | exp-4.4 | exp-4.5");
    sub->add_option("--manifest", exp.manifest, "Rerun from a manifest.json")->check(CLI::ExistingFile);
    sub->add_option("--methods", exp.methods, "Override the method list")->delimiter(',');
    sub->add_option("--noise", exp.noise, "Override the noise levels")->delimiter(',');
    sub->add_flag("--full-pidmd", exp.full_pidmd, "Run piDMD on the full grid");
    sub->add_flag("--no-timings", exp.no_timings, "Record zero timings for byte-identical outputs");
  };
  auto* expc = app.add_subcommand("experiment", "Run a preset experiment and write a report directory");
  add_experiment_options(expc);
  auto* bench = app.add_subcommand("bench", "Time fit and predict of every method on a preset");
  add_experiment_options(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  exp.tol_set = tol_opt->count() > 0;
  exp.seed_set = seed_opt->count() > 0;
  if (g.tol < 0.0) {
    std::cerr << "error: --tol must be nonnegative\n";
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(g, sim);
    if (*fitc) return cmd_fit(g, fit);
    if (*predc) return cmd_predict(g, pred);
    if (*expc) return cmd_experiment(g, exp);
    if (*bench) return cmd_bench(g, exp);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateDataError& e) {
    std::cerr << "degenerate data: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
