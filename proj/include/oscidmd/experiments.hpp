#pragma once

// End-to-end experiment pipeline: simulate ground truth, optionally add
// noise, fit each DMD variant, predict over the evaluation horizon and
// collect metrics. Presets reproduce the numerical studies of the method
// (forward propagation, noise robustness, cost, semiclassical sweep,
// nonlinear transfer).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "oscidmd/diagnostics.hpp"
#include "oscidmd/dmd.hpp"
#include "oscidmd/model_io.hpp"
#include "oscidmd/snapshot_io.hpp"
#include "oscidmd/spectral_solver.hpp"

namespace oscidmd::experiments {

inline constexpr std::string_view kFormatVersion = "oscidmd-experiment/1";

struct WkbProfile {
  std::string kind = "gauss-quadratic";  // or "gauss-logcosh"
  double width = 25.0;
};

inline WkbSpec make_wkb(const WkbProfile& p, const SpatialGrid& grid, double eps) {
  if (p.kind == "gauss-quadratic") return wkb_quadratic_phase(grid.a, grid.b, p.width, eps);
  if (p.kind == "gauss-logcosh") return wkb_logcosh_phase(grid.a, grid.b, p.width, eps);
  throw ValidationError("unknown initial profile '" + p.kind + "' (expected gauss-quadratic or gauss-logcosh)");
}

/// Ground-truth generator: fine grid, physics and the downsampling strides.
struct DataSpec {
  SpatialGrid fine_grid{0.0, 1.0, 1000};
  double eps = 1e-2;
  std::string potential_kind = "constant";  // constant | harmonic
  double potential_value = 0.0;
  double potential_center = 0.0;  // harmonic only: V = q (x - c)^2
  double beta = 0.0;
  double tau_e = 1e-3;
  Index downsample_time = 1;
  Index downsample_space = 1;
  WkbProfile profile;

  PotentialSpec potential() const {
    if (potential_kind == "constant") return PotentialSpec::constant(potential_value);
    if (potential_kind == "harmonic") return PotentialSpec::harmonic(potential_value, potential_center);
    throw ValidationError("unknown potential kind '" + potential_kind + "' (expected constant or harmonic)");
  }

  SolverConfig solver(Index coarse_snapshots) const {
    detail::require(coarse_snapshots >= 1, "DataSpec: need at least one snapshot");
    SolverConfig cfg;
    cfg.grid = fine_grid;
    cfg.eps = eps;
    cfg.potential = potential();
    cfg.beta = beta;
    cfg.tau_e = tau_e;
    cfg.steps = (coarse_snapshots - 1) * downsample_time;
    cfg.downsample_time = downsample_time;
    cfg.downsample_space = downsample_space;
    return cfg;
  }
};

/// Coarse snapshots u_0 .. u_{count-1}.
inline SnapshotMatrix generate(const DataSpec& spec, Index count) {
  const SolverConfig cfg = spec.solver(count);
  const ComplexVector u0 = wkb_initial(make_wkb(spec.profile, spec.fine_grid, spec.eps), spec.fine_grid);
  return simulate(u0, cfg);
}

/// Keeps every `stride`-th grid point, consistent with SpatialGrid::coarsened.
inline SnapshotMatrix subsample_space(const SnapshotMatrix& X, Index stride) {
  if (stride == 1) return X;
  const SpatialGrid g = X.grid.coarsened(stride);
  SnapshotMatrix out{ComplexMatrix(g.n, X.snapshots()), X.tau, g, X.eps};
  for (Index j = 0; j < g.n; ++j) out.data.row(j) = X.data.row((j + 1) * stride - 1);
  return out;
}

struct ExperimentSpec {
  std::string name = "custom";
  DataSpec data;
  std::vector<Method> methods{Method::kCrankNicolson, Method::kSemiImplicit, Method::kClassical, Method::kPiDmd};
  double tol = kDefaultTol;
  std::vector<double> noise_levels;  // empty: clean data only
  std::uint64_t seed = 20240601;
  Index train_first = 0;   // index of the first training snapshot in the simulated trajectory
  Index train_count = 50;  // training snapshots
  Index horizon = 400;     // evaluated snapshots, counted from train_first
  std::vector<Index> delay_depths{1};  // applied to the CN/SI methods
  Index pidmd_space_stride = 1;        // piDMD runs on a grid coarsened by this stride
  bool magnitude_grids = false;
  // Sweep mode (eps x training length), used when both lists are non-empty.
  std::vector<double> eps_sweep;
  std::vector<Index> train_sweep;
  Index horizon_factor = 0;  // evaluated snapshots = horizon_factor * m in sweep mode
  bool record_timings = true;

  bool is_sweep() const { return !eps_sweep.empty() && !train_sweep.empty(); }

  void validate() const {
    detail::require(!methods.empty(), "experiment: no methods requested");
    detail::require(tol >= 0.0, "experiment: tol must be nonnegative");
    for (double s : noise_levels) detail::require(s >= 0.0, "experiment: noise levels must be nonnegative");
    for (Index q : delay_depths) detail::require(q >= 1, "experiment: delay depths must be >= 1");
    detail::require(pidmd_space_stride >= 1, "experiment: pidmd stride must be >= 1");
    if (is_sweep()) {
      detail::require(horizon_factor >= 1, "experiment: sweep needs horizon_factor >= 1");
      for (Index m : train_sweep) detail::require(m >= 3, "experiment: sweep training lengths must be >= 3");
    } else {
      detail::require(train_first >= 0, "experiment: train_first must be nonnegative");
      detail::require(train_count >= 3, "experiment: need at least three training snapshots");
      detail::require(horizon >= train_count, "experiment: horizon must cover the training window (N >= m)");
    }
  }
};

inline std::vector<std::string> preset_names() {
  return {"exp-4.1", "exp-4.2", "exp-4.3", "exp-4.4", "exp-4.5"};
}

/// Parameter sets of the five reference studies.
inline ExperimentSpec preset(std::string_view name) {
  ExperimentSpec s;
  s.name = std::string(name);
  if (name == "exp-4.1") {
    // Forward propagation: constant potential on [0, 2], tau = h = 1e-2,
    // training u_1..u_100, evaluation over an 8x longer window.
    s.data = {{0.0, 2.0, 200}, 1e-2, "constant", 10.0, 0.0, 0.0, 1e-2, 1, 1, {"gauss-quadratic", 25.0}};
    s.train_first = 1;
    s.train_count = 100;
    s.horizon = 800;
    s.magnitude_grids = true;
  } else if (name == "exp-4.2") {
    // Noise robustness: harmonic trap on [0, 1], fine 1e-3 / 1e-3 grid,
    // data on tau = 1e-2, h = 4e-3 (250 x 80), predictions over 400 steps.
    // The well is centered at the domain midpoint.
    s.data = {{0.0, 1.0, 1000}, 1e-2, "harmonic", 10.0, 0.5, 0.0, 1e-3, 10, 4, {"gauss-quadratic", 25.0}};
    s.train_count = 80;
    s.horizon = 400;
    s.noise_levels = {1e-2, 1e-3, 1e-4, 1e-5};
  } else if (name == "exp-4.3") {
    // Cost comparison: 10000-point grid on [0, 10], 50 training snapshots,
    // evaluation to step 399. piDMD runs on a 2000-point subgrid by default.
    s.data = {{0.0, 10.0, 10000}, 1e-2, "constant", 10.0, 0.0, 0.0, 1e-3, 1, 1, {"gauss-logcosh", 25.0}};
    s.train_count = 50;
    s.horizon = 400;
    s.pidmd_space_stride = 5;
  } else if (name == "exp-4.4") {
    // Semiclassical sweep: fine 1e-4 / 1e-4 grid, data on tau = 1e-2,
    // h = 1e-3; evaluated over 9 m snapshots. Well centered as in exp-4.2.
    s.data = {{0.0, 1.0, 10000}, 1.0, "harmonic", 10.0, 0.5, 0.0, 1e-4, 100, 10, {"gauss-quadratic", 25.0}};
    s.methods = {Method::kCrankNicolson, Method::kSemiImplicit};
    s.eps_sweep = {1.0, 0.25, 0.0625, 0.015625};
    s.train_sweep = {10, 20, 40, 60, 80};
    s.horizon_factor = 9;
  } else if (name == "exp-4.5") {
    // Weak defocusing GPE in a harmonic trap on [-3, 3]; fine tau_e = 1e-2,
    // data on tau = 3e-2, h = 6e-3 (1000 x 50), 8x evaluation window.
    s.data = {{-3.0, 3.0, 1000}, 1e-2, "harmonic", 10.0, 0.0, 1e-2, 1e-2, 3, 1, {"gauss-quadratic", 50.0}};
    s.train_count = 50;
    s.horizon = 400;
    s.delay_depths = {1, 4};
  } else {
    std::string list;
    for (const auto& p : preset_names()) list += (list.empty() ? "" : ", ") + p;
    throw ValidationError("unknown preset '" + std::string(name) + "'; available presets: " + list);
  }
  return s;
}

// ------------------------------------------------------------------ manifest

inline nlohmann::ordered_json to_json(const ExperimentSpec& s) {
  nlohmann::ordered_json j;
  j["format"] = kFormatVersion;
  j["name"] = s.name;
  j["data"] = {
      {"a", s.data.fine_grid.a},
      {"b", s.data.fine_grid.b},
      {"n_fine", s.data.fine_grid.n},
      {"eps", s.data.eps},
      {"potential", s.data.potential_kind},
      {"potential_value", s.data.potential_value},
      {"potential_center", s.data.potential_center},
      {"beta", s.data.beta},
      {"tau_e", s.data.tau_e},
      {"downsample_time", s.data.downsample_time},
      {"downsample_space", s.data.downsample_space},
      {"profile", s.data.profile.kind},
      {"profile_width", s.data.profile.width},
  };
  std::vector<std::string> methods;
  for (Method m : s.methods) methods.emplace_back(method_name(m));
  j["methods"] = methods;
  j["tol"] = s.tol;
  j["noise_levels"] = s.noise_levels;
  j["seed"] = s.seed;
  j["noise_generator"] = kNoiseGenerator;
  j["train_first"] = s.train_first;
  j["train_count"] = s.train_count;
  j["horizon"] = s.horizon;
  j["delay_depths"] = s.delay_depths;
  j["pidmd_space_stride"] = s.pidmd_space_stride;
  j["magnitude_grids"] = s.magnitude_grids;
  j["eps_sweep"] = s.eps_sweep;
  j["train_sweep"] = s.train_sweep;
  j["horizon_factor"] = s.horizon_factor;
  j["record_timings"] = s.record_timings;
  return j;
}

inline ExperimentSpec from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormatVersion) throw ValidationError("manifest: unsupported format");
    ExperimentSpec s;
    s.name = j.at("name").get<std::string>();
    const auto& d = j.at("data");
    s.data.fine_grid = {d.at("a").get<double>(), d.at("b").get<double>(), d.at("n_fine").get<Index>()};
    s.data.eps = d.at("eps").get<double>();
    s.data.potential_kind = d.at("potential").get<std::string>();
    s.data.potential_value = d.at("potential_value").get<double>();
    s.data.potential_center = d.at("potential_center").get<double>();
    s.data.beta = d.at("beta").get<double>();
    s.data.tau_e = d.at("tau_e").get<double>();
    s.data.downsample_time = d.at("downsample_time").get<Index>();
    s.data.downsample_space = d.at("downsample_space").get<Index>();
    s.data.profile = {d.at("profile").get<std::string>(), d.at("profile_width").get<double>()};
    s.methods.clear();
    for (const auto& m : j.at("methods")) {
      const auto parsed = parse_method(m.get<std::string>());
      if (!parsed) throw ValidationError("manifest: unknown method " + m.get<std::string>());
      s.methods.push_back(*parsed);
    }
    s.tol = j.at("tol").get<double>();
    s.noise_levels = j.at("noise_levels").get<std::vector<double>>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.train_first = j.at("train_first").get<Index>();
    s.train_count = j.at("train_count").get<Index>();
    s.horizon = j.at("horizon").get<Index>();
    s.delay_depths = j.at("delay_depths").get<std::vector<Index>>();
    s.pidmd_space_stride = j.at("pidmd_space_stride").get<Index>();
    s.magnitude_grids = j.at("magnitude_grids").get<bool>();
    s.eps_sweep = j.at("eps_sweep").get<std::vector<double>>();
    s.train_sweep = j.at("train_sweep").get<std::vector<Index>>();
    s.horizon_factor = j.at("horizon_factor").get<Index>();
    s.record_timings = j.at("record_timings").get<bool>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
}

// ------------------------------------------------------------ fit + predict

struct FittedRun {
  AnyModel model;
  ComplexMatrix prediction;  // columns k = 0 .. horizon-1
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
  Index rank = 0;
};

inline Index model_rank(const AnyModel& m) {
  return std::visit(
      [](const auto& v) -> Index {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UnitaryModel>) return v.L.rows();
        else return v.rank();
      },
      m);
}

inline AnyModel fit_model(Method method, const SnapshotMatrix& train, double tol) {
  switch (method) {
    case Method::kClassical: return fit_classical(train, tol);
    case Method::kPiDmd: return fit_pidmd(train);
    default: return fit_structured(train, method, tol);
  }
}

/// Trajectory x_0 .. x_{horizon-1} started from the first (and for SI the
/// second) column of `initial`.
inline ComplexMatrix predict_model(const AnyModel& model, const ComplexMatrix& initial, Index horizon) {
  detail::require(horizon >= 1, "predict: horizon must be >= 1");
  const ComplexVector x0 = initial.col(0);
  return std::visit(
      [&](const auto& v) -> ComplexMatrix {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ClassicalDmdModel>) {
          return predict_classical_block(v, 0, horizon);
        } else if constexpr (std::is_same_v<T, UnitaryModel>) {
          return predict_pidmd_trajectory(v, x0, horizon - 1);
        } else {
          std::optional<ComplexVector> x1;
          if (v.scheme == Method::kSemiImplicit && horizon > 1) {
            detail::require(initial.cols() >= 2, "predict: semi-implicit prediction requires two initial states");
            x1 = initial.col(1);
          }
          ComplexMatrix out(x0.size(), horizon);
          out.col(0) = x0;
          if (horizon > 1) out.rightCols(horizon - 1) = predict_block(v, x0, x1, horizon - 1);
          return out;
        }
      },
      model);
}

inline FittedRun fit_and_predict(Method method, const SnapshotMatrix& train, Index horizon, double tol,
                                 Index depth = 1) {
  FittedRun run;
  if (depth == 1) {
    run.fit_seconds = time_seconds([&] { run.model = fit_model(method, train, tol); });
    run.predict_seconds = time_seconds([&] { run.prediction = predict_model(run.model, train.data, horizon); });
  } else {
    detail::require(is_structured(method), "delay embedding is supported for cn and si only");
    const DelayEmbedding emb{depth, train.dim()};
    const SnapshotMatrix etrain = emb.embed(train);
    run.fit_seconds = time_seconds([&] { run.model = fit_model(method, etrain, tol); });
    run.predict_seconds = time_seconds([&] {
      const ComplexMatrix e = predict_model(run.model, etrain.data, horizon - depth + 1);
      run.prediction = emb.unembed(e);
    });
  }
  run.rank = model_rank(run.model);
  return run;
}

// ----------------------------------------------------------------- running

struct RunResult {
  std::string label;
  Method method = Method::kCrankNicolson;
  Index depth = 1;
  double sigma = 0.0;
  double eps = 0.0;
  Index train_count = 0;
  Index n = 0;
  Index rank = 0;
  MetricSeries metrics;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<RunResult> runs;
  std::vector<std::string> files;

  const RunResult* find(std::string_view label) const {
    for (const auto& r : runs)
      if (r.label == label) return &r;
    return nullptr;
  }
};

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string short_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline void write_magnitudes(const std::filesystem::path& path, const ComplexMatrix& traj, const SpatialGrid& grid) {
  std::ofstream os(path, std::ios::trunc);
  os << "k";
  for (Index j = 0; j < traj.rows(); ++j) os << ',' << format_number(grid.x(j));
  os << '\n';
  for (Index k = 0; k < traj.cols(); ++k) {
    os << k;
    for (Index j = 0; j < traj.rows(); ++j) os << ',' << format_number(std::abs(traj(j, k)));
    os << '\n';
  }
}

inline void write_summary(const std::filesystem::path& path, const std::vector<RunResult>& runs) {
  std::ofstream os(path, std::ios::trunc);
  os << "method,e_rel,dM_final,dE_final,fit_seconds,predict_seconds\n";
  for (const auto& r : runs)
    os << r.label << ',' << format_number(r.metrics.e_rel) << ',' << format_number(r.metrics.final_dM()) << ','
       << format_number(r.metrics.final_dE()) << ',' << format_number(r.fit_seconds) << ','
       << format_number(r.predict_seconds) << '\n';
}

/// Fixed-column console table: method, runtime, e_rel, dM_final.
inline void print_table(std::ostream& os, const std::vector<RunResult>& runs) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s %12s %12s %12s\n", "method", "runtime[s]", "e_rel", "dM_final");
  os << buf;
  for (const auto& r : runs) {
    std::snprintf(buf, sizeof buf, "%-24s %12.4g %12.4e %12.4e\n", r.label.c_str(), r.fit_seconds + r.predict_seconds,
                  r.metrics.e_rel, r.metrics.final_dM());
    os << buf;
  }
}

namespace detail {

inline std::string run_label(Method m, Index depth, Index n, Index base_n, double sigma, bool tag_sigma) {
  std::string label(method_name(m));
  if (depth > 1) label += "_q" + std::to_string(depth);
  if (n != base_n) label += "_n" + std::to_string(n);
  if (tag_sigma) label += "_sigma" + short_number(sigma);
  return label;
}

}  // namespace detail

/// Runs the experiment. When `out_dir` is non-empty, writes per-run metric
/// CSVs, summary.csv, manifest.json (and magnitude grids / sweep table).
inline ExperimentReport run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir = {},
                                       std::ostream* log = nullptr) {
  spec.validate();
  ExperimentReport report;
  report.spec = spec;
  const bool write = !out_dir.empty();
  if (write) std::filesystem::create_directories(out_dir);
  auto note = [&](const std::string& msg) {
    if (log) *log << msg << std::endl;
  };
  auto emit = [&](const std::string& name) -> std::filesystem::path {
    report.files.push_back(name);
    return out_dir / name;
  };
  auto finish_timing = [&](RunResult& r) {
    if (!spec.record_timings) r.fit_seconds = r.predict_seconds = 0.0;
  };

  if (spec.is_sweep()) {
    Index max_m = 0;
    for (Index m : spec.train_sweep) max_m = std::max(max_m, m);
    std::ofstream table;
    if (write) {
      table.open(emit("table.csv"), std::ios::trunc);
      table << "m,eps,method,e_rel\n";
    }
    for (double eps : spec.eps_sweep) {
      DataSpec data = spec.data;
      data.eps = eps;
      note("simulating eps = " + short_number(eps));
      const SnapshotMatrix truth = generate(data, spec.horizon_factor * max_m);
      for (Index m : spec.train_sweep) {
        const SnapshotMatrix window = truth.slice(0, spec.horizon_factor * m);
        const SnapshotMatrix train = window.slice(0, m);
        for (Method method : spec.methods) {
          FittedRun fr = fit_and_predict(method, train, window.snapshots(), spec.tol);
          RunResult r;
          r.label = std::string(method_name(method)) + "_m" + std::to_string(m) + "_eps" + short_number(eps);
          r.method = method;
          r.eps = eps;
          r.train_count = m;
          r.n = train.dim();
          r.rank = fr.rank;
          r.metrics = metrics(fr.prediction, window.data);
          r.fit_seconds = fr.fit_seconds;
          r.predict_seconds = fr.predict_seconds;
          finish_timing(r);
          if (write)
            table << m << ',' << format_number(eps) << ',' << method_name(method) << ',' << format_number(r.metrics.e_rel)
                  << '\n';
          report.runs.push_back(std::move(r));
        }
      }
    }
  } else {
    const Index total = spec.train_first + spec.horizon;
    note("simulating " + std::to_string(total) + " snapshots");
    const SnapshotMatrix truth = generate(spec.data, total);
    const SnapshotMatrix window = truth.slice(spec.train_first, spec.horizon);
    const PotentialSpec potential = spec.data.potential();
    if (write && spec.magnitude_grids) write_magnitudes(emit("magnitude_truth.csv"), window.data, window.grid);

    std::vector<double> sigmas = spec.noise_levels;
    if (sigmas.empty()) sigmas.push_back(0.0);
    const bool tag_sigma = !spec.noise_levels.empty();

    for (double sigma : sigmas) {
      const SnapshotMatrix train_full = add_noise(window.slice(0, spec.train_count), {sigma, spec.seed});
      for (Method method : spec.methods) {
        const Index stride = method == Method::kPiDmd ? spec.pidmd_space_stride : 1;
        const std::vector<Index> depths = is_structured(method) ? spec.delay_depths : std::vector<Index>{1};
        const SnapshotMatrix train = subsample_space(train_full, stride);
        const SnapshotMatrix win = subsample_space(window, stride);

        for (Index depth : depths) {
          RunResult r;
          r.label = detail::run_label(method, depth, train.dim(), window.dim(), sigma, tag_sigma);
          note("fitting " + r.label);
          FittedRun fr = fit_and_predict(method, train, spec.horizon, spec.tol, depth);
          EnergyFunctional energy;
          if (is_structured(method) && depth == 1) {
            const auto& model = std::get<ReducedHermitianModel>(fr.model);
            energy = [model](const ComplexVector& x) { return discretized_energy(model, x); };
          } else {
            const SpatialGrid g = win.grid;
            energy = [g, eps = spec.data.eps, potential](const ComplexVector& x) { return oscidmd::energy(x, g, eps, potential); };
          }
          r.method = method;
          r.depth = depth;
          r.sigma = sigma;
          r.eps = spec.data.eps;
          r.train_count = spec.train_count;
          r.n = train.dim();
          r.rank = fr.rank;
          r.metrics = metrics(fr.prediction, win.data, energy);
          r.fit_seconds = fr.fit_seconds;
          r.predict_seconds = fr.predict_seconds;
          finish_timing(r);
          if (write) {
            std::ofstream os(emit("metrics_" + r.label + ".csv"), std::ios::trunc);
            write_metric_csv(os, r.metrics);
            if (spec.magnitude_grids) write_magnitudes(emit("magnitude_" + r.label + ".csv"), fr.prediction, win.grid);
          }
          report.runs.push_back(std::move(r));

          // Cost reference for a reduced-grid piDMD: CN-DMD on the same grid.
          if (method == Method::kPiDmd && stride > 1 && sigma == sigmas.front()) {
            RunResult c;
            c.label = detail::run_label(Method::kCrankNicolson, 1, train.dim(), window.dim(), sigma, tag_sigma);
            note("fitting " + c.label);
            FittedRun cr = fit_and_predict(Method::kCrankNicolson, train, spec.horizon, spec.tol);
            const auto& model = std::get<ReducedHermitianModel>(cr.model);
            c.method = Method::kCrankNicolson;
            c.sigma = sigma;
            c.eps = spec.data.eps;
            c.train_count = spec.train_count;
            c.n = train.dim();
            c.rank = cr.rank;
            c.metrics = metrics(cr.prediction, win.data,
                                [&model](const ComplexVector& x) { return discretized_energy(model, x); });
            c.fit_seconds = cr.fit_seconds;
            c.predict_seconds = cr.predict_seconds;
            finish_timing(c);
            if (write) {
              std::ofstream os(emit("metrics_" + c.label + ".csv"), std::ios::trunc);
              write_metric_csv(os, c.metrics);
            }
            report.runs.push_back(std::move(c));
          }
        }
      }
    }
  }

  if (write) {
    write_summary(emit("summary.csv"), report.runs);
    nlohmann::ordered_json manifest;
    manifest["spec"] = to_json(spec);
    std::vector<std::string> files = report.files;
    files.push_back("manifest.json");
    manifest["outputs"] = files;
    std::ofstream os(out_dir / "manifest.json", std::ios::trunc);
    os << manifest.dump(2) << '\n';
    report.files.push_back("manifest.json");
  }
  return report;
}

}  // namespace oscidmd::experiments
