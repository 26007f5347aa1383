#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include <json.hpp>

#include "dklm/datagen.hpp"
#include "dklm/io.hpp"
#include "dklm/solver.hpp"

namespace dklm {

/// End-to-end run configuration. Either `input_path` (CSV) or `synth`
/// (generator name) supplies the data.
struct PipelineConfig {
  std::string input_path;
  bool labeled = false;
  std::string synth;  // "two_moons" | "three_rings" | "syd4"
  Index n_per_group = 500;
  double noise_sd = 0.08;
  std::array<double, 3> radii{1.0, 2.0, 3.0};

  double gamma_boot = 1.0;
  double xi = 0.1;
  SolverConfig solver;

  // Sampling: "off" forces the dense kernel, "auto" uses N/3 above the
  // dense cutoff, a positive integer pins Q directly.
  std::string q_mode = "auto";
  Index q = 0;
  Index dense_cutoff = 600;

  std::uint64_t seed = 0;
  std::string out_dir;
  double component_threshold = 1e-3;
};

/// Everything a run reports; serializes to JSON with timing kept in a
/// single field so reports stay byte-comparable modulo timing.
struct RunReport {
  std::optional<MetricReport> metrics;
  Index components = 0;
  int iterations = 0;
  bool converged = false;
  double wall_time_s = 0.0;
  bool nystrom_used = false;
  Index q = 0;
  double rho = 0.0;
  bool nystrom_exact_check = false;
  double nystrom_exact_error = 0.0;
  ValidationReport kernel_validation;
  LabelVector labels;

  nlohmann::json to_json() const {
    nlohmann::json j;
    if (metrics) {
      j["metrics"] = {{"acc", metrics->acc}, {"nmi", metrics->nmi}, {"purity", metrics->purity}};
    } else {
      j["metrics"] = nullptr;
    }
    j["components"] = components;
    j["iterations"] = iterations;
    j["converged"] = converged;
    j["wall_time_s"] = wall_time_s;
    j["nystrom"] = {{"used", nystrom_used},
                    {"q", q},
                    {"rho", rho},
                    {"exact_check", nystrom_exact_check},
                    {"exact_error", nystrom_exact_error}};
    j["kernel_validation"] = {{"nonnegative", kernel_validation.nonnegative},
                              {"symmetric", kernel_validation.symmetric},
                              {"positive_semidefinite", kernel_validation.positive_semidefinite},
                              {"min_entry", kernel_validation.min_entry},
                              {"min_eigenvalue", kernel_validation.min_eigenvalue},
                              {"dominance_margin", kernel_validation.dominance_margin}};
    return j;
  }
};

/// A pipeline failure, tagged with the stage that raised it.
struct PipelineError : Error {
  std::string stage;
  PipelineError(const std::string& st, const std::string& msg)
      : Error(st + ": " + msg), stage(st) {}
};

namespace detail {

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

inline LabeledDataset make_synthetic(const PipelineConfig& cfg) {
  if (cfg.synth == "two_moons") {
    return gen_two_moons(cfg.n_per_group, cfg.noise_sd, cfg.seed);
  }
  if (cfg.synth == "three_rings") {
    return gen_three_rings(cfg.n_per_group, cfg.radii, cfg.noise_sd, cfg.seed);
  }
  if (cfg.synth == "syd4") {
    return gen_syd4(cfg.seed);
  }
  throw ParameterError("unknown synthetic dataset: '" + cfg.synth + "'");
}

inline Index resolve_q(const PipelineConfig& cfg, Index n) {
  if (cfg.q_mode == "off") return 0;
  if (cfg.q_mode == "auto") return n > cfg.dense_cutoff ? std::max<Index>(2, n / 3) : 0;
  if (cfg.q_mode == "fixed") {
    if (cfg.q < 2 || cfg.q > n) throw ParameterError("q must lie in [2, N]");
    return cfg.q;
  }
  throw ParameterError("q_mode must be off, auto or fixed");
}

}  // namespace detail

/// bootstrap -> kernel (dense or Nystrom) -> alternating solver -> spectral
/// clustering -> metrics. Artifacts are written to out_dir as soon as each
/// stage completes so partial output survives a downstream failure.
inline RunReport run_pipeline(const PipelineConfig& cfg) {
  namespace fs = std::filesystem;
  auto t0 = std::chrono::steady_clock::now();
  RunReport report;

  const bool writing = !cfg.out_dir.empty();
  if (writing) fs::create_directories(cfg.out_dir);
  auto outfile = [&](const char* name) { return (fs::path(cfg.out_dir) / name).string(); };

  // ingest
  Matrix x;
  std::optional<LabelVector> truth;
  detail::stage("ingest", [&] {
    if (!cfg.synth.empty()) {
      LabeledDataset ds = detail::make_synthetic(cfg);
      x = std::move(ds.x);
      truth = std::move(ds.truth);
    } else if (!cfg.input_path.empty()) {
      LoadedData data = load_csv(cfg.input_path, cfg.labeled);
      x = std::move(data.x);
      truth = std::move(data.truth);
    } else {
      throw InvalidInputError("no input: set input_path or synth");
    }
    return 0;
  });
  const Index n = x.cols();

  // bootstrap
  SelfRepMatrix z_boot = detail::stage("bootstrap", [&] { return lsr_selfrep(x, cfg.gamma_boot); });

  // kernel (dense or Nystrom)
  const Index q = detail::resolve_q(cfg, n);
  KernelMatrix kernel = detail::stage("kernel", [&] {
    if (q == 0) {
      NormalizedAffinity g = normalize_degree(build_affinity(z_boot));
      return learn_kernel(g, cfg.xi);
    }
    NystromKernel nk = nystrom_approx(x, z_boot, q, cfg.xi, RhoPolicy::adaptive(),
                                      cfg.solver.k, cfg.seed);
    report.nystrom_used = true;
    report.q = q;
    report.rho = nk.rho;
    KernelMatrix assembled = assemble_nystrom(nk);
    if (q == n) {
      NormalizedAffinity g = normalize_degree(build_affinity(z_boot));
      KernelMatrix dense = learn_kernel(g, cfg.xi);
      Matrix shifted = dense.mat() + nk.rho * Matrix::Identity(n, n);
      report.nystrom_exact_error = (assembled.mat() - shifted).cwiseAbs().maxCoeff();
      report.nystrom_exact_check = report.nystrom_exact_error <= 1e-8;
    }
    return assembled;
  });

  report.kernel_validation = detail::stage("kernel", [&] { return validate_kernel(kernel); });
  if (writing) {
    std::ofstream(outfile("kernel_validation.json"))
        << nlohmann::json({{"nonnegative", report.kernel_validation.nonnegative},
                           {"symmetric", report.kernel_validation.symmetric},
                           {"positive_semidefinite", report.kernel_validation.positive_semidefinite},
                           {"min_entry", report.kernel_validation.min_entry},
                           {"min_eigenvalue", report.kernel_validation.min_eigenvalue},
                           {"dominance_margin", report.kernel_validation.dominance_margin}})
               .dump(2)
        << '\n';
  }

  // solver
  SolverState state = detail::stage("solver", [&] { return solve_dklm(kernel, cfg.solver); });
  report.iterations = state.iterations;
  report.converged = state.converged;
  if (writing) {
    std::ofstream hist(outfile("objective_history.csv"));
    hist << "iteration,objective,z_delta,c_delta\n";
    for (size_t i = 0; i < state.history.size(); ++i) {
      hist << (i + 1) << ',' << detail::format_double(state.history[i].objective) << ','
           << detail::format_double(state.history[i].z_delta) << ','
           << detail::format_double(state.history[i].c_delta) << '\n';
    }
  }

  // affinity and component count
  SymMatrix affinity = detail::stage("spectral", [&] { return affinity_from_z(state.z); });
  report.components = detail::stage("spectral", [&] {
    return count_components(SymMatrix(state.c.mat()), cfg.component_threshold);
  });
  if (writing) save_matrix(affinity.mat(), outfile("affinity.csv"), true);

  // clustering
  report.labels = detail::stage("spectral", [&] {
    return spectral_cluster(affinity, cfg.solver.k, cfg.seed);
  });
  if (writing) save_labels(report.labels, outfile("labels.csv"));

  // metrics
  if (truth) {
    report.metrics = detail::stage("metrics", [&] { return evaluate(*truth, report.labels); });
  }

  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (writing) {
    std::ofstream(outfile("report.json")) << report.to_json().dump(2) << '\n';
  }
  return report;
}

/// One sweep row: the grid point, its scores or the failure message.
struct SweepRow {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  std::optional<MetricReport> metrics;
  std::string error;
};

/// Cartesian grid over (alpha, beta, gamma); independent runs execute
/// concurrently, each writing under its own subdirectory of out_dir.
inline std::vector<SweepRow> sweep(const PipelineConfig& base,
                                   const std::vector<double>& alphas,
                                   const std::vector<double>& betas,
                                   const std::vector<double>& gammas,
                                   unsigned jobs = 0) {
  if (alphas.empty() || betas.empty() || gammas.empty()) {
    throw ParameterError("sweep: grid must be non-empty");
  }
  struct Point {
    double a, b, g;
    size_t idx;
  };
  std::vector<Point> grid;
  for (double a : alphas) {
    for (double b : betas) {
      for (double g : gammas) grid.push_back({a, b, g, grid.size()});
    }
  }
  std::vector<SweepRow> rows(grid.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
      const Point& p = grid[i];
      SweepRow row;
      row.alpha = p.a;
      row.beta = p.b;
      row.gamma = p.g;
      PipelineConfig cfg = base;
      cfg.solver.alpha = p.a;
      cfg.solver.beta = p.b;
      cfg.solver.gamma = p.g;
      if (!base.out_dir.empty()) {
        cfg.out_dir = (std::filesystem::path(base.out_dir) /
                       ("run_" + std::to_string(p.idx)))
                          .string();
      }
      try {
        RunReport rep = run_pipeline(cfg);
        row.metrics = rep.metrics;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows[p.idx] = std::move(row);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<size_t>(jobs, grid.size()); ++t) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) t.join();
  return rows;
}

/// Sweep table as CSV: alpha, beta, gamma, acc, nmi, purity, error.
inline void save_sweep(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << "alpha,beta,gamma,acc,nmi,purity,error\n";
  for (const SweepRow& r : rows) {
    out << detail::format_double(r.alpha) << ',' << detail::format_double(r.beta) << ','
        << detail::format_double(r.gamma) << ',';
    if (r.metrics) {
      out << detail::format_double(r.metrics->acc) << ','
          << detail::format_double(r.metrics->nmi) << ','
          << detail::format_double(r.metrics->purity) << ',';
    } else {
      out << ",,,";
    }
    out << r.error << '\n';
  }
}

}  // namespace dklm
