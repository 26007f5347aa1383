// Command-line front end: cluster, synth, kernel, eval and sweep
// subcommands over the dklm library.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dklm.hpp"

namespace {

struct DataFlags {
  std::string input;
  bool labeled = false;
  std::string synth;
  dklm::Index n_per_group = 500;
  double noise_sd = 0.08;
  std::vector<double> radii{1.0, 2.0, 3.0};
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--input", f.input, "CSV input, one row per point");
  cmd->add_flag("--labeled", f.labeled, "treat the final CSV column as labels");
  cmd->add_option("--synth", f.synth, "synthetic dataset: two_moons, three_rings, syd4");
  cmd->add_option("--n", f.n_per_group, "points per moon/ring for synthetic data");
  cmd->add_option("--noise", f.noise_sd, "noise standard deviation for synthetic data");
  cmd->add_option("--radii", f.radii, "three ring radii")->expected(3);
}

struct SolveFlags {
  double gamma_boot = 1.0;
  double xi = 0.1;
  double alpha = 2.0;
  double beta = 10.0;
  double gamma = 1.0;
  dklm::Index k = 2;
  int max_iters = 300;
  double tol = 1e-6;
  std::string q = "auto";
  std::uint64_t seed = 0;
  double threshold = 1e-3;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--gamma-boot", f.gamma_boot, "bootstrap ridge weight");
  cmd->add_option("--xi", f.xi, "kernel dominance margin in (0,1)");
  cmd->add_option("--alpha", f.alpha, "local-structure weight");
  cmd->add_option("--beta", f.beta, "relaxation weight");
  cmd->add_option("--gamma", f.gamma, "block-diagonal weight");
  cmd->add_option("--k", f.k, "number of clusters");
  cmd->add_option("--max-iters", f.max_iters, "solver iteration cap");
  cmd->add_option("--tol", f.tol, "solver convergence tolerance");
  cmd->add_option("--q", f.q, "Nystrom samples: off, auto, or a count");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--threshold", f.threshold, "component-count edge threshold");
}

dklm::PipelineConfig build_config(const DataFlags& d, const SolveFlags& s,
                                  const std::string& out_dir) {
  dklm::PipelineConfig cfg;
  cfg.input_path = d.input;
  cfg.labeled = d.labeled;
  cfg.synth = d.synth;
  cfg.n_per_group = d.n_per_group;
  cfg.noise_sd = d.noise_sd;
  std::copy_n(d.radii.begin(), 3, cfg.radii.begin());
  cfg.gamma_boot = s.gamma_boot;
  cfg.xi = s.xi;
  cfg.solver.alpha = s.alpha;
  cfg.solver.beta = s.beta;
  cfg.solver.gamma = s.gamma;
  cfg.solver.k = s.k;
  cfg.solver.max_iters = s.max_iters;
  cfg.solver.tol = s.tol;
  if (s.q == "off" || s.q == "auto") {
    cfg.q_mode = s.q;
  } else {
    cfg.q_mode = "fixed";
    cfg.q = std::stol(s.q);
  }
  cfg.seed = s.seed;
  cfg.out_dir = out_dir;
  cfg.component_threshold = s.threshold;
  return cfg;
}

// Values from a JSON config file take precedence over flags.
void apply_config_file(dklm::PipelineConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dklm::IoError("cannot open config file: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.contains("input")) cfg.input_path = j["input"].get<std::string>();
  if (j.contains("labeled")) cfg.labeled = j["labeled"].get<bool>();
  if (j.contains("synth")) cfg.synth = j["synth"].get<std::string>();
  if (j.contains("n")) cfg.n_per_group = j["n"].get<dklm::Index>();
  if (j.contains("noise")) cfg.noise_sd = j["noise"].get<double>();
  if (j.contains("radii")) {
    auto r = j["radii"].get<std::vector<double>>();
    if (r.size() != 3) throw dklm::ParameterError("config radii must have 3 values");
    std::copy_n(r.begin(), 3, cfg.radii.begin());
  }
  if (j.contains("gamma_boot")) cfg.gamma_boot = j["gamma_boot"].get<double>();
  if (j.contains("xi")) cfg.xi = j["xi"].get<double>();
  if (j.contains("alpha")) cfg.solver.alpha = j["alpha"].get<double>();
  if (j.contains("beta")) cfg.solver.beta = j["beta"].get<double>();
  if (j.contains("gamma")) cfg.solver.gamma = j["gamma"].get<double>();
  if (j.contains("k")) cfg.solver.k = j["k"].get<dklm::Index>();
  if (j.contains("max_iters")) cfg.solver.max_iters = j["max_iters"].get<int>();
  if (j.contains("tol")) cfg.solver.tol = j["tol"].get<double>();
  if (j.contains("q")) {
    if (j["q"].is_string()) {
      cfg.q_mode = j["q"].get<std::string>();
    } else {
      cfg.q_mode = "fixed";
      cfg.q = j["q"].get<dklm::Index>();
    }
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  if (j.contains("threshold")) cfg.component_threshold = j["threshold"].get<double>();
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  size_t start = 0;
  while (start <= csv.size()) {
    size_t comma = csv.find(',', start);
    std::string tok = csv.substr(start, comma == std::string::npos ? std::string::npos
                                                                   : comma - start);
    if (!tok.empty()) out.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dklm: data-driven kernel subspace clustering"};
  app.require_subcommand(1);

  DataFlags data;
  SolveFlags solve;
  std::string out_dir = "dklm_out";
  std::string config_path;

  auto* cluster = app.add_subcommand("cluster", "run the full clustering pipeline");
  add_data_flags(cluster, data);
  add_solve_flags(cluster, solve);
  cluster->add_option("--out", out_dir, "output directory");
  cluster->add_option("--config", config_path, "JSON config; overrides flags");

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset as CSV");
  DataFlags synth_data;
  std::uint64_t synth_seed = 0;
  std::string synth_out = "data.csv";
  add_data_flags(synth, synth_data);
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--out", synth_out, "output CSV path");

  auto* kernel_cmd = app.add_subcommand("kernel", "emit the learned kernel and its validation report");
  DataFlags kdata;
  SolveFlags ksolve;
  std::string kernel_out = "kernel_out";
  add_data_flags(kernel_cmd, kdata);
  add_solve_flags(kernel_cmd, ksolve);
  kernel_cmd->add_option("--out", kernel_out, "output directory");

  auto* eval_cmd = app.add_subcommand("eval", "score predicted labels against ground truth");
  std::string truth_path, pred_path;
  eval_cmd->add_option("--truth", truth_path, "ground-truth label CSV")->required();
  eval_cmd->add_option("--pred", pred_path, "predicted label CSV")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "grid sweep over alpha, beta, gamma");
  DataFlags sdata;
  SolveFlags ssolve;
  std::string sweep_out = "sweep_out";
  std::string alphas = "2", betas = "10", gammas = "1";
  unsigned jobs = 0;
  add_data_flags(sweep_cmd, sdata);
  add_solve_flags(sweep_cmd, ssolve);
  sweep_cmd->add_option("--alphas", alphas, "comma-separated alpha grid");
  sweep_cmd->add_option("--betas", betas, "comma-separated beta grid");
  sweep_cmd->add_option("--gammas", gammas, "comma-separated gamma grid");
  sweep_cmd->add_option("--jobs", jobs, "concurrent runs (0 = hardware)");
  sweep_cmd->add_option("--out", sweep_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cluster->parsed()) {
      dklm::PipelineConfig cfg = build_config(data, solve, out_dir);
      if (!config_path.empty()) apply_config_file(cfg, config_path);
      dklm::RunReport report = dklm::run_pipeline(cfg);
      std::cout << report.to_json().dump(2) << '\n';
    } else if (synth->parsed()) {
      dklm::PipelineConfig cfg;
      cfg.synth = synth_data.synth;
      cfg.n_per_group = synth_data.n_per_group;
      cfg.noise_sd = synth_data.noise_sd;
      std::copy_n(synth_data.radii.begin(), 3, cfg.radii.begin());
      cfg.seed = synth_seed;
      dklm::LabeledDataset ds = dklm::detail::make_synthetic(cfg);
      dklm::save_csv(ds.x, synth_out, &ds.truth);
      std::cout << "wrote " << ds.x.cols() << " points (" << ds.x.rows()
                << " dims) to " << synth_out << '\n';
    } else if (kernel_cmd->parsed()) {
      dklm::PipelineConfig cfg = build_config(kdata, ksolve, kernel_out);
      std::filesystem::create_directories(kernel_out);
      dklm::Matrix x;
      if (!cfg.synth.empty()) {
        x = dklm::detail::make_synthetic(cfg).x;
      } else {
        x = dklm::load_csv(cfg.input_path, cfg.labeled).x;
      }
      dklm::SelfRepMatrix zb = dklm::lsr_selfrep(x, cfg.gamma_boot);
      dklm::NormalizedAffinity g = dklm::normalize_degree(dklm::build_affinity(zb));
      dklm::KernelMatrix kernel = dklm::learn_kernel(g, cfg.xi);
      dklm::ValidationReport v = dklm::validate_kernel(kernel);
      dklm::save_matrix(kernel.mat(),
                        (std::filesystem::path(kernel_out) / "kernel.csv").string(), true);
      nlohmann::json j = {{"nonnegative", v.nonnegative},
                          {"symmetric", v.symmetric},
                          {"positive_semidefinite", v.positive_semidefinite},
                          {"min_entry", v.min_entry},
                          {"min_eigenvalue", v.min_eigenvalue},
                          {"dominance_margin", v.dominance_margin}};
      std::ofstream((std::filesystem::path(kernel_out) / "validation.json").string())
          << j.dump(2) << '\n';
      std::cout << j.dump(2) << '\n';
    } else if (eval_cmd->parsed()) {
      dklm::LabelVector truth = dklm::load_labels(truth_path);
      dklm::LabelVector pred = dklm::load_labels(pred_path);
      dklm::MetricReport m = dklm::evaluate(truth, pred);
      std::cout << nlohmann::json({{"acc", m.acc}, {"nmi", m.nmi}, {"purity", m.purity}}).dump(2)
                << '\n';
    } else if (sweep_cmd->parsed()) {
      dklm::PipelineConfig cfg = build_config(sdata, ssolve, sweep_out);
      std::filesystem::create_directories(sweep_out);
      auto rows = dklm::sweep(cfg, parse_grid(alphas), parse_grid(betas),
                              parse_grid(gammas), jobs);
      std::string table = (std::filesystem::path(sweep_out) / "sweep.csv").string();
      dklm::save_sweep(rows, table);
      std::cout << "wrote " << rows.size() << " rows to " << table << '\n';
    }
  } catch (const dklm::PipelineError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
