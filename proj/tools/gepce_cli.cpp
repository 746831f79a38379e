// gepce: command-line driver for the experiment harness and the BVP study.

#include "gepce/adjoint_bvp.hpp"
#include "gepce/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;
using namespace gepce;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<unsigned> threads;
  std::string format = "csv";
};

void add_output_flags(CLI::App* app, CommonOptions& o) {
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--out", o.out_dir, "Output directory (stdout when omitted)");
  app->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
  app->add_option("--format", o.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Config file contents with the subcommand's experiment kind filled in.
ExperimentConfig load_config(const std::string& path, const std::string& command) {
  nlohmann::json j = path.empty() ? nlohmann::json::object() : nlohmann::json::parse(read_file(path));
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  const std::string fallback = command == "recover" ? "recovery-vs-N" : command;
  if (!j.contains("kind")) j["kind"] = fallback;
  const ExperimentKind kind = parse_kind(j["kind"].get<std::string>());
  const bool ok = command == "recover"
                      ? (kind == ExperimentKind::RecoveryVsN || kind == ExperimentKind::RecoveryVsS)
                      : kind == parse_kind(command);
  if (!ok) throw std::invalid_argument("config kind " + to_string(kind) + " does not match subcommand " + command);
  return parse_config(j.dump());
}

void emit(const Table& table, const CommonOptions& o, const std::string& stem, const std::string& config_json) {
  if (o.out_dir.empty()) {
    if (o.format == "json") table.write_json(std::cout);
    else table.write_csv(std::cout);
    return;
  }
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  std::ofstream out(dir / (stem + "." + o.format), std::ios::binary);
  if (o.format == "json") table.write_json(out);
  else table.write_csv(out);
  std::ofstream cfg(dir / (stem + ".config.json"), std::ios::binary);
  cfg << config_json << '\n';
  if (!out || !cfg) throw std::runtime_error("failed writing to " + o.out_dir);
  std::cerr << "wrote " << (dir / (stem + "." + o.format)).string() << '\n';
}

std::string bvp_config_json(const BvpStudyOptions& b) {
  nlohmann::ordered_json j;
  j["d"] = b.model.d;
  j["n"] = b.n;
  j["N_values"] = b.N_values;
  std::vector<std::string> modes;
  for (Mode m : b.modes) modes.push_back(to_string(m));
  j["modes"] = modes;
  j["seeds"] = b.seeds;
  j["seed"] = b.seed;
  j["cells"] = b.model.cells;
  j["L"] = b.model.L;
  j["load"] = to_string(b.model.load);
  j["qoi"] = to_string(b.model.qoi);
  j["reference_points"] = b.reference_points;
  j["epsilon"] = b.epsilon;
  j["opt_tol"] = b.opt_tol;
  j["max_iters"] = b.max_iters;
  return j.dump(2);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-enhanced l1 recovery of sparse polynomial chaos expansions"};
  app.require_subcommand(1);

  CommonOptions harness_opts;
  std::string harness_command;
  for (const char* name : {"mic-sweep", "recover", "rmse", "diagnose"}) {
    const std::string desc = std::string(name) == "mic-sweep"  ? "Mutual incoherence of phi, phi_tilde and phi_hat"
                             : std::string(name) == "recover"  ? "Recovery probability versus N or s"
                             : std::string(name) == "rmse"     ? "Approximation error of the test functions"
                                                               : "Coherence report for one design";
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", harness_opts.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    add_output_flags(sub, harness_opts);
    sub->callback([&harness_command, name] { harness_command = name; });
  }

  CommonOptions bvp_opts;
  BvpStudyOptions bvp;
  std::vector<std::string> bvp_modes{"standard", "gradient-enhanced"};
  std::string load = to_string(bvp.model.load);
  std::string qoi = to_string(bvp.model.qoi);
  bool bvp_selected = false;
  CLI::App* sub = app.add_subcommand("bvp", "Surrogate moments of the parametric diffusion problem");
  sub->add_option("--d", bvp.model.d, "Number of random parameters")->check(CLI::PositiveNumber);
  sub->add_option("--n", bvp.n, "Total degree of the Legendre basis")->check(CLI::NonNegativeNumber);
  sub->add_option("--N-grid", bvp.N_values, "Sample counts, comma separated")->delimiter(',');
  sub->add_option("--mode", bvp_modes, "Modes, comma separated")->delimiter(',');
  sub->add_option("--seeds", bvp.seeds, "Repetitions per N")->check(CLI::PositiveNumber);
  sub->add_option("--cells", bvp.model.cells, "Mesh cells");
  sub->add_option("--load", load, "cos-sin or unit");
  sub->add_option("--qoi", qoi, "average or midpoint");
  sub->add_option("--reference-points", bvp.reference_points, "Gauss-Legendre nodes per axis for the reference");
  add_output_flags(sub, bvp_opts);
  sub->callback([&bvp_selected] { bvp_selected = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (bvp_selected) {
      bvp.modes.clear();
      for (const auto& m : bvp_modes) bvp.modes.push_back(parse_mode(m));
      bvp.model.load = parse_load(load);
      bvp.model.qoi = parse_qoi(qoi);
      if (bvp_opts.seed) bvp.seed = *bvp_opts.seed;
      if (bvp_opts.threads) bvp.threads = *bvp_opts.threads;
      const Table t = run_bvp_study(bvp);
      emit(t, bvp_opts, "bvp", bvp_config_json(bvp));
      return 0;
    }
    ExperimentConfig config = load_config(harness_opts.config_path, harness_command);
    if (harness_opts.seed) config.seed = *harness_opts.seed;
    if (harness_opts.threads) config.threads = *harness_opts.threads;
    config.validate();
    const Table t = run_experiment(config);
    emit(t, harness_opts, harness_command, config_to_json(config));
  } catch (const std::invalid_argument& e) {
    std::cerr << "gepce: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gepce: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
