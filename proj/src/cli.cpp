#include "dflow/cli.hpp"

#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dflow/campaign.hpp"
#include "dflow/config.hpp"
#include "dflow/flow.hpp"
#include "dflow/lindblad.hpp"
#include "dflow/matrix_io.hpp"
#include "dflow/metrics.hpp"
#include "dflow/models.hpp"

namespace dflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load(const CliConfig& cfg) {
  json j = load_config(cfg.config_path);
  if (!j.is_object()) throw ConfigError("config root must be an object");
  if (cfg.seed_override) apply_seed_override(j, *cfg.seed_override);
  return j;
}

void require_keys(const json& j, std::initializer_list<const char*> known, const std::string& command) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(command + " config: unknown key '" + key + "'");
  }
}

// A config names its input either as {"model": {...}} or {"matrix_file": "path"}; relative paths
// resolve against the config file's directory.
ComplexMatrix input_matrix(const json& j, const CliConfig& cfg, std::optional<ModelSpec>* model_out = nullptr) {
  const bool has_model = j.contains("model");
  const bool has_file = j.contains("matrix_file");
  if (has_model == has_file) throw ConfigError("config needs exactly one of 'model' or 'matrix_file'");
  if (has_model) {
    ModelSpec spec = model_from_json(j.at("model"));
    if (model_out) *model_out = spec;
    return build_model(spec);
  }
  fs::path p = j.at("matrix_file").get<std::string>();
  if (p.is_relative()) p = cfg.config_path.parent_path() / p;
  return read_matrix_file(p);
}

void say(const CliConfig& cfg, const std::string& line) {
  if (!cfg.quiet) std::cout << line << '\n';
}

int worker_count(const CliConfig& cfg) {
  if (cfg.threads) return *cfg.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int cmd_flow(const CliConfig& cfg) {
  const json j = load(cfg);
  require_keys(j, {"model", "matrix_file", "scheme", "flow", "alternating"}, "flow");
  const ComplexMatrix m = input_matrix(j, cfg);
  FlowConfig fc = flow_config_from_json(j.value("flow", json::object()), static_cast<std::size_t>(m.rows()));
  if (j.contains("scheme")) fc.scheme = scheme_from_json(j.at("scheme"));
  const bool alternating = j.value("alternating", false);

  FlowTrajectory traj;
  std::string error;
  try {
    traj = alternating ? alternating_pc_ipc_flow(m, fc) : integrate_flow(m, fc);
  } catch (const FlowError& e) {
    traj = e.trajectory();
    error = std::string(e.kind()) + ": " + e.what();
  }

  fs::create_directories(cfg.output_dir);
  write_trajectory_csv(cfg.output_dir / "trajectory.csv", traj);
  if (traj.final_matrix.size() > 0) write_matrix_json(cfg.output_dir / "final_matrix.json", traj.final_matrix);
  const ConvergenceReport conv = convergence_coefficient(traj, fc.energy_scale);
  json result = {{"scheme", alternating ? std::string("pc_ipc_alternating") : fc.scheme.name()},
                 {"converged", traj.converged},
                 {"stop_reason", to_string(traj.stop_reason)},
                 {"steps", traj.steps_taken},
                 {"rejected_steps", traj.steps_rejected},
                 {"final_l", traj.final_l()},
                 {"final_rod", traj.samples.empty() ? 0.0 : traj.samples.back().rod},
                 {"c_conv_l", conv.c_conv_l},
                 {"c_conv_t", conv.c_conv_t},
                 {"config", j}};
  if (!error.empty()) result["error"] = error;
  write_text_file(cfg.output_dir / "result.json", result.dump(2) + "\n");
  say(cfg, "flow " + result["scheme"].get<std::string>() + ": converged=" + (traj.converged ? "true" : "false") +
               " steps=" + std::to_string(traj.steps_taken) + " l=" + format_double(traj.final_l()) +
               (error.empty() ? "" : " (" + error + ")"));
  return traj.converged ? kOk : kNotConverged;
}

int cmd_campaign(const CliConfig& cfg) {
  const json j = load(cfg);
  const CampaignConfig cc = campaign_from_json(j);
  const CampaignResult r = run_campaign(cc, cfg.output_dir, worker_count(cfg));
  say(cfg, "campaign " + cc.name + ": " + std::to_string(r.rows.size()) + " rows, " + std::to_string(r.error_count) +
               " with errors, config " + r.config_hash.substr(0, 12));
  return kOk;
}

int cmd_spectrum(const CliConfig& cfg) {
  const json j = load(cfg);
  require_keys(j, {"model", "matrix_file", "dissipative_state"}, "spectrum");
  std::optional<ModelSpec> model;
  const ComplexMatrix m = input_matrix(j, cfg, &model);
  const Spectrum s = eigenvalues(m);
  fs::create_directories(cfg.output_dir);
  write_spectrum_csv(cfg.output_dir / "spectrum.csv", s);

  json result = {{"dimension", m.rows()}, {"config", j}};
  if (j.contains("dissipative_state")) {
    const auto& ds = j.at("dissipative_state");
    const double re_tol = ds.value("re_tolerance", 1e-6);
    const double dominance = ds.value("min_dominance", 10.0);
    const auto rep = find_dissipative_state(s, re_tol, dominance);
    result["dissipative_state"] = {{"found", rep.found},
                                   {"re", rep.eigenvalue.real()},
                                   {"im", rep.eigenvalue.imag()},
                                   {"dominance", rep.dominance}};
    if (model) {
      if (const auto* os = std::get_if<OrderedScatteringSpec>(&*model)) {
        try {
          const Complex ref = lambda_sds_reference(*os);
          result["dissipative_state"]["reference_re"] = ref.real();
          result["dissipative_state"]["reference_im"] = ref.imag();
        } catch (const NotApplicable&) {
        }
      }
    }
  }
  write_text_file(cfg.output_dir / "spectrum.json", result.dump(2) + "\n");
  say(cfg, "spectrum: " + std::to_string(s.size()) + " eigenvalues");
  return kOk;
}

int cmd_truncation(const CliConfig& cfg) {
  const json j = load(cfg);
  require_keys(j, {"model", "matrix_file", "schemes", "orders", "lambda", "flow"}, "truncation");
  const ComplexMatrix m = input_matrix(j, cfg);
  const FlowConfig fc = flow_config_from_json(j.value("flow", json::object()), static_cast<std::size_t>(m.rows()));
  if (!j.contains("schemes") || !j.contains("orders")) throw ConfigError("truncation config needs 'schemes' and 'orders'");
  const double lambda = j.value("lambda", 1.0);

  std::string csv = "scheme,n_max,lambda,delta_trunc,converged,steps,final_l,error\n";
  bool all_converged = true;
  for (const auto& sj : j.at("schemes")) {
    const GeneratorScheme scheme = scheme_from_json(sj);
    for (const auto& oj : j.at("orders")) {
      const auto order = oj.get<std::size_t>();
      const TruncationReport rep = truncation_benchmark_matrix(m, scheme, order, lambda, fc);
      all_converged = all_converged && rep.converged;
      csv += rep.scheme + "," + std::to_string(order) + "," + format_double(lambda) + "," +
             format_double(rep.delta_trunc) + "," + (rep.converged ? "1" : "0") + "," +
             std::to_string(rep.trajectory.steps_taken) + "," + format_double(rep.trajectory.final_l()) + "," +
             (rep.error ? "\"" + *rep.error + "\"" : std::string()) + "\n";
      say(cfg, rep.scheme + " o" + std::to_string(order) + ": delta_trunc=" + format_double(rep.delta_trunc));
    }
  }
  write_text_file(cfg.output_dir / "truncation.csv", csv);
  return all_converged ? kOk : kNotConverged;
}

int cmd_lindblad_sample(const CliConfig& cfg) {
  const json j = load(cfg);
  require_keys(j, {"lindblad", "model", "spectrum"}, "lindblad-sample");
  json spec_json;
  if (j.contains("lindblad")) {
    spec_json = j.at("lindblad");
    spec_json["kind"] = "lindblad";
  } else if (j.contains("model")) {
    spec_json = j.at("model");
  } else {
    throw ConfigError("lindblad-sample config needs a 'lindblad' section");
  }
  const ModelSpec spec = model_from_json(spec_json);
  const auto* ls = std::get_if<LindbladSpec>(&spec);
  if (!ls) throw ConfigError("lindblad-sample: model kind must be 'lindblad'");
  const ComplexMatrix L = build_superoperator(*ls);
  fs::create_directories(cfg.output_dir);
  write_matrix_binary(cfg.output_dir / "superoperator.bin", L);
  if (j.value("spectrum", true)) write_spectrum_csv(cfg.output_dir / "spectrum.csv", eigenvalues(L));
  say(cfg, "lindblad N=" + std::to_string(ls->N) + " seed=" + std::to_string(ls->seed) +
               ": superoperator D=" + std::to_string(L.rows()));
  return kOk;
}

int run(const CliConfig& cfg) {
  try {
    if (cfg.threads && *cfg.threads < 1) throw ConfigError("--threads must be >= 1");
    if (cfg.command == "flow") return cmd_flow(cfg);
    if (cfg.command == "campaign") return cmd_campaign(cfg);
    if (cfg.command == "spectrum") return cmd_spectrum(cfg);
    if (cfg.command == "truncation") return cmd_truncation(cfg);
    if (cfg.command == "lindblad-sample") return cmd_lindblad_sample(cfg);
    throw ConfigError("unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    std::cerr << json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}}.dump() << '\n';
  } catch (const json::exception& e) {
    std::cerr << json{{"error", {{"kind", "config_error"}, {"message", e.what()}}}}.dump() << '\n';
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump() << '\n';
  }
  return kError;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Dissipative flow equations: flows, spectra and benchmark campaigns"};
  app.require_subcommand(1);
  CliConfig cfg;
  int threads = 0;
  std::uint64_t seed = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"flow", "Integrate one flow and write its trajectory"},
      {"campaign", "Run a model x scheme x seed campaign"},
      {"spectrum", "Exact eigenvalues of a model or matrix file"},
      {"truncation", "Truncated-flow error for a set of schemes and orders"},
      {"lindblad-sample", "Sample a random Lindbladian superoperator"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", cfg.config_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", cfg.output_dir, "Output directory");
    sub->add_option("--seed", seed, "Override the model seed");
    sub->add_option("--threads", threads, "Worker threads for campaign rows");
    sub->add_flag("--quiet", cfg.quiet, "Suppress the summary line");
    sub->callback([&cfg, sub]() { cfg.command = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--seed")) cfg.seed_override = seed;
    if (sub->count("--threads")) cfg.threads = threads;
  }
  return run(cfg);
}

}  // namespace dflow::cli
