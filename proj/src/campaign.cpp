#include "dflow/campaign.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <omp.h>
#include <openssl/evp.h>

#include "dflow/matrix_io.hpp"

namespace dflow {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest computation failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[k]);
    hex += buf;
  }
  return hex;
}

namespace {

std::vector<nlohmann::json> expand_grid(const nlohmann::json& model) {
  std::vector<nlohmann::json> out{nlohmann::json::object()};
  for (const auto& [key, value] : model.items()) {
    std::vector<nlohmann::json> next;
    if (value.is_array()) {
      for (const auto& base : out) {
        for (const auto& choice : value) {
          nlohmann::json m = base;
          m[key] = choice;
          next.push_back(std::move(m));
        }
      }
    } else {
      for (auto base : out) {
        base[key] = value;
        next.push_back(std::move(base));
      }
    }
    out = std::move(next);
  }
  return out;
}

bool has_seed(const ModelSpec& m) {
  return std::visit([](const auto& s) { return requires { s.seed; }; }, m);
}

}  // namespace

CampaignConfig campaign_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("campaign config must be an object");
  static const std::set<std::string> known = {"name",  "mode", "model", "models", "schemes", "seeds",
                                              "flow",  "truncation", "write_trajectories"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("campaign config: unknown key '" + key + "'");
  }
  CampaignConfig cfg;
  cfg.source = j;
  try {
    cfg.name = j.value("name", cfg.name);
    const std::string mode = j.value("mode", std::string("flow"));
    if (mode == "flow") {
      cfg.mode = CampaignMode::flow;
    } else if (mode == "spectrum") {
      cfg.mode = CampaignMode::spectrum;
    } else {
      throw ConfigError("campaign mode must be 'flow' or 'spectrum', got '" + mode + "'");
    }

    std::vector<nlohmann::json> grids;
    if (j.contains("model")) grids.push_back(j.at("model"));
    if (j.contains("models")) {
      for (const auto& m : j.at("models")) grids.push_back(m);
    }
    for (const auto& g : grids) {
      if (!g.is_object()) throw ConfigError("campaign model entries must be objects");
      for (const auto& inst : expand_grid(g)) cfg.models.push_back(model_from_json(inst));
    }
    if (cfg.models.empty()) throw ConfigError("campaign: empty model grid");

    if (cfg.mode == CampaignMode::flow) {
      if (!j.contains("schemes") || !j.at("schemes").is_array() || j.at("schemes").empty()) {
        throw ConfigError("campaign: 'schemes' must be a non-empty array");
      }
      for (const auto& s : j.at("schemes")) cfg.schemes.push_back(scheme_from_json(s));
    }

    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      if (s.is_number_integer()) {
        cfg.seed_count = s.get<std::size_t>();
      } else if (s.is_object()) {
        cfg.base_seed = s.value("base", std::uint64_t{0});
        cfg.seed_count = s.value("count", std::size_t{1});
      } else {
        throw ConfigError("campaign: 'seeds' must be a count or {\"base\", \"count\"}");
      }
    }
    if (cfg.seed_count == 0) throw ConfigError("campaign: seed count must be >= 1");

    const std::size_t dim0 = model_dimension(cfg.models.front());
    cfg.flow = flow_config_from_json(j.value("flow", nlohmann::json::object()), dim0);
    if (cfg.flow.truncation) throw ConfigError("campaign: set truncation orders under 'truncation', not 'flow'");

    if (j.contains("truncation")) {
      const auto& t = j.at("truncation");
      for (const auto& o : t.at("orders")) cfg.truncation_orders.push_back(o.get<std::size_t>());
      cfg.lambda = t.value("lambda", 1.0);
      if (cfg.truncation_orders.empty()) throw ConfigError("campaign: truncation.orders must not be empty");
    }
    cfg.write_trajectories = j.value("write_trajectories", true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("campaign config: ") + e.what());
  }
  return cfg;
}

namespace {

struct RowTask {
  std::size_t model_index;
  std::size_t scheme_index;
  std::uint64_t seed;
  std::optional<std::size_t> n_max;
};

std::string pad(std::size_t k, int width) {
  std::string s = std::to_string(k);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

std::vector<std::string> param_keys(const CampaignConfig& cfg) {
  std::set<std::string> keys;
  for (const auto& m : cfg.models) {
    const nlohmann::json mj = model_to_json(m);
    for (const auto& [key, value] : mj.items()) {
      if (key != "kind" && key != "seed") keys.insert(key);
    }
  }
  return {keys.begin(), keys.end()};
}

std::string fmt_opt(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

}  // namespace

std::string campaign_csv(const CampaignConfig& cfg, const CampaignResult& result) {
  const auto keys = param_keys(cfg);
  std::string out = "model";
  for (const auto& k : keys) out += "," + k;
  out += ",scheme,seed,converged,c_conv_l,c_conv_t,delta_trunc,n_max,lambda,steps,final_l,trajectory_file,error\n";
  for (const auto& r : result.rows) {
    const auto mj = model_to_json(r.model);
    out += model_kind(r.model);
    for (const auto& k : keys) out += "," + (mj.contains(k) ? csv_escape(json_scalar(mj.at(k))) : std::string());
    out += "," + r.scheme + "," + std::to_string(r.seed) + "," + (r.converged ? "1" : "0") + "," +
           format_double(r.convergence.c_conv_l) + "," + format_double(r.convergence.c_conv_t) + "," +
           fmt_opt(r.delta_trunc) + "," + (r.n_max ? std::to_string(*r.n_max) : std::string()) + "," +
           format_double(r.lambda) + "," + std::to_string(r.steps) + "," + format_double(r.final_l) + "," +
           csv_escape(r.trajectory_file) + "," + csv_escape(r.error) + "\n";
  }
  return out;
}

std::string campaign_summary_csv(const CampaignConfig& cfg, const CampaignResult& result) {
  struct Acc {
    const CampaignRow* first = nullptr;
    std::size_t count = 0, converged = 0, delta_count = 0;
    double c_l = 0.0, c_t = 0.0, delta = 0.0;
  };
  std::map<std::tuple<std::size_t, std::string, long long>, Acc> groups;
  for (const auto& r : result.rows) {
    auto& a = groups[{r.model_index, r.scheme, r.n_max ? static_cast<long long>(*r.n_max) : -1LL}];
    if (!a.first) a.first = &r;
    ++a.count;
    a.converged += r.converged ? 1 : 0;
    a.c_l += r.convergence.c_conv_l;
    a.c_t += r.convergence.c_conv_t;
    if (r.delta_trunc && std::isfinite(*r.delta_trunc)) {
      a.delta += *r.delta_trunc;
      ++a.delta_count;
    }
  }
  const auto keys = param_keys(cfg);
  std::string out = "model";
  for (const auto& k : keys) out += "," + k;
  out += ",scheme,n_max,lambda,samples,converged_fraction,mean_c_conv_l,mean_c_conv_t,mean_delta_trunc\n";
  for (const auto& [key, a] : groups) {
    const auto mj = model_to_json(a.first->model);
    out += model_kind(a.first->model);
    for (const auto& k : keys) out += "," + (mj.contains(k) ? csv_escape(json_scalar(mj.at(k))) : std::string());
    const double n = static_cast<double>(a.count);
    out += "," + a.first->scheme + "," + (a.first->n_max ? std::to_string(*a.first->n_max) : std::string()) + "," +
           format_double(a.first->lambda) + "," + std::to_string(a.count) + "," +
           format_double(static_cast<double>(a.converged) / n) + "," + format_double(a.c_l / n) + "," +
           format_double(a.c_t / n) + "," +
           (a.delta_count ? format_double(a.delta / static_cast<double>(a.delta_count)) : std::string()) + "\n";
  }
  return out;
}

CampaignResult run_campaign(const CampaignConfig& cfg, const fs::path& out_dir, int threads) {
  if (cfg.models.empty()) throw ConfigError("campaign: empty model grid");
  fs::create_directories(out_dir);

  std::vector<RowTask> tasks;
  for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
    const std::size_t seeds = has_seed(cfg.models[mi]) ? cfg.seed_count : 1;
    for (std::size_t si = 0; si < seeds; ++si) {
      const std::uint64_t seed = cfg.base_seed + si;
      if (cfg.mode == CampaignMode::spectrum) {
        tasks.push_back({mi, 0, seed, std::nullopt});
        continue;
      }
      for (std::size_t sc = 0; sc < cfg.schemes.size(); ++sc) {
        if (cfg.truncation_orders.empty()) {
          tasks.push_back({mi, sc, seed, std::nullopt});
        } else {
          for (auto o : cfg.truncation_orders) tasks.push_back({mi, sc, seed, o});
        }
      }
    }
  }

  CampaignResult result;
  result.rows.resize(tasks.size());
  const int width = static_cast<int>(std::to_string(tasks.size()).size());
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const RowTask& task = tasks[t];
    CampaignRow& row = result.rows[t];
    row.model_index = task.model_index;
    row.model = with_seed(cfg.models[task.model_index], task.seed);
    row.seed = has_seed(row.model) ? task.seed : 0;
    row.n_max = task.n_max;
    row.lambda = task.n_max ? cfg.lambda : 1.0;
    try {
      const ComplexMatrix m = build_model(row.model);
      if (cfg.mode == CampaignMode::spectrum) {
        row.scheme = "exact";
        row.trajectory_file = "spectra/row" + pad(t, width) + "_s" + std::to_string(row.seed) + ".csv";
        write_spectrum_csv(out_dir / row.trajectory_file, eigenvalues(m));
        row.converged = true;
        continue;
      }
      const GeneratorScheme& scheme = cfg.schemes[task.scheme_index];
      row.scheme = scheme.name();
      FlowTrajectory traj;
      if (task.n_max) {
        if (static_cast<std::size_t>(m.rows()) <= *task.n_max) throw InvalidInput("truncation order must be < D");
        auto rep = truncation_benchmark_matrix(m, scheme, *task.n_max, cfg.lambda, cfg.flow);
        row.delta_trunc = rep.delta_trunc;
        if (rep.error) row.error = *rep.error;
        traj = std::move(rep.trajectory);
      } else {
        FlowConfig fc = cfg.flow;
        fc.scheme = scheme;
        try {
          traj = integrate_flow(m, fc);
        } catch (const FlowError& e) {
          traj = e.trajectory();
          row.error = std::string(e.kind()) + ": " + e.what();
        }
      }
      row.converged = traj.converged;
      row.steps = traj.steps_taken;
      row.final_l = traj.final_l();
      row.convergence = convergence_coefficient(traj, cfg.flow.energy_scale);
      if (cfg.write_trajectories) {
        row.trajectory_file = "trajectories/row" + pad(t, width) + "_" + row.scheme + "_s" + std::to_string(row.seed) +
                              (task.n_max ? "_o" + std::to_string(*task.n_max) : std::string()) + ".csv";
        write_trajectory_csv(out_dir / row.trajectory_file, traj);
      }
    } catch (const Error& e) {
      row.error = std::string(e.kind()) + ": " + e.what();
    } catch (const std::exception& e) {
      row.error = std::string("error: ") + e.what();
    }
  }

  for (const auto& r : result.rows) {
    if (!r.error.empty()) ++result.error_count;
    if (!r.trajectory_file.empty()) result.artifacts.push_back(r.trajectory_file);
  }
  write_text_file(out_dir / "campaign.csv", campaign_csv(cfg, result));
  write_text_file(out_dir / "campaign_summary.csv", campaign_summary_csv(cfg, result));
  result.artifacts.insert(result.artifacts.begin(), {"campaign.csv", "campaign_summary.csv"});
  result.config_hash = sha256_hex(cfg.source.dump());

  nlohmann::json manifest = {{"name", cfg.name},
                             {"config_hash", result.config_hash},
                             {"config", cfg.source},
                             {"base_seed", cfg.base_seed},
                             {"rows", result.rows.size()},
                             {"errors", result.error_count},
                             {"artifacts", result.artifacts}};
  write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  result.artifacts.push_back("manifest.json");
  return result;
}

}  // namespace dflow
