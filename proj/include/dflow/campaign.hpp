#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dflow/flow.hpp"
#include "dflow/metrics.hpp"
#include "dflow/models.hpp"

namespace dflow {

enum class CampaignMode { flow, spectrum };

// A campaign is a model grid (array-valued model fields expand into a Cartesian product) crossed
// with a list of schemes, a seed range and, optionally, truncation orders.
struct CampaignConfig {
  std::string name = "campaign";
  CampaignMode mode = CampaignMode::flow;
  std::vector<ModelSpec> models;
  std::vector<GeneratorScheme> schemes;
  std::uint64_t base_seed = 0;
  std::size_t seed_count = 1;
  FlowConfig flow;
  std::vector<std::size_t> truncation_orders;  // empty: untruncated flows
  double lambda = 1.0;
  bool write_trajectories = true;
  nlohmann::json source;  // the parsed config, hashed into the manifest
};

CampaignConfig campaign_from_json(const nlohmann::json& j);

struct CampaignRow {
  std::size_t model_index = 0;
  ModelSpec model;
  std::string scheme;
  std::uint64_t seed = 0;
  bool converged = false;
  ConvergenceReport convergence;
  std::optional<double> delta_trunc;
  std::optional<std::size_t> n_max;
  double lambda = 1.0;
  std::size_t steps = 0;
  double final_l = 0.0;
  std::string trajectory_file;
  std::string error;
};

struct CampaignResult {
  std::vector<CampaignRow> rows;
  std::vector<std::string> artifacts;  // paths relative to the output directory
  std::string config_hash;
  std::size_t error_count = 0;
};

// Runs every row (rows in parallel when threads > 1) and writes campaign.csv, campaign_summary.csv,
// per-row trajectory CSVs and manifest.json into out_dir.
CampaignResult run_campaign(const CampaignConfig& cfg, const std::filesystem::path& out_dir, int threads = 0);

std::string campaign_csv(const CampaignConfig& cfg, const CampaignResult& result);
std::string campaign_summary_csv(const CampaignConfig& cfg, const CampaignResult& result);

std::string sha256_hex(const std::string& data);

}  // namespace dflow
