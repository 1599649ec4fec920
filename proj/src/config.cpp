#include "dflow/config.hpp"

#include "dflow/errors.hpp"
#include "dflow/matrix_io.hpp"

namespace dflow {

nlohmann::json load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  try {
    return nlohmann::json::parse(text, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

void apply_seed_override(nlohmann::json& config, std::uint64_t seed) {
  if (!config.is_object()) throw ConfigError("config root must be an object");
  if (config.contains("seeds")) {
    auto& s = config["seeds"];
    if (s.is_object()) {
      s["base"] = seed;
    } else {
      config["seeds"] = {{"base", seed}, {"count", s}};
    }
    return;
  }
  auto patch = [seed](nlohmann::json& model) {
    if (model.is_object() && model.value("kind", std::string()) != "single_mode" &&
        model.value("kind", std::string()) != "ordered_scattering") {
      model["seed"] = seed;
    }
  };
  if (config.contains("model")) patch(config["model"]);
  if (config.contains("models")) {
    for (auto& m : config["models"]) patch(m);
  }
  if (config.contains("lindblad")) config["lindblad"]["seed"] = seed;
}

}  // namespace dflow
