#include "phseg/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace phseg {

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_text(text, path);
}

Config Config::from_json_text(const std::string& text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config parse error in " + origin + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object: " + origin);

  static const std::set<std::string> known = {
      "thresholds", "stain_path", "c_max",       "c",    "k",
      "n_trees",    "mtry",       "min_leaf",    "seed", "forest_seed",
      "literal_complement",       "workers"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key))
      throw std::runtime_error("config " + origin + ": unknown key '" + key + "'");
  }

  Config cfg;
  try {
    if (j.contains("thresholds")) cfg.filtration = Filtration(j["thresholds"].get<std::vector<int>>());
    if (j.contains("stain_path")) cfg.stain_path = j["stain_path"].get<std::string>();
    if (!cfg.stain_path.empty()) cfg.stain = StainMatrix::load_json(cfg.stain_path);
    if (j.contains("c_max")) cfg.c_max = j["c_max"].get<double>();
    if (j.contains("c")) cfg.fast.c = j["c"].get<double>();
    if (j.contains("k")) cfg.fast.k = j["k"].get<int>();
    if (j.contains("n_trees")) cfg.forest.n_trees = j["n_trees"].get<int>();
    if (j.contains("mtry")) cfg.forest.mtry = j["mtry"].get<int>();
    if (j.contains("min_leaf")) cfg.forest.min_leaf = j["min_leaf"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("forest_seed"))
      cfg.forest.seed = j["forest_seed"].get<std::uint64_t>();
    else
      cfg.forest.seed = cfg.seed;
    if (j.contains("literal_complement")) cfg.literal_complement = j["literal_complement"].get<bool>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config " + origin + ": " + e.what());
  }
  if (cfg.c_max <= 0.0) throw std::runtime_error("config " + origin + ": c_max must be positive");
  if (!(cfg.fast.c > 0.0)) throw std::runtime_error("config " + origin + ": c must be positive");
  if (cfg.fast.k < 1) throw std::runtime_error("config " + origin + ": k must be >= 1");
  if (cfg.workers < 0) throw std::runtime_error("config " + origin + ": workers must be >= 0");
  return cfg;
}

void Config::save(const std::string& path) const {
  nlohmann::json j;
  j["thresholds"] = filtration.thresholds();
  if (!stain_path.empty()) j["stain_path"] = stain_path;
  j["c_max"] = c_max;
  j["c"] = fast.c;
  j["k"] = fast.k;
  j["n_trees"] = forest.n_trees;
  j["mtry"] = forest.mtry;
  j["min_leaf"] = forest.min_leaf;
  j["seed"] = seed;
  j["forest_seed"] = forest.seed;
  j["literal_complement"] = literal_complement;
  j["workers"] = workers;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace phseg
