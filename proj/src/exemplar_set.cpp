#include "phseg/exemplar_set.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "phseg/image_io.hpp"
#include "phseg/parallel.hpp"

namespace phseg {

void ExemplarSet::validate() const {
  if (tumor.empty()) throw std::runtime_error("exemplar set has no tumor profiles");
  if (normal.empty()) throw std::runtime_error("exemplar set has no normal profiles");
  for (const auto* side : {&tumor, &normal})
    for (const auto& e : *side)
      if (e.profile.filtration != filtration)
        throw std::runtime_error("exemplar " + e.id + " uses a different filtration");
}

namespace {

std::vector<ExemplarEntry> profiles_for(const TileManifest& manifest,
                                        const std::vector<std::string>& ids,
                                        const ExemplarBuildOptions& opt) {
  std::vector<const TileEntry*> tiles(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    tiles[i] = manifest.find(ids[i]);
    if (!tiles[i]) throw std::runtime_error("tile id not in manifest: " + ids[i]);
  }

  std::vector<ExemplarEntry> out(ids.size());
  std::vector<PhpResult> results(ids.size());
  std::vector<std::string> errors(ids.size());
  parallel_for(ids.size(), opt.workers, [&](std::size_t i) {
    try {
      const RgbImage tile = load_rgb(tiles[i]->path);
      const GrayImage hema = hematoxylin_channel(tile, opt.stain, opt.c_max);
      results[i] = php(hema, opt.filtration, opt.mode);
    } catch (const std::exception& ex) {
      errors[i] = "tile " + ids[i] + " (" + tiles[i]->path + "): " + ex.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);

  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (opt.profiles_dir) {
      const auto csv =
          std::filesystem::path(*opt.profiles_dir) / (ids[i] + ".php.csv");
      save_php_csv(csv.string(), results[i]);
    }
    out[i] = ExemplarEntry{ids[i], std::move(results[i].profile)};
  }
  return out;
}

nlohmann::json profile_to_json(const PhProfile& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < p.p0.size(); ++i) arr.push_back(p.p0[i]);
  for (Eigen::Index i = 0; i < p.p1.size(); ++i) arr.push_back(p.p1[i]);
  return arr;
}

PhProfile profile_from_json(const nlohmann::json& arr, const Filtration& filtration,
                            const std::string& id) {
  const int half = filtration.levels();
  if (!arr.is_array() || static_cast<int>(arr.size()) != 2 * half)
    throw std::runtime_error("exemplar " + id + ": php array must have length " +
                             std::to_string(2 * half));
  Eigen::ArrayXd p0(half), p1(half);
  for (int i = 0; i < half; ++i) {
    p0[i] = arr[i].get<double>();
    p1[i] = arr[half + i].get<double>();
  }
  if ((p0 <= 0.0).any() || (p1 <= 0.0).any())
    throw std::runtime_error("exemplar " + id + ": profile entries must be positive");
  for (const auto* p : {&p0, &p1})
    if (std::abs(p->sum() - 1.0) > 1e-6)
      throw std::runtime_error("exemplar " + id + ": profile does not sum to 1");
  return PhProfile{filtration, std::move(p0), std::move(p1)};
}

}  // namespace

ExemplarSet build_exemplar_set(const TileManifest& manifest,
                               const std::vector<std::string>& tumor_ids,
                               const std::vector<std::string>& normal_ids,
                               const ExemplarBuildOptions& opt) {
  if (tumor_ids.empty()) throw std::runtime_error("no tumor exemplar ids given");
  if (normal_ids.empty()) throw std::runtime_error("no normal exemplar ids given");
  if (opt.profiles_dir) std::filesystem::create_directories(*opt.profiles_dir);

  ExemplarSet set;
  set.method = opt.method;
  set.seed = opt.seed;
  set.filtration = opt.filtration;
  set.tumor = profiles_for(manifest, tumor_ids, opt);
  set.normal = profiles_for(manifest, normal_ids, opt);
  set.validate();
  return set;
}

void save_exemplar_set(const ExemplarSet& set, const std::string& path) {
  set.validate();
  nlohmann::json j;
  j["method"] = set.method;
  j["seed"] = set.seed;
  j["filtration"] = set.filtration.thresholds();
  for (const char* key : {"tumor", "normal"}) {
    const auto& side = std::string(key) == "tumor" ? set.tumor : set.normal;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : side) arr.push_back({{"id", e.id}, {"php", profile_to_json(e.profile)}});
    j[key] = std::move(arr);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write exemplar set: " + path);
  out << j.dump(2) << "\n";
}

ExemplarSet load_exemplar_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open exemplar set: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("exemplar JSON parse error in " + path + ": " + e.what());
  }
  try {
    ExemplarSet set;
    set.method = j.at("method").get<std::string>();
    set.seed = j.at("seed").get<std::uint64_t>();
    set.filtration = Filtration(j.at("filtration").get<std::vector<int>>());
    for (const char* key : {"tumor", "normal"}) {
      auto& side = std::string(key) == "tumor" ? set.tumor : set.normal;
      for (const auto& e : j.at(key)) {
        side.push_back(ExemplarEntry{
            e.at("id").get<std::string>(),
            profile_from_json(e.at("php"), set.filtration, e.at("id").get<std::string>())});
      }
    }
    set.validate();
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed exemplar set " + path + ": " + e.what());
  }
}

}  // namespace phseg
