// phseg: persistent-homology tile classification pipelines.
//
// Exit codes: 0 success, 1 usage error, 2 data/processing error.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "phseg/activation.hpp"
#include "phseg/bench.hpp"
#include "phseg/config.hpp"
#include "phseg/exemplar_set.hpp"
#include "phseg/image_io.hpp"
#include "phseg/metrics.hpp"
#include "phseg/parallel.hpp"
#include "phseg/profile.hpp"
#include "phseg/segment.hpp"
#include "phseg/select.hpp"
#include "phseg/synth.hpp"

namespace fs = std::filesystem;
using namespace phseg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct CommonOpts {
  std::string config_path;
  int workers = -1;             // -1: take the config value
  bool literal_complement = false;

  Config resolve() const {
    Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
    if (workers >= 0) cfg.workers = workers;
    if (literal_complement) cfg.literal_complement = true;
    return cfg;
  }
};

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (text.empty() || text.back() != '\n') out << "\n";
}

// ---- php ----

struct PhpArgs {
  std::string manifest_path;
  std::vector<std::string> tiles;
  std::string out_dir;
};

int run_php(const CommonOpts& common, const PhpArgs& args) {
  const Config cfg = common.resolve();
  std::vector<std::pair<std::string, std::string>> work;  // (id, path)
  if (!args.manifest_path.empty()) {
    const TileManifest manifest = load_manifest(args.manifest_path);
    for (const auto& e : manifest.entries) work.emplace_back(e.id, e.path);
  }
  for (const auto& t : args.tiles) work.emplace_back(stem_of(t), t);
  if (work.empty()) {
    std::cerr << "php: no input tiles (use --manifest or positional files)\n";
    return kExitUsage;
  }
  fs::create_directories(args.out_dir);

  std::vector<std::string> errors(work.size());
  parallel_for(work.size(), cfg.workers, [&](std::size_t i) {
    try {
      const RgbImage tile = load_rgb(work[i].second);
      const GrayImage hema = hematoxylin_channel(tile, cfg.stain, cfg.c_max);
      const PhpResult result = php(hema, cfg.filtration, cfg.mode());
      const fs::path out = fs::path(args.out_dir) / (work[i].first + ".php.csv");
      save_php_csv(out.string(), result);
    } catch (const std::exception& ex) {
      errors[i] = work[i].first + ": " + ex.what();
    }
  });

  int failed = 0;
  for (const auto& e : errors)
    if (!e.empty()) {
      std::cerr << "php: " << e << "\n";
      ++failed;
    }
  std::cout << "wrote " << (work.size() - failed) << " profile CSVs to " << args.out_dir << "\n";
  if (failed > 0) {
    std::cerr << "php: " << failed << " of " << work.size() << " tiles failed\n";
    return kExitData;
  }
  return kExitOk;
}

// ---- exemplars ----

struct ExemplarArgs {
  std::string manifest_path;
  std::string method;  // scores|kmeans|random
  int per_class = 128;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string scores_path;
  std::string activations_dir;
  std::string out_path;
  std::string profiles_dir;
};

ScoreTable scores_from_activations(const TileManifest& manifest, const std::string& dir,
                                   int workers) {
  std::vector<const TileEntry*> labeled;
  for (const auto& e : manifest.entries)
    if (e.label) labeled.push_back(&e);
  ScoreTable table;
  table.rows.resize(labeled.size());
  std::vector<std::string> errors(labeled.size());
  parallel_for(labeled.size(), workers, [&](std::size_t i) {
    const auto& e = *labeled[i];
    try {
      const auto path = fs::path(dir) / (e.id + ".actv");
      const ActivationTensor t = load_activation(path.string());
      table.rows[i] = {e.id, *e.label, patch_score(flatten_activation(t))};
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  });
  for (const auto& err : errors)
    if (!err.empty()) throw std::runtime_error(err);
  return table;
}

int run_exemplars(const CommonOpts& common, const ExemplarArgs& args) {
  const Config cfg = common.resolve();
  const std::uint64_t seed = args.seed_set ? args.seed : cfg.seed;
  const TileManifest manifest = load_manifest(args.manifest_path);

  std::vector<std::string> tumor_ids, normal_ids;
  if (args.method == "scores") {
    ScoreTable table;
    if (!args.scores_path.empty())
      table = load_scores(args.scores_path);
    else if (!args.activations_dir.empty())
      table = scores_from_activations(manifest, args.activations_dir, cfg.workers);
    else
      throw std::runtime_error("method 'scores' needs --scores or --activations");
    tumor_ids = iqr_bin_select(table, TileLabel::tumor, args.per_class);
    normal_ids = iqr_bin_select(table, TileLabel::normal, args.per_class);
  } else if (args.method == "kmeans") {
    for (const TileLabel cls : {TileLabel::tumor, TileLabel::normal}) {
      const auto ids = manifest.ids(cls);
      if (static_cast<int>(ids.size()) < args.per_class)
        throw std::runtime_error("class '" + std::string(to_string(cls)) + "' has " +
                                 std::to_string(ids.size()) + " tiles, need >= " +
                                 std::to_string(args.per_class));
      std::vector<RgbImage> patches;
      patches.reserve(ids.size());
      for (const auto& id : ids) patches.push_back(load_rgb(manifest.find(id)->path));
      const auto picks = kmeans_exemplars(patches, args.per_class, seed);
      auto& out = cls == TileLabel::tumor ? tumor_ids : normal_ids;
      for (const auto i : picks) out.push_back(ids[i]);
    }
  } else if (args.method == "random") {
    tumor_ids = random_exemplars(manifest.ids(TileLabel::tumor), args.per_class, seed);
    normal_ids = random_exemplars(manifest.ids(TileLabel::normal), args.per_class, seed + 1);
  } else {
    std::cerr << "exemplars: unknown method '" << args.method << "'\n";
    return kExitUsage;
  }

  ExemplarBuildOptions opt;
  opt.filtration = cfg.filtration;
  opt.stain = cfg.stain;
  opt.mode = cfg.mode();
  opt.c_max = cfg.c_max;
  opt.method = args.method;
  opt.seed = seed;
  opt.workers = cfg.workers;
  if (!args.profiles_dir.empty()) opt.profiles_dir = args.profiles_dir;

  const ExemplarSet set = build_exemplar_set(manifest, tumor_ids, normal_ids, opt);
  save_exemplar_set(set, args.out_path);
  std::cout << "exemplar set: " << set.tumor.size() << " tumor + " << set.normal.size()
            << " normal -> " << args.out_path << "\n";
  return kExitOk;
}

// ---- train-accurate ----

struct TrainArgs {
  std::string manifest_path;
  std::string features_path;
  std::string php_dir;
  std::string out_php;
  std::string out_ext;
};

int run_train_accurate(const CommonOpts& common, const TrainArgs& args) {
  const Config cfg = common.resolve();
  const TileManifest manifest = load_manifest(args.manifest_path);

  std::vector<const TileEntry*> labeled;
  for (const auto& e : manifest.entries)
    if (e.label) labeled.push_back(&e);
  if (labeled.empty()) throw std::runtime_error("train-accurate: manifest has no labeled tiles");

  // O1 features: concatenated (p0 || p1) per tile, from CSVs when provided.
  const int dim = cfg.filtration.feature_length();
  Eigen::MatrixXd x_php(labeled.size(), dim);
  Eigen::VectorXd y(labeled.size());
  std::vector<std::string> errors(labeled.size());
  parallel_for(labeled.size(), cfg.workers, [&](std::size_t i) {
    const auto& e = *labeled[i];
    try {
      PhProfile profile;
      if (!args.php_dir.empty()) {
        const auto path = fs::path(args.php_dir) / (e.id + ".php.csv");
        profile = load_php_csv(path.string()).profile;
        if (profile.filtration != cfg.filtration)
          throw std::runtime_error("profile filtration differs from config");
      } else {
        const RgbImage tile = load_rgb(e.path);
        profile = php(hematoxylin_channel(tile, cfg.stain, cfg.c_max), cfg.filtration,
                      cfg.mode())
                      .profile;
      }
      x_php.row(static_cast<Eigen::Index>(i)) = profile.feature_vector();
      y[static_cast<Eigen::Index>(i)] = *e.label == TileLabel::tumor ? 1.0 : 0.0;
    } catch (const std::exception& ex) {
      errors[i] = "tile " + e.id + ": " + ex.what();
    }
  });
  for (const auto& err : errors)
    if (!err.empty()) throw std::runtime_error(err);

  // O2 features from the external table, matched by tile id.
  const FeatureTable features = load_features(args.features_path);
  Eigen::MatrixXd x_ext(labeled.size(), features.X.cols());
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const Eigen::Index row = features.find(labeled[i]->id);
    if (row < 0)
      throw std::runtime_error("no external feature row for tile " + labeled[i]->id);
    x_ext.row(static_cast<Eigen::Index>(i)) = features.X.row(row);
  }

  const auto o1 = RegressionForest::train(x_php, y, cfg.forest, cfg.workers);
  ForestConfig ext_cfg = cfg.forest;
  ext_cfg.seed = cfg.forest.seed + 1;  // independent ensemble per feature family
  const auto o2 = RegressionForest::train(x_ext, y, ext_cfg, cfg.workers);
  o1.save(args.out_php);
  o2.save(args.out_ext);
  std::cout << "trained O1 (" << dim << "-dim PHP) -> " << args.out_php << "\n"
            << "trained O2 (" << features.X.cols() << "-dim external) -> " << args.out_ext
            << "\n";
  return kExitOk;
}

// ---- segment ----

struct SegmentArgs {
  std::string manifest_path;
  std::string pipeline;  // fast|accurate
  std::string exemplars_path;
  std::string forest_php_path;
  std::string forest_ext_path;
  std::string features_path;
  std::string out_dir;
  double c = -1.0;  // <0: take config
  int k = -1;
};

int run_segment(const CommonOpts& common, const SegmentArgs& args) {
  const Config cfg = common.resolve();
  const TileManifest manifest = load_manifest(args.manifest_path);
  fs::create_directories(args.out_dir);

  Pipeline pipeline = FastPipeline{};
  if (args.pipeline == "fast") {
    if (args.exemplars_path.empty()) {
      std::cerr << "segment: --pipeline fast needs --exemplars\n";
      return kExitUsage;
    }
    FastPipeline p;
    p.stain = cfg.stain;
    p.c_max = cfg.c_max;
    p.mode = cfg.mode();
    p.exemplars = load_exemplar_set(args.exemplars_path);
    p.fast = cfg.fast;
    if (args.c > 0) p.fast.c = args.c;
    if (args.k > 0) p.fast.k = args.k;
    pipeline = std::move(p);
  } else if (args.pipeline == "accurate") {
    if (args.forest_php_path.empty() || args.forest_ext_path.empty() ||
        args.features_path.empty()) {
      std::cerr << "segment: --pipeline accurate needs --forest-php, --forest-ext and "
                   "--features\n";
      return kExitUsage;
    }
    AccuratePipeline p;
    p.stain = cfg.stain;
    p.c_max = cfg.c_max;
    p.mode = cfg.mode();
    p.filtration = cfg.filtration;
    p.forest_php = RegressionForest::load(args.forest_php_path);
    p.forest_external = RegressionForest::load(args.forest_ext_path);
    p.external = load_features(args.features_path);
    pipeline = std::move(p);
  } else {
    std::cerr << "segment: unknown pipeline '" << args.pipeline << "'\n";
    return kExitUsage;
  }

  const SegmentResult result = segment(manifest, pipeline, cfg.workers);
  save_decisions(result.decisions, manifest, (fs::path(args.out_dir) / "decisions.csv").string());
  save_label_grid(result.map, (fs::path(args.out_dir) / "label_grid.txt").string());
  if (!result.decisions.empty())
    save_overlay_png(manifest, result.decisions,
                     (fs::path(args.out_dir) / "overlay.png").string());

  long tumor_count = 0;
  for (const auto& d : result.decisions)
    if (d.label == TileLabel::tumor) ++tumor_count;
  std::cout << "classified " << result.decisions.size() << " tiles (" << tumor_count
            << " tumor) -> " << args.out_dir << "\n";
  for (const auto& f : result.failures) std::cerr << "segment: " << f << "\n";
  if (!result.failures.empty()) {
    std::cerr << "segment: " << result.failures.size() << " tiles failed\n";
    return kExitData;
  }
  return kExitOk;
}

// ---- eval ----

int run_eval(const std::string& decisions_path, const std::string& truth_path,
             const std::string& out_path) {
  const auto decisions = load_decisions(decisions_path);
  const TileManifest truth = load_manifest(truth_path);
  const Confusion c = confusion_from(decisions, truth);
  const std::string json = metrics_json(c);
  std::cout << json << "\n";
  if (!out_path.empty()) write_text(out_path, json);
  return kExitOk;
}

// ---- bench ----

struct BenchArgs {
  std::string manifest_path;
  std::string pipeline = "fast";
  std::string exemplars_path;
  int repetitions = 3;
  int warmup = 5;
  std::string out_path;
};

int run_bench(const CommonOpts& common, const BenchArgs& args) {
  const Config cfg = common.resolve();
  if (args.pipeline != "fast") {
    std::cerr << "bench: only the fast pipeline is benchmarked\n";
    return kExitUsage;
  }
  const TileManifest manifest = load_manifest(args.manifest_path);
  FastPipeline p;
  p.stain = cfg.stain;
  p.c_max = cfg.c_max;
  p.mode = cfg.mode();
  p.exemplars = load_exemplar_set(args.exemplars_path);
  p.fast = cfg.fast;
  const BenchReport report = bench_fast(manifest, p, args.repetitions, args.warmup);
  const std::string json = report.to_json();
  std::cout << json << "\n";
  if (!args.out_path.empty()) write_text(args.out_path, json);
  return kExitOk;
}

// ---- synth ----

struct SynthArgs {
  std::string out_dir;
  int per_class = 50;
  std::uint64_t seed = 1;
  int tile_size = 256;
};

int run_synth(const SynthArgs& args) {
  const TileManifest manifest =
      synth_corpus({.per_class = args.per_class, .seed = args.seed, .tile_size = args.tile_size},
                   args.out_dir);
  std::cout << "wrote " << manifest.entries.size() << " tiles and manifest to " << args.out_dir
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistent-homology tumor/normal tile classification"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--config", common.config_path, "JSON config file")
      ->envname("PHSEG_CONFIG")
      ->check(CLI::ExistingFile);
  app.add_option("--workers", common.workers, "worker threads (0 = all cores)");
  app.add_flag("--literal-complement", common.literal_complement,
               "count raw complement components for beta1");

  PhpArgs php_args;
  auto* cmd_php = app.add_subcommand("php", "compute PHP CSVs for tiles");
  cmd_php->add_option("--manifest", php_args.manifest_path)->check(CLI::ExistingFile);
  cmd_php->add_option("tiles", php_args.tiles, "tile image files");
  cmd_php->add_option("--out", php_args.out_dir, "output directory")->required();

  ExemplarArgs ex_args;
  auto* cmd_ex = app.add_subcommand("exemplars", "select exemplars and persist their PHPs");
  cmd_ex->add_option("--manifest", ex_args.manifest_path)->required()->check(CLI::ExistingFile);
  cmd_ex->add_option("--method", ex_args.method, "scores|kmeans|random")->required();
  cmd_ex->add_option("--per-class", ex_args.per_class, "exemplars per class (Q)")->required();
  cmd_ex->add_option("--seed", ex_args.seed)->each([&](const std::string&) {
    ex_args.seed_set = true;
  });
  cmd_ex->add_option("--scores", ex_args.scores_path, "patch score CSV")
      ->check(CLI::ExistingFile);
  cmd_ex->add_option("--activations", ex_args.activations_dir,
                     "directory of <tile_id>.actv tensors");
  cmd_ex->add_option("--out", ex_args.out_path, "exemplar manifest JSON")->required();
  cmd_ex->add_option("--profiles-dir", ex_args.profiles_dir, "per-profile CSV directory");

  TrainArgs train_args;
  auto* cmd_train = app.add_subcommand("train-accurate", "train the two regression forests");
  cmd_train->add_option("--manifest", train_args.manifest_path)
      ->required()
      ->check(CLI::ExistingFile);
  cmd_train->add_option("--features", train_args.features_path, "external feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_train->add_option("--php-dir", train_args.php_dir, "precomputed PHP CSV directory");
  cmd_train->add_option("--out-php", train_args.out_php, "O1 forest JSON")->required();
  cmd_train->add_option("--out-ext", train_args.out_ext, "O2 forest JSON")->required();

  SegmentArgs seg_args;
  auto* cmd_seg = app.add_subcommand("segment", "classify every tile in a manifest");
  cmd_seg->add_option("--manifest", seg_args.manifest_path)->required()->check(CLI::ExistingFile);
  cmd_seg->add_option("--pipeline", seg_args.pipeline, "fast|accurate")->required();
  cmd_seg->add_option("--exemplars", seg_args.exemplars_path)->check(CLI::ExistingFile);
  cmd_seg->add_option("--forest-php", seg_args.forest_php_path)->check(CLI::ExistingFile);
  cmd_seg->add_option("--forest-ext", seg_args.forest_ext_path)->check(CLI::ExistingFile);
  cmd_seg->add_option("--features", seg_args.features_path)->check(CLI::ExistingFile);
  cmd_seg->add_option("--out-dir", seg_args.out_dir)->required();
  cmd_seg->add_option("--c", seg_args.c, "similarity constant override");
  cmd_seg->add_option("--k", seg_args.k, "neighbor count override");

  std::string eval_decisions, eval_truth, eval_out;
  auto* cmd_eval = app.add_subcommand("eval", "score decisions against ground truth");
  cmd_eval->add_option("--decisions", eval_decisions)->required()->check(CLI::ExistingFile);
  cmd_eval->add_option("--truth", eval_truth)->required()->check(CLI::ExistingFile);
  cmd_eval->add_option("--out", eval_out, "metrics JSON path");

  BenchArgs bench_args;
  auto* cmd_bench = app.add_subcommand("bench", "per-patch latency report");
  cmd_bench->add_option("--manifest", bench_args.manifest_path)
      ->required()
      ->check(CLI::ExistingFile);
  cmd_bench->add_option("--pipeline", bench_args.pipeline, "fast");
  cmd_bench->add_option("--exemplars", bench_args.exemplars_path)
      ->required()
      ->check(CLI::ExistingFile);
  cmd_bench->add_option("--repetitions", bench_args.repetitions)->check(CLI::PositiveNumber);
  cmd_bench->add_option("--warmup", bench_args.warmup);
  cmd_bench->add_option("--out", bench_args.out_path, "report JSON path");

  SynthArgs synth_args;
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic labeled corpus");
  cmd_synth->add_option("--out", synth_args.out_dir)->required();
  cmd_synth->add_option("--per-class", synth_args.per_class)->check(CLI::PositiveNumber);
  cmd_synth->add_option("--seed", synth_args.seed);
  cmd_synth->add_option("--tile-size", synth_args.tile_size)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_php->parsed()) return run_php(common, php_args);
    if (cmd_ex->parsed()) return run_exemplars(common, ex_args);
    if (cmd_train->parsed()) return run_train_accurate(common, train_args);
    if (cmd_seg->parsed()) return run_segment(common, seg_args);
    if (cmd_eval->parsed()) return run_eval(eval_decisions, eval_truth, eval_out);
    if (cmd_bench->parsed()) return run_bench(common, bench_args);
    if (cmd_synth->parsed()) return run_synth(synth_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
