#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phseg/bench.hpp"
#include "phseg/metrics.hpp"
#include "phseg/rng.hpp"

#include <nlohmann/json.hpp>

using namespace phseg;

TEST_CASE("precision, recall and F1 from the worked confusion") {
  const Prf r = prf1({.tp = 9, .fp = 1, .fn = 3, .tn = 0});
  CHECK(r.precision == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r.recall == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(std::abs(r.f1 - 0.81818) < 1e-5);
  CHECK(r.warnings.empty());
}

TEST_CASE("perfect classifier scores ones") {
  const Prf r = prf1({.tp = 10, .fp = 0, .fn = 0, .tn = 5});
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);
}

TEST_CASE("degenerate confusions warn and report zero") {
  const Prf r = prf1({.tp = 0, .fp = 2, .fn = 3, .tn = 0});
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK(r.f1 == 0.0);
  CHECK(r.warnings.size() == 1);  // f1 degenerate via zero precision+recall

  const Prf none = prf1({.tp = 0, .fp = 0, .fn = 0, .tn = 4});
  CHECK(none.precision == 0.0);
  CHECK(none.warnings.size() == 3);
}

TEST_CASE("specificity is the true negative rate") {
  CHECK(specificity({.tp = 0, .fp = 0, .fn = 0, .tn = 7}) == 1.0);
  CHECK(specificity({.tp = 0, .fp = 2, .fn = 0, .tn = 8}) == doctest::Approx(0.8));
  // All-tumor predictions on all-normal truth.
  CHECK(specificity({.tp = 0, .fp = 9, .fn = 0, .tn = 0}) == 0.0);
  // No negatives at all: degenerate.
  CHECK(specificity({.tp = 5, .fp = 0, .fn = 1, .tn = 0}) == 0.0);
}

TEST_CASE("F1 lies between precision and recall") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Confusion c{.tp = rng.range(1, 50), .fp = rng.range(0, 50), .fn = rng.range(0, 50),
                      .tn = rng.range(0, 50)};
    const Prf r = prf1(c);
    CHECK(r.f1 >= std::min(r.precision, r.recall) - 1e-12);
    CHECK(r.f1 <= std::max(r.precision, r.recall) + 1e-12);
  }
}

TEST_CASE("confusion assembly is permutation invariant and label driven") {
  TileManifest truth;
  truth.entries.push_back({"a", "", 0, 0, TileLabel::tumor});
  truth.entries.push_back({"b", "", 0, 0, TileLabel::tumor});
  truth.entries.push_back({"c", "", 0, 0, TileLabel::normal});
  truth.entries.push_back({"d", "", 0, 0, std::nullopt});  // unlabeled: ignored

  std::vector<PatchDecision> decisions;
  decisions.push_back({"a", TileLabel::tumor, 0, 0, std::nullopt});
  decisions.push_back({"b", TileLabel::normal, 0, 0, std::nullopt});
  decisions.push_back({"c", TileLabel::tumor, 0, 0, std::nullopt});
  decisions.push_back({"d", TileLabel::tumor, 0, 0, std::nullopt});

  const Confusion c1 = confusion_from(decisions, truth);
  CHECK(c1.tp == 1);
  CHECK(c1.fn == 1);
  CHECK(c1.fp == 1);
  CHECK(c1.tn == 0);
  CHECK(c1.total() == 3);

  std::reverse(decisions.begin(), decisions.end());
  const Confusion c2 = confusion_from(decisions, truth);
  CHECK(c2.tp == c1.tp);
  CHECK(c2.fp == c1.fp);
  CHECK(c2.fn == c1.fn);
  CHECK(c2.tn == c1.tn);
}

TEST_CASE("metrics JSON carries the counts") {
  const auto j = nlohmann::json::parse(metrics_json({.tp = 9, .fp = 1, .fn = 3, .tn = 7}));
  CHECK(j["precision"].get<double>() == doctest::Approx(0.9));
  CHECK(j["counts"]["tn"].get<long>() == 7);
  CHECK(j["specificity"].get<double>() == doctest::Approx(0.875));
}

TEST_CASE("latency summaries: median never exceeds the mean on right-skewed runs") {
  // Synthetic right-skewed samples mimic a latency distribution.
  Rng rng(4);
  std::vector<double> samples;
  for (int i = 0; i < 500; ++i) {
    const double v = -3.0 * std::log(1.0 - rng.uniform());  // exponential
    samples.push_back(1.0 + v);
  }
  const StageStats s = summarize_ms(samples);
  CHECK(s.median_ms <= s.mean_ms);
  CHECK(s.p95_ms >= s.median_ms);

  const StageStats one = summarize_ms({42.0});
  CHECK(one.mean_ms == 42.0);
  CHECK(one.median_ms == 42.0);
  CHECK(one.p95_ms == 42.0);

  const StageStats two = summarize_ms({1.0, 3.0});
  CHECK(two.median_ms == 2.0);
}
