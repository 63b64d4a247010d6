#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phseg/divergence.hpp"
#include "phseg/profile.hpp"
#include "phseg/rng.hpp"

#include "oracles.hpp"

using namespace phseg;

namespace {

Eigen::ArrayXd dist(std::initializer_list<double> values) {
  Eigen::ArrayXd out(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double v : values) out[i++] = v;
  return out;
}

// Random strictly positive distribution.
Eigen::ArrayXd random_dist(Rng& rng, int n) {
  Eigen::ArrayXd out(n);
  for (int i = 0; i < n; ++i) out[i] = rng.uniform() + 1e-4;
  return out / out.sum();
}

}  // namespace

TEST_CASE("one-sided KLD closed-form values") {
  const auto p = dist({0.5, 0.5});
  const auto q = dist({0.25, 0.75});
  // 0.5*ln(2) + 0.5*ln(2/3) = 0.5*ln(4/3)
  CHECK(std::abs(kl(p, q) - 0.14384) < 1e-5);
  CHECK(kl(p, q) == doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-12));
  // 0.25*ln(0.5) + 0.75*ln(1.5): the asymmetry witness
  CHECK(std::abs(kl(q, p) - 0.13081) < 1e-5);
  CHECK(kl(p, p) == 0.0);
}

TEST_CASE("symmetric KLD sums the two sides and is exactly symmetric") {
  const auto p = dist({0.5, 0.5});
  const auto q = dist({0.25, 0.75});
  CHECK(std::abs(sym_kl(p, q) - 0.27465) < 1e-5);
  CHECK(sym_kl(p, p) == 0.0);
  CHECK(sym_kl(p, q) == sym_kl(q, p));  // exact floating equality

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_dist(rng, 30);
    const auto b = random_dist(rng, 30);
    CHECK(sym_kl(a, b) == sym_kl(b, a));
    CHECK(sym_kl(a, b) >= 0.0);
    CHECK(kl(a, b) >= 0.0);
    if ((a != b).any()) CHECK(sym_kl(a, b) > 0.0);  // indiscernibles only at equality
  }
}

TEST_CASE("kl rejects mismatched or non-positive inputs") {
  const auto p = dist({0.5, 0.5});
  const auto q = dist({0.2, 0.3, 0.5});
  CHECK_THROWS_AS(kl(p, q), std::invalid_argument);
  CHECK_THROWS_AS(kl(dist({1.0, 0.0}), p), std::invalid_argument);
}

TEST_CASE("php_distance adds the per-curve divergences") {
  Rng rng(21);
  const Filtration f = Filtration::defaults();
  const GrayImage a = oracle::random_image(rng, 16, 16);
  const GrayImage b = oracle::random_image(rng, 16, 16);
  const PhProfile pa = php(a, f).profile;
  const PhProfile pb = php(b, f).profile;
  CHECK(php_distance(pa, pa) == 0.0);
  CHECK(php_distance(pa, pb) ==
        doctest::Approx(sym_kl(pa.p0, pb.p0) + sym_kl(pa.p1, pb.p1)).epsilon(1e-15));
  CHECK(php_distance(pa, pb) == php_distance(pb, pa));
}

TEST_CASE("php_distance vanishes on flipped inputs end-to-end") {
  Rng rng(8);
  const Filtration f = Filtration::defaults();
  for (int trial = 0; trial < 5; ++trial) {
    const GrayImage img = oracle::random_image(rng, 32, 32);
    const PhProfile p = php(img, f).profile;
    const PhProfile q = php(flip_horizontal(img), f).profile;
    CHECK(php_distance(p, q) == 0.0);
  }
}

TEST_CASE("php_distance rejects mismatched filtrations") {
  Rng rng(4);
  const GrayImage img = oracle::random_image(rng, 8, 8);
  const PhProfile a = php(img, Filtration::defaults()).profile;
  const PhProfile b = php(img, Filtration(std::vector<int>{64, 128, 192})).profile;
  CHECK_THROWS_AS(php_distance(a, b), std::invalid_argument);
}
