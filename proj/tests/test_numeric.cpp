#include "lexground/numeric.hpp"
#include "lexground/rng.hpp"

#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace lexground;

TEST_CASE("l2_normalize on a 3-4-5 vector") {
  const auto n = l2_normalize(Eigen::Vector2d(3, 4));
  CHECK_FALSE(n.zero_norm);
  CHECK(n.values(0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(n.values(1) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("l2_normalize flags the zero vector and leaves it unchanged") {
  const auto n = l2_normalize(Eigen::Vector2d::Zero());
  CHECK(n.zero_norm);
  CHECK(n.values.isZero());
}

TEST_CASE("l2_normalize yields unit norm for random vectors") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXf v(1 + static_cast<int>(rng.below(300)));
    for (auto& x : v) x = static_cast<float>(rng.gaussian() * 100.0);
    CHECK(l2_normalize(v).values.cast<double>().norm() == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("cosine similarity basics") {
  const Eigen::Vector3d u(1, -2, 0.5);
  CHECK(cosine_similarity(u, u) == doctest::Approx(1.0));
  CHECK(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)) == 0.0);
  CHECK(cosine_similarity(Eigen::Vector2d::Zero(), Eigen::Vector2d(1, 1)) == 0.0);
  CHECK_THROWS_AS(cosine_similarity(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3)), DataError);
}

TEST_CASE("cosine similarity matches a long double oracle, is symmetric and scale invariant") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(64));
    Eigen::VectorXf u(d), v(d);
    for (int i = 0; i < d; ++i) {
      u(i) = static_cast<float>(rng.gaussian());
      v(i) = static_cast<float>(rng.gaussian());
    }
    long double dot = 0, nu = 0, nv = 0;
    for (int i = 0; i < d; ++i) {
      dot += static_cast<long double>(u(i)) * v(i);
      nu += static_cast<long double>(u(i)) * u(i);
      nv += static_cast<long double>(v(i)) * v(i);
    }
    const double oracle = static_cast<double>(dot / std::sqrt(nu * nv));
    const double c = cosine_similarity(u, v);
    CHECK(std::abs(c - oracle) < 1e-6);
    CHECK(c == doctest::Approx(cosine_similarity(v, u)).epsilon(1e-12));
    const float alpha = static_cast<float>(0.01 + rng.uniform() * 50);
    CHECK(std::abs(cosine_similarity((alpha * u).eval(), v) - c) < 1e-6);
  }
}

TEST_CASE("masked sharpened softmax closed forms") {
  Mask all(4);
  all.setConstant(true);
  const Eigen::VectorXd uniform = masked_sharpened_softmax(Eigen::Vector4d(3, -1, 7, 0.2), all, 0.0);
  for (double p : uniform) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));

  Mask two(2);
  two << true, true;
  const Eigen::VectorXd hard = masked_sharpened_softmax(Eigen::Vector2d(0.9, 0.1), two, 1e6);
  CHECK(std::abs(hard(0) - 1.0) < 1e-9);
  CHECK(std::abs(hard(1)) < 1e-9);

  Mask partial(3);
  partial << true, false, true;
  const Eigen::VectorXd p = masked_sharpened_softmax(Eigen::Vector3d(1, 2, 3), partial, 1.0);
  const double e2 = std::exp(2.0);
  CHECK(p(0) == doctest::Approx(1.0 / (1.0 + e2)).epsilon(1e-12));
  CHECK(p(1) == 0.0);
  CHECK(p(2) == doctest::Approx(e2 / (1.0 + e2)).epsilon(1e-12));
  CHECK(p(0) == doctest::Approx(0.1192).epsilon(1e-3));
}

TEST_CASE("masked sharpened softmax rejects bad input") {
  Mask none(2);
  none.setConstant(false);
  CHECK_THROWS(masked_sharpened_softmax(Eigen::Vector2d(1, 2), none, 1.0));
  Mask one(1);
  one << true;
  CHECK_THROWS(masked_sharpened_softmax(Eigen::Vector2d(1, 2), one, 1.0));
  Mask both(2);
  both.setConstant(true);
  CHECK_THROWS(masked_sharpened_softmax(Eigen::Vector2d(1, 2), both, -1.0));
}

TEST_CASE("masked sharpened softmax invariants on random inputs") {
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(12));
    Eigen::VectorXd s(n);
    Mask mask(n);
    for (int i = 0; i < n; ++i) {
      s(i) = rng.gaussian() * 3;
      mask(i) = rng.uniform() < 0.6;
    }
    mask(static_cast<int>(rng.below(n))) = true;
    const double sharp = rng.uniform() * 100;
    const Eigen::VectorXd p = masked_sharpened_softmax(s, mask, sharp);
    CHECK(std::abs(p.sum() - 1.0) < 1e-9);
    for (int i = 0; i < n; ++i) {
      CHECK(p(i) >= 0.0);
      if (!mask(i)) CHECK(p(i) == 0.0);
    }
    const Eigen::VectorXd shifted =
        masked_sharpened_softmax((s.array() + rng.gaussian() * 10).matrix(), mask, sharp);
    CHECK((shifted - p).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("entropy is non-increasing in sharpness when the masked argmax is unique") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(8));
    Eigen::VectorXd s(n);
    Mask mask(n);
    for (int i = 0; i < n; ++i) {
      s(i) = rng.uniform();
      mask(i) = true;
    }
    double previous = std::numeric_limits<double>::infinity();
    for (double sharp = 0.0; sharp <= 100.0; sharp += 0.5) {
      const double h = shannon_entropy(masked_sharpened_softmax(s, mask, sharp));
      CHECK(h <= previous + 1e-12);
      previous = h;
    }
  }
}

TEST_CASE("shannon entropy of simple distributions") {
  CHECK(shannon_entropy(Eigen::Vector4d::Constant(0.25)) == doctest::Approx(std::log(4.0)));
  CHECK(shannon_entropy(Eigen::Vector3d(1, 0, 0)) == 0.0);
}

TEST_CASE("identity projection returns the input") {
  const FeatureTable f = testing::gaussian_features(20, 7, 1);
  ProjectionMatrix identity{Eigen::MatrixXd::Identity(7, 7), 0};
  const FeatureTable out = project(f, identity);
  CHECK(out == f);
}

TEST_CASE("random projection is seeded, linear and rejects expansion") {
  const FeatureTable f = testing::gaussian_features(10, 40, 2);
  CHECK(random_projection(f, 8, 77) == random_projection(f, 8, 77));
  CHECK_FALSE(random_projection(f, 8, 77) == random_projection(f, 8, 78));
  CHECK_THROWS_AS(random_projection(f, 41, 1), ConfigError);

  const ProjectionMatrix p = make_projection(40, 8, 5);
  const Eigen::VectorXd x = f.row(0).cast<double>().transpose();
  const Eigen::VectorXd y = f.row(1).cast<double>().transpose();
  CHECK(((p.matrix * (x + y)) - (p.matrix * x + p.matrix * y)).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("random projection 1664 -> 256 preserves squared distances for most pairs") {
  const FeatureTable f = testing::gaussian_features(400, 1664, 8);
  const FeatureTable g = random_projection(f, 256, substream_seed(8, "projection"));
  Rng rng(4);
  int within = 0;
  const int pairs = 1000;
  for (int k = 0; k < pairs; ++k) {
    const auto a = static_cast<Eigen::Index>(rng.below(400));
    auto b = static_cast<Eigen::Index>(rng.below(399));
    if (b >= a) ++b;
    const double before = (f.row(a) - f.row(b)).cast<double>().squaredNorm();
    const double after = (g.row(a) - g.row(b)).cast<double>().squaredNorm();
    if (std::abs(after / before - 1.0) <= 0.3) ++within;
  }
  CHECK(within >= 950);
}

TEST_CASE("substreams are deterministic and distinct") {
  CHECK(substream_seed(1, "projection") == substream_seed(1, "projection"));
  std::set<std::uint64_t> seen;
  for (std::uint64_t root : {0ULL, 1ULL, 2ULL}) {
    for (const char* name : {"projection", "synth/features", "bootstrap/word", "tagger-init"}) {
      for (std::uint64_t i = 0; i < 5; ++i) seen.insert(substream_seed(root, name, i));
    }
  }
  CHECK(seen.size() == 60);
}

TEST_CASE("rng draws stay in range and reproduce") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform());
    const auto k = a.below(7);
    CHECK(k < 7);
    CHECK(k == b.below(7));
  }
  Rng g(1);
  double sum = 0, sq = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = g.gaussian();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}
