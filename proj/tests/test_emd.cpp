#include "lexground/emd.hpp"
#include "lexground/errors.hpp"
#include "lexground/rng.hpp"
#include "lexground/similarity.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>

using namespace lexground;

namespace {

Eigen::MatrixXd random_cost(Rng& rng, Eigen::Index m, Eigen::Index n) {
  Eigen::MatrixXd c(m, n);
  for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = rng.uniform() * 10.0;
  return c;
}

void check_feasible(const TransportPlan& plan, const TransportProblem& p) {
  CHECK(plan.flow.minCoeff() >= -1e-12);
  CHECK((plan.flow.rowwise().sum() - p.weights_a).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((plan.flow.colwise().sum().transpose() - p.weights_b).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs((plan.flow.array() * p.cost.array()).sum() - plan.objective) < 1e-9);
}

SignatureSample sample_of(const Eigen::MatrixXd& items) { return {"d", Modality::image, items}; }

}  // namespace

TEST_CASE("trivial transport problems") {
  const TransportPlan single = solve_emd({Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Constant(1, 1, 2.5)});
  CHECK(single.objective == 2.5);

  Rng rng(1);
  Eigen::MatrixXd c = random_cost(rng, 4, 4);
  c.diagonal().setZero();
  const Eigen::VectorXd w = Eigen::Vector4d(0.1, 0.2, 0.3, 0.4);
  CHECK(solve_emd({w, w, c}).objective == 0.0);
}

TEST_CASE("objective equals brute-force enumeration at quarter granularity") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng.below(4), n = 1 + rng.below(4);
    const auto rows = testing::random_quarters(rng, m, 4);
    const auto cols = testing::random_quarters(rng, n, 4);
    const TransportProblem p{testing::quarters_to_weights(rows), testing::quarters_to_weights(cols),
                             random_cost(rng, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n))};
    const TransportPlan plan = solve_emd(p);
    CHECK(std::abs(plan.objective - testing::brute_force_transport(rows, cols, p.cost)) < 1e-7);
    check_feasible(plan, p);
  }
}

TEST_CASE("objective equals the closed form on the line") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = 1 + static_cast<Eigen::Index>(rng.below(50));
    const auto n = 1 + static_cast<Eigen::Index>(rng.below(50));
    Eigen::VectorXd x(m), y(n), a(m), b(n);
    for (auto& v : x) v = rng.gaussian();
    for (auto& v : y) v = rng.gaussian() + 0.5;
    for (auto& v : a) v = rng.uniform() + 0.01;
    for (auto& v : b) v = rng.uniform() + 0.01;
    a /= a.sum();
    b /= b.sum();
    const TransportProblem p{a, b, euclidean_cost(x, y)};
    const TransportPlan plan = solve_emd(p);

    // W1 on the real line: integral of |F_a - F_b|.
    std::vector<std::pair<double, double>> events;
    for (Eigen::Index i = 0; i < m; ++i) events.emplace_back(x(i), a(i));
    for (Eigen::Index j = 0; j < n; ++j) events.emplace_back(y(j), -b(j));
    std::sort(events.begin(), events.end());
    double cdf = 0, w1 = 0;
    for (std::size_t k = 0; k + 1 < events.size(); ++k) {
      cdf += events[k].second;
      w1 += std::abs(cdf) * (events[k + 1].first - events[k].first);
    }
    CHECK(std::abs(plan.objective - w1) < 1e-9);
    check_feasible(plan, p);
  }
}

TEST_CASE("objective is invariant to permutation and scales with the cost") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = 2 + static_cast<Eigen::Index>(rng.below(10));
    const auto n = 2 + static_cast<Eigen::Index>(rng.below(10));
    Eigen::VectorXd a(m), b(n);
    for (auto& v : a) v = rng.uniform();
    for (auto& v : b) v = rng.uniform();
    b *= a.sum() / b.sum();
    const TransportProblem p{a, b, random_cost(rng, m, n)};
    const double base = solve_emd(p).objective;

    std::vector<int> pr(static_cast<std::size_t>(m)), pc(static_cast<std::size_t>(n));
    std::iota(pr.begin(), pr.end(), 0);
    std::iota(pc.begin(), pc.end(), 0);
    rng.shuffle(pr.begin(), pr.end());
    rng.shuffle(pc.begin(), pc.end());
    TransportProblem q{Eigen::VectorXd(m), Eigen::VectorXd(n), Eigen::MatrixXd(m, n)};
    for (Eigen::Index i = 0; i < m; ++i) {
      q.weights_a(i) = a(pr[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < n; ++j) q.cost(i, j) = p.cost(pr[static_cast<std::size_t>(i)], pc[static_cast<std::size_t>(j)]);
    }
    for (Eigen::Index j = 0; j < n; ++j) q.weights_b(j) = b(pc[static_cast<std::size_t>(j)]);
    CHECK(std::abs(solve_emd(q).objective - base) < 1e-9);

    const double alpha = 0.1 + rng.uniform() * 20;
    TransportProblem scaled = p;
    scaled.cost *= alpha;
    CHECK(std::abs(solve_emd(scaled).objective - alpha * base) < 1e-9 * std::max(1.0, alpha * base));
  }
}

TEST_CASE("degenerate and tied problems terminate at the optimum") {
  // All-equal costs and weights make every vertex optimal and every pivot degenerate.
  const TransportProblem flat{Eigen::VectorXd::Constant(6, 1.0 / 6), Eigen::VectorXd::Constant(6, 1.0 / 6),
                              Eigen::MatrixXd::Constant(6, 6, 1.0)};
  CHECK(solve_emd(flat).objective == doctest::Approx(1.0).epsilon(1e-12));

  const TransportProblem zero_mass{Eigen::Vector3d(0.5, 0, 0.5), Eigen::Vector2d(0, 1), Eigen::MatrixXd::Ones(3, 2)};
  CHECK(solve_emd(zero_mass).objective == doctest::Approx(1.0));
}

TEST_CASE("invalid transport problems are rejected") {
  CHECK_THROWS_AS(solve_emd({Eigen::VectorXd(), Eigen::VectorXd::Ones(1), Eigen::MatrixXd(0, 1)}), DataError);
  CHECK_THROWS_AS(solve_emd({Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(2, 1)}), DataError);
  CHECK_THROWS_AS(solve_emd({Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(2, 1)}), DataError);
  CHECK_THROWS_AS(solve_emd({-Eigen::VectorXd::Ones(1), -Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1)}), DataError);
  CHECK_THROWS_AS(solve_emd({Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), -Eigen::MatrixXd::Ones(1, 1)}), DataError);
  Eigen::MatrixXd nan = Eigen::MatrixXd::Ones(1, 1);
  nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_emd({Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), nan}), DataError);
}

TEST_CASE("movers distance: self, point masses and explicit construction") {
  Rng rng(5);
  const Eigen::MatrixXd items = Eigen::MatrixXd::Random(4, 3);
  CHECK(movers_distance(sample_of(items), sample_of(items)) == 0.0);

  Eigen::MatrixXd p(1, 2), q(1, 2);
  p << 0, 0;
  q << 3, 0;
  CHECK(movers_distance(sample_of(p), sample_of(q)) == doctest::Approx(3.0).epsilon(1e-12));

  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a(4, 5), b(4, 5);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a.data()[i] = rng.gaussian();
      b.data()[i] = rng.gaussian();
    }
    Eigen::MatrixXd cost(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) cost(i, j) = (a.row(i) - b.row(j)).norm();
    }
    const double direct = solve_emd({Eigen::VectorXd::Constant(4, 0.25), Eigen::VectorXd::Constant(4, 0.25), cost}).objective;
    const double d = movers_distance(sample_of(a), sample_of(b));
    CHECK(std::abs(d - direct) < 1e-12);
    CHECK(d >= 0.0);
    CHECK(d <= cost.maxCoeff() + 1e-12);
  }
}

TEST_CASE("movers distance is a metric on samples") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto b = 1 + static_cast<Eigen::Index>(rng.below(10));
    const auto dim = 1 + static_cast<Eigen::Index>(rng.below(6));
    auto draw = [&] {
      Eigen::MatrixXd m(b, dim);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.gaussian();
      return sample_of(m);
    };
    const SignatureSample x = draw(), y = draw(), z = draw();
    const double xy = movers_distance(x, y), yx = movers_distance(y, x);
    CHECK(std::abs(xy - yx) < 1e-9);
    CHECK(movers_distance(x, x) == 0.0);
    CHECK(xy <= movers_distance(x, z) + movers_distance(z, y) + 1e-6);
  }
}
