#include "lexground/adam.hpp"
#include "lexground/errors.hpp"
#include "lexground/model_io.hpp"
#include "lexground/rng.hpp"
#include "lexground/tagger.hpp"

#include "support.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace lexground;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.gaussian();
  return m;
}

Eigen::MatrixXd random_targets(Rng& rng, Eigen::Index rows, Eigen::Index cols, TaggerMode mode) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    t(r, static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(cols)))) = 1.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (rng.uniform() < 0.3) t(r, c) = 1.0;
    }
    if (mode == TaggerMode::softmax) t.row(r) /= t.row(r).sum();
  }
  return t;
}

// Two words whose images sit on opposite sides of the first axis.
Corpus separable_corpus(std::size_t docs, Rng& rng, FeatureTable& features) {
  Corpus c;
  std::vector<std::string> ids;
  RowMatrixXf m(static_cast<Eigen::Index>(docs * 2), 3);
  for (std::size_t d = 0; d < docs; ++d) {
    const bool alpha = d % 2 == 0;
    Document doc{"d" + std::to_string(d), {alpha ? "alpha" : "beta"}, {}};
    for (int k = 0; k < 2; ++k) {
      const auto row = static_cast<Eigen::Index>(ids.size());
      ids.push_back("img" + std::to_string(row));
      m(row, 0) = static_cast<float>((alpha ? 2.0 : -2.0) + 0.3 * rng.gaussian());
      m(row, 1) = static_cast<float>(rng.gaussian());
      m(row, 2) = static_cast<float>(rng.gaussian());
      doc.image_ids.push_back(ids.back());
    }
    c.documents.push_back(doc);
  }
  features = FeatureTable(ids, m);
  return c;
}

double ap(const Ranking& r, const std::set<std::string>& positives) {
  double hits = 0, total = 0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (positives.count(r[k].image_id)) total += ++hits / static_cast<double>(k + 1);
  }
  return 100.0 * total / hits;
}

}  // namespace

TEST_CASE("tagger targets are word-type indicators") {
  Corpus c{{Document{"a", {"w1", "w2"}, {"i"}}, Document{"b", {"w1", "w1", "w1", "w1", "w1", "w1", "w1", "w1", "w1", "w1"}, {"j"}},
            Document{"c", {"w1"}, {"k"}}, Document{"d", {"w3", "w4"}, {"l"}}}};
  const Vocabulary v = build_vocabulary(c, 1);
  REQUIRE(v.size() == 4);
  const Eigen::MatrixXd soft(build_tagger_targets(c, v, TaggerMode::softmax).targets);
  const Eigen::MatrixXd multi(build_tagger_targets(c, v, TaggerMode::multinomial).targets);
  CHECK(soft.row(0) == Eigen::RowVector4d(0.5, 0.5, 0, 0));
  CHECK(multi.row(0) == Eigen::RowVector4d(1, 1, 0, 0));
  CHECK(multi.row(1) == multi.row(2));
  CHECK(soft.row(1) == soft.row(2));
}

TEST_CASE("tagger targets match a set-based recount") {
  const Corpus c = testing::random_corpus(80, 15, 40, 3);
  const Vocabulary v = build_vocabulary(c, 4);
  for (TaggerMode mode : {TaggerMode::softmax, TaggerMode::multinomial}) {
    const TaggerTargets t = build_tagger_targets(c, v, mode);
    const Eigen::MatrixXd dense(t.targets);
    std::size_t row = 0;
    for (std::size_t d = 0; d < c.documents.size(); ++d) {
      std::set<std::size_t> types;
      for (const auto& tok : c.documents[d].tokens) {
        if (auto w = v.find(tok)) types.insert(*w);
      }
      if (types.empty()) continue;
      REQUIRE(t.documents[row] == d);
      for (std::size_t w = 0; w < v.size(); ++w) {
        const double expected = types.count(w) ? (mode == TaggerMode::softmax ? 1.0 / static_cast<double>(types.size()) : 1.0) : 0.0;
        CHECK(dense(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(w)) == doctest::Approx(expected));
      }
      if (mode == TaggerMode::softmax) CHECK(dense.row(static_cast<Eigen::Index>(row)).sum() == doctest::Approx(1.0));
      ++row;
    }
    CHECK(row == t.documents.size());
  }
}

TEST_CASE("adam: zero gradient, first step and descent") {
  AdamState s;
  Eigen::VectorXd p = Eigen::VectorXd::Constant(3, 2.0);
  adam_update(p, Eigen::VectorXd::Zero(3), s);
  CHECK(p == Eigen::VectorXd::Constant(3, 2.0));
  CHECK(s.step == 1);

  AdamState first;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  adam_update(x, Eigen::VectorXd::Ones(1), first);
  CHECK(x(0) == doctest::Approx(-0.001 / (1.0 + 1e-8)).epsilon(1e-12));

  AdamState q;
  q.learning_rate = 0.1;
  Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
  double previous = 1.0;
  for (int i = 0; i < 10; ++i) {
    adam_update(y, 2.0 * y, q);
    CHECK(std::abs(y(0)) < previous);
    previous = std::abs(y(0));
  }

  Eigen::VectorXd bad = Eigen::VectorXd::Ones(1);
  CHECK_THROWS_AS(adam_update(y, bad * std::numeric_limits<double>::quiet_NaN(), q), NumericError);
  CHECK_THROWS_AS(adam_update(y, Eigen::VectorXd::Ones(2), q), DataError);
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(2024);
  for (int instance = 0; instance < 40; ++instance) {
    const TaggerMode mode = instance % 2 ? TaggerMode::softmax : TaggerMode::multinomial;
    const Eigen::Index in = 1 + static_cast<Eigen::Index>(rng.below(6));
    const Eigen::Index out = 1 + static_cast<Eigen::Index>(rng.below(5));
    const int hidden = static_cast<int>(rng.below(3));
    const Eigen::Index width = 1 + static_cast<Eigen::Index>(rng.below(8));
    Mlp mlp(in, hidden, width, out);
    mlp.initialize(rng.next());
    for (auto& v : mlp.parameters()) v += 0.1 * rng.gaussian();
    const Eigen::MatrixXd x = random_matrix(rng, 5, in);
    const Eigen::MatrixXd t = random_targets(rng, 5, out, mode);

    Eigen::VectorXd analytic;
    mlp.loss_and_gradient(x, t, mode, analytic);
    Eigen::VectorXd numeric(analytic.size());
    const double h = 1e-4;
    for (Eigen::Index k = 0; k < numeric.size(); ++k) {
      Mlp probe = mlp;
      probe.parameters()(k) += h;
      const double up = probe.loss(x, t, mode);
      probe.parameters()(k) -= 2 * h;
      const double down = probe.loss(x, t, mode);
      numeric(k) = (up - down) / (2 * h);
    }
    const double scale = std::max({analytic.norm(), numeric.norm(), 1e-8});
    CHECK((analytic - numeric).norm() / scale < 1e-3);
  }
}

TEST_CASE("layers=0 is a single affine map") {
  Mlp mlp(4, 0, 256, 3);
  CHECK(mlp.num_layers() == 1);
  CHECK(mlp.parameters().size() == 4 * 3 + 3);
  mlp.initialize(1);
  Rng rng(1);
  const Eigen::MatrixXd x = random_matrix(rng, 6, 4);
  const Eigen::MatrixXd expected = (x * mlp.weights(0).transpose()).rowwise() + mlp.bias(0).transpose();
  CHECK((mlp.forward(x) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("separable two-word data is learned perfectly by logistic regression") {
  Rng rng(8);
  FeatureTable features;
  const Corpus c = separable_corpus(200, rng, features);
  const Vocabulary v = build_vocabulary(c, 1);
  const TaggerData data = make_tagger_data(c, v, features, TaggerMode::multinomial, TaggerInput::image);
  TaggerGrid grid;
  grid.learning_rates = {0.05};
  grid.layer_counts = {0};
  grid.max_epochs = 200;
  const TaggerModel m = train_tagger(data, v.words, TaggerMode::multinomial, grid, 3);
  CHECK(m.mlp.hidden_layers() == 0);
  CHECK(m.learning_rate == 0.05);
  CHECK(m.final_train_loss < m.initial_train_loss);
  CHECK(m.best_validation_loss < 0.05);

  std::set<std::string> alpha, beta;
  for (const auto& d : c.documents) {
    for (const auto& id : d.image_ids) (d.tokens[0] == "alpha" ? alpha : beta).insert(id);
  }
  CHECK(ap(tagger_rank(m, "alpha", features), alpha) == 100.0);
  CHECK(ap(tagger_rank(m, "beta", features), beta) == 100.0);

  const TaggerModel again = train_tagger(data, v.words, TaggerMode::multinomial, grid, 3);
  CHECK(again.mlp.parameters() == m.mlp.parameters());
}

TEST_CASE("tagger grid picks among its configurations") {
  Rng rng(9);
  FeatureTable features;
  const Corpus c = separable_corpus(60, rng, features);
  const Vocabulary v = build_vocabulary(c, 1);
  const TaggerData data = make_tagger_data(c, v, features, TaggerMode::softmax, TaggerInput::docmean);
  CHECK(data.inputs.rows() == 60);
  TaggerGrid grid;
  grid.learning_rates = {0.01, 0.001};
  grid.layer_counts = {0, 1};
  grid.hidden_width = 8;
  grid.max_epochs = 20;
  const TaggerModel m = train_tagger(data, v.words, TaggerMode::softmax, grid, 1);
  CHECK((m.learning_rate == 0.01 || m.learning_rate == 0.001));
  CHECK(m.mlp.hidden_layers() <= 1);
  CHECK(m.epochs_run >= 1);
  CHECK(m.epochs_run <= 20);
  CHECK(m.validation_history.size() == static_cast<std::size_t>(m.epochs_run));
}

TEST_CASE("tagger_rank: ties, linear transparency and forward-pass oracle") {
  TaggerModel m;
  m.mode = TaggerMode::multinomial;
  m.words = {"a", "b"};
  m.mlp = Mlp(3, 0, 0, 2);
  m.mlp.parameters().setZero();
  m.mlp.weights(0)(0, 0) = 1.0;

  const FeatureTable same({"z", "y", "x"}, RowMatrixXf::Ones(3, 3));
  CHECK(ranking_ids(tagger_rank(m, "a", same)) == std::vector<std::string>{"x", "y", "z"});

  RowMatrixXf f(3, 3);
  f << 0.2, 9, 9, 3.0, -1, 0, -4.0, 5, 5;
  const FeatureTable table({"p", "q", "r"}, f);
  CHECK(ranking_ids(tagger_rank(m, "a", table)) == std::vector<std::string>{"q", "p", "r"});
  CHECK_THROWS_AS(tagger_rank(m, "c", table), DataError);

  Rng rng(4);
  TaggerModel r;
  r.mode = TaggerMode::softmax;
  r.words = {"u", "v", "w"};
  r.mlp = Mlp(5, 2, 4, 3);
  r.mlp.initialize(6);
  const FeatureTable feats = testing::gaussian_features(30, 5, 2);
  const Ranking ranked = tagger_rank(r, "v", feats);
  for (const auto& s : ranked) {
    // Manual forward pass.
    Eigen::VectorXd a = feats.row(*feats.find(s.image_id)).cast<double>().transpose();
    for (int l = 0; l < r.mlp.num_layers(); ++l) {
      a = r.mlp.weights(l) * a + r.mlp.bias(l);
      if (l + 1 < r.mlp.num_layers()) a = a.cwiseMax(0.0);
    }
    const Eigen::VectorXd p = (a.array() - a.maxCoeff()).exp();
    CHECK(s.score == doctest::Approx(p(1) / p.sum()).epsilon(1e-9));
  }
}

TEST_CASE("tagger model files round-trip") {
  testing::TempDir dir("tagger");
  TaggerModel t;
  t.mode = TaggerMode::softmax;
  t.words = {"a", "b", "c"};
  t.mlp = Mlp(4, 2, 5, 3);
  t.mlp.initialize(2);
  t.learning_rate = 0.0005;
  t.epochs_run = 3;
  t.validation_history = {1.5, 1.2, 1.1};
  save_model(ModelFile{t, std::nullopt, "abc", 9}, dir / "t.bin");
  const ModelFile back = load_model(dir / "t.bin");
  const auto& u = std::get<TaggerModel>(back.model);
  CHECK(method_name(back) == "softmax");
  CHECK(u.words == t.words);
  CHECK(u.mlp.hidden_layers() == 2);
  CHECK(u.mlp.hidden_width() == 5);
  CHECK(u.validation_history == t.validation_history);
  CHECK(u.mlp.parameters() == t.mlp.parameters().cast<float>().cast<double>());
}
