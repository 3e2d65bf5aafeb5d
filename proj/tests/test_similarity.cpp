#include "lexground/emd.hpp"
#include "lexground/errors.hpp"
#include "lexground/similarity.hpp"
#include "lexground/synth.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace lexground;

namespace {

DocEmbeddings random_doc(Rng& rng, const std::string& id, Eigen::Index rows, Eigen::Index dim) {
  DocEmbeddings d{id, Eigen::MatrixXd(rows, dim)};
  for (Eigen::Index i = 0; i < d.items.size(); ++i) d.items.data()[i] = rng.gaussian();
  return d;
}

DocEmbeddings repeated(const DocEmbeddings& d, int times) {
  DocEmbeddings r{d.doc_id + "x" + std::to_string(times), Eigen::MatrixXd(d.items.rows() * times, d.items.cols())};
  for (int t = 0; t < times; ++t) r.items.middleRows(t * d.items.rows(), d.items.rows()) = d.items;
  return r;
}

}  // namespace

TEST_CASE("normal quantiles") {
  CHECK(normal_quantile(0.99995) == doctest::Approx(3.8906).epsilon(1e-4));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(normal_quantile(0.8413447461) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("pearson correlation") {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8}, flat{5, 5, 5, 5};
  CHECK(*pearson_correlation(x, y) == doctest::Approx(1.0));
  std::vector<double> neg(y.rbegin(), y.rend());
  CHECK(*pearson_correlation(x, neg) == doctest::Approx(-1.0));
  CHECK_FALSE(pearson_correlation(x, flat).has_value());
}

TEST_CASE("embeddings and signatures") {
  Corpus c{{Document{"a", {"kitchen", "oov", "pool"}, {"i0", "i1"}}}};
  WordVectorTable wv(2, 1);
  wv.add("kitchen", Eigen::Vector2d(1, 0));
  wv.add("pool", Eigen::Vector2d(0, 1));
  const auto words = word_embeddings(c, wv);
  REQUIRE(words.size() == 1);
  CHECK(words[0].items.rows() == 2);
  const FeatureTable f({"i0", "i1"}, RowMatrixXf::Identity(2, 3));
  const auto images = image_embeddings(c, f);
  CHECK(images[0].items.rows() == 2);
  Corpus bad{{Document{"a", {}, {"zz"}}}};
  CHECK_THROWS_AS(image_embeddings(bad, f), DataError);

  Rng r1(4), r2(4);
  const SignatureSample s = draw_signature(words[0], Modality::word, 50, r1);
  CHECK(s.items.rows() == 50);
  CHECK(s.items == draw_signature(words[0], Modality::word, 50, r2).items);
  for (Eigen::Index k = 0; k < 50; ++k) {
    CHECK((s.items.row(k) == words[0].items.row(0) || s.items.row(k) == words[0].items.row(1)));
  }
  CHECK_THROWS_AS(draw_signature(words[0], Modality::word, 0, r1), ConfigError);
}

TEST_CASE("identical single-item documents have zero diversity") {
  // With several items per document the two bootstrap samples differ, so
  // exact zero needs documents holding one token and one image.
  const FeatureTable f = testing::gaussian_features(2, 4, 1, "i");
  WordVectorTable wv(3, 1);
  wv.add("a", Eigen::Vector3d(1, 0, 0));
  DiversityOptions o;
  o.n_pairs = 200;
  Corpus single;
  for (int d = 0; d < 5; ++d) single.documents.push_back(Document{"d" + std::to_string(d), {"a"}, {"i0"}});
  o.b_words = 10;
  o.b_images = 3;
  const DiversityReport z = corpus_diversity(single, f, &wv, o);
  CHECK(z.image.mean == 0.0);
  CHECK(z.image.ci_high - z.image.ci_low == 0.0);
  CHECK(z.word->mean == 0.0);
}

TEST_CASE("two-document corpus replays pair by pair") {
  Rng rng(7);
  const std::vector<DocEmbeddings> docs{random_doc(rng, "a", 5, 3), random_doc(rng, "b", 8, 3)};
  DiversityOptions o;
  o.n_pairs = 100;
  o.seed = 31;
  std::vector<PairDistance> pairs;
  const ModalityStats s = modality_diversity(docs, Modality::image, 4, o, &pairs);

  double total = 0;
  std::vector<double> values;
  for (std::size_t k = 0; k < 100; ++k) {
    Rng r(substream_seed(31, "bootstrap/image", k));
    const auto first = r.below(2);
    r.below(1);
    const DocEmbeddings& da = docs[first];
    const DocEmbeddings& db = docs[1 - first];
    Eigen::MatrixXd sa(4, 3), sb(4, 3);
    for (int i = 0; i < 4; ++i) sa.row(i) = da.items.row(static_cast<Eigen::Index>(r.below(static_cast<std::uint64_t>(da.items.rows()))));
    for (int i = 0; i < 4; ++i) sb.row(i) = db.items.row(static_cast<Eigen::Index>(r.below(static_cast<std::uint64_t>(db.items.rows()))));
    const double d = solve_emd({Eigen::VectorXd::Constant(4, 0.25), Eigen::VectorXd::Constant(4, 0.25), euclidean_cost(sa, sb)}).objective;
    CHECK(pairs[k].distance == doctest::Approx(d).epsilon(1e-12));
    values.push_back(d);
    total += d;
  }
  const double mean = total / 100;
  CHECK(s.mean == doctest::Approx(mean).epsilon(1e-12));
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / 99);
  CHECK(s.std == doctest::Approx(sd).epsilon(1e-9));
  CHECK(s.ci_low == doctest::Approx(mean - normal_quantile(0.99995) * sd / 10).epsilon(1e-9));
  CHECK(s.ci_high == doctest::Approx(mean + normal_quantile(0.99995) * sd / 10).epsilon(1e-9));
}

TEST_CASE("diversity is deterministic, thread independent and bounded") {
  SynthSpec spec = default_synth_spec();
  spec.documents = 60;
  const SynthBundle bundle = generate_synthetic_corpus(spec, 3);
  DiversityOptions o;
  o.n_pairs = 300;
  o.seed = 5;
  const DiversityReport a = corpus_diversity(bundle.corpus, bundle.features, &bundle.word_vectors, o);
  o.threads = 4;
  const DiversityReport b = corpus_diversity(bundle.corpus, bundle.features, &bundle.word_vectors, o);
  CHECK(a.image.mean == b.image.mean);
  CHECK(a.word->mean == b.word->mean);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t k = 0; k < a.pairs.size(); ++k) CHECK(a.pairs[k].distance == b.pairs[k].distance);

  const auto images = image_embeddings(bundle.corpus, bundle.features);
  double widest = 0;
  for (const auto& x : images) {
    for (const auto& y : images) widest = std::max(widest, euclidean_cost(x.items, y.items).maxCoeff());
  }
  for (const auto& p : a.pairs) {
    CHECK(p.distance >= 0.0);
    if (p.modality == Modality::image) CHECK(p.distance <= widest + 1e-9);
  }

  testing::TempDir dir("div");
  write_diversity_json(a, dir / "d.json", {{"seed", "5"}});
  write_pair_distances_csv(a, dir / "p.csv");
  write_diversity_json(b, dir / "e.json", {{"seed", "5"}});
  CHECK(testing::read_file(dir / "d.json") == testing::read_file(dir / "e.json"));
  CHECK(testing::read_file(dir / "p.csv").rfind("modality,pair_index,doc_a,doc_b,distance\n", 0) == 0);

  const std::vector<DocEmbeddings> lonely{images.front()};
  CHECK_THROWS_AS(modality_diversity(lonely, Modality::image, 3, o), DataError);
}

TEST_CASE("length bias probe") {
  Rng rng(9);
  std::vector<DocEmbeddings> equal;
  for (int d = 0; d < 12; ++d) equal.push_back(random_doc(rng, "d" + std::to_string(d), 6, 4));
  const LengthBiasReport flat = length_bias_probe(equal, 20, 1);
  CHECK_FALSE(flat.correlation.has_value());

  std::vector<DocEmbeddings> varied;
  for (int d = 0; d < 15; ++d) varied.push_back(random_doc(rng, "v" + std::to_string(d), 2 + d, 4));
  const LengthBiasReport r1 = length_bias_probe(varied, 20, 4);
  const LengthBiasReport r2 = length_bias_probe(varied, 20, 4);
  REQUIRE(r1.correlation.has_value());
  CHECK(*r1.correlation == *r2.correlation);
  CHECK(r1.mean_distances == r2.mean_distances);

  CHECK_THROWS_AS(length_bias_probe(std::span(equal).first(5), 20, 1), DataError);
}

TEST_CASE("a document and its tenfold repetition are nearly indistinguishable") {
  // Single-topic documents: tokens scatter tightly around one of four topic centres.
  Rng rng(10);
  std::vector<Eigen::VectorXd> centres;
  for (int t = 0; t < 4; ++t) {
    Eigen::VectorXd c(8);
    for (auto& x : c) x = 10.0 * rng.gaussian();
    centres.push_back(c);
  }
  std::vector<DocEmbeddings> docs;
  for (int d = 0; d < 20; ++d) {
    DocEmbeddings doc = random_doc(rng, "d" + std::to_string(d), 3 + static_cast<Eigen::Index>(rng.below(6)), 8);
    doc.items.rowwise() += centres[static_cast<std::size_t>(d % 4)].transpose();
    docs.push_back(doc);
  }
  double cross = 0;
  int n = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (std::size_t j = i + 1; j < docs.size(); ++j, ++n) {
      Rng r(substream_seed(2, "cross", static_cast<std::uint64_t>(n)));
      cross += movers_distance(draw_signature(docs[i], Modality::word, 50, r), draw_signature(docs[j], Modality::word, 50, r));
    }
  }
  cross /= n;
  double self = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    Rng r(substream_seed(2, "self", i));
    const DocEmbeddings rep = repeated(docs[i], 10);
    self += movers_distance(draw_signature(docs[i], Modality::word, 50, r), draw_signature(rep, Modality::word, 50, r));
  }
  self /= static_cast<double>(docs.size());
  CHECK(self < 0.1 * cross);
}

TEST_CASE("normal quantile is antisymmetric and rejects the endpoints") {
  for (double p : {0.001, 0.02, 0.3, 0.5, 0.9}) CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1 - p)).epsilon(1e-9));
  CHECK_THROWS_AS(normal_quantile(0.0), ConfigError);
  CHECK_THROWS_AS(normal_quantile(1.0), ConfigError);
}
