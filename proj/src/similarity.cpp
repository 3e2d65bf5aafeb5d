#include "lexground/similarity.hpp"

#include "lexground/emd.hpp"
#include "lexground/errors.hpp"
#include "lexground/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace lexground {

using nlohmann::json;

std::string_view to_string(Modality m) { return m == Modality::word ? "word" : "image"; }

std::vector<DocEmbeddings> word_embeddings(const Corpus& corpus, const WordVectorTable& wv) {
  std::vector<DocEmbeddings> out;
  out.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    DocEmbeddings e{doc.doc_id, {}};
    std::vector<const Eigen::VectorXd*> rows;
    for (const auto& t : doc.tokens) {
      if (const auto* v = wv.find(t)) rows.push_back(v);
    }
    e.items.resize(static_cast<Eigen::Index>(rows.size()), wv.dim());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      e.items.row(static_cast<Eigen::Index>(k)) = rows[k]->transpose();
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<DocEmbeddings> image_embeddings(const Corpus& corpus, const FeatureTable& features) {
  std::vector<DocEmbeddings> out;
  out.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    DocEmbeddings e{doc.doc_id, Eigen::MatrixXd(static_cast<Eigen::Index>(doc.image_ids.size()),
                                                features.dim())};
    for (std::size_t k = 0; k < doc.image_ids.size(); ++k) {
      auto row = features.find(doc.image_ids[k]);
      if (!row) {
        throw DataError("document \"" + doc.doc_id + "\" references image \"" +
                        doc.image_ids[k] + "\" missing from the feature table");
      }
      e.items.row(static_cast<Eigen::Index>(k)) = features.row(*row).cast<double>();
    }
    out.push_back(std::move(e));
  }
  return out;
}

SignatureSample draw_signature(const DocEmbeddings& doc, Modality modality, std::size_t b,
                               Rng& rng) {
  if (b == 0) throw ConfigError("bootstrap sample size must be positive");
  if (doc.items.rows() == 0) {
    throw DataError("document \"" + doc.doc_id + "\" has no " + std::string(to_string(modality)) +
                    " items to sample");
  }
  SignatureSample s{doc.doc_id, modality, Eigen::MatrixXd(static_cast<Eigen::Index>(b),
                                                          doc.items.cols())};
  for (std::size_t k = 0; k < b; ++k) {
    const auto pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(doc.items.rows())));
    s.items.row(static_cast<Eigen::Index>(k)) = doc.items.row(pick);
  }
  return s;
}

double movers_distance(const SignatureSample& a, const SignatureSample& b) {
  if (a.modality != b.modality) throw DataError("movers_distance: modality mismatch");
  if (a.items.rows() == 0 || b.items.rows() == 0) throw DataError("movers_distance: empty sample");
  if (a.items.cols() != b.items.cols()) throw DataError("movers_distance: dimension mismatch");
  TransportProblem p;
  p.weights_a = Eigen::VectorXd::Constant(a.items.rows(), 1.0 / static_cast<double>(a.items.rows()));
  p.weights_b = Eigen::VectorXd::Constant(b.items.rows(), 1.0 / static_cast<double>(b.items.rows()));
  p.cost = euclidean_cost(a.items, b.items);
  return solve_emd(p).objective;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("normal_quantile: p must lie in (0, 1)");
  // Acklam's rational approximation, then one Halley step on erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

PairDistance sample_pair_distance(std::span<const DocEmbeddings> docs, Modality modality,
                                  std::size_t b, std::uint64_t seed, std::size_t pair_index) {
  if (docs.size() < 2) throw DataError("need at least 2 documents to sample a pair");
  Rng rng(substream_seed(seed, "bootstrap/" + std::string(to_string(modality)), pair_index));
  const auto n = static_cast<std::uint64_t>(docs.size());
  const auto i = rng.below(n);
  auto j = rng.below(n - 1);
  if (j >= i) ++j;
  const auto sa = draw_signature(docs[i], modality, b, rng);
  const auto sb = draw_signature(docs[j], modality, b, rng);
  return {pair_index, modality, docs[i].doc_id, docs[j].doc_id, movers_distance(sa, sb)};
}

ModalityStats modality_diversity(std::span<const DocEmbeddings> docs, Modality modality,
                                 std::size_t b, const DiversityOptions& options,
                                 std::vector<PairDistance>* pairs) {
  if (options.n_pairs == 0) throw ConfigError("n_pairs must be positive");
  if (!(options.confidence > 0.0 && options.confidence < 1.0)) {
    throw ConfigError("confidence must lie in (0, 1)");
  }
  std::vector<DocEmbeddings> eligible;
  for (const auto& d : docs) {
    if (d.items.rows() > 0) eligible.push_back(d);
  }
  if (eligible.size() < 2) {
    throw DataError("fewer than 2 documents with " + std::string(to_string(modality)) + " content");
  }

  std::vector<PairDistance> results(options.n_pairs);
  parallel_for(options.n_pairs, options.threads, [&](std::size_t k) {
    results[k] = sample_pair_distance(eligible, modality, b, options.seed, k);
  });

  ModalityStats s;
  s.n_pairs = options.n_pairs;
  s.b = b;
  s.eligible_documents = eligible.size();
  s.confidence = options.confidence;
  for (const auto& r : results) s.mean += r.distance;
  s.mean /= static_cast<double>(results.size());
  if (results.size() > 1) {
    double ss = 0.0;
    for (const auto& r : results) ss += (r.distance - s.mean) * (r.distance - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(results.size() - 1));
  }
  const double half = normal_quantile(0.5 + options.confidence / 2.0) * s.std /
                      std::sqrt(static_cast<double>(results.size()));
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  if (pairs) pairs->insert(pairs->end(), results.begin(), results.end());
  return s;
}

DiversityReport corpus_diversity(const Corpus& corpus, const FeatureTable& features,
                                 const WordVectorTable* wv, const DiversityOptions& options) {
  DiversityReport report;
  if (wv) {
    report.word = modality_diversity(word_embeddings(corpus, *wv), Modality::word,
                                     options.b_words, options, &report.pairs);
  }
  report.image = modality_diversity(image_embeddings(corpus, features), Modality::image,
                                    options.b_images, options, &report.pairs);
  return report;
}

namespace {

json stats_json(const ModalityStats& s) {
  return {{"mean", s.mean},
          {"std", s.std},
          {"ci_low", s.ci_low},
          {"ci_high", s.ci_high},
          {"n_pairs", s.n_pairs},
          {"b", s.b},
          {"eligible_documents", s.eligible_documents},
          {"confidence", s.confidence}};
}

}  // namespace

void write_diversity_json(const DiversityReport& report, const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, std::string>>& metadata) {
  json j;
  if (report.word) j["word"] = stats_json(*report.word);
  j["image"] = stats_json(report.image);
  j["ci_method"] = "normal_approximation";
  for (const auto& [k, v] : metadata) j["metadata"][k] = v;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_pair_distances_csv(const DiversityReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "modality,pair_index,doc_a,doc_b,distance\n";
  char buf[48];
  for (const auto& p : report.pairs) {
    std::snprintf(buf, sizeof buf, "%.9g", p.distance);
    out << to_string(p.modality) << ',' << p.pair_index << ',' << p.doc_a << ',' << p.doc_b << ','
        << buf << '\n';
  }
}

std::optional<double> pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

LengthBiasReport length_bias_probe(std::span<const DocEmbeddings> docs, std::size_t b,
                                   std::uint64_t seed) {
  std::vector<const DocEmbeddings*> eligible;
  for (const auto& d : docs) {
    if (d.items.rows() > 0) eligible.push_back(&d);
  }
  if (eligible.size() < 10) {
    throw DataError("length_bias_probe needs at least 10 documents with items");
  }
  LengthBiasReport report;
  const std::size_t n = eligible.size();
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      Rng rng(substream_seed(seed, "length-bias", i * n + j));
      const auto sa = draw_signature(*eligible[i], Modality::word, b, rng);
      const auto sb = draw_signature(*eligible[j], Modality::word, b, rng);
      total += movers_distance(sa, sb);
    }
    report.doc_ids.push_back(eligible[i]->doc_id);
    report.lengths.push_back(static_cast<double>(eligible[i]->items.rows()));
    report.mean_distances.push_back(total / static_cast<double>(n - 1));
  }
  report.correlation = pearson_correlation(report.lengths, report.mean_distances);
  return report;
}

}  // namespace lexground
