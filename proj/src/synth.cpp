#include "lexground/synth.hpp"

#include "lexground/errors.hpp"
#include "lexground/rng.hpp"

#include <algorithm>
#include <numeric>

namespace lexground {

SynthSpec default_synth_spec() {
  SynthSpec spec;
  spec.cluster_words = {{"kitchen"}, {"bedroom"}, {"washer"}, {"outdoor"}, {"fitness"}, {"pool"}};
  spec.cluster_weights = {0.30, 0.25, 0.15, 0.14, 0.08, 0.08};
  spec.background_words = {"apartment", "building", "unit", "new", "large", "light"};
  return spec;
}

namespace {

void validate(const SynthSpec& spec) {
  if (spec.cluster_words.empty()) throw ConfigError("synthetic spec needs at least one cluster");
  for (const auto& words : spec.cluster_words) {
    if (words.empty()) throw ConfigError("every synthetic cluster needs at least one word");
  }
  if (!spec.cluster_weights.empty()) {
    if (spec.cluster_weights.size() != spec.cluster_words.size()) {
      throw ConfigError("cluster_weights must have one entry per cluster");
    }
    if (std::any_of(spec.cluster_weights.begin(), spec.cluster_weights.end(),
                    [](double w) { return !(w >= 0.0); }) ||
        std::accumulate(spec.cluster_weights.begin(), spec.cluster_weights.end(), 0.0) <= 0.0) {
      throw ConfigError("cluster_weights must be nonnegative with a positive total");
    }
  }
  if (spec.documents == 0 || spec.images_per_doc == 0 || spec.dim == 0) {
    throw ConfigError("documents, images_per_doc and dim must be positive");
  }
  if (spec.sigma_between < 0.0 || spec.sigma_within < 0.0) {
    throw ConfigError("cluster spreads must be nonnegative");
  }
  if (spec.noise_rate < 0.0 || spec.noise_rate > 1.0 || spec.detection_alignment < 0.0 ||
      spec.detection_alignment > 1.0 || !(spec.label_fraction > 0.0) || spec.label_fraction > 1.0) {
    throw ConfigError("rates must lie in [0, 1] and label_fraction in (0, 1]");
  }
  if (spec.word_vector_dim == 0 || spec.predictions_per_image == 0 ||
      spec.labels_per_cluster * spec.cluster_words.size() + spec.misc_labels <
          spec.predictions_per_image) {
    throw ConfigError("not enough detection labels for predictions_per_image");
  }
}

Eigen::VectorXd gaussian_vector(Rng& rng, std::size_t dim, double sigma) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (auto& x : v) x = sigma * rng.gaussian();
  return v;
}

std::size_t draw_weighted(Rng& rng, const std::vector<double>& cumulative) {
  const double u = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

SynthBundle generate_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed) {
  validate(spec);
  const std::size_t clusters = spec.cluster_words.size();
  SynthBundle bundle;

  std::vector<double> cumulative(clusters);
  for (std::size_t c = 0; c < clusters; ++c) {
    const double w = spec.cluster_weights.empty() ? 1.0 : spec.cluster_weights[c];
    cumulative[c] = w + (c > 0 ? cumulative[c - 1] : 0.0);
  }

  Rng feature_rng(substream_seed(seed, "synth/features"));
  for (std::size_t c = 0; c < clusters; ++c) {
    bundle.cluster_means.push_back(gaussian_vector(feature_rng, spec.dim, spec.sigma_between));
  }

  Rng doc_rng(substream_seed(seed, "synth/documents"));
  const std::size_t total_images = spec.documents * spec.images_per_doc;
  RowMatrixXf matrix(static_cast<Eigen::Index>(total_images), static_cast<Eigen::Index>(spec.dim));
  std::vector<std::string> ids;
  ids.reserve(total_images);
  for (std::size_t d = 0; d < spec.documents; ++d) {
    Document doc;
    doc.doc_id = "doc" + std::to_string(d);
    std::vector<bool> present(clusters, false);
    for (std::size_t k = 0; k < spec.images_per_doc; ++k) {
      const std::size_t c = draw_weighted(doc_rng, cumulative);
      present[c] = true;
      const auto row = static_cast<Eigen::Index>(ids.size());
      ids.push_back("img" + std::to_string(d) + "_" + std::to_string(k));
      matrix.row(row) = (bundle.cluster_means[c] + gaussian_vector(feature_rng, spec.dim,
                                                                   spec.sigma_within))
                            .cast<float>()
                            .transpose();
      bundle.image_cluster.push_back(static_cast<int>(c));
      doc.image_ids.push_back(ids.back());
    }
    for (std::size_t c = 0; c < clusters; ++c) {
      for (const auto& w : spec.cluster_words[c]) {
        if (present[c] || doc_rng.uniform() < spec.noise_rate) doc.tokens.push_back(w);
      }
    }
    if (!spec.background_words.empty()) {
      while (doc.tokens.size() < spec.tokens_per_doc) {
        doc.tokens.push_back(
            spec.background_words[doc_rng.below(spec.background_words.size())]);
      }
    }
    doc_rng.shuffle(doc.tokens.begin(), doc.tokens.end());
    bundle.corpus.documents.push_back(std::move(doc));
  }
  bundle.features = FeatureTable(ids, std::move(matrix));

  Rng label_rng(substream_seed(seed, "synth/labels"));
  const auto n_label = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(spec.label_fraction * static_cast<double>(total_images))));
  for (std::size_t c = 0; c < clusters; ++c) {
    for (const auto& w : spec.cluster_words[c]) {
      std::vector<std::size_t> order(total_images);
      std::iota(order.begin(), order.end(), std::size_t{0});
      label_rng.shuffle(order.begin(), order.end());
      order.resize(n_label);
      std::sort(order.begin(), order.end());
      LabeledSubset subset{w, {}};
      for (auto r : order) {
        subset.items.emplace_back(ids[r], bundle.image_cluster[r] == static_cast<int>(c) ? 1 : 0);
      }
      bundle.labels.push_back(std::move(subset));
    }
  }

  // Word vectors: one random direction per word; detection labels of a
  // cluster sit near its first word, misc labels anywhere.
  Rng wv_rng(substream_seed(seed, "synth/word-vectors"));
  bundle.word_vectors = WordVectorTable(static_cast<Eigen::Index>(spec.word_vector_dim),
                                        substream_seed(seed, "fallback-vectors"));
  for (const auto& words : spec.cluster_words) {
    for (const auto& w : words) {
      if (!bundle.word_vectors.contains(w)) {
        bundle.word_vectors.add(w, gaussian_vector(wv_rng, spec.word_vector_dim, 1.0));
      }
    }
  }
  for (const auto& w : spec.background_words) {
    if (!bundle.word_vectors.contains(w)) {
      bundle.word_vectors.add(w, gaussian_vector(wv_rng, spec.word_vector_dim, 1.0));
    }
  }
  std::vector<std::vector<std::string>> cluster_labels(clusters);
  std::vector<std::string> all_labels;
  for (std::size_t c = 0; c < clusters; ++c) {
    const Eigen::VectorXd anchor = *bundle.word_vectors.find(spec.cluster_words[c].front());
    for (std::size_t j = 0; j < spec.labels_per_cluster; ++j) {
      const std::string label = "concept" + std::to_string(c) + "obj" + std::to_string(j);
      bundle.word_vectors.add(label, anchor + gaussian_vector(wv_rng, spec.word_vector_dim, 0.3));
      cluster_labels[c].push_back(label);
      all_labels.push_back(label);
    }
  }
  std::vector<std::string> misc;
  for (std::size_t j = 0; j < spec.misc_labels; ++j) {
    const std::string label = "misc" + std::to_string(j);
    bundle.word_vectors.add(label, gaussian_vector(wv_rng, spec.word_vector_dim, 1.0));
    misc.push_back(label);
    all_labels.push_back(label);
  }

  Rng det_rng(substream_seed(seed, "synth/detections"));
  for (std::size_t r = 0; r < total_images; ++r) {
    std::vector<std::string> picks;
    if (det_rng.uniform() < spec.detection_alignment) {
      picks = cluster_labels[static_cast<std::size_t>(bundle.image_cluster[r])];
      det_rng.shuffle(picks.begin(), picks.end());
      std::vector<std::string> rest = misc;
      det_rng.shuffle(rest.begin(), rest.end());
      picks.insert(picks.end(), rest.begin(), rest.end());
    } else {
      picks = all_labels;
      det_rng.shuffle(picks.begin(), picks.end());
    }
    picks.resize(spec.predictions_per_image);
    std::vector<Prediction> preds;
    double confidence = 0.5 + 0.5 * det_rng.uniform();
    for (auto& label : picks) {
      preds.emplace_back(std::move(label), confidence);
      confidence *= 0.5 + 0.4 * det_rng.uniform();
    }
    bundle.detections.predictions.emplace(ids[r], std::move(preds));
  }
  return bundle;
}

void write_synth_bundle(const SynthBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_corpus(bundle.corpus, dir / "corpus.jsonl");
  save_feature_table(bundle.features, dir / "features");
  save_labeled_subsets(bundle.labels, dir / "labels.jsonl");
  save_word_vectors(bundle.word_vectors, dir / "word_vectors.txt");
  save_detections(bundle.detections, dir / "detections.jsonl");
}

}  // namespace lexground
