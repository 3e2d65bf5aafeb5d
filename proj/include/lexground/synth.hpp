#pragma once

#include "lexground/corpus.hpp"
#include "lexground/detection.hpp"
#include "lexground/eval.hpp"
#include "lexground/feature_table.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lexground {

/// Planted-cluster corpus description.
///
/// Each cluster is a visual concept with a mean drawn from N(0, sigma_between^2 I);
/// its images are the mean plus N(0, sigma_within^2 I) noise. A document
/// mentions the words of every cluster pictured in it, plus each other
/// cluster word with probability `noise_rate`, so frequent words co-occur
/// with most images whether or not they depict them.
struct SynthSpec {
  std::vector<std::vector<std::string>> cluster_words;
  std::vector<double> cluster_weights;  // image frequency per cluster; empty = uniform
  std::size_t documents = 500;
  std::size_t images_per_doc = 10;
  std::size_t tokens_per_doc = 40;  // padded with background words when available
  std::size_t dim = 64;
  double sigma_between = 1.0;
  double sigma_within = 0.1;
  double noise_rate = 0.5;
  std::vector<std::string> background_words;
  double label_fraction = 0.2;  // share of all images labeled per word

  // Word vectors and detector output for the detection baselines.
  std::size_t word_vector_dim = 32;
  std::size_t labels_per_cluster = 5;
  std::size_t misc_labels = 40;
  std::size_t predictions_per_image = 20;
  double detection_alignment = 1.0;  // P(detector output reflects the image's cluster)
};

/// Six concepts named after common listing words, with skewed frequencies.
SynthSpec default_synth_spec();

struct SynthBundle {
  Corpus corpus;
  FeatureTable features;
  std::vector<LabeledSubset> labels;  // one subset per cluster word
  std::vector<int> image_cluster;     // planted cluster of each feature row
  std::vector<Eigen::VectorXd> cluster_means;
  WordVectorTable word_vectors;
  DetectionTable detections;
};

/// Deterministic for a fixed (spec, seed). Throws ConfigError for an
/// inconsistent spec.
SynthBundle generate_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed);

/// Writes corpus.jsonl, features.{ids,f32}, labels.jsonl, word_vectors.txt
/// and detections.jsonl into `dir`.
void write_synth_bundle(const SynthBundle& bundle, const std::filesystem::path& dir);

}  // namespace lexground
