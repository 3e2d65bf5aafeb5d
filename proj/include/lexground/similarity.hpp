#pragma once

#include "lexground/corpus.hpp"
#include "lexground/detection.hpp"
#include "lexground/feature_table.hpp"
#include "lexground/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexground {

enum class Modality { word, image };

std::string_view to_string(Modality m);

/// Embedded items of one document: a row per token (or image) occurrence.
struct DocEmbeddings {
  std::string doc_id;
  Eigen::MatrixXd items;
};

/// Token embeddings per document. Tokens missing from `wv` are dropped.
std::vector<DocEmbeddings> word_embeddings(const Corpus& corpus, const WordVectorTable& wv);

/// Image feature rows per document. Throws DataError for unknown image ids.
std::vector<DocEmbeddings> image_embeddings(const Corpus& corpus, const FeatureTable& features);

/// A with-replacement sample of exactly b items of one document, each
/// carrying mass 1/b (duplicates kept as repeated mass).
struct SignatureSample {
  std::string doc_id;
  Modality modality = Modality::word;
  Eigen::MatrixXd items;
};

SignatureSample draw_signature(const DocEmbeddings& doc, Modality modality, std::size_t b,
                               Rng& rng);

/// EMD between two uniform-weight samples under Euclidean ground cost.
double movers_distance(const SignatureSample& a, const SignatureSample& b);

/// Inverse standard normal CDF.
double normal_quantile(double p);

struct ModalityStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_pairs = 0;
  std::size_t b = 0;
  std::size_t eligible_documents = 0;
  double confidence = 0.0;
};

struct PairDistance {
  std::size_t pair_index = 0;
  Modality modality = Modality::word;
  std::string doc_a;
  std::string doc_b;
  double distance = 0.0;
};

/// Distance of pair `pair_index`: draws two distinct documents and their
/// signatures from the substream (seed, "bootstrap/<modality>", pair_index).
PairDistance sample_pair_distance(std::span<const DocEmbeddings> docs, Modality modality,
                                  std::size_t b, std::uint64_t seed, std::size_t pair_index);

struct DiversityOptions {
  std::size_t n_pairs = 10000;
  std::size_t b_words = 50;
  std::size_t b_images = 10;
  double confidence = 0.9999;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// Mean bootstrap mover's distance over `n_pairs` random document pairs,
/// with a normal-approximation confidence interval. Documents without items
/// are not eligible. Throws DataError with fewer than 2 eligible documents.
ModalityStats modality_diversity(std::span<const DocEmbeddings> docs, Modality modality,
                                 std::size_t b, const DiversityOptions& options,
                                 std::vector<PairDistance>* pairs = nullptr);

struct DiversityReport {
  std::optional<ModalityStats> word;
  ModalityStats image;
  std::vector<PairDistance> pairs;
};

/// Visual and (when `wv` is given) textual self-similarity of a corpus.
DiversityReport corpus_diversity(const Corpus& corpus, const FeatureTable& features,
                                 const WordVectorTable* wv, const DiversityOptions& options);

void write_diversity_json(const DiversityReport& report, const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, std::string>>& metadata = {});
void write_pair_distances_csv(const DiversityReport& report, const std::filesystem::path& path);

struct LengthBiasReport {
  std::vector<std::string> doc_ids;
  std::vector<double> lengths;
  std::vector<double> mean_distances;  // mean bootstrap distance to the other documents
  std::optional<double> correlation;   // Pearson; empty when a variance is zero
};

/// Correlation between document length and mean bootstrap distance to other
/// documents. Needs at least 10 documents with items.
LengthBiasReport length_bias_probe(std::span<const DocEmbeddings> docs, std::size_t b,
                                   std::uint64_t seed);

std::optional<double> pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace lexground
