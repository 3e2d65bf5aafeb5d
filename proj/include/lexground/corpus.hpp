#pragma once

#include "lexground/feature_table.hpp"

#include <Eigen/SparseCore>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lexground {

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<std::string> image_ids;

  friend bool operator==(const Document&, const Document&) = default;
};

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t tokens = 0;
  std::size_t distinct_images = 0;
};

struct Corpus {
  std::vector<Document> documents;

  CorpusStats stats() const;
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Lowercases, deletes Unicode Number and Punctuation characters (hyphens
/// included, so "two-bedroom" becomes "twobedroom"), then splits on
/// whitespace runs. Category tables cover the Basic Multilingual Plane
/// blocks in common use.
std::vector<std::string> normalize_text(std::string_view raw);

/// Reads the JSONL corpus format. Each line holds
/// {"doc_id", "tokens" | "text", "image_ids"}; blank lines are skipped.
/// Throws DataError naming the line for malformed JSON or duplicate ids.
Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Word types sorted lexicographically, with corpus token counts.
struct Vocabulary {
  std::vector<std::string> words;
  std::vector<std::size_t> counts;

  std::size_t size() const { return words.size(); }
  std::optional<std::size_t> find(std::string_view word) const;
};

/// Word types with count >= min_count, intersected with `restrict_to` when
/// given. Throws DataError when the result is empty.
Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_count,
                            const std::unordered_set<std::string>* restrict_to = nullptr);

/// Image x word incidence: true iff some document holds both.
///
/// Images are ordered by their feature-table row and words by vocabulary
/// order. Images without any in-vocabulary word, and vocabulary words
/// without any image, are left out of the index and listed in
/// `excluded_images()` / `excluded_words()`.
class CooccurrenceIndex {
 public:
  std::size_t num_images() const { return image_ids_.size(); }
  std::size_t num_words() const { return words_.size(); }

  const std::vector<std::string>& image_ids() const { return image_ids_; }
  const std::vector<std::string>& words() const { return words_; }
  /// Feature-table row of each indexed image.
  const std::vector<Eigen::Index>& feature_rows() const { return feature_rows_; }

  std::optional<std::size_t> find_image(std::string_view id) const;
  std::optional<std::size_t> find_word(std::string_view word) const;

  /// Sorted word columns co-occurring with image `i`.
  std::span<const int> words_of(std::size_t image) const;
  /// Sorted image rows co-occurring with word `w`.
  std::span<const int> images_of(std::size_t word) const;

  bool contains(std::size_t image, std::size_t word) const;
  std::size_t num_pairs() const { return image_word_cols_.size(); }

  /// Row-major sparse 0/1 matrix (images x words) with the incidence pattern.
  Eigen::SparseMatrix<double, Eigen::RowMajor> incidence_matrix() const;

  const std::vector<std::string>& excluded_images() const { return excluded_images_; }
  const std::vector<std::string>& excluded_words() const { return excluded_words_; }

 private:
  friend CooccurrenceIndex build_cooccurrence(const Corpus&, const Vocabulary&,
                                              const FeatureTable&);

  std::vector<std::string> image_ids_;
  std::unordered_map<std::string, std::size_t> image_lookup_;
  std::vector<Eigen::Index> feature_rows_;
  std::vector<std::string> words_;
  std::vector<int> image_offsets_{0};
  std::vector<int> image_word_cols_;
  std::vector<int> word_offsets_{0};
  std::vector<int> word_image_rows_;
  std::vector<std::string> excluded_images_;
  std::vector<std::string> excluded_words_;
};

/// Throws DataError when a document references an image missing from `features`.
CooccurrenceIndex build_cooccurrence(const Corpus& corpus, const Vocabulary& vocab,
                                     const FeatureTable& features);

}  // namespace lexground
