#include "lexground/corpus.hpp"

#include "lexground/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>

namespace lexground {

using nlohmann::json;

CorpusStats Corpus::stats() const {
  CorpusStats s;
  s.documents = documents.size();
  std::unordered_set<std::string> images;
  for (const auto& d : documents) {
    s.tokens += d.tokens.size();
    images.insert(d.image_ids.begin(), d.image_ids.end());
  }
  s.distinct_images = images.size();
  return s;
}

namespace {

std::vector<std::string> string_array(const json& j, const char* field, std::size_t line) {
  if (!j.is_array()) {
    throw DataError("line " + std::to_string(line) + ": \"" + field + "\" must be an array");
  }
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_string()) {
      throw DataError("line " + std::to_string(line) + ": \"" + field +
                      "\" must contain only strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());

  Corpus corpus;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw DataError("line " + std::to_string(line_no) + ": not an object");
    if (!j.contains("doc_id") || !j["doc_id"].is_string() ||
        j["doc_id"].get<std::string>().empty()) {
      throw DataError("line " + std::to_string(line_no) + ": missing or empty \"doc_id\"");
    }
    Document doc;
    doc.doc_id = j["doc_id"].get<std::string>();
    if (auto [it, inserted] = seen.emplace(doc.doc_id, line_no); !inserted) {
      throw DataError("line " + std::to_string(line_no) + ": duplicate doc_id \"" + doc.doc_id +
                      "\" (first seen on line " + std::to_string(it->second) + ")");
    }
    if (j.contains("tokens")) {
      doc.tokens = string_array(j["tokens"], "tokens", line_no);
    } else if (j.contains("text")) {
      if (!j["text"].is_string()) {
        throw DataError("line " + std::to_string(line_no) + ": \"text\" must be a string");
      }
      doc.tokens = normalize_text(j["text"].get<std::string>());
    }
    if (j.contains("image_ids")) doc.image_ids = string_array(j["image_ids"], "image_ids", line_no);
    corpus.documents.push_back(std::move(doc));
  }
  if (corpus.documents.empty()) throw DataError("corpus " + path.string() + " is empty");
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus " + path.string());
  for (const auto& d : corpus.documents) {
    json j;
    j["doc_id"] = d.doc_id;
    j["tokens"] = d.tokens;
    j["image_ids"] = d.image_ids;
    out << j.dump() << '\n';
  }
}

std::optional<std::size_t> Vocabulary::find(std::string_view word) const {
  auto it = std::lower_bound(words.begin(), words.end(), word);
  if (it == words.end() || *it != word) return std::nullopt;
  return static_cast<std::size_t>(it - words.begin());
}

Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_count,
                            const std::unordered_set<std::string>* restrict_to) {
  if (min_count == 0) throw ConfigError("min_count must be at least 1");
  std::map<std::string, std::size_t, std::less<>> counts;
  for (const auto& d : corpus.documents) {
    for (const auto& t : d.tokens) ++counts[t];
  }
  Vocabulary vocab;
  for (const auto& [word, count] : counts) {
    if (count < min_count) continue;
    if (restrict_to && !restrict_to->count(word)) continue;
    vocab.words.push_back(word);
    vocab.counts.push_back(count);
  }
  if (vocab.words.empty()) {
    throw DataError("vocabulary is empty (min_count=" + std::to_string(min_count) +
                    (restrict_to ? ", restricted" : "") + ")");
  }
  return vocab;
}

std::optional<std::size_t> CooccurrenceIndex::find_image(std::string_view id) const {
  auto it = image_lookup_.find(std::string(id));
  if (it == image_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> CooccurrenceIndex::find_word(std::string_view word) const {
  auto it = std::lower_bound(words_.begin(), words_.end(), word);
  if (it == words_.end() || *it != word) return std::nullopt;
  return static_cast<std::size_t>(it - words_.begin());
}

std::span<const int> CooccurrenceIndex::words_of(std::size_t image) const {
  return {image_word_cols_.data() + image_offsets_[image],
          static_cast<std::size_t>(image_offsets_[image + 1] - image_offsets_[image])};
}

std::span<const int> CooccurrenceIndex::images_of(std::size_t word) const {
  return {word_image_rows_.data() + word_offsets_[word],
          static_cast<std::size_t>(word_offsets_[word + 1] - word_offsets_[word])};
}

bool CooccurrenceIndex::contains(std::size_t image, std::size_t word) const {
  const auto row = words_of(image);
  return std::binary_search(row.begin(), row.end(), static_cast<int>(word));
}

Eigen::SparseMatrix<double, Eigen::RowMajor> CooccurrenceIndex::incidence_matrix() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(image_word_cols_.size());
  for (std::size_t i = 0; i < num_images(); ++i) {
    for (int w : words_of(i)) triplets.emplace_back(static_cast<int>(i), w, 1.0);
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(static_cast<Eigen::Index>(num_images()),
                                                 static_cast<Eigen::Index>(num_words()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

CooccurrenceIndex build_cooccurrence(const Corpus& corpus, const Vocabulary& vocab,
                                     const FeatureTable& features) {
  // Keyed by feature row so the image order is the feature-table order.
  std::map<Eigen::Index, std::vector<int>> image_words;
  std::map<Eigen::Index, bool> seen_images;
  std::vector<int> doc_words;
  for (const auto& doc : corpus.documents) {
    doc_words.clear();
    for (const auto& t : doc.tokens) {
      if (auto w = vocab.find(t)) doc_words.push_back(static_cast<int>(*w));
    }
    std::sort(doc_words.begin(), doc_words.end());
    doc_words.erase(std::unique(doc_words.begin(), doc_words.end()), doc_words.end());
    for (const auto& id : doc.image_ids) {
      auto row = features.find(id);
      if (!row) {
        throw DataError("document \"" + doc.doc_id + "\" references image \"" + id +
                        "\" missing from the feature table");
      }
      seen_images[*row] = true;
      if (doc_words.empty()) continue;
      auto& ws = image_words[*row];
      ws.insert(ws.end(), doc_words.begin(), doc_words.end());
    }
  }

  std::vector<int> word_image_count(vocab.size(), 0);
  for (auto& [row, ws] : image_words) {
    std::sort(ws.begin(), ws.end());
    ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
    for (int w : ws) ++word_image_count[w];
  }

  CooccurrenceIndex idx;
  std::vector<int> word_remap(vocab.size(), -1);
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    if (word_image_count[w] == 0) {
      idx.excluded_words_.push_back(vocab.words[w]);
      continue;
    }
    word_remap[w] = static_cast<int>(idx.words_.size());
    idx.words_.push_back(vocab.words[w]);
  }
  for (const auto& [row, seen] : seen_images) {
    if (!image_words.count(row)) idx.excluded_images_.push_back(features.ids()[row]);
  }

  std::vector<std::vector<int>> word_images(idx.words_.size());
  for (const auto& [row, ws] : image_words) {
    const int image = static_cast<int>(idx.image_ids_.size());
    idx.image_ids_.push_back(features.ids()[row]);
    idx.image_lookup_.emplace(features.ids()[row], static_cast<std::size_t>(image));
    idx.feature_rows_.push_back(row);
    for (int w : ws) {
      const int col = word_remap[w];
      idx.image_word_cols_.push_back(col);
      word_images[col].push_back(image);
    }
    idx.image_offsets_.push_back(static_cast<int>(idx.image_word_cols_.size()));
  }
  for (const auto& rows : word_images) {
    idx.word_image_rows_.insert(idx.word_image_rows_.end(), rows.begin(), rows.end());
    idx.word_offsets_.push_back(static_cast<int>(idx.word_image_rows_.size()));
  }
  return idx;
}

}  // namespace lexground
