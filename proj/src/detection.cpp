#include "lexground/detection.hpp"

#include "lexground/errors.hpp"
#include "lexground/numeric.hpp"
#include "lexground/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lexground {

using nlohmann::json;

void WordVectorTable::add(const std::string& word, Eigen::VectorXd vector) {
  if (dim_ == 0) dim_ = vector.size();
  if (vector.size() != dim_ || dim_ == 0) {
    throw DataError("word vector for \"" + word + "\" has dimension " +
                    std::to_string(vector.size()) + ", expected " + std::to_string(dim_));
  }
  if (!vector.allFinite()) throw DataError("word vector for \"" + word + "\" is not finite");
  vectors_[word] = std::move(vector);
}

const Eigen::VectorXd* WordVectorTable::find(const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? nullptr : &it->second;
}

Eigen::VectorXd WordVectorTable::fallback(const std::string& word) const {
  if (dim_ <= 0) throw DataError("word vector table has no dimension");
  Rng rng(substream_seed(fallback_seed_, word));
  Eigen::VectorXd v(dim_);
  for (Eigen::Index i = 0; i < dim_; ++i) v(i) = rng.gaussian();
  return v;
}

Eigen::VectorXd WordVectorTable::lookup(const std::string& word) const {
  if (const auto* v = find(word)) return *v;
  return fallback(word);
}

std::vector<std::string> WordVectorTable::sorted_words() const {
  std::vector<std::string> words;
  words.reserve(vectors_.size());
  for (const auto& [w, v] : vectors_) words.push_back(w);
  std::sort(words.begin(), words.end());
  return words;
}

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

bool is_integer(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

WordVectorTable load_word_vectors(const std::filesystem::path& path, std::uint64_t fallback_seed) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word vectors " + path.string());
  WordVectorTable table(0, fallback_seed);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2 && is_integer(fields[0]) && is_integer(fields[1])) {
      continue;  // word2vec-style "<count> <dim>" header
    }
    if (fields.size() < 2) {
      throw DataError(path.string() + " line " + std::to_string(line_no) + ": no vector values");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(fields.size() - 1));
    for (std::size_t k = 1; k < fields.size(); ++k) {
      // std::from_chars for double is available in libstdc++ 11.
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(fields[k].data(), fields[k].data() + fields[k].size(), value);
      if (ec != std::errc() || ptr != fields[k].data() + fields[k].size()) {
        throw DataError(path.string() + " line " + std::to_string(line_no) +
                        ": bad number \"" + std::string(fields[k]) + "\"");
      }
      v(static_cast<Eigen::Index>(k - 1)) = value;
    }
    try {
      table.add(std::string(fields[0]), std::move(v));
    } catch (const DataError& e) {
      throw DataError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (table.size() == 0) throw DataError("word vector file " + path.string() + " is empty");
  return table;
}

void save_word_vectors(const WordVectorTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write word vectors " + path.string());
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[40];
  for (const auto& w : table.sorted_words()) {
    out << w;
    for (double x : *table.find(w)) {
      std::snprintf(buf, sizeof buf, " %.9g", x);
      out << buf;
    }
    out << '\n';
  }
}

DetectionTable load_detections(const std::filesystem::path& path, std::size_t min_predictions) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open detections " + path.string());
  DetectionTable table;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + " line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw DataError(where + ": malformed JSON");
    }
    if (!j.is_object() || !j.contains("image_id") || !j["image_id"].is_string() ||
        !j.contains("predictions") || !j["predictions"].is_array()) {
      throw DataError(where + ": expected {\"image_id\", \"predictions\"}");
    }
    std::vector<Prediction> preds;
    for (const auto& p : j["predictions"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_number()) {
        throw DataError(where + ": predictions must be [label, confidence] pairs");
      }
      preds.emplace_back(p[0].get<std::string>(), p[1].get<double>());
      if (preds.size() > 1 && preds.back().second > preds[preds.size() - 2].second) {
        throw DataError(where + ": confidences must be non-increasing");
      }
    }
    if (preds.size() < min_predictions) {
      throw DataError(where + ": " + std::to_string(preds.size()) + " predictions, need at least " +
                      std::to_string(min_predictions));
    }
    const auto id = j["image_id"].get<std::string>();
    if (!table.predictions.emplace(id, std::move(preds)).second) {
      throw DataError(where + ": duplicate image " + id);
    }
  }
  return table;
}

void save_detections(const DetectionTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write detections " + path.string());
  for (const auto& [id, preds] : table.predictions) {
    json p = json::array();
    for (const auto& [label, conf] : preds) p.push_back({label, conf});
    out << json{{"image_id", id}, {"predictions", p}}.dump() << '\n';
  }
}

Eigen::VectorXd label_vector(const std::string& label, const WordVectorTable& wv) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(wv.dim());
  int parts = 0;
  std::istringstream in(label);
  for (std::string part; std::getline(in, part, '_');) {
    if (part.empty()) continue;
    sum += wv.lookup(part);
    ++parts;
  }
  if (parts == 0) return wv.lookup(label);
  return sum / parts;
}

Eigen::VectorXd detection_image_vector(std::span<const Prediction> predictions,
                                       const WordVectorTable& wv, int k) {
  if (k < 1 || k > 20) throw ConfigError("K must lie in [1, 20], got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > predictions.size()) {
    throw DataError("K=" + std::to_string(k) + " exceeds the " +
                    std::to_string(predictions.size()) + " available predictions");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(wv.dim());
  for (int i = 0; i < k; ++i) sum += label_vector(predictions[i].first, wv);
  return sum / k;
}

ImageVectors detection_image_vectors(const DetectionTable& detections, const WordVectorTable& wv,
                                     int k) {
  ImageVectors out;
  for (const auto& [id, preds] : detections.predictions) {
    out.emplace(id, detection_image_vector(preds, wv, k));
  }
  return out;
}

Ranking detection_rank(const std::string& word, const WordVectorTable& wv,
                       const ImageVectors& image_vectors, std::span<const std::string> candidates) {
  const Eigen::VectorXd query = wv.lookup(word);
  Ranking ranking;
  if (candidates.empty()) {
    for (const auto& [id, v] : image_vectors) ranking.push_back({id, cosine_similarity(v, query)});
  } else {
    for (const auto& id : candidates) {
      auto it = image_vectors.find(id);
      if (it == image_vectors.end()) {
        throw DataError("image \"" + id + "\" has no detection vector");
      }
      ranking.push_back({id, cosine_similarity(it->second, query)});
    }
  }
  sort_ranking(ranking);
  return ranking;
}

KSelection select_detection_k(const WordVectorTable& wv, const DetectionTable& detections,
                              std::span<const LabeledSubset> labeled, int k_min, int k_max) {
  if (labeled.empty()) throw DataError("select_detection_k: no labeled subsets");
  if (k_min < 1 || k_max > 20 || k_min > k_max) {
    throw ConfigError("K range must lie within [1, 20]");
  }
  KSelection sel;
  double best = -1.0;
  for (int k = k_min; k <= k_max; ++k) {
    const auto vectors = detection_image_vectors(detections, wv, k);
    const Ranker ranker = [&](const std::string& word, std::span<const std::string> cands) {
      return detection_rank(word, wv, vectors, cands);
    };
    const double mean = evaluate_model("detection", ranker, labeled).mean_auc;
    sel.mean_auc.emplace_back(k, mean);
    if (mean > best) {
      best = mean;
      sel.best_k = k;
    }
  }
  return sel;
}

}  // namespace lexground
