#include "lexground/eval.hpp"

#include "lexground/errors.hpp"
#include "lexground/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace lexground {

using nlohmann::json;

void sort_ranking(Ranking& ranking) {
  std::sort(ranking.begin(), ranking.end(), [](const ScoredImage& a, const ScoredImage& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.image_id < b.image_id;
  });
}

std::vector<std::string> ranking_ids(const Ranking& ranking) {
  std::vector<std::string> ids;
  ids.reserve(ranking.size());
  for (const auto& r : ranking) ids.push_back(r.image_id);
  return ids;
}

std::size_t LabeledSubset::positives() const {
  return static_cast<std::size_t>(std::count_if(
      items.begin(), items.end(), [](const auto& item) { return item.second == 1; }));
}

double LabeledSubset::positive_fraction() const {
  if (items.empty()) return 0.0;
  return static_cast<double>(positives()) / static_cast<double>(items.size());
}

std::vector<std::string> LabeledSubset::image_ids() const {
  std::vector<std::string> ids;
  ids.reserve(items.size());
  for (const auto& [id, label] : items) ids.push_back(id);
  return ids;
}

namespace {

// Labels of `ranking` in rank order, after checking it permutes the subset.
std::vector<int> ranked_labels(std::span<const std::string> ranking,
                               const LabeledSubset& subset) {
  std::unordered_map<std::string_view, int> label_of;
  label_of.reserve(subset.items.size());
  for (const auto& [id, label] : subset.items) {
    if (label != 0 && label != 1) {
      throw DataError("subset \"" + subset.word + "\": label for " + id + " is not 0/1");
    }
    if (!label_of.emplace(id, label).second) {
      throw DataError("subset \"" + subset.word + "\": duplicate image " + id);
    }
  }
  if (ranking.size() != subset.items.size()) {
    throw DataError("ranking for \"" + subset.word + "\" has " + std::to_string(ranking.size()) +
                    " images, subset has " + std::to_string(subset.items.size()));
  }
  std::vector<int> labels;
  labels.reserve(ranking.size());
  std::unordered_set<std::string_view> used;
  for (const auto& id : ranking) {
    auto it = label_of.find(id);
    if (it == label_of.end()) {
      throw DataError("ranking for \"" + subset.word + "\" contains unlabeled image " + id);
    }
    if (!used.insert(id).second) {
      throw DataError("ranking for \"" + subset.word + "\" repeats image " + id);
    }
    labels.push_back(it->second);
  }
  return labels;
}

double ap_from_labels(const std::vector<int>& labels, const std::string& word) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] == 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  if (hits == 0) throw DataError("subset \"" + word + "\" has no positive labels");
  return 100.0 * sum / static_cast<double>(hits);
}

}  // namespace

double average_precision_auc(std::span<const std::string> ranking, const LabeledSubset& subset) {
  return ap_from_labels(ranked_labels(ranking, subset), subset.word);
}

PrCurve pr_curve(std::span<const std::string> ranking, const LabeledSubset& subset) {
  const auto labels = ranked_labels(ranking, subset);
  PrCurve curve;
  curve.auc = ap_from_labels(labels, subset.word);
  const double total = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  std::size_t hits = 0;
  curve.points.reserve(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    hits += static_cast<std::size_t>(labels[k]);
    curve.points.emplace_back(static_cast<double>(hits) / total,
                              static_cast<double>(hits) / static_cast<double>(k + 1));
  }
  return curve;
}

EvalReport evaluate_model(const std::string& method, const Ranker& ranker,
                          std::span<const LabeledSubset> subsets) {
  if (subsets.empty()) throw DataError("evaluate_model: no labeled subsets");
  EvalReport report;
  report.method = method;
  for (const auto& subset : subsets) {
    const auto candidates = subset.image_ids();
    const auto ranking = ranking_ids(ranker(subset.word, candidates));
    WordResult r;
    r.word = subset.word;
    r.curve = pr_curve(ranking, subset);
    r.auc = r.curve.auc;
    r.random_auc = 100.0 * subset.positive_fraction();
    report.mean_auc += r.auc;
    report.mean_random_auc += r.random_auc;
    report.words.push_back(std::move(r));
  }
  report.mean_auc /= static_cast<double>(subsets.size());
  report.mean_random_auc /= static_cast<double>(subsets.size());
  return report;
}

double monte_carlo_random_ap(const LabeledSubset& subset, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw ConfigError("monte_carlo_random_ap: trials must be positive");
  std::vector<int> labels;
  for (const auto& item : subset.items) labels.push_back(item.second);
  Rng rng(seed);
  double total = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    rng.shuffle(labels.begin(), labels.end());
    total += ap_from_labels(labels, subset.word);
  }
  return total / static_cast<double>(trials);
}

std::vector<LabeledSubset> load_labeled_subsets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labels " + path.string());
  std::vector<LabeledSubset> subsets;
  std::unordered_map<std::string, std::size_t> slot;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(path.string() + " line " + std::to_string(line_no) + ": malformed JSON");
    }
    if (!j.is_object() || !j.contains("word") || !j["word"].is_string() ||
        !j.contains("image_id") || !j["image_id"].is_string() || !j.contains("label") ||
        !j["label"].is_number_integer()) {
      throw DataError(path.string() + " line " + std::to_string(line_no) +
                      ": expected {\"word\", \"image_id\", \"label\"}");
    }
    const int label = j["label"].get<int>();
    if (label != 0 && label != 1) {
      throw DataError(path.string() + " line " + std::to_string(line_no) + ": label must be 0 or 1");
    }
    const auto word = j["word"].get<std::string>();
    auto [it, inserted] = slot.emplace(word, subsets.size());
    if (inserted) subsets.push_back(LabeledSubset{word, {}});
    subsets[it->second].items.emplace_back(j["image_id"].get<std::string>(), label);
  }
  for (const auto& s : subsets) {
    std::unordered_set<std::string> ids;
    for (const auto& [id, label] : s.items) {
      if (!ids.insert(id).second) {
        throw DataError("labels for \"" + s.word + "\" repeat image " + id);
      }
    }
  }
  return subsets;
}

void save_labeled_subsets(std::span<const LabeledSubset> subsets,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write labels " + path.string());
  for (const auto& s : subsets) {
    for (const auto& [id, label] : s.items) {
      out << json{{"word", s.word}, {"image_id", id}, {"label", label}}.dump() << '\n';
    }
  }
}

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

void write_report_csv(std::span<const EvalReport> reports, const std::filesystem::path& path,
                      std::span<const std::string> header_comment) {
  if (reports.empty()) throw DataError("write_report_csv: no reports");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write report " + path.string());
  for (const auto& line : header_comment) out << "# " << line << '\n';
  const auto& first = reports.front();
  out << "method,metric";
  for (const auto& w : first.words) out << ',' << w.word;
  out << ",mean\n";
  out << "random,average_precision";
  for (const auto& w : first.words) out << ',' << fixed(w.random_auc);
  out << ',' << fixed(first.mean_random_auc) << '\n';
  for (const auto& r : reports) {
    out << r.method << ",average_precision";
    for (const auto& w : r.words) out << ',' << fixed(w.auc);
    out << ',' << fixed(r.mean_auc) << '\n';
  }
}

void write_report_json(std::span<const EvalReport> reports, const std::filesystem::path& path,
                       const std::map<std::string, std::string>& metadata) {
  json j;
  j["metric"] = "average_precision";
  for (const auto& [k, v] : metadata) j["metadata"][k] = v;
  j["methods"] = json::array();
  for (const auto& r : reports) {
    json m;
    m["method"] = r.method;
    m["mean_auc"] = r.mean_auc;
    m["mean_random_auc"] = r.mean_random_auc;
    m["words"] = json::array();
    for (const auto& w : r.words) {
      json points = json::array();
      for (const auto& [rec, prec] : w.curve.points) points.push_back({rec, prec});
      m["words"].push_back(
          {{"word", w.word}, {"auc", w.auc}, {"random_auc", w.random_auc}, {"pr_curve", points}});
    }
    j["methods"].push_back(std::move(m));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write report " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace lexground
