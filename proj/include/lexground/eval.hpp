#pragma once

#include <filesystem>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lexground {

struct ScoredImage {
  std::string image_id;
  double score = 0.0;
};

/// Images ordered best-first.
using Ranking = std::vector<ScoredImage>;

/// Sorts by score descending, ties broken by image_id ascending.
void sort_ranking(Ranking& ranking);

std::vector<std::string> ranking_ids(const Ranking& ranking);

/// Human relevance judgments for a random image sample, for one word.
struct LabeledSubset {
  std::string word;
  std::vector<std::pair<std::string, int>> items;  // (image_id, label in {0,1})

  std::size_t positives() const;
  double positive_fraction() const;
  std::vector<std::string> image_ids() const;
};

/// Average precision, scaled to [0, 100]:
///   AP = 100/P * sum over positive ranks k of precision@k.
/// `ranking` must be a permutation of the subset's image ids.
double average_precision_auc(std::span<const std::string> ranking, const LabeledSubset& subset);

struct PrCurve {
  std::vector<std::pair<double, double>> points;  // (recall@k, precision@k), k = 1..n
  double auc = 0.0;
};

/// One (recall, precision) point per rank cut; `auc` is the average precision.
PrCurve pr_curve(std::span<const std::string> ranking, const LabeledSubset& subset);

/// Ranks `candidates` for `word`. Must return exactly the candidate set.
using Ranker =
    std::function<Ranking(const std::string& word, std::span<const std::string> candidates)>;

struct WordResult {
  std::string word;
  double auc = 0.0;
  double random_auc = 0.0;  // 100 * positive fraction
  PrCurve curve;
};

struct EvalReport {
  std::string method;
  std::vector<WordResult> words;
  double mean_auc = 0.0;
  double mean_random_auc = 0.0;
};

/// Ranks each subset's full image sample and scores it with average precision.
/// Every subset needs at least one positive.
EvalReport evaluate_model(const std::string& method, const Ranker& ranker,
                          std::span<const LabeledSubset> subsets);

/// Mean AP of `trials` uniformly shuffled rankings of the subset.
double monte_carlo_random_ap(const LabeledSubset& subset, std::size_t trials, std::uint64_t seed);

/// JSONL lines {"word","image_id","label"}; lines for a word are grouped into
/// one subset in first-appearance order.
std::vector<LabeledSubset> load_labeled_subsets(const std::filesystem::path& path);
void save_labeled_subsets(std::span<const LabeledSubset> subsets,
                          const std::filesystem::path& path);

/// Table layout: one row per method (plus a leading "random" row), one column
/// per word, then "mean". `header_comment` lines are written first, '#'-prefixed.
void write_report_csv(std::span<const EvalReport> reports, const std::filesystem::path& path,
                      std::span<const std::string> header_comment = {});
void write_report_json(std::span<const EvalReport> reports, const std::filesystem::path& path,
                       const std::map<std::string, std::string>& metadata = {});

}  // namespace lexground
