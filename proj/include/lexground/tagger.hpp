#pragma once

#include "lexground/corpus.hpp"
#include "lexground/eval.hpp"
#include "lexground/feature_table.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexground {

enum class TaggerMode { softmax, multinomial };
enum class TaggerInput { image, docmean };

std::string_view to_string(TaggerMode mode);
TaggerMode tagger_mode_from_string(std::string_view s);
TaggerInput tagger_input_from_string(std::string_view s);

/// Fully connected network with ReLU between hidden layers. All weights and
/// biases live in one flat parameter vector; layer l maps in(l) -> out(l)
/// as z = W a + b with W stored column-major (out x in).
class Mlp {
 public:
  Mlp() = default;
  Mlp(Eigen::Index input_dim, int hidden_layers, Eigen::Index hidden_width,
      Eigen::Index output_dim);

  /// He-scaled Gaussian weights, zero biases.
  void initialize(std::uint64_t seed);

  int num_layers() const { return static_cast<int>(shapes_.size()); }
  int hidden_layers() const { return num_layers() - 1; }
  Eigen::Index input_dim() const { return shapes_.front().second; }
  Eigen::Index output_dim() const { return shapes_.back().first; }
  Eigen::Index hidden_width() const { return num_layers() > 1 ? shapes_.front().first : 0; }

  Eigen::Map<Eigen::MatrixXd> weights(int layer);
  Eigen::Map<const Eigen::MatrixXd> weights(int layer) const;
  Eigen::Map<Eigen::VectorXd> bias(int layer);
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  /// Output-layer logits, one row per input row.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;

  /// Mean per-example loss. Softmax mode: cross-entropy against the
  /// (l1-normalized) targets; multinomial: summed per-word binary cross-entropy.
  double loss(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
              TaggerMode mode) const;

  /// Loss plus its gradient with respect to parameters().
  double loss_and_gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                           TaggerMode mode, Eigen::VectorXd& gradient) const;

 private:
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes_;  // (out, in) per layer
  std::vector<Eigen::Index> weight_offsets_;
  std::vector<Eigen::Index> bias_offsets_;
  Eigen::VectorXd params_;
};

/// Output-layer scores: softmax probabilities or per-word sigmoids.
Eigen::MatrixXd tagger_scores(const Eigen::MatrixXd& logits, TaggerMode mode);

struct TaggerTargets {
  Eigen::SparseMatrix<double, Eigen::RowMajor> targets;  // included docs x |V|
  std::vector<std::size_t> documents;                   // corpus index of each row
  std::vector<std::string> skipped;                      // doc ids without in-vocab types
};

/// Word-type indicator per document; l1-normalized in softmax mode.
TaggerTargets build_tagger_targets(const Corpus& corpus, const Vocabulary& vocab,
                                   TaggerMode mode);

/// Training examples: inputs, their target rows, and the document each came
/// from (the unit of the validation split).
struct TaggerData {
  Eigen::MatrixXd inputs;
  Eigen::SparseMatrix<double, Eigen::RowMajor> targets;
  std::vector<int> groups;
};

/// `image`: every image is an example carrying its document's targets.
/// `docmean`: one example per document, the mean of its image features.
TaggerData make_tagger_data(const Corpus& corpus, const Vocabulary& vocab,
                            const FeatureTable& features, TaggerMode mode, TaggerInput input);

struct TaggerGrid {
  std::vector<double> learning_rates{0.001, 0.0005, 0.0007};
  std::vector<int> layer_counts{0, 1, 2, 3, 4, 5};
  Eigen::Index hidden_width = 256;
  std::size_t batch_size = 256;
  int max_epochs = 100;
  int plateau_patience = 3;
  double decay_factor = 0.5;
  int early_stop_patience = 10;
  double validation_fraction = 0.2;
};

struct TaggerModel {
  TaggerMode mode = TaggerMode::multinomial;
  Mlp mlp;
  std::vector<std::string> words;  // output columns, vocabulary order
  double learning_rate = 0.0;
  int epochs_run = 0;
  std::vector<double> validation_history;
  double best_validation_loss = 0.0;
  double initial_train_loss = 0.0;
  double final_train_loss = 0.0;
};

/// Grid search over (learning rate, hidden layer count). Each configuration
/// trains with Adam on a document-level 80/20 split, halving the learning
/// rate after `plateau_patience` epochs without validation improvement and
/// stopping after `early_stop_patience`. Returns the configuration with the
/// lowest validation loss, at its best epoch.
TaggerModel train_tagger(const TaggerData& data, std::vector<std::string> words, TaggerMode mode,
                         const TaggerGrid& grid, std::uint64_t seed);

/// Score = model output for `word` given each candidate's feature row.
Ranking tagger_rank(const TaggerModel& model, std::string_view word, const FeatureTable& features,
                    std::span<const std::string> candidates = {});

}  // namespace lexground
