#include "lexground/tagger.hpp"

#include "lexground/adam.hpp"
#include "lexground/errors.hpp"
#include "lexground/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace lexground {

std::string_view to_string(TaggerMode mode) {
  return mode == TaggerMode::softmax ? "softmax" : "multinomial";
}

TaggerMode tagger_mode_from_string(std::string_view s) {
  if (s == "softmax") return TaggerMode::softmax;
  if (s == "multinomial") return TaggerMode::multinomial;
  throw ConfigError("unknown tagger mode \"" + std::string(s) + "\"");
}

TaggerInput tagger_input_from_string(std::string_view s) {
  if (s == "image") return TaggerInput::image;
  if (s == "docmean") return TaggerInput::docmean;
  throw ConfigError("unknown tagger input \"" + std::string(s) + "\" (image|docmean)");
}

Mlp::Mlp(Eigen::Index input_dim, int hidden_layers, Eigen::Index hidden_width,
         Eigen::Index output_dim) {
  if (input_dim <= 0 || output_dim <= 0 || hidden_layers < 0 ||
      (hidden_layers > 0 && hidden_width <= 0)) {
    throw ConfigError("invalid MLP shape");
  }
  Eigen::Index in = input_dim;
  for (int l = 0; l < hidden_layers; ++l) {
    shapes_.emplace_back(hidden_width, in);
    in = hidden_width;
  }
  shapes_.emplace_back(output_dim, in);
  Eigen::Index offset = 0;
  for (const auto& [out, inp] : shapes_) {
    weight_offsets_.push_back(offset);
    offset += out * inp;
    bias_offsets_.push_back(offset);
    offset += out;
  }
  params_ = Eigen::VectorXd::Zero(offset);
}

void Mlp::initialize(std::uint64_t seed) {
  Rng rng(seed);
  params_.setZero();
  for (int l = 0; l < num_layers(); ++l) {
    const auto fan_in = static_cast<double>(shapes_[l].second);
    const double scale = std::sqrt((l + 1 < num_layers() ? 2.0 : 1.0) / fan_in);
    auto w = weights(l);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = scale * rng.gaussian();
    }
  }
}

Eigen::Map<Eigen::MatrixXd> Mlp::weights(int l) {
  return {params_.data() + weight_offsets_[l], shapes_[l].first, shapes_[l].second};
}
Eigen::Map<const Eigen::MatrixXd> Mlp::weights(int l) const {
  return {params_.data() + weight_offsets_[l], shapes_[l].first, shapes_[l].second};
}
Eigen::Map<Eigen::VectorXd> Mlp::bias(int l) {
  return {params_.data() + bias_offsets_[l], shapes_[l].first};
}
Eigen::Map<const Eigen::VectorXd> Mlp::bias(int l) const {
  return {params_.data() + bias_offsets_[l], shapes_[l].first};
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& inputs) const {
  if (inputs.cols() != input_dim()) {
    throw DataError("MLP expects input dimension " + std::to_string(input_dim()) + ", got " +
                    std::to_string(inputs.cols()));
  }
  Eigen::MatrixXd a = inputs;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = a * weights(l).transpose();
    z.rowwise() += bias(l).transpose();
    a = (l + 1 < num_layers()) ? Eigen::MatrixXd(z.cwiseMax(0.0)) : std::move(z);
  }
  return a;
}

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// Loss summed over rows, and dLoss/dlogits (unscaled) when `dlogits` is set.
double output_loss(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& targets, TaggerMode mode,
                   Eigen::MatrixXd* dlogits) {
  if (targets.rows() != logits.rows() || targets.cols() != logits.cols()) {
    throw DataError("tagger targets do not match output shape");
  }
  double total = 0.0;
  if (dlogits) dlogits->resize(logits.rows(), logits.cols());
  if (mode == TaggerMode::softmax) {
    for (Eigen::Index n = 0; n < logits.rows(); ++n) {
      const double top = logits.row(n).maxCoeff();
      const Eigen::RowVectorXd e = (logits.row(n).array() - top).exp().matrix();
      const double sum = e.sum();
      const double lse = top + std::log(sum);
      const double mass = targets.row(n).sum();
      total += lse * mass - targets.row(n).dot(logits.row(n));
      if (dlogits) dlogits->row(n) = (e / sum) * mass - targets.row(n);
    }
  } else {
    for (Eigen::Index n = 0; n < logits.rows(); ++n) {
      for (Eigen::Index w = 0; w < logits.cols(); ++w) {
        const double z = logits(n, w);
        total += softplus(z) - targets(n, w) * z;
        if (dlogits) (*dlogits)(n, w) = 1.0 / (1.0 + std::exp(-z)) - targets(n, w);
      }
    }
  }
  return total;
}

}  // namespace

double Mlp::loss(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                 TaggerMode mode) const {
  if (inputs.rows() == 0) throw DataError("tagger loss over an empty batch");
  return output_loss(forward(inputs), targets, mode, nullptr) /
         static_cast<double>(inputs.rows());
}

double Mlp::loss_and_gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                              TaggerMode mode, Eigen::VectorXd& gradient) const {
  if (inputs.rows() == 0) throw DataError("tagger loss over an empty batch");
  if (inputs.cols() != input_dim()) throw DataError("MLP input dimension mismatch");
  const auto n = static_cast<double>(inputs.rows());

  // activations[l] is the input of layer l; pre[l] its pre-activation.
  std::vector<Eigen::MatrixXd> activations{inputs};
  std::vector<Eigen::MatrixXd> pre;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = activations.back() * weights(l).transpose();
    z.rowwise() += bias(l).transpose();
    pre.push_back(z);
    if (l + 1 < num_layers()) activations.push_back(z.cwiseMax(0.0));
  }

  Eigen::MatrixXd delta;
  const double loss = output_loss(pre.back(), targets, mode, &delta) / n;
  delta /= n;

  gradient = Eigen::VectorXd::Zero(params_.size());
  for (int l = num_layers() - 1; l >= 0; --l) {
    Eigen::Map<Eigen::MatrixXd>(gradient.data() + weight_offsets_[l], shapes_[l].first,
                                shapes_[l].second) = delta.transpose() * activations[l];
    Eigen::Map<Eigen::VectorXd>(gradient.data() + bias_offsets_[l], shapes_[l].first) =
        delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd upstream = delta * weights(l);
      delta = (pre[l - 1].array() > 0.0).select(upstream, 0.0);
    }
  }
  return loss;
}

Eigen::MatrixXd tagger_scores(const Eigen::MatrixXd& logits, TaggerMode mode) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  if (mode == TaggerMode::softmax) {
    for (Eigen::Index n = 0; n < logits.rows(); ++n) {
      const Eigen::RowVectorXd e = (logits.row(n).array() - logits.row(n).maxCoeff()).exp().matrix();
      out.row(n) = e / e.sum();
    }
  } else {
    out = (1.0 + (-logits.array()).exp()).inverse().matrix();
  }
  return out;
}

TaggerTargets build_tagger_targets(const Corpus& corpus, const Vocabulary& vocab,
                                   TaggerMode mode) {
  TaggerTargets out;
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<int> types;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const auto& doc = corpus.documents[d];
    types.clear();
    for (const auto& t : doc.tokens) {
      if (auto w = vocab.find(t)) types.push_back(static_cast<int>(*w));
    }
    std::sort(types.begin(), types.end());
    types.erase(std::unique(types.begin(), types.end()), types.end());
    if (types.empty() && mode == TaggerMode::softmax) {
      out.skipped.push_back(doc.doc_id);
      continue;
    }
    const int row = static_cast<int>(out.documents.size());
    const double value = mode == TaggerMode::softmax ? 1.0 / static_cast<double>(types.size()) : 1.0;
    for (int w : types) triplets.emplace_back(row, w, value);
    out.documents.push_back(d);
  }
  out.targets.resize(static_cast<Eigen::Index>(out.documents.size()),
                     static_cast<Eigen::Index>(vocab.size()));
  out.targets.setFromTriplets(triplets.begin(), triplets.end());
  out.targets.makeCompressed();
  return out;
}

TaggerData make_tagger_data(const Corpus& corpus, const Vocabulary& vocab,
                            const FeatureTable& features, TaggerMode mode, TaggerInput input) {
  const TaggerTargets t = build_tagger_targets(corpus, vocab, mode);
  std::vector<std::pair<int, Eigen::VectorXd>> examples;  // (target row, input)
  TaggerData data;
  for (std::size_t r = 0; r < t.documents.size(); ++r) {
    const auto& doc = corpus.documents[t.documents[r]];
    std::vector<Eigen::Index> rows;
    for (const auto& id : doc.image_ids) {
      auto row = features.find(id);
      if (!row) {
        throw DataError("document \"" + doc.doc_id + "\" references image \"" + id +
                        "\" missing from the feature table");
      }
      rows.push_back(*row);
    }
    if (rows.empty()) continue;
    if (input == TaggerInput::image) {
      for (auto row : rows) {
        examples.emplace_back(static_cast<int>(r), features.row(row).cast<double>().transpose());
        data.groups.push_back(static_cast<int>(t.documents[r]));
      }
    } else {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(features.dim());
      for (auto row : rows) mean += features.row(row).cast<double>().transpose();
      examples.emplace_back(static_cast<int>(r), mean / static_cast<double>(rows.size()));
      data.groups.push_back(static_cast<int>(t.documents[r]));
    }
  }
  if (examples.empty()) throw DataError("no tagger training examples");

  data.inputs.resize(static_cast<Eigen::Index>(examples.size()), features.dim());
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t e = 0; e < examples.size(); ++e) {
    data.inputs.row(static_cast<Eigen::Index>(e)) = examples[e].second.transpose();
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(t.targets,
                                                                       examples[e].first);
         it; ++it) {
      triplets.emplace_back(static_cast<int>(e), static_cast<int>(it.col()), it.value());
    }
  }
  data.targets.resize(data.inputs.rows(), static_cast<Eigen::Index>(vocab.size()));
  data.targets.setFromTriplets(triplets.begin(), triplets.end());
  data.targets.makeCompressed();
  return data;
}

namespace {

struct Batch {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
};

Batch gather(const TaggerData& data, std::span<const int> rows) {
  Batch b;
  b.inputs.resize(static_cast<Eigen::Index>(rows.size()), data.inputs.cols());
  b.targets = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), data.targets.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    b.inputs.row(kk) = data.inputs.row(rows[k]);
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(data.targets, rows[k]); it;
         ++it) {
      b.targets(kk, it.col()) = it.value();
    }
  }
  return b;
}

double dataset_loss(const Mlp& mlp, const TaggerData& data, std::span<const int> rows,
                    TaggerMode mode) {
  constexpr std::size_t kChunk = 1024;
  double total = 0.0;
  for (std::size_t lo = 0; lo < rows.size(); lo += kChunk) {
    const auto chunk = rows.subspan(lo, std::min(kChunk, rows.size() - lo));
    const Batch b = gather(data, chunk);
    total += mlp.loss(b.inputs, b.targets, mode) * static_cast<double>(chunk.size());
  }
  const double loss = total / static_cast<double>(rows.size());
  if (!std::isfinite(loss)) throw NumericError("tagger training diverged (non-finite loss)");
  return loss;
}

}  // namespace

TaggerModel train_tagger(const TaggerData& data, std::vector<std::string> words, TaggerMode mode,
                         const TaggerGrid& grid, std::uint64_t seed) {
  if (data.inputs.rows() == 0) throw DataError("empty tagger training data");
  if (static_cast<Eigen::Index>(words.size()) != data.targets.cols()) {
    throw DataError("tagger word list does not match target columns");
  }
  if (grid.learning_rates.empty() || grid.layer_counts.empty() || grid.batch_size == 0 ||
      grid.max_epochs <= 0) {
    throw ConfigError("tagger grid is empty");
  }

  // Document-level split: every example of a document lands on one side.
  std::vector<int> groups = data.groups;
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  Rng split_rng(substream_seed(seed, "tagger-split"));
  split_rng.shuffle(groups.begin(), groups.end());
  const auto n_val = static_cast<std::size_t>(
      std::ceil(grid.validation_fraction * static_cast<double>(groups.size())));
  if (n_val == 0 || n_val >= groups.size()) {
    throw DataError("tagger split leaves an empty training or validation set (" +
                    std::to_string(groups.size()) + " documents)");
  }
  std::vector<bool> is_val_group(static_cast<std::size_t>(*std::max_element(groups.begin(), groups.end())) + 1, false);
  for (std::size_t g = 0; g < n_val; ++g) is_val_group[static_cast<std::size_t>(groups[g])] = true;
  std::vector<int> train_rows, val_rows;
  for (int r = 0; r < static_cast<int>(data.groups.size()); ++r) {
    (is_val_group[static_cast<std::size_t>(data.groups[r])] ? val_rows : train_rows).push_back(r);
  }

  TaggerModel best;
  best.best_validation_loss = std::numeric_limits<double>::infinity();
  std::uint64_t config_index = 0;
  for (int layers : grid.layer_counts) {
    for (double lr : grid.learning_rates) {
      Mlp mlp(data.inputs.cols(), layers, grid.hidden_width, data.targets.cols());
      mlp.initialize(substream_seed(seed, "tagger-init", config_index));
      Rng batch_rng(substream_seed(seed, "tagger-batches", config_index));
      ++config_index;

      AdamState adam;
      adam.learning_rate = lr;
      const double initial_loss = dataset_loss(mlp, data, train_rows, mode);
      Eigen::VectorXd best_params = mlp.parameters();
      double best_val = std::numeric_limits<double>::infinity();
      std::vector<double> history;
      int bad_epochs = 0;
      int epochs = 0;
      std::vector<int> order = train_rows;
      Eigen::VectorXd grad;
      for (int epoch = 0; epoch < grid.max_epochs; ++epoch) {
        batch_rng.shuffle(order.begin(), order.end());
        for (std::size_t lo = 0; lo < order.size(); lo += grid.batch_size) {
          const auto rows = std::span<const int>(order).subspan(
              lo, std::min(grid.batch_size, order.size() - lo));
          const Batch b = gather(data, rows);
          const double l = mlp.loss_and_gradient(b.inputs, b.targets, mode, grad);
          if (!std::isfinite(l)) throw NumericError("tagger training diverged (non-finite loss)");
          adam_update(mlp.parameters(), grad, adam);
        }
        ++epochs;
        const double val = dataset_loss(mlp, data, val_rows, mode);
        history.push_back(val);
        if (val < best_val) {
          best_val = val;
          best_params = mlp.parameters();
          bad_epochs = 0;
        } else {
          ++bad_epochs;
          if (bad_epochs >= grid.early_stop_patience) break;
          if (bad_epochs % grid.plateau_patience == 0) adam.learning_rate *= grid.decay_factor;
        }
      }
      if (best_val < best.best_validation_loss) {
        mlp.parameters() = best_params;
        best.mode = mode;
        best.mlp = std::move(mlp);
        best.learning_rate = lr;
        best.epochs_run = epochs;
        best.validation_history = std::move(history);
        best.best_validation_loss = best_val;
        best.initial_train_loss = initial_loss;
        best.final_train_loss = dataset_loss(best.mlp, data, train_rows, mode);
      }
    }
  }
  best.words = std::move(words);
  return best;
}

Ranking tagger_rank(const TaggerModel& model, std::string_view word, const FeatureTable& features,
                    std::span<const std::string> candidates) {
  auto it = std::lower_bound(model.words.begin(), model.words.end(), word);
  if (it == model.words.end() || *it != word) {
    throw DataError("word \"" + std::string(word) + "\" is not in the tagger vocabulary");
  }
  const auto column = static_cast<Eigen::Index>(it - model.words.begin());

  std::vector<std::string> ids;
  std::vector<Eigen::Index> rows;
  if (candidates.empty()) {
    ids = features.ids();
    rows.resize(ids.size());
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  } else {
    for (const auto& id : candidates) {
      auto row = features.find(id);
      if (!row) throw DataError("candidate image \"" + id + "\" missing from the feature table");
      ids.push_back(id);
      rows.push_back(*row);
    }
  }
  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(rows.size()), features.dim());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    inputs.row(static_cast<Eigen::Index>(k)) = features.row(rows[k]).cast<double>();
  }
  const Eigen::MatrixXd scores = tagger_scores(model.mlp.forward(inputs), model.mode);
  Ranking ranking;
  ranking.reserve(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    ranking.push_back({ids[k], scores(static_cast<Eigen::Index>(k), column)});
  }
  sort_ranking(ranking);
  return ranking;
}

}  // namespace lexground
