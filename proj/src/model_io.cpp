#include "lexground/model_io.hpp"

#include "lexground/errors.hpp"
#include "lexground/numeric.hpp"

#include <json.hpp>

#include <fstream>
#include <memory>

namespace lexground {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "lexground-model/1";

void write_block(std::ostream& out, const Eigen::MatrixXd& m) {
  write_ftbl(out, m.cast<float>());
}

Eigen::MatrixXd read_block(std::istream& in, Eigen::Index rows, Eigen::Index cols,
                           const char* what) {
  const RowMatrixXf m = read_ftbl(in);
  if (m.rows() != rows || m.cols() != cols) {
    throw DataError(std::string("model block ") + what + " is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", header says " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
  return m.cast<double>();
}

}  // namespace

void save_model(const ModelFile& file, const std::filesystem::path& path) {
  json header;
  header["format"] = kFormat;
  header["config_hash"] = file.config_hash;
  header["seed"] = file.seed;
  if (file.projection) {
    header["projection"] = {{"input_dim", file.projection->input_dim},
                            {"output_dim", file.projection->output_dim},
                            {"seed", file.projection->seed}};
  } else {
    header["projection"] = nullptr;
  }

  std::vector<Eigen::MatrixXd> blocks;
  if (const auto* g = std::get_if<GroundingModel>(&file.model)) {
    header["kind"] = "grounding";
    header["vocab"] = g->words;
    header["dimension"] = g->word_vectors.cols();
    header["provenance"] = to_string(g->provenance);
    header["iterations_run"] = g->iterations_run;
    std::vector<int> flags(g->zero_norm.begin(), g->zero_norm.end());
    header["zero_norm"] = flags;
    blocks.push_back(g->word_vectors);
  } else if (const auto* d = std::get_if<DetectionModel>(&file.model)) {
    header["kind"] = "detection";
    header["vocab"] = d->words;
    header["dimension"] = d->word_vectors.cols();
    header["provenance"] = "detection";
    header["k"] = d->k;
    header["fallback_seed"] = d->fallback_seed;
    header["image_ids"] = d->image_ids;
    blocks.push_back(d->word_vectors);
    blocks.push_back(d->image_vectors);
  } else {
    const auto& t = std::get<TaggerModel>(file.model);
    header["kind"] = "tagger";
    header["provenance"] = "tagger";
    header["mode"] = to_string(t.mode);
    header["vocab"] = t.words;
    header["input_dim"] = t.mlp.input_dim();
    header["hidden_layers"] = t.mlp.hidden_layers();
    header["hidden_width"] = t.mlp.hidden_width();
    header["learning_rate"] = t.learning_rate;
    header["epochs_run"] = t.epochs_run;
    header["validation_history"] = t.validation_history;
    header["best_validation_loss"] = t.best_validation_loss;
    header["initial_train_loss"] = t.initial_train_loss;
    header["final_train_loss"] = t.final_train_loss;
    for (int l = 0; l < t.mlp.num_layers(); ++l) {
      blocks.emplace_back(t.mlp.weights(l));
      blocks.emplace_back(t.mlp.bias(l).transpose());
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model " + path.string());
  out << header.dump() << '\n';
  for (const auto& b : blocks) write_block(out, b);
  if (!out) throw DataError("failed writing model " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model " + path.string());
  std::string line;
  std::getline(in, line);
  json h;
  try {
    h = json::parse(line);
  } catch (const json::parse_error&) {
    throw DataError(path.string() + ": model header is not JSON");
  }
  try {
    if (h.at("format") != kFormat) throw DataError(path.string() + ": unsupported model format");
    ModelFile file;
    file.config_hash = h.at("config_hash").get<std::string>();
    file.seed = h.at("seed").get<std::uint64_t>();
    if (!h.at("projection").is_null()) {
      const auto& p = h["projection"];
      file.projection = ProjectionInfo{p.at("input_dim").get<Eigen::Index>(),
                                       p.at("output_dim").get<Eigen::Index>(),
                                       p.at("seed").get<std::uint64_t>()};
    }
    const auto kind = h.at("kind").get<std::string>();
    if (kind == "grounding") {
      GroundingModel g;
      g.words = h.at("vocab").get<std::vector<std::string>>();
      g.provenance = provenance_from_string(h.at("provenance").get<std::string>());
      g.iterations_run = h.at("iterations_run").get<int>();
      for (int f : h.at("zero_norm").get<std::vector<int>>()) g.zero_norm.push_back(f != 0);
      g.word_vectors = read_block(in, static_cast<Eigen::Index>(g.words.size()),
                                  h.at("dimension").get<Eigen::Index>(), "word_vectors");
      file.model = std::move(g);
    } else if (kind == "detection") {
      DetectionModel d;
      d.words = h.at("vocab").get<std::vector<std::string>>();
      d.k = h.at("k").get<int>();
      d.fallback_seed = h.at("fallback_seed").get<std::uint64_t>();
      d.image_ids = h.at("image_ids").get<std::vector<std::string>>();
      const auto dim = h.at("dimension").get<Eigen::Index>();
      d.word_vectors = read_block(in, static_cast<Eigen::Index>(d.words.size()), dim, "words");
      d.image_vectors = read_block(in, static_cast<Eigen::Index>(d.image_ids.size()), dim, "images");
      file.model = std::move(d);
    } else if (kind == "tagger") {
      TaggerModel t;
      t.mode = tagger_mode_from_string(h.at("mode").get<std::string>());
      t.words = h.at("vocab").get<std::vector<std::string>>();
      t.mlp = Mlp(h.at("input_dim").get<Eigen::Index>(), h.at("hidden_layers").get<int>(),
                  h.at("hidden_width").get<Eigen::Index>(),
                  static_cast<Eigen::Index>(t.words.size()));
      t.learning_rate = h.at("learning_rate").get<double>();
      t.epochs_run = h.at("epochs_run").get<int>();
      t.validation_history = h.at("validation_history").get<std::vector<double>>();
      t.best_validation_loss = h.at("best_validation_loss").get<double>();
      t.initial_train_loss = h.at("initial_train_loss").get<double>();
      t.final_train_loss = h.at("final_train_loss").get<double>();
      for (int l = 0; l < t.mlp.num_layers(); ++l) {
        auto w = t.mlp.weights(l);
        w = read_block(in, w.rows(), w.cols(), "weights");
        auto b = t.mlp.bias(l);
        b = read_block(in, 1, b.size(), "bias").transpose();
      }
      file.model = std::move(t);
    } else {
      throw DataError(path.string() + ": unknown model kind \"" + kind + "\"");
    }
    return file;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": bad model header (" + e.what() + ")");
  }
}

std::string method_name(const ModelFile& file) {
  if (const auto* g = std::get_if<GroundingModel>(&file.model)) {
    return std::string(to_string(g->provenance));
  }
  if (std::holds_alternative<DetectionModel>(file.model)) return "detection";
  return std::string(to_string(std::get<TaggerModel>(file.model).mode));
}

Ranker make_ranker(const ModelFile& file, const FeatureTable* features) {
  if (const auto* d = std::get_if<DetectionModel>(&file.model)) {
    auto wv = std::make_shared<WordVectorTable>(d->word_vectors.cols(), d->fallback_seed);
    for (std::size_t w = 0; w < d->words.size(); ++w) {
      wv->add(d->words[w], d->word_vectors.row(static_cast<Eigen::Index>(w)).transpose());
    }
    auto vectors = std::make_shared<ImageVectors>();
    for (std::size_t i = 0; i < d->image_ids.size(); ++i) {
      vectors->emplace(d->image_ids[i], d->image_vectors.row(static_cast<Eigen::Index>(i)).transpose());
    }
    return [wv, vectors](const std::string& word, std::span<const std::string> candidates) {
      return detection_rank(word, *wv, *vectors, candidates);
    };
  }
  if (!features) throw ConfigError("this model needs a feature table to rank images");
  if (const auto* g = std::get_if<GroundingModel>(&file.model)) {
    auto table = std::make_shared<FeatureTable>(*features);
    if (file.projection) {
      if (features->dim() != file.projection->input_dim) {
        throw DataError("model was trained on " + std::to_string(file.projection->input_dim) +
                        "-dimensional features, got " + std::to_string(features->dim()));
      }
      *table = random_projection(*features, file.projection->output_dim, file.projection->seed);
    }
    auto model = std::make_shared<GroundingModel>(*g);
    return [model, table](const std::string& word, std::span<const std::string> candidates) {
      return rank_images(*model, word, *table, candidates);
    };
  }
  auto model = std::make_shared<TaggerModel>(std::get<TaggerModel>(file.model));
  auto table = std::make_shared<FeatureTable>(*features);
  return [model, table](const std::string& word, std::span<const std::string> candidates) {
    return tagger_rank(*model, word, *table, candidates);
  };
}

}  // namespace lexground
