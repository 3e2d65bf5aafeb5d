#include "lexground/cli.hpp"

#include "lexground/corpus.hpp"
#include "lexground/detection.hpp"
#include "lexground/entsharp.hpp"
#include "lexground/errors.hpp"
#include "lexground/eval.hpp"
#include "lexground/model_io.hpp"
#include "lexground/numeric.hpp"
#include "lexground/rng.hpp"
#include "lexground/similarity.hpp"
#include "lexground/synth.hpp"
#include "lexground/tagger.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>

namespace lexground {

using nlohmann::json;
namespace fs = std::filesystem;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    RunConfig, corpus, features, word_vectors, detections, labels, out, model_files, words, model,
    iterations, projection_dim, min_count, k, k_min, k_max, learning_rates, layer_counts,
    hidden_width, batch_size, max_epochs, tagger_input, b_words, b_images, n_pairs, confidence,
    synth_documents, synth_images_per_doc, synth_dim, synth_noise_rate, synth_detection_alignment,
    synth_background, seed, threads)

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct ArtifactTag {
  std::string hash;
  std::uint64_t seed;

  std::string comment() const { return "config_hash=" + hash + " seed=" + std::to_string(seed); }
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void write_json(const json& j, const fs::path& path) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

std::vector<LabeledSubset> subsets_for(const std::vector<LabeledSubset>& labels,
                                       const std::vector<std::string>& words) {
  const std::set<std::string> known(words.begin(), words.end());
  std::vector<LabeledSubset> kept;
  for (const auto& s : labels) {
    if (known.contains(s.word) && s.positives() > 0) kept.push_back(s);
  }
  return kept;
}

// ingest

void run_ingest(const RunConfig& cfg, const ArtifactTag& prov) {
  const Corpus corpus = load_corpus(cfg.corpus);
  const FeatureTable features = load_feature_table(cfg.features);
  const Vocabulary vocab = build_vocabulary(corpus, cfg.min_count);
  const CooccurrenceIndex cooc = build_cooccurrence(corpus, vocab, features);
  const CorpusStats stats = corpus.stats();

  json manifest;
  manifest["command"] = "ingest";
  manifest["config_hash"] = prov.hash;
  manifest["seed"] = prov.seed;
  manifest["documents"] = stats.documents;
  manifest["tokens"] = stats.tokens;
  manifest["distinct_images"] = stats.distinct_images;
  manifest["feature_rows"] = features.rows();
  manifest["feature_dim"] = features.dim();
  manifest["vocabulary_size"] = vocab.size();
  manifest["indexed_images"] = cooc.num_images();
  manifest["indexed_words"] = cooc.num_words();
  manifest["cooccurrence_pairs"] = cooc.num_pairs();
  manifest["excluded_images"] = cooc.excluded_images();
  manifest["excluded_words"] = cooc.excluded_words();
  manifest["config"] = json::parse(run_config_json(cfg));
  write_json(manifest, fs::path(cfg.out) / "manifest.json");

  auto out = open_output(fs::path(cfg.out) / "vocabulary.tsv");
  out << "# " << prov.comment() << '\n' << "word\tcount\n";
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    out << vocab.words[w] << '\t' << vocab.counts[w] << '\n';
  }
}

// train

void write_grounding_trace(const fs::path& path, const ArtifactTag& prov,
                           const std::vector<LabeledSubset>& labels,
                           const GroundingModel& initial, const FeatureTable& features,
                           double initial_entropy, const TrainTrace* trace) {
  auto out = open_output(path);
  out << "# " << prov.comment() << '\n';
  out << "iteration,mean_entropy,max_centroid_displacement";
  for (const auto& s : labels) out << ",auc_" << s.word;
  out << '\n';

  out << "0," << fmt(initial_entropy) << ",0";
  for (const auto& s : labels) {
    const auto ids = s.image_ids();
    out << ',' << fmt(average_precision_auc(ranking_ids(rank_images(initial, s.word, features, ids)), s));
  }
  out << '\n';
  if (!trace) return;
  for (const auto& r : trace->records) {
    out << r.iteration << ',' << fmt(r.mean_entropy) << ',' << fmt(r.max_centroid_displacement);
    for (double auc : r.word_auc) out << ',' << fmt(auc);
    out << '\n';
  }
}

void train_grounding(const RunConfig& cfg, const ArtifactTag& prov, ModelFile& file) {
  const Corpus corpus = load_corpus(cfg.corpus);
  FeatureTable features = load_feature_table(cfg.features);
  if (cfg.projection_dim > 0 && features.dim() > cfg.projection_dim) {
    const ProjectionInfo info{features.dim(), cfg.projection_dim, substream_seed(cfg.seed, "projection")};
    features = random_projection(features, info.output_dim, info.seed);
    file.projection = info;
  }
  const Vocabulary vocab = build_vocabulary(corpus, cfg.min_count);
  const CooccurrenceIndex cooc = build_cooccurrence(corpus, vocab, features);

  const GroundingModel initial = untrained_baseline(cooc, features);
  std::vector<LabeledSubset> labels;
  if (!cfg.labels.empty()) labels = subsets_for(load_labeled_subsets(cfg.labels), initial.words);
  const double initial_entropy = init_memberships(cooc).mean_entropy;

  const fs::path trace_path = fs::path(cfg.out) / "trace.csv";
  if (cfg.model == "untrained") {
    file.model = initial;
    write_grounding_trace(trace_path, prov, labels, initial, features, initial_entropy, nullptr);
    return;
  }
  TrainOptions options;
  options.iterations = cfg.iterations;
  options.threads = cfg.threads;
  options.trace_labels = labels;
  TrainResult result = train(cooc, features, options);
  write_grounding_trace(trace_path, prov, labels, initial, features, result.trace.initial_entropy,
                        &result.trace);
  file.model = std::move(result.model);
}

void train_detection(const RunConfig& cfg, const ArtifactTag& prov, ModelFile& file) {
  const std::uint64_t fallback_seed = substream_seed(cfg.seed, "fallback-vectors");
  const WordVectorTable wv = load_word_vectors(cfg.word_vectors, fallback_seed);
  const DetectionTable detections = load_detections(cfg.detections);

  std::set<std::string> words;
  if (!cfg.corpus.empty()) {
    for (const auto& w : build_vocabulary(load_corpus(cfg.corpus), cfg.min_count).words) words.insert(w);
  }
  std::vector<LabeledSubset> labels;
  if (!cfg.labels.empty()) {
    labels = load_labeled_subsets(cfg.labels);
    for (const auto& s : labels) words.insert(s.word);
  }
  if (words.empty()) throw ConfigError("detection training needs a corpus or a label file for its vocabulary");

  auto trace = open_output(fs::path(cfg.out) / "trace.csv");
  trace << "# " << prov.comment() << '\n' << "k,mean_auc\n";
  int k = cfg.k;
  if (k == 0) {
    if (labels.empty()) throw ConfigError("detection needs --k or a label file to select K");
    const KSelection sel = select_detection_k(wv, detections, labels, cfg.k_min, cfg.k_max);
    for (const auto& [kk, auc] : sel.mean_auc) trace << kk << ',' << fmt(auc) << '\n';
    k = sel.best_k;
  } else {
    trace << k << ",\n";
  }

  DetectionModel model;
  model.k = k;
  model.fallback_seed = fallback_seed;
  model.words.assign(words.begin(), words.end());
  model.word_vectors.resize(static_cast<Eigen::Index>(model.words.size()), wv.dim());
  for (std::size_t w = 0; w < model.words.size(); ++w) {
    model.word_vectors.row(static_cast<Eigen::Index>(w)) = wv.lookup(model.words[w]).transpose();
  }
  const ImageVectors vectors = detection_image_vectors(detections, wv, k);
  model.image_vectors.resize(static_cast<Eigen::Index>(vectors.size()), wv.dim());
  Eigen::Index row = 0;
  for (const auto& [id, v] : vectors) {
    model.image_ids.push_back(id);
    model.image_vectors.row(row++) = v.transpose();
  }
  file.model = std::move(model);
}

void train_tagger_model(const RunConfig& cfg, const ArtifactTag& prov, ModelFile& file) {
  const Corpus corpus = load_corpus(cfg.corpus);
  const FeatureTable features = load_feature_table(cfg.features);
  const Vocabulary vocab = build_vocabulary(corpus, cfg.min_count);
  const TaggerMode mode = tagger_mode_from_string(cfg.model);
  const TaggerData data =
      make_tagger_data(corpus, vocab, features, mode, tagger_input_from_string(cfg.tagger_input));

  TaggerGrid grid;
  grid.learning_rates = cfg.learning_rates;
  grid.layer_counts = cfg.layer_counts;
  grid.hidden_width = cfg.hidden_width;
  grid.batch_size = cfg.batch_size;
  grid.max_epochs = cfg.max_epochs;
  TaggerModel model = train_tagger(data, vocab.words, mode, grid, cfg.seed);

  auto trace = open_output(fs::path(cfg.out) / "trace.csv");
  trace << "# " << prov.comment() << " learning_rate=" << fmt(model.learning_rate)
        << " hidden_layers=" << model.mlp.hidden_layers() << '\n'
        << "epoch,validation_loss\n";
  for (std::size_t e = 0; e < model.validation_history.size(); ++e) {
    trace << e + 1 << ',' << fmt(model.validation_history[e]) << '\n';
  }
  file.model = std::move(model);
}

void run_train(const RunConfig& cfg, const ArtifactTag& prov) {
  ModelFile file;
  file.config_hash = prov.hash;
  file.seed = prov.seed;
  if (cfg.model == "entsharp" || cfg.model == "untrained") {
    train_grounding(cfg, prov, file);
  } else if (cfg.model == "detection") {
    train_detection(cfg, prov, file);
  } else {
    train_tagger_model(cfg, prov, file);
  }
  save_model(file, fs::path(cfg.out) / "model.bin");
}

// rank / eval

std::optional<FeatureTable> optional_features(const RunConfig& cfg) {
  if (cfg.features.empty()) return std::nullopt;
  return load_feature_table(cfg.features);
}

void run_rank(const RunConfig& cfg, const ArtifactTag& prov) {
  const ModelFile file = load_model(cfg.model_files.front());
  const auto features = optional_features(cfg);
  const Ranker ranker = make_ranker(file, features ? &*features : nullptr);

  auto out = open_output(fs::path(cfg.out) / "ranking.csv");
  out << "# " << prov.comment() << " model=" << method_name(file)
      << " model_config_hash=" << file.config_hash << '\n';
  out << "word,rank,image_id,score\n";
  for (const auto& word : cfg.words) {
    const Ranking ranking = ranker(word, {});
    for (std::size_t r = 0; r < ranking.size(); ++r) {
      out << word << ',' << r + 1 << ',' << ranking[r].image_id << ',' << fmt(ranking[r].score) << '\n';
    }
  }
}

void run_eval(const RunConfig& cfg, const ArtifactTag& prov) {
  const auto subsets = load_labeled_subsets(cfg.labels);
  const auto features = optional_features(cfg);

  std::vector<EvalReport> reports;
  std::vector<std::string> comments{prov.comment()};
  std::map<std::string, std::string> metadata{{"config_hash", prov.hash},
                                              {"seed", std::to_string(prov.seed)}};
  for (std::size_t m = 0; m < cfg.model_files.size(); ++m) {
    const ModelFile file = load_model(cfg.model_files[m]);
    const std::string method = method_name(file);
    reports.push_back(evaluate_model(method, make_ranker(file, features ? &*features : nullptr), subsets));
    comments.push_back("model " + method + " config_hash=" + file.config_hash +
                       " seed=" + std::to_string(file.seed));
    metadata["model_" + std::to_string(m)] = method + " " + file.config_hash;
  }
  write_report_csv(reports, fs::path(cfg.out) / "report.csv", comments);
  write_report_json(reports, fs::path(cfg.out) / "report.json", metadata);
}

// diversity / synth

void run_diversity(const RunConfig& cfg, const ArtifactTag& prov) {
  const Corpus corpus = load_corpus(cfg.corpus);
  const FeatureTable features = load_feature_table(cfg.features);
  std::optional<WordVectorTable> wv;
  if (!cfg.word_vectors.empty()) {
    wv = load_word_vectors(cfg.word_vectors, substream_seed(cfg.seed, "fallback-vectors"));
  }
  DiversityOptions options;
  options.n_pairs = cfg.n_pairs;
  options.b_words = cfg.b_words;
  options.b_images = cfg.b_images;
  options.confidence = cfg.confidence;
  options.seed = cfg.seed;
  options.threads = cfg.threads;
  const DiversityReport report = corpus_diversity(corpus, features, wv ? &*wv : nullptr, options);
  write_diversity_json(report, fs::path(cfg.out) / "diversity.json",
                       {{"config_hash", prov.hash}, {"seed", std::to_string(prov.seed)}});
  write_pair_distances_csv(report, fs::path(cfg.out) / "pairs.csv");
}

void run_synth(const RunConfig& cfg, const ArtifactTag& prov) {
  SynthSpec spec = default_synth_spec();
  spec.documents = cfg.synth_documents;
  spec.images_per_doc = cfg.synth_images_per_doc;
  spec.dim = cfg.synth_dim;
  spec.noise_rate = cfg.synth_noise_rate;
  spec.detection_alignment = cfg.synth_detection_alignment;
  if (!cfg.synth_background) spec.background_words.clear();
  const SynthBundle bundle = generate_synthetic_corpus(spec, cfg.seed);
  write_synth_bundle(bundle, cfg.out);

  json manifest;
  manifest["command"] = "synth";
  manifest["config_hash"] = prov.hash;
  manifest["seed"] = prov.seed;
  manifest["documents"] = bundle.corpus.documents.size();
  manifest["images"] = bundle.features.rows();
  manifest["dim"] = bundle.features.dim();
  manifest["cluster_words"] = spec.cluster_words;
  manifest["files"] = {"corpus.jsonl", "features.ids", "features.f32", "labels.jsonl",
                       "word_vectors.txt", "detections.jsonl"};
  manifest["config"] = json::parse(run_config_json(cfg));
  write_json(manifest, fs::path(cfg.out) / "manifest.json");
}

bool input_exists(const std::string& path) {
  if (fs::exists(path)) return true;
  return fs::exists(path + ".ids");  // feature-table stem
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void require_path(const std::string& path, const char* flag) {
  require(!path.empty(), std::string("missing required input --") + flag);
}

const std::set<std::string> kSubcommands{"ingest", "train", "rank", "eval", "diversity", "synth"};
const std::set<std::string> kModels{"entsharp", "untrained", "detection", "softmax", "multinomial"};

}  // namespace

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path.string() + ": config must be a JSON object");
  const json known = RunConfig{};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError(path.string() + ": unknown config key \"" + key + "\"");
  }
  try {
    return j.get<RunConfig>();
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string run_config_json(const RunConfig& config) { return json(config).dump(); }

std::string config_hash(const RunConfig& config) {
  json j = config;
  j.erase("out");
  j.erase("threads");
  return hex16(fnv1a(j.dump()));
}

void validate_config(std::string_view subcommand, const RunConfig& c) {
  require(kSubcommands.contains(std::string(subcommand)),
          "unknown subcommand \"" + std::string(subcommand) + "\"");
  require(kModels.contains(c.model), "unknown model \"" + c.model + "\"");
  require(c.iterations >= 0, "iterations must be >= 0");
  require(c.projection_dim >= 0, "projection_dim must be >= 0");
  require(c.min_count >= 1, "min_count must be >= 1");
  require(c.k >= 0 && c.k <= 20, "k must be in [0, 20]");
  require(1 <= c.k_min && c.k_min <= c.k_max && c.k_max <= 20, "K range must satisfy 1 <= k_min <= k_max <= 20");
  require(!c.learning_rates.empty() && !c.layer_counts.empty(), "tagger grid must be non-empty");
  for (double lr : c.learning_rates) require(lr > 0.0, "learning rates must be positive");
  for (int l : c.layer_counts) require(l >= 0, "layer counts must be >= 0");
  require(c.hidden_width >= 1 && c.batch_size >= 1 && c.max_epochs >= 1, "tagger sizes must be positive");
  require(c.tagger_input == "image" || c.tagger_input == "docmean", "tagger_input must be image or docmean");
  require(c.b_words >= 1 && c.b_images >= 1 && c.n_pairs >= 1, "bootstrap sizes must be positive");
  require(c.confidence > 0.0 && c.confidence < 1.0, "confidence must be in (0, 1)");
  require(c.synth_documents >= 2 && c.synth_images_per_doc >= 1 && c.synth_dim >= 1, "synth sizes out of range");
  require(c.synth_noise_rate >= 0.0 && c.synth_noise_rate <= 1.0, "synth_noise_rate must be in [0, 1]");
  require(c.synth_detection_alignment >= 0.0 && c.synth_detection_alignment <= 1.0,
          "synth_detection_alignment must be in [0, 1]");
  require(c.threads >= 1, "threads must be >= 1");
  require(!c.out.empty(), "output directory must be set");

  for (const auto& [path, flag] : {std::pair{c.corpus, "corpus"}, {c.features, "features"},
                                   {c.word_vectors, "word-vectors"}, {c.detections, "detections"},
                                   {c.labels, "labels"}}) {
    require(path.empty() || input_exists(path), std::string("--") + flag + " path does not exist: " + path);
  }
  for (const auto& m : c.model_files) require(fs::exists(m), "model file does not exist: " + m);

  if (subcommand == "ingest" || subcommand == "diversity") {
    require_path(c.corpus, "corpus");
    require_path(c.features, "features");
  } else if (subcommand == "train") {
    if (c.model == "detection") {
      require_path(c.word_vectors, "word-vectors");
      require_path(c.detections, "detections");
    } else {
      require_path(c.corpus, "corpus");
      require_path(c.features, "features");
    }
  } else if (subcommand == "rank") {
    require(!c.model_files.empty(), "missing required input --model-file");
    require(!c.words.empty(), "rank needs at least one --words entry");
  } else if (subcommand == "eval") {
    require(!c.model_files.empty(), "missing required input --model-file");
    require_path(c.labels, "labels");
  }
}

void run(std::string_view subcommand, const RunConfig& config) {
  validate_config(subcommand, config);
  fs::create_directories(config.out);
  const ArtifactTag prov{config_hash(config), config.seed};
  if (subcommand == "ingest") run_ingest(config, prov);
  else if (subcommand == "train") run_train(config, prov);
  else if (subcommand == "rank") run_rank(config, prov);
  else if (subcommand == "eval") run_eval(config, prov);
  else if (subcommand == "diversity") run_diversity(config, prov);
  else run_synth(config, prov);
}

namespace {

// Flags are parsed into a scratch config, then copied over the config file
// only when given on the command line.
class Overrides {
 public:
  explicit Overrides(CLI::App& app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& name, T RunConfig::*field, const std::string& help) {
    CLI::Option* opt = app_.add_option(name, scratch_.*field, help);
    copies_.emplace_back(opt, [this, field](RunConfig& c) { c.*field = scratch_.*field; });
    return opt;
  }

  void apply(RunConfig& config) const {
    for (const auto& [opt, copy] : copies_) {
      if (opt->count() > 0) copy(config);
    }
  }

 private:
  CLI::App& app_;
  RunConfig scratch_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> copies_;
};

int report_error(std::ostream& err, const char* kind, int code, const std::string& message) {
  err << json{{"error", kind}, {"exit_code", code}, {"message", message}}.dump() << '\n';
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn word-to-image groundings from multi-image document corpora."};
  app.name("lexground");
  app.require_subcommand(1);
  std::string config_path;
  bool no_background = false;
  app.add_option("--config", config_path, "JSON config file; flags override its fields");

  Overrides o(app);
  o.add("--corpus", &RunConfig::corpus, "corpus JSONL");
  o.add("--features", &RunConfig::features, "feature table stem (<stem>.ids, <stem>.f32)");
  o.add("--word-vectors", &RunConfig::word_vectors, "word vectors text file");
  o.add("--detections", &RunConfig::detections, "object detector output JSONL");
  o.add("--labels", &RunConfig::labels, "labeled subsets JSONL");
  o.add("--out", &RunConfig::out, "output directory");
  o.add("--model-file", &RunConfig::model_files, "trained model file (repeatable)");
  o.add("--words", &RunConfig::words, "words to rank images for")->delimiter(',');
  o.add("--model", &RunConfig::model, "entsharp|untrained|detection|softmax|multinomial");
  o.add("--iterations", &RunConfig::iterations, "training iterations");
  o.add("--projection-dim", &RunConfig::projection_dim, "project features above this dimension (0 = never)");
  o.add("--min-count", &RunConfig::min_count, "minimum word frequency");
  o.add("--k", &RunConfig::k, "detection top-K (0 = select on labels)");
  o.add("--k-min", &RunConfig::k_min, "smallest K tried");
  o.add("--k-max", &RunConfig::k_max, "largest K tried");
  o.add("--learning-rates", &RunConfig::learning_rates, "tagger learning-rate grid")->delimiter(',');
  o.add("--layers", &RunConfig::layer_counts, "tagger hidden-layer grid")->delimiter(',');
  o.add("--hidden-width", &RunConfig::hidden_width, "tagger hidden width");
  o.add("--batch-size", &RunConfig::batch_size, "tagger batch size");
  o.add("--max-epochs", &RunConfig::max_epochs, "tagger epoch cap");
  o.add("--tagger-input", &RunConfig::tagger_input, "image|docmean");
  o.add("--b-words", &RunConfig::b_words, "bootstrap tokens per document");
  o.add("--b-images", &RunConfig::b_images, "bootstrap images per document");
  o.add("--pairs", &RunConfig::n_pairs, "sampled document pairs");
  o.add("--confidence", &RunConfig::confidence, "confidence level of the interval");
  o.add("--docs", &RunConfig::synth_documents, "synthetic documents");
  o.add("--images-per-doc", &RunConfig::synth_images_per_doc, "synthetic images per document");
  o.add("--dim", &RunConfig::synth_dim, "synthetic feature dimension");
  o.add("--noise-rate", &RunConfig::synth_noise_rate, "chance a document mentions an absent concept");
  o.add("--detection-alignment", &RunConfig::synth_detection_alignment,
        "chance detector output reflects an image's concept");
  o.add("--seed", &RunConfig::seed, "root seed");
  o.add("--threads", &RunConfig::threads, "worker threads");
  app.add_flag("--no-background", no_background, "synthetic documents carry no filler words");

  for (const char* name : {"ingest", "train", "rank", "eval", "diversity", "synth"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return report_error(err, "config", 2, e.what());
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    o.apply(config);
    if (no_background) config.synth_background = false;
    const std::string subcommand = app.get_subcommands().front()->get_name();
    run(subcommand, config);
    return 0;
  } catch (const ConfigError& e) {
    return report_error(err, "config", 2, e.what());
  } catch (const DataError& e) {
    return report_error(err, "data", 3, e.what());
  } catch (const NumericError& e) {
    return report_error(err, "numeric", 4, e.what());
  } catch (const fs::filesystem_error& e) {
    return report_error(err, "data", 3, e.what());
  }
}

}  // namespace lexground
