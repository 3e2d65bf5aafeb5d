#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lexground {

/// Everything a pipeline run needs. Loaded from a JSON file; command-line
/// flags override individual fields.
struct RunConfig {
  // Inputs and outputs.
  std::string corpus;
  std::string features;  // stem of <stem>.ids / <stem>.f32
  std::string word_vectors;
  std::string detections;
  std::string labels;
  std::string out = ".";
  std::vector<std::string> model_files;  // rank uses the first, eval all
  std::vector<std::string> words;        // rank targets

  std::string model = "entsharp";  // entsharp | untrained | detection | softmax | multinomial

  int iterations = 100;
  long projection_dim = 256;  // 0 disables projection
  std::size_t min_count = 10;

  int k = 0;  // detection: fixed K, or 0 to pick the best K in [k_min, k_max] on labels
  int k_min = 1;
  int k_max = 20;

  std::vector<double> learning_rates{0.001, 0.0005, 0.0007};
  std::vector<int> layer_counts{0, 1, 2, 3, 4, 5};
  long hidden_width = 256;
  std::size_t batch_size = 256;
  int max_epochs = 100;
  std::string tagger_input = "image";  // image | docmean

  std::size_t b_words = 50;
  std::size_t b_images = 10;
  std::size_t n_pairs = 10000;
  double confidence = 0.9999;

  // synth
  std::size_t synth_documents = 500;
  std::size_t synth_images_per_doc = 10;
  std::size_t synth_dim = 64;
  double synth_noise_rate = 0.5;
  double synth_detection_alignment = 1.0;
  bool synth_background = true;

  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_json(const RunConfig& config);

/// 16 hex digits over the canonical JSON of every field that can change
/// results (output directory and thread count excluded).
std::string config_hash(const RunConfig& config);

/// Throws ConfigError when a field is out of range or a path the
/// subcommand reads does not exist.
void validate_config(std::string_view subcommand, const RunConfig& config);

/// Runs one subcommand: ingest, train, rank, eval, diversity or synth.
/// Errors propagate as ConfigError / DataError / NumericError.
void run(std::string_view subcommand, const RunConfig& config);

/// Command-line entry. Returns the process exit code: 0 success, 2 config
/// error, 3 data error, 4 numeric failure. Failures print one JSON object
/// to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lexground
