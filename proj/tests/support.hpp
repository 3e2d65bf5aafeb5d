#pragma once

#include "lexground/corpus.hpp"
#include "lexground/feature_table.hpp"
#include "lexground/rng.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace testing {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("lexground_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline lexground::FeatureTable gaussian_features(std::size_t rows, Eigen::Index dim,
                                                 std::uint64_t seed, const std::string& prefix = "img") {
  lexground::Rng rng(seed);
  std::vector<std::string> ids;
  lexground::RowMatrixXf m(static_cast<Eigen::Index>(rows), dim);
  for (std::size_t r = 0; r < rows; ++r) {
    ids.push_back(prefix + std::to_string(r));
    for (Eigen::Index c = 0; c < dim; ++c) m(static_cast<Eigen::Index>(r), c) = static_cast<float>(rng.gaussian());
  }
  return {std::move(ids), std::move(m)};
}

/// Random corpus over images img0..img{n_images-1} and words w0..w{n_words-1}.
inline lexground::Corpus random_corpus(std::size_t docs, std::size_t n_words, std::size_t n_images,
                                       std::uint64_t seed) {
  lexground::Rng rng(seed);
  lexground::Corpus corpus;
  for (std::size_t d = 0; d < docs; ++d) {
    lexground::Document doc;
    doc.doc_id = "d" + std::to_string(d);
    const std::size_t tokens = 1 + rng.below(6);
    for (std::size_t t = 0; t < tokens; ++t) doc.tokens.push_back("w" + std::to_string(rng.below(n_words)));
    const std::size_t images = 1 + rng.below(4);
    for (std::size_t i = 0; i < images; ++i) doc.image_ids.push_back("img" + std::to_string(rng.below(n_images)));
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace testing
