#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace lexground {

using RowMatrixXf = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense image features keyed by image ID, one row per image.
class FeatureTable {
 public:
  FeatureTable() = default;

  /// Validates ids (unique, one per row), dimension > 0 and finiteness.
  FeatureTable(std::vector<std::string> ids, RowMatrixXf matrix);

  Eigen::Index rows() const { return matrix_.rows(); }
  Eigen::Index dim() const { return matrix_.cols(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const RowMatrixXf& matrix() const { return matrix_; }
  auto row(Eigen::Index i) const { return matrix_.row(i); }

  std::optional<Eigen::Index> find(const std::string& id) const;
  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  friend bool operator==(const FeatureTable& a, const FeatureTable& b) {
    return a.ids_ == b.ids_ && a.matrix_ == b.matrix_;
  }

 private:
  std::vector<std::string> ids_;
  RowMatrixXf matrix_;
  std::unordered_map<std::string, Eigen::Index> index_;
};

/// Writes an "FTBL" block: magic, u32 LE rows, u32 LE cols, row-major f32 LE.
void write_ftbl(std::ostream& out, const RowMatrixXf& matrix);

/// Reads and validates one "FTBL" block (magic, sizes, finiteness).
RowMatrixXf read_ftbl(std::istream& in);

/// Loads the `<stem>.ids` / `<stem>.f32` sidecar pair. A trailing ".ids" or
/// ".f32" on `stem` is ignored.
FeatureTable load_feature_table(const std::filesystem::path& stem);
void save_feature_table(const FeatureTable& table, const std::filesystem::path& stem);

/// Copy of `table` with every row scaled to unit L2 norm (zero rows kept).
FeatureTable normalize_rows(const FeatureTable& table);

}  // namespace lexground
