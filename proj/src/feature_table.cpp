#include "lexground/feature_table.hpp"

#include "lexground/errors.hpp"
#include "lexground/numeric.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace lexground {

FeatureTable::FeatureTable(std::vector<std::string> ids, RowMatrixXf matrix)
    : ids_(std::move(ids)), matrix_(std::move(matrix)) {
  if (static_cast<Eigen::Index>(ids_.size()) != matrix_.rows()) {
    throw DataError("feature table: " + std::to_string(ids_.size()) + " ids but " +
                    std::to_string(matrix_.rows()) + " rows");
  }
  if (matrix_.rows() > 0 && matrix_.cols() == 0) {
    throw DataError("feature table: dimension must be positive");
  }
  if (!matrix_.allFinite()) throw DataError("feature table: non-finite entry");
  index_.reserve(ids_.size());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(ids_.size()); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw DataError("feature table: duplicate image id '" + ids_[i] + "'");
    }
  }
}

std::optional<Eigen::Index> FeatureTable::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

constexpr std::array<char, 4> kMagic{'F', 'T', 'B', 'L'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff),
                              static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw DataError("FTBL: truncated header");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::filesystem::path strip_sidecar_extension(const std::filesystem::path& stem) {
  const auto ext = stem.extension();
  if (ext == ".ids" || ext == ".f32") {
    auto p = stem;
    p.replace_extension();
    return p;
  }
  return stem;
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

}  // namespace

void write_ftbl(std::ostream& out, const RowMatrixXf& matrix) {
  out.write(kMagic.data(), 4);
  put_u32(out, static_cast<std::uint32_t>(matrix.rows()));
  put_u32(out, static_cast<std::uint32_t>(matrix.cols()));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      put_u32(out, std::bit_cast<std::uint32_t>(matrix(i, j)));
    }
  }
}

RowMatrixXf read_ftbl(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != kMagic) {
    throw DataError("FTBL: bad magic bytes");
  }
  const auto rows = get_u32(in);
  const auto cols = get_u32(in);
  RowMatrixXf m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      std::array<unsigned char, 4> b{};
      if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
        throw DataError("FTBL: truncated payload, expected " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " floats");
      }
      const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) |
                                 (static_cast<std::uint32_t>(b[1]) << 8) |
                                 (static_cast<std::uint32_t>(b[2]) << 16) |
                                 (static_cast<std::uint32_t>(b[3]) << 24);
      m(i, j) = std::bit_cast<float>(bits);
    }
  }
  if (!m.allFinite()) throw DataError("FTBL: non-finite entry");
  return m;
}

FeatureTable load_feature_table(const std::filesystem::path& stem_in) {
  const auto stem = strip_sidecar_extension(stem_in);
  std::ifstream ids_in(with_suffix(stem, ".ids"));
  if (!ids_in) throw DataError("cannot open " + with_suffix(stem, ".ids").string());
  std::vector<std::string> ids;
  for (std::string line; std::getline(ids_in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ids.push_back(line);
  }
  std::ifstream bin(with_suffix(stem, ".f32"), std::ios::binary);
  if (!bin) throw DataError("cannot open " + with_suffix(stem, ".f32").string());
  RowMatrixXf m = read_ftbl(bin);
  if (static_cast<std::size_t>(m.rows()) != ids.size()) {
    throw DataError("feature table " + stem.string() + ": " + std::to_string(ids.size()) +
                    " ids but FTBL has " + std::to_string(m.rows()) + " rows");
  }
  return FeatureTable(std::move(ids), std::move(m));
}

void save_feature_table(const FeatureTable& table, const std::filesystem::path& stem_in) {
  const auto stem = strip_sidecar_extension(stem_in);
  std::ofstream ids_out(with_suffix(stem, ".ids"), std::ios::binary);
  for (const auto& id : table.ids()) ids_out << id << '\n';
  std::ofstream bin(with_suffix(stem, ".f32"), std::ios::binary);
  write_ftbl(bin, table.matrix());
  if (!ids_out || !bin) throw DataError("failed writing feature table " + stem.string());
}

FeatureTable normalize_rows(const FeatureTable& table) {
  RowMatrixXf m = table.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m.row(i) = l2_normalize(m.row(i)).values.transpose();
  }
  return FeatureTable(table.ids(), std::move(m));
}

}  // namespace lexground
