#pragma once

#include "lexground/errors.hpp"
#include "lexground/feature_table.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>

namespace lexground {

/// Norms at or below this are treated as zero.
inline constexpr double kNormEpsilon = 1e-12;

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

template <typename Scalar>
struct Normalized {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
  bool zero_norm = false;
};

/// v / ||v||, or v unchanged with `zero_norm` set when ||v|| <= kNormEpsilon.
/// The norm is accumulated in double regardless of Scalar.
template <typename Derived>
Normalized<typename Derived::Scalar> l2_normalize(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  Normalized<Scalar> out;
  const double norm = v.template cast<double>().norm();
  if (!(norm > kNormEpsilon)) {
    out.values = v.reshaped();
    out.zero_norm = true;
    return out;
  }
  out.values = (v.template cast<double>() / norm).template cast<Scalar>().reshaped();
  return out;
}

/// u.v / (|u||v|), zero when either norm is below kNormEpsilon.
template <typename DerivedU, typename DerivedV>
double cosine_similarity(const Eigen::MatrixBase<DerivedU>& u,
                         const Eigen::MatrixBase<DerivedV>& v) {
  if (u.size() != v.size()) {
    throw DataError("cosine_similarity: dimension mismatch (" + std::to_string(u.size()) +
                    " vs " + std::to_string(v.size()) + ")");
  }
  const auto ud = u.template cast<double>().reshaped();
  const auto vd = v.template cast<double>().reshaped();
  const double nu = ud.norm();
  const double nv = vd.norm();
  if (nu < kNormEpsilon || nv < kNormEpsilon) return 0.0;
  const double c = ud.dot(vd) / (nu * nv);
  return std::clamp(c, -1.0, 1.0);
}

/// In-place p(w) ∝ exp(sharpness * s(w)) over every entry of `scores`.
/// Uses max-subtraction, so any finite scores are safe at any sharpness.
template <typename Derived>
void sharpened_softmax_inplace(Eigen::MatrixBase<Derived>& scores, double sharpness) {
  if (scores.size() == 0) throw DataError("sharpened softmax over an empty support");
  const auto top = scores.maxCoeff();
  scores = ((scores.array() - top) * sharpness).exp().matrix();
  scores /= scores.sum();
}

/// p(w) ∝ mask(w) exp(sharpness * scores(w)); exactly zero off the mask.
Eigen::VectorXd masked_sharpened_softmax(const Eigen::Ref<const Eigen::VectorXd>& scores,
                                         const Mask& mask, double sharpness);

/// Shannon entropy in nats; zero entries contribute nothing.
template <typename Derived>
double shannon_entropy(const Eigen::MatrixBase<Derived>& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double v = p.coeff(i);
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

/// Gaussian random projection x -> P x, P of shape d_out x d_in with entries
/// drawn i.i.d. N(0, 1/d_out) from `seed`.
struct ProjectionMatrix {
  Eigen::MatrixXd matrix;
  std::uint64_t seed = 0;

  Eigen::Index input_dim() const { return matrix.cols(); }
  Eigen::Index output_dim() const { return matrix.rows(); }
};

ProjectionMatrix make_projection(Eigen::Index d_in, Eigen::Index d_out, std::uint64_t seed);

/// Applies an explicit projection to every row.
FeatureTable project(const FeatureTable& features, const ProjectionMatrix& projection);

/// Applies the seeded projection of `features` down to `d_out` dimensions.
FeatureTable random_projection(const FeatureTable& features, Eigen::Index d_out,
                               std::uint64_t seed);

}  // namespace lexground
