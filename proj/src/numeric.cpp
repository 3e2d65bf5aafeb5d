#include "lexground/numeric.hpp"

#include "lexground/rng.hpp"

namespace lexground {

Eigen::VectorXd masked_sharpened_softmax(const Eigen::Ref<const Eigen::VectorXd>& scores,
                                         const Mask& mask, double sharpness) {
  if (scores.size() != mask.size()) {
    throw DataError("masked_sharpened_softmax: scores and mask lengths differ");
  }
  if (sharpness < 0.0 || !std::isfinite(sharpness)) {
    throw DataError("masked_sharpened_softmax: sharpness must be finite and nonnegative");
  }
  if (!mask.any()) throw DataError("masked_sharpened_softmax: mask has no true entry");

  Eigen::VectorXd support(mask.count());
  for (Eigen::Index i = 0, k = 0; i < scores.size(); ++i) {
    if (mask(i)) support(k++) = scores(i);
  }
  sharpened_softmax_inplace(support, sharpness);

  Eigen::VectorXd out = Eigen::VectorXd::Zero(scores.size());
  for (Eigen::Index i = 0, k = 0; i < scores.size(); ++i) {
    if (mask(i)) out(i) = support(k++);
  }
  return out;
}

ProjectionMatrix make_projection(Eigen::Index d_in, Eigen::Index d_out, std::uint64_t seed) {
  if (d_in <= 0 || d_out <= 0) throw ConfigError("projection dimensions must be positive");
  if (d_out > d_in) {
    throw ConfigError("projection output dimension " + std::to_string(d_out) +
                      " exceeds input dimension " + std::to_string(d_in));
  }
  ProjectionMatrix p;
  p.seed = seed;
  p.matrix.resize(d_out, d_in);
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_out));
  for (Eigen::Index r = 0; r < d_out; ++r) {
    for (Eigen::Index c = 0; c < d_in; ++c) p.matrix(r, c) = scale * rng.gaussian();
  }
  return p;
}

FeatureTable project(const FeatureTable& features, const ProjectionMatrix& projection) {
  if (projection.input_dim() != features.dim()) {
    throw DataError("projection expects dimension " + std::to_string(projection.input_dim()) +
                    ", features have " + std::to_string(features.dim()));
  }
  const Eigen::MatrixXd projected =
      features.matrix().cast<double>() * projection.matrix.transpose();
  return FeatureTable(features.ids(), projected.cast<float>());
}

FeatureTable random_projection(const FeatureTable& features, Eigen::Index d_out,
                               std::uint64_t seed) {
  return project(features, make_projection(features.dim(), d_out, seed));
}

}  // namespace lexground
