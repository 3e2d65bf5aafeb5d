#pragma once

#include <Eigen/Dense>

namespace lexground {

struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  Eigen::VectorXd first_moment;   // sized lazily on the first update
  Eigen::VectorXd second_moment;
};

/// One bias-corrected Adam step, in place. Throws NumericError on
/// non-finite gradients and DataError on a size mismatch.
void adam_update(Eigen::Ref<Eigen::VectorXd> params,
                 const Eigen::Ref<const Eigen::VectorXd>& grads, AdamState& state);

}  // namespace lexground
