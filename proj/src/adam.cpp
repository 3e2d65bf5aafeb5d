#include "lexground/adam.hpp"

#include "lexground/errors.hpp"

#include <cmath>

namespace lexground {

void adam_update(Eigen::Ref<Eigen::VectorXd> params,
                 const Eigen::Ref<const Eigen::VectorXd>& grads, AdamState& state) {
  if (params.size() != grads.size()) {
    throw DataError("adam_update: " + std::to_string(params.size()) + " parameters but " +
                    std::to_string(grads.size()) + " gradients");
  }
  if (!grads.allFinite()) throw NumericError("adam_update: non-finite gradient");
  if (state.first_moment.size() == 0) {
    state.first_moment = Eigen::VectorXd::Zero(params.size());
    state.second_moment = Eigen::VectorXd::Zero(params.size());
  } else if (state.first_moment.size() != params.size()) {
    throw DataError("adam_update: optimizer state does not match parameter count");
  }
  ++state.step;
  state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * grads;
  state.second_moment =
      state.beta2 * state.second_moment + (1.0 - state.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= state.learning_rate * (state.first_moment.array() / c1) /
                    ((state.second_moment.array() / c2).sqrt() + state.epsilon);
}

}  // namespace lexground
