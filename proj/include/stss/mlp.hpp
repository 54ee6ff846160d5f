#pragma once

#include "stss/classifiers.hpp"
#include "stss/types.hpp"

#include <vector>

namespace stss {

/// Mean softmax cross-entropy of the single-hidden-layer ReLU network on
/// (X, y_local), y_local in 0..m-1 with m = w2 rows.
double mlp_loss(const MlpModel& params, const Matrix& X, const std::vector<int>& y_local);

/// Loss plus analytic gradients with respect to every parameter.
double mlp_loss_and_gradient(const MlpModel& params, const Matrix& X,
                             const std::vector<int>& y_local, MlpModel& grad);

// parameter <-> flat-vector packing (optimizer state, finite differences)
Vector mlp_flatten(const MlpModel& params);
MlpModel mlp_unflatten(const Vector& flat, Index d, Index hidden, Index m);

}  // namespace stss
