#pragma once

#include <functional>
#include <vector>

#include "scsnet/tensor.hpp"

namespace scsnet {

/// Compares reverse-mode gradients of a scalar function against central
/// differences with step `eps`. Returns the largest
/// |analytic - numeric| / max(1, |analytic|) over every coordinate.
double finite_difference_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x, double eps);

/// Multi-parameter form. `f` must read the given leaf tensors, which are
/// perturbed in place and restored afterwards. Leaf gradients are reset.
double finite_difference_check(const std::function<Tensor()>& f, std::vector<Tensor> params, double eps);

}  // namespace scsnet
