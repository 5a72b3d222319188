#pragma once

#include <span>
#include <vector>

#include "scsnet/tensor.hpp"

namespace scsnet {

/// Mean over the batch of -log softmax(logits)[target], using the
/// max-shifted form. logits [B, C]; targets are class ids in 1..C.
Tensor softmax_cross_entropy(const Tensor& logits, std::span<const int> targets);

/// Class id (1..C) of the largest logit per row; ties go to the lower id.
std::vector<int> predict_classes(const Tensor& logits);

}  // namespace scsnet
