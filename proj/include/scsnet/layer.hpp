#pragma once

#include <string>
#include <vector>

#include "scsnet/tensor.hpp"

namespace scsnet {

struct Parameter {
  std::string name;
  Tensor value;
};

/// A stage of a sequential model. Shapes passed to output_shape() describe
/// one sample (no batch axis); forward() always receives a batch whose
/// leading axis is the batch size.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string kind() const = 0;
  virtual Shape output_shape(const Shape& sample) const = 0;
  virtual Tensor forward(const Tensor& batch) = 0;

  /// Learnable arrays, named relative to the layer ("kernel", "bias", ...).
  virtual std::vector<Parameter> parameters() const { return {}; }
  /// Closed-form count of learnable scalars.
  virtual std::size_t parameter_count() const { return 0; }
};

}  // namespace scsnet
