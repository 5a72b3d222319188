#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "scsnet/tensor.hpp"

namespace scsnet {

// Elementwise binary operations. Operands must have equal shapes, or one of
// them must hold a single value, which is broadcast against the other.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor neg(const Tensor& a);
Tensor abs(const Tensor& a);
/// -1, 0 or +1. Its gradient is zero everywhere.
Tensor sign(const Tensor& a);
Tensor exp(const Tensor& a);
/// Natural log; every element must be strictly positive.
Tensor log(const Tensor& a);
/// Elements must be nonnegative.
Tensor sqrt(const Tensor& a);
Tensor relu(const Tensor& a);
/// log(1 + e^x), evaluated without overflow.
Tensor softplus(const Tensor& a);

/// a^e for a constant exponent.
Tensor power(const Tensor& base, double exponent);
/// base^exponent with a differentiable exponent. Every base element must be
/// strictly positive (DomainError otherwise).
Tensor power(const Tensor& base, const Tensor& exponent);

/// sign(s) * |s|^p, the sign-preserving power. Unlike power() it accepts
/// zero bases: at s == 0 the value is 0, d/dp is 0, and d/ds is 1 when p == 1
/// and 0 otherwise. p must be strictly positive.
Tensor signed_power(const Tensor& base, const Tensor& exponent);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor sum(const Tensor& a, std::optional<std::size_t> axis = std::nullopt);
Tensor mean(const Tensor& a, std::optional<std::size_t> axis = std::nullopt);
/// Maximum; the gradient goes to the first maximal element (lowest index).
Tensor max(const Tensor& a, std::optional<std::size_t> axis = std::nullopt);

Tensor reshape(const Tensor& a, Shape shape);

/// out[i] = a[indices[i]]. The gradient scatter-adds back into `a`, which
/// makes this the building block for windowing, pooling and transposes.
/// Index tables are shared so layers can cache them per input shape.
using IndexTable = std::shared_ptr<const std::vector<std::uint32_t>>;
Tensor gather(const Tensor& a, IndexTable indices, Shape shape);

/// Repeats a vector [n] into a matrix [rows x n].
Tensor tile_rows(const Tensor& v, std::size_t rows);

/// Euclidean norm of each row of a [rows x n] matrix, shape [rows x 1].
/// The gradient of a zero row is taken as zero.
Tensor row_norm(const Tensor& a);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator-(const Tensor& a) { return neg(a); }
inline Tensor operator+(const Tensor& a, double b) { return add(a, Tensor::scalar(b)); }
inline Tensor operator*(const Tensor& a, double b) { return mul(a, Tensor::scalar(b)); }
inline Tensor operator*(double a, const Tensor& b) { return mul(Tensor::scalar(a), b); }

}  // namespace scsnet
