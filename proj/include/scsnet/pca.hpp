#pragma once

#include <vector>

#include "scsnet/hsi.hpp"

namespace scsnet {

/// Principal axes of the pixel spectra of a cube.
struct PcaModel {
  std::size_t bands = 0;       // B
  std::size_t components = 0;  // B'
  std::vector<double> mean;    // [B]
  /// Column-major B x B' basis: component c occupies [c*B, (c+1)*B).
  /// Columns are orthonormal and sorted by decreasing eigenvalue; each
  /// column's largest-magnitude entry is positive.
  std::vector<double> basis;
  std::vector<double> eigenvalues;  // [B'], nonincreasing, >= 0
  /// Population covariance (divided by the pixel count), row-major B x B.
  std::vector<double> covariance;

  const double* component(std::size_t c) const { return basis.data() + c * bands; }
};

/// Fits PCA on every pixel of the cube. Requires 1 <= components <= bands
/// (ContractError) and at least two pixels; non-finite covariance raises
/// DataError.
PcaModel pca_fit(const HsiCube& cube, std::size_t components);

/// Projects each pixel spectrum onto the retained components.
HsiCube pca_reduce(const HsiCube& cube, const PcaModel& model);

}  // namespace scsnet
