#include "scsnet/pca.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "scsnet/error.hpp"

namespace scsnet {

namespace {
constexpr const char* kModule = "data-pipeline";
}

PcaModel pca_fit(const HsiCube& cube, std::size_t components) {
  const std::size_t pixels = cube.rows * cube.cols;
  const std::size_t bands = cube.bands;
  if (components == 0 || components > bands) {
    throw ContractError(kModule, "PCA needs 1 <= components <= bands, got " + std::to_string(components) +
                                     " of " + std::to_string(bands));
  }
  if (pixels < 2) throw ContractError(kModule, "PCA needs at least two pixels");

  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMatrix> samples(cube.data.data(), static_cast<Eigen::Index>(pixels),
                                            static_cast<Eigen::Index>(bands));
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(pixels);
  if (!cov.allFinite()) throw DataError(kModule, "covariance has non-finite entries");

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw DataError(kModule, "eigendecomposition did not converge");

  PcaModel model;
  model.bands = bands;
  model.components = components;
  model.mean.assign(mean.data(), mean.data() + bands);
  model.covariance.resize(bands * bands);
  for (std::size_t i = 0; i < bands; ++i)
    for (std::size_t j = 0; j < bands; ++j)
      model.covariance[i * bands + j] = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));

  // Eigen returns ascending eigenvalues; walk from the top.
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  model.basis.resize(bands * components);
  for (std::size_t c = 0; c < components; ++c) {
    const Eigen::Index col = static_cast<Eigen::Index>(bands - 1 - c);
    model.eigenvalues.push_back(std::max(0.0, values(col)));
    Eigen::VectorXd v = vectors.col(col);
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v(pivot) < 0.0) v = -v;
    for (std::size_t b = 0; b < bands; ++b) model.basis[c * bands + b] = v(static_cast<Eigen::Index>(b));
  }
  return model;
}

HsiCube pca_reduce(const HsiCube& cube, const PcaModel& model) {
  if (cube.bands != model.bands) {
    throw DimensionError(kModule, "PCA model fitted on " + std::to_string(model.bands) + " bands, cube has " +
                                      std::to_string(cube.bands));
  }
  HsiCube out;
  out.rows = cube.rows;
  out.cols = cube.cols;
  out.bands = model.components;
  const std::size_t pixels = cube.rows * cube.cols;
  out.data.resize(pixels * model.components);
  std::vector<double> centered(cube.bands);
  for (std::size_t p = 0; p < pixels; ++p) {
    for (std::size_t b = 0; b < cube.bands; ++b) centered[b] = cube.data[p * cube.bands + b] - model.mean[b];
    for (std::size_t c = 0; c < model.components; ++c) {
      const double* axis = model.component(c);
      double acc = 0.0;
      for (std::size_t b = 0; b < cube.bands; ++b) acc += centered[b] * axis[b];
      out.data[p * model.components + c] = acc;
    }
  }
  return out;
}

}  // namespace scsnet
