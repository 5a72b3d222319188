#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "scsnet/hsi.hpp"

namespace scsnet {

/// C x C counts; row = true class, column = predicted class (both 1-based
/// in the API, 0-based in storage).
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {}

  std::size_t classes() const { return classes_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[(truth - 1) * classes_ + (predicted - 1)];
  }
  std::uint64_t& at(std::size_t truth, std::size_t predicted) {
    return counts_[(truth - 1) * classes_ + (predicted - 1)];
  }
  std::uint64_t total() const;
  std::uint64_t row_total(std::size_t truth) const;
  std::uint64_t col_total(std::size_t predicted) const;
  std::uint64_t trace() const;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
};

/// Tallies (truth, predicted) pairs; labels outside 1..classes raise DataError.
ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, std::size_t classes);

/// Percentages. All three require a nonempty matrix (ContractError).
double overall_accuracy(const ConfusionMatrix& cm);
/// Mean per-class recall over classes that have at least one sample.
double average_accuracy(const ConfusionMatrix& cm);
/// Cohen's kappa, 100 (p_o - p_e) / (1 - p_e). When p_e == 1 it is 100 if
/// p_o == 1, else 0.
double kappa(const ConfusionMatrix& cm);

struct MetricReport {
  std::vector<double> per_class;  // percent; NaN for classes without samples
  std::vector<std::uint64_t> counts;
  double overall = 0.0;
  double average = 0.0;
  double kappa = 0.0;
};

MetricReport make_report(const ConfusionMatrix& cm);

/// Table layout: one "class <c> <accuracy> <count>" row per class followed
/// by Kappa, Overall and Average rows, 4 decimals.
std::string format_report_text(const MetricReport& report, const std::vector<std::string>& class_names = {});
/// key=value lines: classes, class.<c>.accuracy, class.<c>.count, oa, aa, kappa.
std::string format_report_kv(const MetricReport& report);

using Rgb = std::array<std::uint8_t, 3>;

/// Colour for a class id. 0 (unlabeled) is black; 1..16 use a fixed table;
/// larger ids get a deterministic colour derived from the id.
Rgb palette_color(std::size_t class_id);

/// P6 image bytes for a classification map. `predictions` holds one class
/// per pixel (row-major, rows x cols); labeled pixels must carry a nonzero
/// prediction (DataError) and are painted with its colour, unlabeled pixels
/// are black.
std::vector<std::uint8_t> render_map(const LabelGrid& labels, std::span<const int> predictions);
void emit_map(const std::filesystem::path& path, const LabelGrid& labels, std::span<const int> predictions);

}  // namespace scsnet
