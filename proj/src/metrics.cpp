#include "scsnet/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "scsnet/error.hpp"

namespace scsnet {

namespace {

constexpr const char* kModule = "metrics-report";

// Background plus 16 classes.
constexpr std::array<Rgb, 17> kPalette{{
    {0, 0, 0},
    {230, 25, 75},
    {60, 180, 75},
    {255, 225, 25},
    {0, 130, 200},
    {245, 130, 48},
    {145, 30, 180},
    {70, 240, 240},
    {240, 50, 230},
    {210, 245, 60},
    {250, 190, 212},
    {0, 128, 128},
    {220, 190, 255},
    {170, 110, 40},
    {255, 250, 200},
    {128, 0, 0},
    {170, 255, 195},
}};

void require_nonempty(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ContractError(kModule, "metrics of an empty confusion matrix");
}

std::string fixed4(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::row_total(std::size_t truth) const {
  std::uint64_t t = 0;
  for (std::size_t p = 1; p <= classes_; ++p) t += at(truth, p);
  return t;
}

std::uint64_t ConfusionMatrix::col_total(std::size_t predicted) const {
  std::uint64_t t = 0;
  for (std::size_t r = 1; r <= classes_; ++r) t += at(r, predicted);
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t c = 1; c <= classes_; ++c) t += at(c, c);
  return t;
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, std::size_t classes) {
  if (truth.size() != predicted.size()) throw DataError(kModule, "truth and prediction lengths differ");
  ConfusionMatrix cm(classes);
  const int top = static_cast<int>(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 1 || truth[i] > top || predicted[i] < 1 || predicted[i] > top) {
      throw DataError(kModule, "label pair (" + std::to_string(truth[i]) + ", " + std::to_string(predicted[i]) +
                                   ") outside 1.." + std::to_string(classes));
    }
    ++cm.at(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
  }
  return cm;
}

double overall_accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  return 100.0 * static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
}

double average_accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 1; c <= cm.classes(); ++c) {
    const auto row = cm.row_total(c);
    if (row == 0) continue;
    sum += static_cast<double>(cm.at(c, c)) / static_cast<double>(row);
    ++present;
  }
  return 100.0 * sum / static_cast<double>(present);
}

double kappa(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  // Integer form 100 (N t - S) / (N^2 - S), with t the trace and S the sum of
  // row x column totals, so small matrices give exact results.
  __extension__ using Wide = __int128;
  const Wide n = cm.total();
  const Wide t = cm.trace();
  Wide s = 0;
  for (std::size_t c = 1; c <= cm.classes(); ++c) s += static_cast<Wide>(cm.row_total(c)) * cm.col_total(c);
  const Wide den = n * n - s;
  if (den == 0) return t == n ? 100.0 : 0.0;
  return 100.0 * static_cast<double>(n * t - s) / static_cast<double>(den);
}

MetricReport make_report(const ConfusionMatrix& cm) {
  MetricReport r;
  for (std::size_t c = 1; c <= cm.classes(); ++c) {
    const auto row = cm.row_total(c);
    r.counts.push_back(row);
    r.per_class.push_back(row == 0 ? NAN : 100.0 * static_cast<double>(cm.at(c, c)) / static_cast<double>(row));
  }
  r.overall = overall_accuracy(cm);
  r.average = average_accuracy(cm);
  r.kappa = kappa(cm);
  return r;
}

std::string format_report_text(const MetricReport& report, const std::vector<std::string>& class_names) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "Class" << std::right << std::setw(12) << "Accuracy" << std::setw(10)
      << "Samples" << '\n';
  for (std::size_t i = 0; i < report.per_class.size(); ++i) {
    const std::string name = i < class_names.size() ? class_names[i] : "class " + std::to_string(i + 1);
    const std::string acc = std::isnan(report.per_class[i]) ? "-" : fixed4(report.per_class[i]);
    out << std::left << std::setw(24) << name << std::right << std::setw(12) << acc << std::setw(10)
        << report.counts[i] << '\n';
  }
  out << std::left << std::setw(24) << "Kappa" << std::right << std::setw(12) << fixed4(report.kappa) << '\n';
  out << std::left << std::setw(24) << "Overall" << std::right << std::setw(12) << fixed4(report.overall) << '\n';
  out << std::left << std::setw(24) << "Average" << std::right << std::setw(12) << fixed4(report.average) << '\n';
  return out.str();
}

std::string format_report_kv(const MetricReport& report) {
  std::ostringstream out;
  out << "classes=" << report.per_class.size() << '\n';
  for (std::size_t i = 0; i < report.per_class.size(); ++i) {
    out << "class." << i + 1 << ".accuracy="
        << (std::isnan(report.per_class[i]) ? std::string("nan") : fixed4(report.per_class[i])) << '\n';
    out << "class." << i + 1 << ".count=" << report.counts[i] << '\n';
  }
  out << "oa=" << fixed4(report.overall) << '\n';
  out << "aa=" << fixed4(report.average) << '\n';
  out << "kappa=" << fixed4(report.kappa) << '\n';
  return out.str();
}

Rgb palette_color(std::size_t class_id) {
  if (class_id < kPalette.size()) return kPalette[class_id];
  std::uint64_t h = class_id * 0x9E3779B97F4A7C15ULL;
  h ^= h >> 29;
  return {static_cast<std::uint8_t>(64 + (h & 0xBF)), static_cast<std::uint8_t>(64 + ((h >> 8) & 0xBF)),
          static_cast<std::uint8_t>(64 + ((h >> 16) & 0xBF))};
}

std::vector<std::uint8_t> render_map(const LabelGrid& labels, std::span<const int> predictions) {
  if (predictions.size() != labels.rows * labels.cols) {
    throw DataError(kModule, "prediction grid does not match the label grid");
  }
  const std::string header = "P6\n" + std::to_string(labels.cols) + " " + std::to_string(labels.rows) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + 3 * predictions.size());
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    Rgb color = palette_color(0);
    if (labels.labels[p] != 0) {
      if (predictions[p] < 1) throw DataError(kModule, "labeled pixel " + std::to_string(p) + " has no prediction");
      color = palette_color(static_cast<std::size_t>(predictions[p]));
    }
    out.insert(out.end(), color.begin(), color.end());
  }
  return out;
}

void emit_map(const std::filesystem::path& path, const LabelGrid& labels, std::span<const int> predictions) {
  write_file(path, render_map(labels, predictions));
}

}  // namespace scsnet
