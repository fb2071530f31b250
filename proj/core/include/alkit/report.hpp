#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "alkit/engine.hpp"

namespace alkit {

// ---- CSV ---------------------------------------------------------------------------
//
// Columns: run_id, metric, seed, round, labeled_count, train_loss, test_accuracy,
// class_acc_0..K-1, class_support_0..K-1, selected_ids (';'-joined). class_support_c is
// the number of labelled examples of class c the round was trained on. Rows are sorted by
// (metric, seed, round); numbers use the shortest round-trip representation.

struct CsvRow {
  std::string run_id;
  std::string metric;
  std::uint64_t seed = 0;
  std::size_t round = 0;
  std::size_t labeled_count = 0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  std::vector<double> class_accuracy;
  std::vector<std::size_t> class_support;
  std::vector<ExampleId> selected_ids;
};

std::string format_csv(std::span<const RunTrace> traces);
/// Writes the CSV and returns the number of data rows. An empty trace list is rejected
/// before any file is created.
std::size_t emit_csv(std::span<const RunTrace> traces, const std::filesystem::path& path);
std::vector<CsvRow> parse_csv(std::string_view text);

// ---- JSON mirror -------------------------------------------------------------------

std::string run_config_to_json(const RunConfig& config);
/// Overlays the fields present in `text` onto `base`. Throws Error{InvalidArgument}.
RunConfig run_config_from_json(std::string_view text, const RunConfig& base = {});

/// {"runs": [...]} with each RunConfig embedded; wall-clock fields only when asked.
std::string format_traces_json(std::span<const RunTrace> traces, bool include_timing = true);
std::string format_trace_json(const RunTrace& trace, bool include_timing = true);
void emit_json(std::span<const RunTrace> traces, const std::filesystem::path& path, bool include_timing = true);

// ---- SVG curves --------------------------------------------------------------------

struct CurveSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (round, value), rounds increasing
  std::vector<std::pair<double, double>> band;    // optional (low, high) per point
};

struct AxesConfig {
  std::string title;
  std::string x_label = "round";
  std::string y_label = "test accuracy";
  std::optional<std::pair<double, double>> y_range;
  int width = 760;
  int height = 460;
};

std::string render_curves_svg(std::span<const CurveSeries> series, const AxesConfig& axes);
void emit_curves_svg(std::span<const CurveSeries> series, const AxesConfig& axes,
                     const std::filesystem::path& path);

/// Mean test accuracy per round with the replicate min/max as a band.
std::vector<CurveSeries> accuracy_series(std::span<const MetricCurve> curves);
/// One series per class: test accuracy of that class across rounds.
std::vector<CurveSeries> per_class_series(const RunTrace& trace);
/// Training loss of each trace.
std::vector<CurveSeries> loss_series(std::span<const RunTrace> traces);

// ---- Summary -----------------------------------------------------------------------

struct SummaryRow {
  Metric metric = Metric::Entropy;
  std::size_t replicates = 0;
  double final_accuracy = 0.0;                     // mean over replicates at the last round
  std::optional<std::size_t> rounds_to_threshold;  // first round with mean accuracy >= threshold
  double area = 0.0;                               // trapezoid of mean accuracy over rounds
};

/// One row per metric, in Metric order. All traces must cover the same rounds
/// (Error{MisalignedTraces}); the result does not depend on trace order.
std::vector<SummaryRow> summarize(std::span<const RunTrace> traces, double threshold);
std::string format_summary_text(std::span<const SummaryRow> rows, double threshold);
std::string format_summary_json(std::span<const SummaryRow> rows, double threshold);

/// Trapezoidal area under (x, y).
double trapezoid_area(std::span<const double> x, std::span<const double> y);

}  // namespace alkit
