#include "alkit/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "alkit/error.hpp"

namespace alkit {
namespace {

using json = nlohmann::ordered_json;

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::size_t metric_rank(Metric m) { return static_cast<std::size_t>(m); }

std::vector<const RunTrace*> sorted_traces(std::span<const RunTrace> traces) {
  std::vector<const RunTrace*> order;
  for (const RunTrace& t : traces) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const RunTrace* a, const RunTrace* b) {
    return std::tuple(metric_rank(a->config.metric), a->config.rng_seed, a->run_id) <
           std::tuple(metric_rank(b->config.metric), b->config.rng_seed, b->run_id);
  });
  return order;
}

std::vector<std::string> split_on(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    parts.emplace_back(text.substr(start, end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view field) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw Error(ErrorKind::InvalidArgument, "bad numeric field '" + std::string(field) + "'");
  }
  return value;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// Sum after sorting so the mean does not depend on input order.
double order_free_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

json record_json(const RoundRecord& r, bool timing) {
  json j;
  j["round"] = r.round;
  j["labeled_count"] = r.labeled_count;
  j["train_loss"] = r.train_loss;
  j["train_accuracy"] = r.train_accuracy;
  j["test_accuracy"] = r.test_accuracy;
  j["test_loss"] = r.test_loss;
  j["per_class_accuracy"] = r.per_class_accuracy;
  j["test_support"] = r.test_support;
  j["labeled_support"] = r.labeled_support;
  j["selected_ids"] = r.selected_ids;
  j["selected_labels"] = r.selected_labels;
  j["oracle_agreement"] = r.oracle_agreement;
  if (timing) j["wall_ms"] = r.wall_ms;
  return j;
}

json trace_json(const RunTrace& t, bool timing) {
  json j;
  j["run_id"] = t.run_id;
  j["metric"] = metric_name(t.config.metric);
  j["seed"] = t.config.rng_seed;
  j["stop_reason"] = t.stop ? json(stop_reason_name(*t.stop)) : json(nullptr);
  j["config"] = json::parse(run_config_to_json(t.config));
  j["class_names"] = t.class_names;
  std::size_t asked = 0;
  std::size_t agreed = 0;
  json rounds = json::array();
  for (const RoundRecord& r : t.rounds) {
    rounds.push_back(record_json(r, timing));
    asked += r.selected_ids.size();
    agreed += r.oracle_agreement;
  }
  j["oracle_agreement_rate"] = asked == 0 ? 1.0 : static_cast<double>(agreed) / static_cast<double>(asked);
  j["rounds"] = std::move(rounds);
  return j;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#7f7f7f",
                          "#9467bd", "#8c564b", "#e377c2", "#bcbd22", "#17becf"};

}  // namespace

// ---- CSV ---------------------------------------------------------------------------

std::string format_csv(std::span<const RunTrace> traces) {
  if (traces.empty()) throw Error(ErrorKind::InvalidArgument, "no traces to write");
  const std::size_t k = traces.front().class_names.size();
  for (const RunTrace& t : traces) {
    if (t.class_names.size() != k) throw Error(ErrorKind::InvalidArgument, "traces disagree on class count");
  }
  std::ostringstream out;
  out << "run_id,metric,seed,round,labeled_count,train_loss,test_accuracy";
  for (std::size_t c = 0; c < k; ++c) out << ",class_acc_" << c;
  for (std::size_t c = 0; c < k; ++c) out << ",class_support_" << c;
  out << ",selected_ids\n";
  for (const RunTrace* t : sorted_traces(traces)) {
    for (const RoundRecord& r : t->rounds) {
      out << t->run_id << ',' << metric_name(t->config.metric) << ',' << t->config.rng_seed << ','
          << r.round << ',' << r.labeled_count << ',' << shortest(r.train_loss) << ','
          << shortest(r.test_accuracy);
      for (double a : r.per_class_accuracy) out << ',' << shortest(a);
      for (std::size_t s : r.labeled_support) out << ',' << s;
      out << ',';
      for (std::size_t i = 0; i < r.selected_ids.size(); ++i) out << (i ? ";" : "") << r.selected_ids[i];
      out << '\n';
    }
  }
  return out.str();
}

std::size_t emit_csv(std::span<const RunTrace> traces, const std::filesystem::path& path) {
  const std::string text = format_csv(traces);
  write_text(path, text);
  std::size_t rows = 0;
  for (const RunTrace& t : traces) rows += t.rounds.size();
  return rows;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<std::string> lines = split_on(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorKind::InvalidArgument, "empty CSV");
  const std::vector<std::string> header = split_on(lines.front(), ',');
  const std::size_t fixed = 7;
  if (header.size() < fixed + 1 || (header.size() - fixed - 1) % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument, "unexpected CSV header");
  }
  const std::size_t k = (header.size() - fixed - 1) / 2;
  std::vector<CsvRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = split_on(lines[i], ',');
    if (f.size() != header.size()) throw Error(ErrorKind::InvalidArgument, "ragged CSV row " + std::to_string(i));
    CsvRow row;
    row.run_id = f[0];
    row.metric = f[1];
    row.seed = parse_number<std::uint64_t>(f[2]);
    row.round = parse_number<std::size_t>(f[3]);
    row.labeled_count = parse_number<std::size_t>(f[4]);
    row.train_loss = parse_number<double>(f[5]);
    row.test_accuracy = parse_number<double>(f[6]);
    for (std::size_t c = 0; c < k; ++c) row.class_accuracy.push_back(parse_number<double>(f[fixed + c]));
    for (std::size_t c = 0; c < k; ++c) row.class_support.push_back(parse_number<std::size_t>(f[fixed + k + c]));
    if (!f.back().empty()) {
      for (const std::string& id : split_on(f.back(), ';')) row.selected_ids.push_back(parse_number<ExampleId>(id));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---- JSON --------------------------------------------------------------------------

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["metric"] = metric_name(c.metric);
  j["k"] = c.per_round_k;
  j["seed_size"] = c.seed_size;
  j["test_size"] = c.test_size;
  j["pool_size"] = c.pool_size;
  j["max_rounds"] = c.max_rounds ? json(*c.max_rounds) : json(nullptr);
  j["epsilon"] = c.epsilon ? json(*c.epsilon) : json(nullptr);
  j["arch"] = c.arch.kind == Architecture::Kind::Mlp ? "mlp" : "softmax";
  j["hidden"] = c.arch.hidden;
  j["lr"] = c.hyper.learning_rate;
  j["minibatch"] = c.hyper.minibatch_size;
  j["epochs_per_round"] = c.hyper.epochs_per_round;
  j["l2"] = c.hyper.l2;
  j["seed"] = c.rng_seed;
  j["cold_start"] = c.cold_start;
  j["scan"] = scan_mode_name(c.scan);
  j["scan_batch"] = c.scan_batch;
  j["workers"] = c.workers;
  return j.dump();
}

RunConfig run_config_from_json(std::string_view text, const RunConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
  RunConfig c = base;
  auto bad = [](const std::string& key, const std::string& why) {
    throw Error(ErrorKind::InvalidArgument, "field '" + key + "': " + why);
  };
  auto count = [&](const std::string& key, const json& v) -> std::size_t {
    if (!v.is_number_integer()) bad(key, "expected an integer");
    if (v.get<long long>() < 0) bad(key, "must not be negative");
    return v.get<std::size_t>();
  };
  auto real = [&](const std::string& key, const json& v) -> double {
    if (!v.is_number()) bad(key, "expected a number");
    return v.get<double>();
  };
  auto text_of = [&](const std::string& key, const json& v) -> std::string {
    if (!v.is_string()) bad(key, "expected a string");
    return v.get<std::string>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "metric") {
      auto m = parse_metric(text_of(key, v));
      if (!m) bad(key, "unknown metric");
      c.metric = *m;
    } else if (key == "k") {
      c.per_round_k = count(key, v);
    } else if (key == "seed_size") {
      c.seed_size = count(key, v);
    } else if (key == "test_size") {
      c.test_size = count(key, v);
    } else if (key == "pool_size") {
      c.pool_size = count(key, v);
    } else if (key == "max_rounds") {
      c.max_rounds = v.is_null() ? std::nullopt : std::optional<std::size_t>(count(key, v));
    } else if (key == "epsilon") {
      c.epsilon = v.is_null() ? std::nullopt : std::optional<double>(real(key, v));
    } else if (key == "arch") {
      const std::string a = text_of(key, v);
      if (a == "softmax") {
        c.arch.kind = Architecture::Kind::Softmax;
        c.arch.hidden = 0;
      } else if (a == "mlp") {
        c.arch.kind = Architecture::Kind::Mlp;
        if (c.arch.hidden == 0) c.arch.hidden = 128;
      } else {
        bad(key, "expected softmax or mlp");
      }
    } else if (key == "hidden") {
      c.arch.hidden = count(key, v);
    } else if (key == "lr") {
      c.hyper.learning_rate = real(key, v);
    } else if (key == "minibatch") {
      c.hyper.minibatch_size = count(key, v);
    } else if (key == "epochs_per_round") {
      c.hyper.epochs_per_round = count(key, v);
    } else if (key == "l2") {
      c.hyper.l2 = real(key, v);
    } else if (key == "seed") {
      c.rng_seed = count(key, v);
    } else if (key == "cold_start") {
      if (!v.is_boolean()) bad(key, "expected a boolean");
      c.cold_start = v.get<bool>();
    } else if (key == "scan") {
      auto s = parse_scan_mode(text_of(key, v));
      if (!s) bad(key, "expected global or batched");
      c.scan = *s;
    } else if (key == "scan_batch") {
      c.scan_batch = count(key, v);
    } else if (key == "workers") {
      c.workers = count(key, v);
    } else if (key != "dataset") {
      bad(key, "unknown field");
    }
  }
  if (c.arch.kind == Architecture::Kind::Softmax) c.arch.hidden = 0;
  c.validate();
  return c;
}

std::string format_trace_json(const RunTrace& trace, bool include_timing) {
  return trace_json(trace, include_timing).dump(2) + "\n";
}

std::string format_traces_json(std::span<const RunTrace> traces, bool include_timing) {
  json runs = json::array();
  for (const RunTrace* t : sorted_traces(traces)) runs.push_back(trace_json(*t, include_timing));
  json j;
  j["runs"] = std::move(runs);
  return j.dump(2) + "\n";
}

void emit_json(std::span<const RunTrace> traces, const std::filesystem::path& path, bool include_timing) {
  write_text(path, format_traces_json(traces, include_timing));
}

// ---- SVG ---------------------------------------------------------------------------

std::string render_curves_svg(std::span<const CurveSeries> series, const AxesConfig& axes) {
  if (series.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one series");
  const double left = 70, right = 180, top = 44, bottom = 56;
  const double plot_w = axes.width - left - right;
  const double plot_h = axes.height - top - bottom;

  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const CurveSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
    for (const auto& [lo, hi] : s.band) {
      y_lo = std::min(y_lo, lo);
      y_hi = std::max(y_hi, hi);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0;
    x_hi = 1;
    y_lo = 0;
    y_hi = 1;
  }
  if (axes.y_range) std::tie(y_lo, y_hi) = *axes.y_range;
  if (x_hi - x_lo < 1e-12) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (y_hi - y_lo < 1e-12) {
    y_lo -= 0.05;
    y_hi += 0.05;
  }
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << axes.width << "\" height=\""
      << axes.height << "\" viewBox=\"0 0 " << axes.width << ' ' << axes.height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << axes.width << "\" height=\"" << axes.height << "\" fill=\"#ffffff\"/>\n";
  if (!axes.title.empty()) {
    svg << "<text x=\"" << fixed2(left + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"15\">" << xml_escape(axes.title) << "</text>\n";
  }
  svg << "<g class=\"axes\" stroke=\"#333333\" stroke-width=\"1\">\n"
      << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top + plot_h) << "\" x2=\"" << fixed2(left + plot_w)
      << "\" y2=\"" << fixed2(top + plot_h) << "\"/>\n"
      << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top) << "\" x2=\"" << fixed2(left) << "\" y2=\""
      << fixed2(top + plot_h) << "\"/>\n</g>\n";

  svg << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = y_lo + (y_hi - y_lo) * i / 5.0;
    svg << "<line x1=\"" << fixed2(left - 4) << "\" y1=\"" << fixed2(py(y)) << "\" x2=\"" << fixed2(left)
        << "\" y2=\"" << fixed2(py(y)) << "\" stroke=\"#333333\"/>"
        << "<text x=\"" << fixed2(left - 8) << "\" y=\"" << fixed2(py(y) + 4) << "\" text-anchor=\"end\">"
        << fixed2(y) << "</text>\n";
  }
  const double span = x_hi - x_lo;
  const double step = std::max(1.0, std::ceil(span / 10.0));
  for (double x = std::ceil(x_lo); x <= x_hi + 1e-9; x += step) {
    svg << "<line x1=\"" << fixed2(px(x)) << "\" y1=\"" << fixed2(top + plot_h) << "\" x2=\"" << fixed2(px(x))
        << "\" y2=\"" << fixed2(top + plot_h + 4) << "\" stroke=\"#333333\"/>"
        << "<text x=\"" << fixed2(px(x)) << "\" y=\"" << fixed2(top + plot_h + 18)
        << "\" text-anchor=\"middle\">" << static_cast<long long>(x) << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text class=\"x-label\" x=\"" << fixed2(left + plot_w / 2) << "\" y=\"" << fixed2(axes.height - 14.0)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(axes.x_label)
      << "</text>\n";
  svg << "<text class=\"y-label\" x=\"18\" y=\"" << fixed2(top + plot_h / 2) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 " << fixed2(top + plot_h / 2)
      << ")\">" << xml_escape(axes.y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const CurveSeries& s = series[i];
    const char* colour = kPalette[i % std::size(kPalette)];
    if (!s.band.empty() && s.band.size() == s.points.size()) {
      svg << "<polygon class=\"band\" fill=\"" << colour << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (std::size_t p = 0; p < s.points.size(); ++p) {
        svg << (p ? " " : "") << fixed2(px(s.points[p].first)) << ',' << fixed2(py(s.band[p].second));
      }
      for (std::size_t p = s.points.size(); p-- > 0;) {
        svg << ' ' << fixed2(px(s.points[p].first)) << ',' << fixed2(py(s.band[p].first));
      }
      svg << "\"/>\n";
    }
    svg << "<polyline class=\"series\" data-label=\"" << xml_escape(s.label) << "\" fill=\"none\" stroke=\""
        << colour << "\" stroke-width=\"2\" points=\"";
    for (std::size_t p = 0; p < s.points.size(); ++p) {
      svg << (p ? " " : "") << fixed2(px(s.points[p].first)) << ',' << fixed2(py(s.points[p].second));
    }
    svg << "\"/>\n";
  }

  svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = top + 10 + 18.0 * static_cast<double>(i);
    const double x = left + plot_w + 16;
    svg << "<line x1=\"" << fixed2(x) << "\" y1=\"" << fixed2(y) << "\" x2=\"" << fixed2(x + 22) << "\" y2=\""
        << fixed2(y) << "\" stroke=\"" << kPalette[i % std::size(kPalette)] << "\" stroke-width=\"2\"/>"
        << "<text class=\"legend-entry\" x=\"" << fixed2(x + 28) << "\" y=\"" << fixed2(y + 4) << "\">"
        << xml_escape(series[i].label) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void emit_curves_svg(std::span<const CurveSeries> series, const AxesConfig& axes,
                     const std::filesystem::path& path) {
  write_text(path, render_curves_svg(series, axes));
}

std::vector<CurveSeries> accuracy_series(std::span<const MetricCurve> curves) {
  std::vector<CurveSeries> out;
  for (const MetricCurve& c : curves) {
    CurveSeries s;
    s.label = std::string(metric_name(c.metric));
    for (std::size_t i = 0; i < c.rounds.size(); ++i) {
      s.points.emplace_back(static_cast<double>(c.rounds[i]), c.mean[i]);
      s.band.emplace_back(c.min[i], c.max[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<CurveSeries> per_class_series(const RunTrace& trace) {
  std::vector<CurveSeries> out(trace.class_names.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c].label = trace.class_names[c];
  for (const RoundRecord& r : trace.rounds) {
    for (std::size_t c = 0; c < out.size() && c < r.per_class_accuracy.size(); ++c) {
      out[c].points.emplace_back(static_cast<double>(r.round), r.per_class_accuracy[c]);
    }
  }
  return out;
}

std::vector<CurveSeries> loss_series(std::span<const RunTrace> traces) {
  std::vector<CurveSeries> out;
  for (const RunTrace* t : sorted_traces(traces)) {
    CurveSeries s;
    s.label = t->run_id;
    for (const RoundRecord& r : t->rounds) s.points.emplace_back(static_cast<double>(r.round), r.train_loss);
    out.push_back(std::move(s));
  }
  return out;
}

// ---- Summary -----------------------------------------------------------------------

double trapezoid_area(std::span<const double> x, std::span<const double> y) {
  double area = 0.0;
  for (std::size_t i = 1; i < x.size() && i < y.size(); ++i) area += (x[i] - x[i - 1]) * (y[i] + y[i - 1]) / 2.0;
  return area;
}

std::vector<SummaryRow> summarize(std::span<const RunTrace> traces, double threshold) {
  if (traces.empty()) return {};
  auto rounds_of = [](const RunTrace& t) {
    std::vector<std::size_t> r;
    for (const RoundRecord& rec : t.rounds) r.push_back(rec.round);
    return r;
  };
  const std::vector<std::size_t> rounds = rounds_of(traces.front());
  for (const RunTrace& t : traces) {
    if (rounds_of(t) != rounds) {
      throw Error(ErrorKind::MisalignedTraces, "trace " + t.run_id + " covers different rounds");
    }
  }
  std::map<std::size_t, std::vector<const RunTrace*>> by_metric;
  for (const RunTrace& t : traces) by_metric[metric_rank(t.config.metric)].push_back(&t);

  std::vector<double> xs;
  for (std::size_t r : rounds) xs.push_back(static_cast<double>(r));
  std::vector<SummaryRow> out;
  for (const auto& [rank, group] : by_metric) {
    SummaryRow row;
    row.metric = group.front()->config.metric;
    row.replicates = group.size();
    std::vector<double> mean;
    for (std::size_t i = 0; i < rounds.size(); ++i) {
      std::vector<double> values;
      for (const RunTrace* t : group) values.push_back(t->rounds[i].test_accuracy);
      mean.push_back(order_free_mean(std::move(values)));
      if (!row.rounds_to_threshold && mean.back() >= threshold) row.rounds_to_threshold = rounds[i];
    }
    row.final_accuracy = mean.empty() ? 0.0 : mean.back();
    row.area = trapezoid_area(xs, mean);
    out.push_back(row);
  }
  return out;
}

std::string format_summary_text(std::span<const SummaryRow> rows, double threshold) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %4s %10s %12s %10s\n", "metric", "reps", "final_acc", "rounds>=thr",
                "area");
  out << line;
  for (const SummaryRow& r : rows) {
    const std::string reach = r.rounds_to_threshold ? std::to_string(*r.rounds_to_threshold) : "never";
    std::snprintf(line, sizeof(line), "%-8s %4zu %10.4f %12s %10.4f\n", std::string(metric_name(r.metric)).c_str(),
                  r.replicates, r.final_accuracy, reach.c_str(), r.area);
    out << line;
  }
  std::snprintf(line, sizeof(line), "threshold = %.4f\n", threshold);
  out << line;
  return out.str();
}

std::string format_summary_json(std::span<const SummaryRow> rows, double threshold) {
  json j;
  j["threshold"] = threshold;
  json arr = json::array();
  for (const SummaryRow& r : rows) {
    json row;
    row["metric"] = metric_name(r.metric);
    row["replicates"] = r.replicates;
    row["final_accuracy"] = r.final_accuracy;
    row["rounds_to_threshold"] = r.rounds_to_threshold ? json(*r.rounds_to_threshold) : json("never");
    row["area"] = r.area;
    arr.push_back(std::move(row));
  }
  j["metrics"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace alkit
