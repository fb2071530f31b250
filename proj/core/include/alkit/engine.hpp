#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alkit/dataset.hpp"
#include "alkit/model.hpp"
#include "alkit/uncertainty.hpp"

namespace alkit {

/// Global scores the whole pool each round. Batched shuffles the pool into batches of
/// `scan_batch` and takes each batch's best, with k shared out in proportion to batch
/// size; a single batch covering the pool is identical to Global.
enum class ScanMode { Global, Batched };

enum class StopReason { ErrorBound, PoolExhausted, MaxRounds };

std::string_view stop_reason_name(StopReason reason) noexcept;
std::string_view scan_mode_name(ScanMode mode) noexcept;
std::optional<ScanMode> parse_scan_mode(std::string_view name) noexcept;

struct RunConfig {
  Metric metric = Metric::Entropy;
  std::size_t per_round_k = 10;
  std::size_t seed_size = 10;
  std::size_t test_size = 100;
  std::size_t pool_size = 0;  // 0 = all remaining examples
  std::optional<std::size_t> max_rounds = 10;
  std::optional<double> epsilon;  // stop once 1 - training accuracy <= epsilon
  Architecture arch = Architecture::mlp(128);
  TrainHyper hyper;
  std::uint64_t rng_seed = 0;
  bool cold_start = false;
  ScanMode scan = ScanMode::Global;
  std::size_t scan_batch = 128;
  std::size_t workers = 1;  // pool-scoring threads; 0 = hardware

  void validate() const;  // throws Error{InvalidArgument}
  SplitSpec split_spec() const { return {seed_size, test_size, pool_size, rng_seed}; }
};

struct RoundRecord {
  std::size_t round = 0;
  std::size_t labeled_count = 0;  // |T| the round's model was trained on
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double test_loss = 0.0;
  std::vector<double> per_class_accuracy;
  std::vector<std::size_t> test_support;
  std::vector<std::size_t> labeled_support;  // per-class counts in T at training time
  std::vector<ExampleId> selected_ids;       // ascending
  std::vector<Label> selected_labels;        // oracle answers, parallel to selected_ids
  std::size_t oracle_agreement = 0;          // answers matching ground truth
  double wall_ms = 0.0;
};

struct RunTrace {
  std::string run_id;
  RunConfig config;
  std::vector<std::string> class_names;
  std::vector<RoundRecord> rounds;
  std::optional<StopReason> stop;
};

/// Label source. Every queried id must be answered exactly once, in query order.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::vector<Label> query(std::span<const ExampleId> ids) = 0;
};

/// Answers from ground truth. Throws Error{UnknownId}.
class SimulatedOracle final : public Oracle {
 public:
  explicit SimulatedOracle(std::shared_ptr<const Dataset> data) : data_(std::move(data)) {}
  std::vector<Label> query(std::span<const ExampleId> ids) override;

 private:
  std::shared_ptr<const Dataset> data_;
};

/// Oracle fed from outside (a human via the labelling service). query() publishes the ids
/// and waits up to `wait` for answers, then throws Error{OracleTimeout}; answers received
/// so far are kept, so the call can be retried.
class QueuedOracle final : public Oracle {
 public:
  enum class Answer { Accepted, Duplicate, Conflict, NotPending };

  explicit QueuedOracle(std::chrono::milliseconds wait = std::chrono::milliseconds{0}) : wait_(wait) {}

  std::vector<Label> query(std::span<const ExampleId> ids) override;
  /// Makes `ids` the outstanding request without waiting; a no-op when already published.
  void publish(std::span<const ExampleId> ids);
  Answer answer(ExampleId id, Label label);

  std::vector<ExampleId> published() const;
  std::vector<ExampleId> unanswered() const;
  std::optional<Label> answer_for(ExampleId id) const;

 private:
  void publish_locked(std::span<const ExampleId> ids);

  std::chrono::milliseconds wait_;
  mutable std::mutex mutex_;
  std::condition_variable answered_;
  std::map<ExampleId, std::optional<Label>> pending_;
};

struct EngineState {
  std::vector<std::size_t> labeled;  // T, dataset rows in insertion order
  std::vector<Label> labeled_labels;  // oracle labels parallel to `labeled`
  std::vector<std::size_t> pool;      // P, ascending
  std::vector<std::size_t> test;      // S, ascending
  std::size_t round = 0;              // completed rounds
};

/// One pool-based active-learning run. Each round: train on T, evaluate on S, score
/// every pool example, select k, ask the oracle, move the answers from P to T.
/// prepare_round()/commit_round() expose the oracle step as a suspension point.
class Engine {
 public:
  /// Splits the data per config. A null model means a fresh Network(config.arch).
  Engine(std::shared_ptr<const Dataset> data, RunConfig config, std::unique_ptr<Classifier> model = nullptr);

  /// Trains, evaluates, scores and selects; returns the ids awaiting labels. Idempotent
  /// while a round is pending.
  const std::vector<ExampleId>& prepare_round();
  bool has_pending() const { return pending_.has_value(); }
  std::span<const ExampleId> pending_ids() const;

  /// Moves the pending selection into T with the given labels and closes the round.
  const RoundRecord& commit_round(std::span<const Label> labels);

  const RoundRecord& step_round(Oracle& oracle);
  const RunTrace& run(Oracle& oracle);

  bool finished() const { return trace_.stop.has_value(); }
  const RunTrace& trace() const { return trace_; }
  const EngineState& state() const { return state_; }
  const Dataset& dataset() const { return *data_; }
  const RunConfig& config() const { return config_; }
  const Classifier& model() const { return *model_; }

  /// Throws std::logic_error if T, P, S overlap or the growth law is broken.
  void check_invariants() const;

 private:
  struct Pending {
    RoundRecord record;
    std::vector<std::size_t> pool_positions;  // ascending
    std::vector<ExampleId> ids;
    std::chrono::steady_clock::time_point started;
  };

  std::vector<double> score_pool() const;
  std::vector<std::size_t> choose(std::span<const double> scores) const;

  std::shared_ptr<const Dataset> data_;
  RunConfig config_;
  std::unique_ptr<Classifier> model_;
  EngineState state_;
  FeatureMatrix test_x_;
  std::vector<Label> test_y_;
  std::optional<Pending> pending_;
  std::size_t selected_total_ = 0;
  std::size_t seed_size_ = 0;
  std::size_t initial_pool_ = 0;
  RunTrace trace_;
};

RunTrace run(std::shared_ptr<const Dataset> data, const RunConfig& config, Oracle& oracle);

struct CompareSpec {
  RunConfig base;
  std::vector<Metric> metrics;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t parallel_runs = 1;  // independent runs executed concurrently
};

struct MetricCurve {
  Metric metric = Metric::Entropy;
  std::vector<std::size_t> rounds;
  std::vector<std::size_t> labeled_count;
  std::vector<double> mean;
  std::vector<double> min;
  std::vector<double> max;
};

struct Comparison {
  std::vector<RunTrace> traces;  // metric-major, then seed, in spec order
  std::vector<MetricCurve> curves;
};

/// Every (metric, seed) pair runs with the simulated oracle; a given seed yields the same
/// split and initial model under every metric.
Comparison compare_runs(std::shared_ptr<const Dataset> data, const CompareSpec& spec);

/// Mean/min/max test accuracy per round over the traces of one metric, on the rounds
/// every replicate reached.
MetricCurve accuracy_curve(Metric metric, std::span<const RunTrace* const> replicates);

}  // namespace alkit
