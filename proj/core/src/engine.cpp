#include "alkit/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "alkit/error.hpp"
#include "alkit/parallel.hpp"
#include "alkit/random.hpp"

namespace alkit {
namespace {

// Fixed scoring block so results do not depend on the worker count.
constexpr std::size_t kScoreBlock = 256;

std::vector<std::size_t> class_support(std::span<const Label> labels, std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (Label y : labels) ++counts[y];
  return counts;
}

// Largest-remainder split of `k` picks over batches proportional to their sizes.
std::vector<std::size_t> allocate_quota(std::span<const std::size_t> sizes, std::size_t k) {
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  const std::size_t picks = std::min(k, total);
  std::vector<std::size_t> quota(sizes.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder numerator, batch)
  std::size_t assigned = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    quota[b] = picks * sizes[b] / total;
    assigned += quota[b];
    remainders.emplace_back(picks * sizes[b] % total, b);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < picks; ++i, ++assigned) ++quota[remainders[i].second];
  return quota;
}

}  // namespace

std::string_view stop_reason_name(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::ErrorBound: return "error_bound";
    case StopReason::PoolExhausted: return "pool_exhausted";
    case StopReason::MaxRounds: return "max_rounds";
  }
  return "unknown";
}

std::string_view scan_mode_name(ScanMode mode) noexcept {
  return mode == ScanMode::Global ? "global" : "batched";
}

std::optional<ScanMode> parse_scan_mode(std::string_view name) noexcept {
  if (name == "global") return ScanMode::Global;
  if (name == "batched") return ScanMode::Batched;
  return std::nullopt;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (per_round_k == 0) fail("per-round k must be positive");
  if (seed_size < 2) fail("seed set needs at least 2 examples");
  if (test_size == 0) fail("test set must be non-empty");
  if (!max_rounds && !epsilon) fail("need max_rounds or epsilon to stop");
  if (max_rounds && *max_rounds == 0) fail("max_rounds must be positive");
  if (epsilon && !(*epsilon >= 0.0 && *epsilon <= 1.0)) fail("epsilon must lie in [0,1]");
  if (arch.kind == Architecture::Kind::Mlp && arch.hidden == 0) fail("mlp hidden width must be positive");
  if (!(hyper.learning_rate > 0.0) || hyper.minibatch_size == 0 || hyper.epochs_per_round == 0 || hyper.l2 < 0.0) {
    fail("invalid training hyperparameters");
  }
  if (scan == ScanMode::Batched && scan_batch == 0) fail("scan batch must be positive");
}

Engine::Engine(std::shared_ptr<const Dataset> data, RunConfig config, std::unique_ptr<Classifier> model)
    : data_(std::move(data)), config_(std::move(config)), model_(std::move(model)) {
  config_.validate();
  if (!model_) {
    model_ = std::make_unique<Network>(config_.arch, data_->feature_dim(), data_->num_classes(),
                                       derive_seed(config_.rng_seed, Stream::Init));
  }
  if (model_->feature_dim() != data_->feature_dim() || model_->num_classes() != data_->num_classes()) {
    throw Error(ErrorKind::DimensionMismatch, "model shape does not match the dataset");
  }
  Split parts = split(*data_, config_.split_spec());
  state_.labeled = std::move(parts.seed);
  for (std::size_t row : state_.labeled) state_.labeled_labels.push_back(data_->label(row));
  state_.pool = std::move(parts.pool);
  state_.test = std::move(parts.test);
  seed_size_ = state_.labeled.size();
  initial_pool_ = state_.pool.size();

  test_x_ = data_->gather(state_.test);
  for (std::size_t row : state_.test) test_y_.push_back(data_->label(row));

  trace_.run_id = std::string(metric_name(config_.metric)) + "-s" + std::to_string(config_.rng_seed);
  trace_.config = config_;
  trace_.class_names = data_->class_names();
  if (state_.pool.empty()) trace_.stop = StopReason::PoolExhausted;
}

std::span<const ExampleId> Engine::pending_ids() const {
  if (!pending_) return {};
  return pending_->ids;
}

std::vector<double> Engine::score_pool() const {
  const std::size_t n = state_.pool.size();
  const std::size_t k = data_->num_classes();
  std::vector<double> scores(n);
  const std::size_t blocks = (n + kScoreBlock - 1) / kScoreBlock;
  const RandomKey base{derive_seed(config_.rng_seed, Stream::Selection), state_.round + 1, 0};
  parallel_for(blocks, config_.workers, [&](std::size_t b) {
    const std::size_t begin = b * kScoreBlock;
    const std::size_t end = std::min(n, begin + kScoreBlock);
    const std::span<const std::size_t> rows(state_.pool.data() + begin, end - begin);
    std::vector<double> probs;
    if (config_.metric != Metric::Random) probs = model_->predict_batch(data_->gather(rows));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      RandomKey key = base;
      key.id = data_->id(rows[i]);
      const std::span<const double> p =
          probs.empty() ? std::span<const double>() : std::span<const double>(probs).subspan(i * k, k);
      scores[begin + i] = informativeness(config_.metric, p, key).value;
    }
  });
  return scores;
}

std::vector<std::size_t> Engine::choose(std::span<const double> scores) const {
  const std::size_t k = config_.per_round_k;
  if (config_.scan == ScanMode::Global || config_.scan_batch >= scores.size()) {
    return select_k(scores, k);
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config_.rng_seed, Stream::Selection, state_.round + 1));
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<std::size_t> sizes;
  for (std::size_t start = 0; start < order.size(); start += config_.scan_batch) {
    sizes.push_back(std::min(config_.scan_batch, order.size() - start));
  }
  const std::vector<std::size_t> quota = allocate_quota(sizes, k);
  std::vector<std::size_t> chosen;
  std::size_t start = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    std::vector<std::size_t> members(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(start + sizes[b]));
    std::sort(members.begin(), members.end());  // tie-break on pool position
    std::vector<double> batch_scores;
    for (std::size_t m : members) batch_scores.push_back(scores[m]);
    for (std::size_t local : select_k(batch_scores, quota[b])) chosen.push_back(members[local]);
    start += sizes[b];
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

const std::vector<ExampleId>& Engine::prepare_round() {
  if (pending_) return pending_->ids;
  if (finished()) throw Error(ErrorKind::InvalidArgument, "run already finished");

  Pending next;
  next.started = std::chrono::steady_clock::now();
  RoundRecord& rec = next.record;
  rec.round = state_.round + 1;
  rec.labeled_count = state_.labeled.size();
  rec.labeled_support = class_support(state_.labeled_labels, data_->num_classes());

  if (config_.cold_start) model_->reinitialize(derive_seed(config_.rng_seed, Stream::Init));
  const FeatureMatrix train_x = data_->gather(state_.labeled);
  rec.train_loss = model_->fit_round(train_x, state_.labeled_labels, config_.hyper,
                                     derive_seed(config_.rng_seed, Stream::Training, rec.round));
  rec.train_accuracy = evaluate(*model_, train_x, state_.labeled_labels).accuracy;

  const Evaluation test = evaluate(*model_, test_x_, test_y_);
  rec.test_accuracy = test.accuracy;
  rec.test_loss = test.mean_loss;
  rec.per_class_accuracy = test.per_class_accuracy;
  rec.test_support = test.support;

  const std::vector<double> scores = score_pool();
  next.pool_positions = choose(scores);
  for (std::size_t pos : next.pool_positions) next.ids.push_back(data_->id(state_.pool[pos]));
  rec.selected_ids = next.ids;

  pending_ = std::move(next);
  return pending_->ids;
}

const RoundRecord& Engine::commit_round(std::span<const Label> labels) {
  if (!pending_) throw Error(ErrorKind::InvalidArgument, "no round awaiting labels");
  if (labels.size() != pending_->ids.size()) {
    throw Error(ErrorKind::InvalidArgument, "expected " + std::to_string(pending_->ids.size()) + " labels");
  }
  for (Label y : labels) {
    if (y >= data_->num_classes()) throw Error(ErrorKind::LabelOutOfRange, "label " + std::to_string(y));
  }

  Pending done = std::move(*pending_);
  pending_.reset();
  RoundRecord& rec = done.record;
  rec.selected_labels.assign(labels.begin(), labels.end());

  std::vector<char> taken(state_.pool.size(), 0);
  for (std::size_t i = 0; i < done.pool_positions.size(); ++i) {
    const std::size_t row = state_.pool[done.pool_positions[i]];
    taken[done.pool_positions[i]] = 1;
    state_.labeled.push_back(row);
    state_.labeled_labels.push_back(labels[i]);
    if (data_->label(row) == labels[i]) ++rec.oracle_agreement;
  }
  std::vector<std::size_t> remaining;
  remaining.reserve(state_.pool.size() - done.pool_positions.size());
  for (std::size_t i = 0; i < state_.pool.size(); ++i) {
    if (!taken[i]) remaining.push_back(state_.pool[i]);
  }
  state_.pool = std::move(remaining);
  selected_total_ += done.pool_positions.size();
  ++state_.round;

  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - done.started).count();
  trace_.rounds.push_back(std::move(rec));

  const RoundRecord& last = trace_.rounds.back();
  if (config_.epsilon && 1.0 - last.train_accuracy <= *config_.epsilon) {
    trace_.stop = StopReason::ErrorBound;
  } else if (state_.pool.empty()) {
    trace_.stop = StopReason::PoolExhausted;
  } else if (config_.max_rounds && state_.round >= *config_.max_rounds) {
    trace_.stop = StopReason::MaxRounds;
  }
  return last;
}

const RoundRecord& Engine::step_round(Oracle& oracle) {
  const std::vector<ExampleId> ids = prepare_round();
  const std::vector<Label> labels = oracle.query(ids);
  return commit_round(labels);
}

const RunTrace& Engine::run(Oracle& oracle) {
  while (!finished()) {
    step_round(oracle);
    check_invariants();
  }
  return trace_;
}

void Engine::check_invariants() const {
  std::vector<char> owner(data_->size(), 0);
  auto mark = [&](std::span<const std::size_t> rows, char tag) {
    for (std::size_t r : rows) {
      if (owner[r] != 0) throw std::logic_error("T, P and S overlap");
      owner[r] = tag;
    }
  };
  mark(state_.labeled, 1);
  mark(state_.pool, 2);
  mark(state_.test, 3);
  if (state_.labeled.size() != seed_size_ + selected_total_ ||
      state_.pool.size() + selected_total_ != initial_pool_) {
    throw std::logic_error("labelled/pool sizes broke the growth law");
  }
  if (state_.labeled.size() != state_.labeled_labels.size()) throw std::logic_error("label count mismatch");
}

RunTrace run(std::shared_ptr<const Dataset> data, const RunConfig& config, Oracle& oracle) {
  Engine engine(std::move(data), config);
  return engine.run(oracle);
}

MetricCurve accuracy_curve(Metric metric, std::span<const RunTrace* const> replicates) {
  MetricCurve curve;
  curve.metric = metric;
  if (replicates.empty()) return curve;
  std::size_t common = replicates.front()->rounds.size();
  for (const RunTrace* t : replicates) common = std::min(common, t->rounds.size());
  for (std::size_t r = 0; r < common; ++r) {
    double sum = 0.0;
    double lo = 1.0;
    double hi = 0.0;
    for (const RunTrace* t : replicates) {
      const double acc = t->rounds[r].test_accuracy;
      sum += acc;
      lo = std::min(lo, acc);
      hi = std::max(hi, acc);
    }
    curve.rounds.push_back(replicates.front()->rounds[r].round);
    curve.labeled_count.push_back(replicates.front()->rounds[r].labeled_count);
    curve.mean.push_back(sum / static_cast<double>(replicates.size()));
    curve.min.push_back(lo);
    curve.max.push_back(hi);
  }
  return curve;
}

Comparison compare_runs(std::shared_ptr<const Dataset> data, const CompareSpec& spec) {
  if (spec.metrics.size() < 2 || spec.seeds.empty()) {
    throw Error(ErrorKind::InvalidArgument, "compare needs at least two metrics and one seed");
  }
  Comparison out;
  out.traces.resize(spec.metrics.size() * spec.seeds.size());
  parallel_for(out.traces.size(), spec.parallel_runs, [&](std::size_t i) {
    RunConfig cfg = spec.base;
    cfg.metric = spec.metrics[i / spec.seeds.size()];
    cfg.rng_seed = spec.seeds[i % spec.seeds.size()];
    SimulatedOracle oracle(data);
    out.traces[i] = run(data, cfg, oracle);
  });
  for (std::size_t m = 0; m < spec.metrics.size(); ++m) {
    std::vector<const RunTrace*> reps;
    for (std::size_t s = 0; s < spec.seeds.size(); ++s) reps.push_back(&out.traces[m * spec.seeds.size() + s]);
    out.curves.push_back(accuracy_curve(spec.metrics[m], reps));
  }
  return out;
}

}  // namespace alkit
