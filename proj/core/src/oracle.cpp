#include <algorithm>

#include "alkit/engine.hpp"
#include "alkit/error.hpp"

namespace alkit {

std::vector<Label> SimulatedOracle::query(std::span<const ExampleId> ids) {
  std::vector<Label> labels;
  labels.reserve(ids.size());
  for (ExampleId id : ids) labels.push_back(data_->label(data_->row_of(id)));
  return labels;
}

void QueuedOracle::publish_locked(std::span<const ExampleId> ids) {
  const bool same = pending_.size() == ids.size() &&
                    std::all_of(ids.begin(), ids.end(), [&](ExampleId id) { return pending_.contains(id); });
  if (!same) {
    pending_.clear();
    for (ExampleId id : ids) pending_.emplace(id, std::nullopt);
  }
}

void QueuedOracle::publish(std::span<const ExampleId> ids) {
  std::lock_guard lock(mutex_);
  publish_locked(ids);
}

std::vector<Label> QueuedOracle::query(std::span<const ExampleId> ids) {
  std::unique_lock lock(mutex_);
  publish_locked(ids);
  auto complete = [&] {
    return std::all_of(pending_.begin(), pending_.end(), [](const auto& kv) { return kv.second.has_value(); });
  };
  if (!answered_.wait_for(lock, wait_, complete)) {
    throw Error(ErrorKind::OracleTimeout, std::to_string(std::count_if(pending_.begin(), pending_.end(),
                                                                      [](const auto& kv) { return !kv.second; })) +
                                              " labels still outstanding");
  }
  std::vector<Label> labels;
  labels.reserve(ids.size());
  for (ExampleId id : ids) labels.push_back(*pending_.at(id));
  pending_.clear();
  return labels;
}

QueuedOracle::Answer QueuedOracle::answer(ExampleId id, Label label) {
  std::lock_guard lock(mutex_);
  auto it = pending_.find(id);
  if (it == pending_.end()) return Answer::NotPending;
  if (it->second) return *it->second == label ? Answer::Duplicate : Answer::Conflict;
  it->second = label;
  answered_.notify_all();
  return Answer::Accepted;
}

std::vector<ExampleId> QueuedOracle::published() const {
  std::lock_guard lock(mutex_);
  std::vector<ExampleId> ids;
  for (const auto& [id, label] : pending_) ids.push_back(id);
  return ids;
}

std::vector<ExampleId> QueuedOracle::unanswered() const {
  std::lock_guard lock(mutex_);
  std::vector<ExampleId> ids;
  for (const auto& [id, label] : pending_) {
    if (!label) ids.push_back(id);
  }
  return ids;
}

std::optional<Label> QueuedOracle::answer_for(ExampleId id) const {
  std::lock_guard lock(mutex_);
  auto it = pending_.find(id);
  return it == pending_.end() ? std::nullopt : it->second;
}

}  // namespace alkit
