#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace alkit {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 0;                      // 0 picks a free port
  std::size_t max_sessions = 8;
  std::filesystem::path mnist_dir;   // where "mnist" datasets are read from
  std::optional<std::filesystem::path> snapshot_dir;  // trace JSON written after each round
};

/// HTTP front end that lets people act as the oracle. Routes (JSON bodies):
///   POST /v1/sessions                  {"dataset": {...}, <RunConfig fields>}  -> 201 {"id"}
///   GET  /v1/sessions/{id}/queue       pending tasks, ascending example id
///   POST /v1/sessions/{id}/labels      {"labels": [{"task_id", "class"}]}
///   GET  /v1/sessions/{id}/status
///   GET  /v1/sessions/{id}/trace
/// A "dataset" is {"source": "blobs", "classes", "dim", "per_class", "spread", "seed"} or
/// {"source": "mnist", "classes": [digits]}.
class LabelingService {
 public:
  explicit LabelingService(ServiceOptions options);
  ~LabelingService();
  LabelingService(const LabelingService&) = delete;
  LabelingService& operator=(const LabelingService&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace alkit
