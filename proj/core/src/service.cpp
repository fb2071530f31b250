#include "alkit/service.hpp"

#include <httplib.h>

#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "alkit/engine.hpp"
#include "alkit/error.hpp"
#include "alkit/png.hpp"
#include "alkit/report.hpp"

namespace alkit {
namespace {

using json = nlohmann::ordered_json;

struct HttpError {
  int status;
  std::string message;
};

[[noreturn]] void fail(int status, std::string message) { throw HttpError{status, std::move(message)}; }

std::string task_id_for(std::size_t round, ExampleId id) {
  return "r" + std::to_string(round) + "-e" + std::to_string(id);
}

struct Session {
  std::string id;
  std::shared_ptr<const Dataset> data;
  std::unique_ptr<Engine> engine;
  QueuedOracle answers;
  std::map<std::string, ExampleId> tasks;  // open task ids of the current round
  std::mutex mutex;

  void open_round() {
    tasks.clear();
    if (engine->finished()) {
      answers.publish({});
      return;
    }
    const std::vector<ExampleId>& ids = engine->prepare_round();
    const std::size_t round = engine->state().round + 1;
    for (ExampleId id : ids) tasks.emplace(task_id_for(round, id), id);
    answers.publish(ids);
  }
};

json status_json(const Session& s) {
  const Engine& e = *s.engine;
  json j;
  j["id"] = s.id;
  j["round"] = e.state().round + (e.has_pending() ? 1 : 0);
  j["labeled_count"] = e.state().labeled.size();
  j["pool_remaining"] = e.state().pool.size();
  j["pending_task_count"] = s.answers.unanswered().size();
  j["finished"] = e.finished();
  j["stop_reason"] = e.trace().stop ? json(stop_reason_name(*e.trace().stop)) : json(nullptr);
  if (e.trace().rounds.empty()) {
    j["latest"] = nullptr;
  } else {
    const RoundRecord& r = e.trace().rounds.back();
    j["latest"] = {{"round", r.round},
                   {"labeled_count", r.labeled_count},
                   {"train_loss", r.train_loss},
                   {"test_accuracy", r.test_accuracy},
                   {"per_class_accuracy", r.per_class_accuracy},
                   {"oracle_agreement", r.oracle_agreement}};
  }
  return j;
}

}  // namespace

struct LabelingService::Impl {
  ServiceOptions options;
  httplib::Server server;
  std::thread worker;
  std::mutex sessions_mutex;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::size_t next_session = 1;
  std::mutex cache_mutex;
  std::map<std::string, std::shared_ptr<const Dataset>> mnist_cache;

  explicit Impl(ServiceOptions opts) : options(std::move(opts)) { routes(); }

  std::shared_ptr<const Dataset> load_dataset(const json& spec) {
    if (!spec.is_object()) fail(400, "dataset must be an object");
    const std::string source = spec.value("source", std::string("blobs"));
    if (source == "blobs") {
      BlobSpec b;
      try {
        b.classes = spec.value("classes", b.classes);
        b.dim = spec.value("dim", b.dim);
        b.per_class = spec.value("per_class", b.per_class);
        b.spread = spec.value("spread", b.spread);
        b.rng_seed = spec.value("seed", b.rng_seed);
      } catch (const json::exception& e) {
        fail(400, std::string("bad blobs dataset: ") + e.what());
      }
      return std::make_shared<const Dataset>(synth_blobs(b));
    }
    if (source == "mnist") {
      std::optional<std::vector<Label>> filter;
      std::string key = "all";
      if (spec.contains("classes") && !spec["classes"].is_null()) {
        if (!spec["classes"].is_array()) fail(400, "mnist classes must be an array of digits");
        std::vector<Label> digits;
        key.clear();
        for (const json& d : spec["classes"]) {
          if (!d.is_number_unsigned() || d.get<unsigned>() > 9) fail(400, "mnist classes must be digits 0-9");
          digits.push_back(d.get<Label>());
          key += std::to_string(digits.back()) + ",";
        }
        filter = std::move(digits);
      }
      std::lock_guard lock(cache_mutex);
      auto it = mnist_cache.find(key);
      if (it != mnist_cache.end()) return it->second;
      const MnistFiles files = mnist_files(options.mnist_dir, MnistSplit::Train);
      auto data = std::make_shared<const Dataset>(load_mnist(files.images, files.labels, filter));
      mnist_cache.emplace(key, data);
      return data;
    }
    fail(400, "unknown dataset source '" + source + "'");
  }

  std::shared_ptr<Session> find(const std::string& id) {
    std::lock_guard lock(sessions_mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) fail(404, "no session " + id);
    return it->second;
  }

  void snapshot(const Session& s) {
    if (!options.snapshot_dir) return;
    std::filesystem::create_directories(*options.snapshot_dir);
    std::ofstream out(*options.snapshot_dir / (s.id + ".json"));
    out << format_trace_json(s.engine->trace());
  }

  json create(const std::string& body) {
    json req;
    try {
      req = json::parse(body);
    } catch (const json::exception& e) {
      fail(400, std::string("malformed JSON: ") + e.what());
    }
    if (!req.is_object()) fail(400, "body must be a JSON object");
    {
      std::lock_guard lock(sessions_mutex);
      if (sessions.size() >= options.max_sessions) fail(409, "session capacity reached");
    }
    RunConfig config;
    try {
      config = run_config_from_json(body);
    } catch (const Error& e) {
      fail(400, e.what());
    }
    auto session = std::make_shared<Session>();
    try {
      session->data = load_dataset(req.contains("dataset") ? req["dataset"] : json::object());
      session->engine = std::make_unique<Engine>(session->data, config);
    } catch (const Error& e) {
      fail(e.kind() == ErrorKind::IoError ? 503 : 400, e.what());
    }
    std::lock_guard lock(sessions_mutex);
    if (sessions.size() >= options.max_sessions) fail(409, "session capacity reached");
    session->id = "s" + std::to_string(next_session++);
    {
      std::lock_guard slock(session->mutex);
      session->open_round();
    }
    sessions.emplace(session->id, session);
    return {{"id", session->id}};
  }

  json queue(Session& s) {
    std::lock_guard lock(s.mutex);
    const Dataset& data = *s.data;
    const ImageShape shape = data.image_shape();
    json tasks = json::array();
    std::map<ExampleId, std::string> by_id;
    for (const auto& [task, id] : s.tasks) by_id.emplace(id, task);
    for (const auto& [id, task] : by_id) {
      if (s.answers.answer_for(id)) continue;
      const std::span<const double> x = data.features(data.row_of(id));
      json t;
      t["task_id"] = task;
      t["example_id"] = id;
      if (!shape.empty()) {
        std::vector<std::uint8_t> pixels;
        for (double v : x) pixels.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
        json grid = json::array();
        for (std::size_t r = 0; r < shape.rows; ++r) {
          grid.push_back(std::vector<int>(pixels.begin() + static_cast<std::ptrdiff_t>(r * shape.cols),
                                          pixels.begin() + static_cast<std::ptrdiff_t>((r + 1) * shape.cols)));
        }
        t["pixels"] = std::move(grid);
        const std::vector<std::uint8_t> png = encode_png_gray(pixels, shape.cols, shape.rows);
        t["png_base64"] = httplib::detail::base64_encode(std::string(png.begin(), png.end()));
      } else {
        t["features"] = std::vector<double>(x.begin(), x.end());
      }
      tasks.push_back(std::move(t));
    }
    return {{"round", s.engine->state().round + (s.engine->has_pending() ? 1 : 0)},
            {"class_names", data.class_names()},
            {"tasks", std::move(tasks)}};
  }

  json post_labels(Session& s, const std::string& body) {
    json req;
    try {
      req = json::parse(body);
    } catch (const json::exception& e) {
      fail(400, std::string("malformed JSON: ") + e.what());
    }
    if (!req.is_object() || !req.contains("labels") || !req["labels"].is_array()) {
      fail(400, "expected {\"labels\": [...]}");
    }
    std::lock_guard lock(s.mutex);
    const auto& names = s.data->class_names();
    std::vector<std::pair<ExampleId, Label>> batch;
    std::map<ExampleId, Label> seen;
    for (const json& item : req["labels"]) {
      if (!item.is_object() || !item.contains("task_id") || !item["task_id"].is_string() ||
          !item.contains("class")) {
        fail(400, "each label needs task_id and class");
      }
      const std::string task = item["task_id"].get<std::string>();
      auto it = s.tasks.find(task);
      if (it == s.tasks.end()) fail(404, "unknown task " + task);
      const json& cls = item["class"];
      Label label = 0;
      if (cls.is_number_integer()) {
        const long long v = cls.get<long long>();
        if (v < 0 || static_cast<std::size_t>(v) >= names.size()) fail(422, "class out of range");
        label = static_cast<Label>(v);
      } else if (cls.is_string()) {
        auto pos = std::find(names.begin(), names.end(), cls.get<std::string>());
        if (pos == names.end()) fail(422, "unknown class name");
        label = static_cast<Label>(pos - names.begin());
      } else {
        fail(422, "class must be an index or a class name");
      }
      const ExampleId id = it->second;
      const std::optional<Label> prior = s.answers.answer_for(id);
      if (prior && *prior != label) fail(409, "task " + task + " already labelled differently");
      auto [slot, fresh] = seen.emplace(id, label);
      if (!fresh && slot->second != label) fail(409, "conflicting labels for task " + task);
      if (fresh) batch.emplace_back(id, label);
    }

    std::size_t accepted = 0;
    std::size_t duplicates = 0;
    for (const auto& [id, label] : batch) {
      if (s.answers.answer(id, label) == QueuedOracle::Answer::Accepted) {
        ++accepted;
      } else {
        ++duplicates;
      }
    }
    bool completed = false;
    if (!s.tasks.empty() && s.answers.unanswered().empty()) {
      const std::span<const ExampleId> ids = s.engine->pending_ids();
      std::vector<Label> labels;
      for (ExampleId id : ids) labels.push_back(*s.answers.answer_for(id));
      s.engine->commit_round(labels);
      completed = true;
      snapshot(s);
      s.open_round();
    }
    return {{"accepted", accepted},
            {"duplicates", duplicates},
            {"round_completed", completed},
            {"status", status_json(s)}};
  }

  template <typename Fn>
  static void respond(httplib::Response& res, int ok_status, Fn&& fn) {
    try {
      const json body = fn();
      res.status = ok_status;
      res.set_content(body.dump(), "application/json");
    } catch (const HttpError& e) {
      res.status = e.status;
      res.set_content(json{{"error", e.message}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  }

  void routes() {
    server.Post("/v1/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      respond(res, 201, [&] { return create(req.body); });
    });
    server.Get(R"(/v1/sessions/([^/]+)/queue)", [this](const httplib::Request& req, httplib::Response& res) {
      respond(res, 200, [&] { return queue(*find(req.matches[1])); });
    });
    server.Post(R"(/v1/sessions/([^/]+)/labels)", [this](const httplib::Request& req, httplib::Response& res) {
      respond(res, 200, [&] { return post_labels(*find(req.matches[1]), req.body); });
    });
    server.Get(R"(/v1/sessions/([^/]+)/status)", [this](const httplib::Request& req, httplib::Response& res) {
      respond(res, 200, [&] {
        auto s = find(req.matches[1]);
        std::lock_guard lock(s->mutex);
        return status_json(*s);
      });
    });
    server.Get(R"(/v1/sessions/([^/]+)/trace)", [this](const httplib::Request& req, httplib::Response& res) {
      respond(res, 200, [&] {
        auto s = find(req.matches[1]);
        std::lock_guard lock(s->mutex);
        return json::parse(format_trace_json(s->engine->trace()));
      });
    });
  }

  int bind() {
    if (options.port == 0) return server.bind_to_any_port(options.host);
    if (!server.bind_to_port(options.host, options.port)) return -1;
    return options.port;
  }
};

LabelingService::LabelingService(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

LabelingService::~LabelingService() { stop(); }

int LabelingService::start() {
  const int port = impl_->bind();
  if (port < 0) throw Error(ErrorKind::IoError, "cannot bind " + impl_->options.host);
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void LabelingService::serve() {
  const int port = impl_->bind();
  if (port < 0) throw Error(ErrorKind::IoError, "cannot bind " + impl_->options.host);
  impl_->server.listen_after_bind();
}

void LabelingService::stop() {
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace alkit
