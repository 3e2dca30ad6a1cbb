#include "flexsim/service.hpp"

#include <bit>
#include <charconv>
#include <cstdint>

#include "httplib.h"
#include "flexsim/catalog.hpp"

namespace flexsim {

std::string_view to_string(JobState state) {
  switch (state) {
    case JobState::Queued: return "queued";
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
  }
  return "unknown";
}

JobService::JobService(JobServiceOptions options)
    : options_(std::move(options)), rng_(std::random_device{}()) {
  std::size_t n = options_.workers;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  options_.max_results = std::max<std::size_t>(1, options_.max_results);
  for (std::size_t i = 0; i < n; ++i) threads_.emplace_back([this] { worker_loop(); });
}

JobService::~JobService() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

std::string JobService::next_id() {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  do {
    auto bits = rng_();
    id.assign(16, '0');
    for (auto& c : id) {
      c = kHex[bits & 0xF];
      bits >>= 4;
    }
  } while (jobs_.contains(id));
  return id;
}

std::string JobService::submit(const Scenario& scenario) {
  if (auto issues = validate(scenario); !issues.empty()) throw ValidationError(std::move(issues));
  auto job = std::make_shared<Job>();
  job->scenario = scenario;
  {
    std::lock_guard lock(mutex_);
    if (queue_.size() >= options_.max_queued)
      throw QueueFull("job queue is full (" + std::to_string(options_.max_queued) + " pending)");
    job->id = next_id();
    jobs_[job->id] = job;
    queue_.push_back(job);
  }
  wake_.notify_one();
  return job->id;
}

std::optional<JobSnapshot> JobService::get(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  Job& job = *it->second;
  if (job.in_lru) finished_.splice(finished_.begin(), finished_, job.lru);
  return JobSnapshot{job.id, job.state, job.progress.load(), job.scenario, job.error, job.result};
}

std::size_t JobService::queued() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

std::size_t JobService::running() const {
  std::lock_guard lock(mutex_);
  return running_;
}

void JobService::worker_loop() {
  while (true) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      job = queue_.front();
      queue_.pop_front();
      job->state = JobState::Running;
      ++running_;
    }

    RunOptions run_options = options_.run;
    run_options.progress = [&job](std::size_t done, std::size_t total) {
      const double fraction = static_cast<double>(done) / static_cast<double>(total);
      if (fraction > job->progress.load()) job->progress.store(std::min(1.0, fraction));
    };
    std::shared_ptr<const SimulationResult> result;
    std::string error;
    try {
      result = std::make_shared<const SimulationResult>(run(job->scenario, run_options));
      if (options_.results_dir)
        export_result(*result, *options_.results_dir / job->id, ExportFormats{false, true});
    } catch (const std::exception& e) {
      error = e.what();
    }

    std::lock_guard lock(mutex_);
    --running_;
    if (result) {
      job->result = std::move(result);
      job->progress.store(1.0);
      job->state = JobState::Done;
    } else {
      job->error = std::move(error);
      job->state = JobState::Failed;
    }
    finish(job);
  }
}

// Called with the mutex held.
void JobService::finish(const std::shared_ptr<Job>& job) {
  finished_.push_front(job->id);
  job->lru = finished_.begin();
  job->in_lru = true;
  while (finished_.size() > options_.max_results) {
    jobs_.erase(finished_.back());
    finished_.pop_back();
  }
}

// ---------------------------------------------------------------------------

namespace {

const Grid& field_grid(const SimulationResult& result, std::string_view field) {
  if (field == "w") return result.history.w;
  if (field == "phi" && result.history.phi) return *result.history.phi;
  throw std::out_of_range("no field '" + std::string(field) + "' for model " +
                          std::string(to_string(kind_of(result.scenario.model))));
}

Json issues_json(const Issues& issues) {
  Json out = Json::array();
  for (const auto& i : issues) out.push_back({{"path", i.path}, {"message", i.message}});
  return out;
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const Issues& issues = {}) {
  Json body{{"error", message}};
  if (!issues.empty()) body["issues"] = issues_json(issues);
  send_json(res, status, body);
}

}  // namespace

Json result_summary(const SimulationResult& result) {
  const auto& v = result.verdict;
  Json s;
  s["verdict"] = v.diverged ? "diverged" : "stable";
  s["reason"] = std::string(to_string(v.reason));
  s["first_bad_step"] = v.first_bad_step ? Json(*v.first_bad_step) : Json(nullptr);
  s["peak_magnitude"] = std::isfinite(v.peak_magnitude) ? Json(v.peak_magnitude) : Json("inf");
  s["steps_completed"] = result.steps_completed;
  s["tip_final"] = std::isfinite(result.tip_w.back()) ? Json(result.tip_w.back()) : Json(nullptr);
  const double window = window_mean_abs(result.tip_w, result.mesh.n_time());
  s["tip_window_mean_abs"] = std::isfinite(window) ? Json(window) : Json(nullptr);
  s["wall_time_s"] = result.wall_time.count();
  s["storage"] = result.history.w.is_full() ? "full" : "rolling";
  s["fields"] = result.history.phi ? Json::array({"w", "phi"}) : Json::array({"w"});
  s["shape"] = {{"levels", result.valid_levels()}, {"nodes", result.mesh.n_nodes()}};
  if (result.a_priori) {
    const auto& a = *result.a_priori;
    s["a_priori"] = {{"criterion", a.criterion_name},
                     {"lhs", a.lhs_value},
                     {"threshold", a.threshold},
                     {"predicted_stable", a.predicted_stable},
                     {"advisory", a.advisory}};
  }
  return s;
}

Json field_payload(const SimulationResult& result, std::string_view field, std::size_t stride) {
  const Grid& grid = field_grid(result, field);
  if (!grid.is_full()) throw std::logic_error("grids are not kept under rolling storage");
  const auto levels = strided_levels(result.steps_completed, stride);
  Json x = Json::array();
  for (std::size_t i = 0; i < result.mesh.n_nodes(); ++i) x.push_back(result.mesh.x(i));
  Json t = Json::array();
  Json values = Json::array();
  for (auto j : levels) {
    t.push_back(result.mesh.t(j));
    const auto row = grid.row(j);
    values.push_back(Json(std::vector<double>(row.begin(), row.end())));
  }
  Json out;
  out["field"] = std::string(field);
  out["stride"] = stride;
  out["rows"] = levels.size();
  out["cols"] = result.mesh.n_nodes();
  out["levels"] = levels;
  out["x"] = x;
  out["t"] = t;
  out["values"] = values;
  return out;
}

std::string field_payload_binary(const SimulationResult& result, std::string_view field,
                                 std::size_t stride) {
  const Grid& grid = field_grid(result, field);
  if (!grid.is_full()) throw std::logic_error("grids are not kept under rolling storage");
  const auto levels = strided_levels(result.steps_completed, stride);
  const auto values = gather_rows(grid, levels);
  std::string out;
  out.reserve(16 + values.size() * 8);
  auto put = [&out](std::uint64_t bits) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
  };
  put(levels.size());
  put(grid.n_nodes());
  for (double v : values) put(std::bit_cast<std::uint64_t>(v));
  return out;
}

void install_routes(httplib::Server& server, JobService& service, const HttpOptions& options) {
  server.Get("/api/health", [&service](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200,
              {{"status", "ok"},
               {"workers", service.workers()},
               {"queued", service.queued()},
               {"running", service.running()}});
  });

  const auto fixture_dir = options.fixture_dir;
  server.Get("/api/models", [fixture_dir](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, model_catalog(fixture_dir));
  });

  server.Post("/api/jobs", [&service](const httplib::Request& req, httplib::Response& res) {
    try {
      const Scenario scenario = parse_scenario(req.body);
      const std::string id = service.submit(scenario);
      send_json(res, 202, {{"job_id", id}, {"state", "queued"}});
    } catch (const ScenarioError& e) {
      send_error(res, 400, std::string(to_string(e.kind())), e.issues());
    } catch (const ValidationError& e) {
      send_error(res, 400, "constraint violation", e.issues());
    } catch (const QueueFull& e) {
      res.set_header("Retry-After", "1");
      send_error(res, 503, e.what());
    }
  });

  server.Get(R"(/api/jobs/([0-9a-f]+))", [&service](const httplib::Request& req,
                                                    httplib::Response& res) {
    const auto job = service.get(req.matches[1]);
    if (!job) return send_error(res, 404, "unknown job");
    Json body{{"job_id", job->id},
              {"state", std::string(to_string(job->state))},
              {"progress", job->progress},
              {"label", job->scenario.label},
              {"model", std::string(to_string(kind_of(job->scenario.model)))}};
    if (job->state == JobState::Done) body["summary"] = result_summary(*job->result);
    if (job->state == JobState::Failed) body["error"] = job->error;
    send_json(res, 200, body);
  });

  server.Get(R"(/api/jobs/([0-9a-f]+)/tip)", [&service](const httplib::Request& req,
                                                        httplib::Response& res) {
    const auto job = service.get(req.matches[1]);
    if (!job) return send_error(res, 404, "unknown job");
    if (job->state != JobState::Done)
      return send_error(res, 409, "job is " + std::string(to_string(job->state)));
    const auto& r = *job->result;
    Json t = Json::array();
    for (std::size_t j = 0; j < r.tip_w.size(); ++j) t.push_back(r.mesh.t(j));
    Json body{{"t", t}, {"w_tip", r.tip_w}};
    if (!r.tip_phi.empty()) body["phi_tip"] = r.tip_phi;
    send_json(res, 200, body);
  });

  server.Get(R"(/api/jobs/([0-9a-f]+)/fields/([A-Za-z_]+))",
             [&service](const httplib::Request& req, httplib::Response& res) {
               const auto job = service.get(req.matches[1]);
               if (!job) return send_error(res, 404, "unknown job");
               const std::string field = req.matches[2];
               if (field != "w" && field != "phi")
                 return send_error(res, 404, "unknown field '" + field + "'");
               if (job->state != JobState::Done)
                 return send_error(res, 409, "job is " + std::string(to_string(job->state)));

               std::size_t stride = 1;
               if (req.has_param("stride")) {
                 const auto text = req.get_param_value("stride");
                 const auto [ptr, ec] =
                     std::from_chars(text.data(), text.data() + text.size(), stride);
                 if (ec != std::errc() || ptr != text.data() + text.size() || stride == 0)
                   return send_error(res, 400, "stride must be an integer >= 1",
                                     {{"stride", "got '" + text + "'"}});
               }
               const bool binary =
                   req.has_param("format") && req.get_param_value("format") == "bin";
               try {
                 if (binary) {
                   res.status = 200;
                   res.set_content(field_payload_binary(*job->result, field, stride),
                                   "application/octet-stream");
                 } else {
                   send_json(res, 200, field_payload(*job->result, field, stride));
                 }
               } catch (const std::out_of_range& e) {
                 send_error(res, 404, e.what());
               } catch (const std::logic_error& e) {
                 send_error(res, 409, e.what());
               }
             });

  if (options.static_dir && std::filesystem::is_directory(*options.static_dir))
    server.set_mount_point("/", options.static_dir->string());
}

}  // namespace flexsim
