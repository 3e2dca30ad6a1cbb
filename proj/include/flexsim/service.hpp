#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "flexsim/engine.hpp"
#include "flexsim/io.hpp"

namespace httplib {
class Server;
}

namespace flexsim {

enum class JobState { Queued, Running, Done, Failed };

std::string_view to_string(JobState state);

/// Point-in-time copy of a job, safe to hand to request handlers.
struct JobSnapshot {
  std::string id;
  JobState state{JobState::Queued};
  double progress{0.0};  ///< fraction of time levels computed, in [0, 1]
  Scenario scenario;
  std::string error;     ///< Failed only
  std::shared_ptr<const SimulationResult> result;  ///< Done only
};

struct JobServiceOptions {
  std::size_t workers{0};          ///< 0: one per processor
  std::size_t max_queued{64};      ///< pending jobs beyond this are refused
  std::size_t max_results{16};     ///< finished jobs kept; least recently used go first
  std::optional<std::filesystem::path> results_dir;  ///< write-through bundles
  RunOptions run;
};

class QueueFull : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bounded worker pool with an in-memory LRU store of finished jobs.
class JobService {
 public:
  explicit JobService(JobServiceOptions options = {});
  ~JobService();
  JobService(const JobService&) = delete;
  JobService& operator=(const JobService&) = delete;

  /// Enqueues a validated scenario. Throws ValidationError or QueueFull.
  std::string submit(const Scenario& scenario);
  /// Refreshes the job's LRU position.
  std::optional<JobSnapshot> get(const std::string& id);

  std::size_t queued() const;
  std::size_t running() const;
  std::size_t workers() const noexcept { return threads_.size(); }

 private:
  struct Job {
    std::string id;
    Scenario scenario;
    JobState state{JobState::Queued};
    std::atomic<double> progress{0.0};
    std::string error;
    std::shared_ptr<const SimulationResult> result;
    std::list<std::string>::iterator lru;
    bool in_lru{false};
  };

  void worker_loop();
  void finish(const std::shared_ptr<Job>& job);
  std::string next_id();

  JobServiceOptions options_;
  mutable std::mutex mutex_;
  std::condition_variable wake_;
  std::deque<std::shared_ptr<Job>> queue_;
  std::unordered_map<std::string, std::shared_ptr<Job>> jobs_;
  std::list<std::string> finished_;  ///< most recently used first
  std::size_t running_{0};
  bool stopping_{false};
  std::mt19937_64 rng_;
  std::vector<std::thread> threads_;
};

struct HttpOptions {
  std::filesystem::path fixture_dir;               ///< default scenarios for /api/models
  std::optional<std::filesystem::path> static_dir;  ///< UI bundle served at /
};

/// Installs the /api routes (and the static mount) on `server`.
void install_routes(httplib::Server& server, JobService& service, const HttpOptions& options);

/// Compact payload for a time-strided field grid: axes plus row-major values.
Json field_payload(const SimulationResult& result, std::string_view field, std::size_t stride);

/// Binary form: u64 rows, u64 cols, then rows*cols float64, all little-endian.
std::string field_payload_binary(const SimulationResult& result, std::string_view field,
                                 std::size_t stride);

/// Summary of a finished run, as served by GET /api/jobs/{id}.
Json result_summary(const SimulationResult& result);

}  // namespace flexsim
