// HTTP service over the simulation engine.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "httplib.h"
#include "flexsim/service.hpp"

#ifndef FLEXSIM_FIXTURE_DIR
#define FLEXSIM_FIXTURE_DIR "fixtures"
#endif

namespace {
httplib::Server* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HTTP job service for the flexible-systems simulator"};
  std::string host = "0.0.0.0";
  int port = 8080;
  flexsim::JobServiceOptions service_options;
  flexsim::HttpOptions http_options{FLEXSIM_FIXTURE_DIR, std::nullopt};
  std::string static_dir;
  std::string results_dir;

  app.add_option("--host", host, "listen address");
  app.add_option("--port", port, "listen port (PLATFORM_PORT overrides)");
  app.add_option("--workers", service_options.workers, "worker threads (default: processors)");
  app.add_option("--max-queued", service_options.max_queued, "pending jobs before 503");
  app.add_option("--max-results", service_options.max_results, "finished jobs kept in memory");
  app.add_option("--fixtures", http_options.fixture_dir, "directory of default scenarios");
  app.add_option("--static", static_dir, "UI bundle served at /");
  app.add_option("--results-dir", results_dir, "write a bundle per finished job here");
  CLI11_PARSE(app, argc, argv);

  if (const char* env = std::getenv("PLATFORM_PORT"); env && *env) {
    try {
      port = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "error=PLATFORM_PORT is not a port number: " << env << '\n';
      return 1;
    }
  }
  if (!static_dir.empty()) http_options.static_dir = static_dir;
  if (!results_dir.empty()) service_options.results_dir = results_dir;

  flexsim::JobService service(service_options);
  httplib::Server server;
  flexsim::install_routes(server, service, http_options);

  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening=" << host << ':' << port << std::endl;
  if (!server.listen(host, port)) {
    std::cerr << "error=cannot listen on " << host << ':' << port << '\n';
    return 1;
  }
  return 0;
}
