// Standalone stub LM server for protocol testing and offline development.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "adastar/stub_server.hpp"

namespace {
adastar::StubServer* g_server = nullptr;
void handle_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic stub server for the /v1 generate-train-reset protocol"};
  adastar::StubServerOptions options;
  options.port = 8924;
  app.add_option("--port", options.port, "listen port");
  app.add_option("--seed", options.seed, "behavior seed");
  app.add_option("--correct-rate", options.correct_rate, "unhinted completion hit rate");
  app.add_option("--fail-nth", options.fail_nth_request,
                 "inject a single 500 on the nth request");
  CLI11_PARSE(app, argc, argv);

  adastar::StubServer server(options);
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  try {
    server.start();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "stub server listening on " << server.base_url() << "\n";
  server.wait();
  return 0;
}
