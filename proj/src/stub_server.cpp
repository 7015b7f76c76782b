#include "adastar/stub_server.hpp"

#include <chrono>

#include <httplib.h>
#include <json.hpp>

#include "adastar/rng.hpp"

namespace adastar {

namespace {

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string last_token(const std::string& text) {
  const auto end = text.find_last_not_of(" \t\n");
  if (end == std::string::npos) return "";
  const auto start = text.find_last_of(" \t\n", end);
  return text.substr(start == std::string::npos ? 0 : start + 1, end - start);
}

}  // namespace

StubServer::StubServer(StubServerOptions options)
    : options_(options), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

StubServer::~StubServer() {
  stop();
  wait();
}

void StubServer::install_routes() {
  // shared preamble: request counting and single-fault injection
  auto guard = [this](httplib::Response& res) {
    const long n = ++requests_;
    if (options_.fail_nth_request > 0 && n == options_.fail_nth_request) {
      ++faults_injected_;
      res.status = 500;
      res.set_content("{\"error\":\"injected transient fault\"}", "application/json");
      return false;
    }
    return true;
  };

  server_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });

  server_->Post("/v1/generate", [this, guard](const httplib::Request& req,
                                              httplib::Response& res) {
    if (!guard(res)) return;
    const nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded()) {
      res.status = 400;
      return;
    }
    const std::string question = body.value("question", "");
    const int n = body.value("n", 1);
    const double temperature = body.value("temperature", 1.0);
    const bool hinted = body.contains("hint") && !body["hint"].is_null();

    nlohmann::json completions = nlohmann::json::array();
    for (int j = 0; j < n; ++j) {
      RngStream rng = substream(options_.seed, StreamTag::StubServer,
                                {hash_string(question), static_cast<std::uint64_t>(j)});
      const double draw = rng.next_unit();
      std::string answer;
      if (hinted) {
        answer = body["hint"].get<std::string>();
      } else if (temperature == 0.0 ? draw < 0.5 : draw < options_.correct_rate) {
        answer = last_token(question);
      } else {
        answer = "wrong-" + std::to_string(j);
      }
      nlohmann::json completion;
      completion["answer"] = answer;
      completion["cot"] = "because " + question + " implies " + answer;
      completion["tokens"] = static_cast<int>(8 + rng.next_int(0, 56));
      completions.push_back(std::move(completion));
    }

    nlohmann::json reply;
    reply["request_id"] =
        options_.corrupt_echo ? "not-your-request" : body.value("request_id", "");
    reply["completions"] = std::move(completions);
    res.set_content(reply.dump(), "application/json");
  });

  server_->Post("/v1/train", [this, guard](const httplib::Request& req, httplib::Response& res) {
    if (!guard(res)) return;
    const nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded()) {
      res.status = 400;
      return;
    }
    ++train_requests_;
    long long tokens = 0;
    std::size_t count = 0;
    if (body.contains("examples") && body["examples"].is_array()) {
      count = body["examples"].size();
      for (const auto& ex : body["examples"]) {
        tokens += static_cast<long long>(ex.value("cot", "").size() / 4 + 1);
      }
    }
    nlohmann::json reply;
    reply["request_id"] = body.value("request_id", "");
    reply["alpha"] = std::min(1.0, 0.3 + 0.01 * static_cast<double>(count));
    reply["tokens"] = tokens;
    res.set_content(reply.dump(), "application/json");
  });

  server_->Post("/v1/reset", [this, guard](const httplib::Request&, httplib::Response& res) {
    if (!guard(res)) return;
    ++reset_requests_;
    res.set_content("{\"ok\":true}", "application/json");
  });
}

void StubServer::start() {
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port("127.0.0.1");
  } else {
    port_ = options_.port;
    if (!server_->bind_to_port("127.0.0.1", port_)) {
      throw std::runtime_error("stub server cannot bind port " + std::to_string(port_));
    }
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });

  httplib::Client probe(base_url());
  probe.set_connection_timeout(5, 0);
  for (int i = 0; i < 100; ++i) {
    if (auto res = probe.Get("/healthz"); res && res->status == 200) return;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  throw std::runtime_error("stub server did not come up");
}

void StubServer::stop() {
  if (server_) server_->stop();  // async-safe enough: flips the listen flag
}

void StubServer::wait() {
  if (thread_.joinable()) thread_.join();
}

}  // namespace adastar
