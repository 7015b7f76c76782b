#ifndef ADASTAR_STUB_SERVER_HPP
#define ADASTAR_STUB_SERVER_HPP

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace adastar {

struct StubServerOptions {
  int port = 0;                // 0 picks a free port
  std::uint64_t seed = 10;
  double correct_rate = 0.65;  // chance an unhinted completion is correct
  long fail_nth_request = 0;   // inject one 500 on the nth request (1-based)
  bool corrupt_echo = false;   // answer with a wrong request_id (protocol test)
};

// Toy deterministic LM server speaking the /v1/generate, /v1/train, /v1/reset
// protocol. A completion is "correct" when it returns the question's last
// whitespace-separated token, so corpora whose questions end with the gold
// answer give a controllable hit rate. Hinted requests always return the hint.
class StubServer {
 public:
  explicit StubServer(StubServerOptions options = {});
  ~StubServer();

  void start();
  void stop();
  void wait();  // blocks until stop() (e.g. from a signal handler)

  int port() const { return port_; }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  long requests_served() const { return requests_.load(); }
  long faults_injected() const { return faults_injected_.load(); }
  long train_requests() const { return train_requests_.load(); }
  long reset_requests() const { return reset_requests_.load(); }

 private:
  void install_routes();

  StubServerOptions options_;
  int port_ = 0;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::atomic<long> requests_{0};
  std::atomic<long> faults_injected_{0};
  std::atomic<long> train_requests_{0};
  std::atomic<long> reset_requests_{0};
};

}  // namespace adastar

#endif
