#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gpc/net.hpp"
#include "gpc/registry.hpp"

// Connection-per-request TCP front end.
//
// Each accepted connection carries exactly one request frame and receives
// exactly one response frame, then the server closes it. Header-level and
// dispatch-level failures still get a well-formed ERR response; a
// connection that goes quiet mid-frame is dropped after the idle timeout
// with no response. A fixed worker pool bounds how many requests run at
// once; the accept loop keeps accepting and queues the rest.
//
// Every connection produces one stderr log line:
//   <ISO8601 UTC> <peer> <flag> <status> in=<bytes> out=<bytes> <ms>ms

namespace gpc::srv {

struct ServerConfig {
  std::string bind_addr = "0.0.0.0";
  std::uint16_t port = 7711;
  int max_tasks = 0;  // simultaneous requests; 0 means 2 * hardware threads
  std::chrono::milliseconds idle_timeout{30000};
};

struct ConnectionLog {
  std::string flag = "-";
  std::string status = "-";
  std::uint64_t bytes_in = 0;
  std::uint64_t bytes_out = 0;
  bool responded = false;
};

// Serves exactly one request from the stream. Transport errors (Truncated,
// TimedOut, IoError) propagate after the log fields are filled in;
// everything else is answered with OK or ERR.
ConnectionLog handle_connection(wire::ByteStream& stream,
                                const task::TaskRegistry& registry);

class Server {
 public:
  Server(ServerConfig config, const task::TaskRegistry& registry);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  void start();  // throws BindFailed
  void stop();   // idempotent; drains queued and in-flight requests

  std::uint16_t port() const;
  int worker_count() const { return workers_configured_; }

 private:
  void accept_loop();
  void worker_loop();
  void serve_one(net::Socket socket);

  ServerConfig config_;
  const task::TaskRegistry& registry_;
  int workers_configured_ = 0;

  std::optional<net::Listener> listener_;
  std::thread acceptor_;
  std::vector<std::thread> workers_;

  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<net::Socket> pending_;
  std::atomic<bool> stopping_{false};
  bool started_ = false;
};

}  // namespace gpc::srv
