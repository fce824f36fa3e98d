#include "gpc/server.hpp"

#include <cstdio>
#include <ctime>

#include "gpc/parexec.hpp"

namespace gpc::srv {

namespace {

// Best-effort read of the output_name slot from a raw header whose full
// decode failed; an ERR response should still echo the name if that slot
// alone is intact.
std::string salvage_output_name(const wire::HeaderBytes& raw) {
  const std::uint8_t* slot = raw.data() + wire::kOutputNameOffset;
  std::size_t len = 0;
  while (len < wire::kOutputNameSize && slot[len] != 0x00) ++len;
  for (std::size_t i = 0; i < len; ++i)
    if (slot[i] < 0x20 || slot[i] > 0x7E) return "";
  for (std::size_t i = len; i < wire::kOutputNameSize; ++i)
    if (slot[i] != 0x00) return "";
  return std::string(reinterpret_cast<const char*>(slot), len);
}

std::uint64_t send_error(wire::ByteStream& stream, const Error& error,
                         std::string_view output_name) {
  task::DispatchResult result;
  result.status = "ERR:" + task::response_code(error.code());
  result.params.set("msg",
                    task::sanitize_message(error.what(), result.params));
  const wire::Frame frame = task::make_response_frame(result, output_name);
  wire::write_frame(stream, frame);
  return wire::kHeaderSize;
}

void log_line(const std::string& peer, const ConnectionLog& log, double ms) {
  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  std::fprintf(stderr, "%s %s %s %s in=%llu out=%llu %.1fms\n", stamp,
               peer.c_str(), log.flag.c_str(), log.status.c_str(),
               static_cast<unsigned long long>(log.bytes_in),
               static_cast<unsigned long long>(log.bytes_out), ms);
}

}  // namespace

ConnectionLog handle_connection(wire::ByteStream& stream,
                                const task::TaskRegistry& registry) {
  ConnectionLog log;

  wire::HeaderBytes raw;
  wire::read_exact(stream, raw);  // Truncated / TimedOut propagate
  log.bytes_in = wire::kHeaderSize;

  wire::TaskHeader header;
  try {
    header = wire::decode_header(raw);
  } catch (const Error& e) {
    log.status = "ERR:" + task::response_code(e.code());
    log.bytes_out = send_error(stream, e, salvage_output_name(raw));
    log.responded = true;
    return log;
  }
  log.flag = header.task_flag.empty() ? "-" : header.task_flag;

  // Size the payload before reading it; anything wrong with the flag or
  // params is answerable right away, without waiting for payload bytes
  // that may never come.
  std::uint64_t want = 0;
  try {
    const task::TaskDescriptor& descriptor =
        registry.lookup(header.task_flag);
    const wire::ParamMap params = wire::ParamMap::parse(header.params);
    for (const std::string& key : descriptor.required_params)
      if (!params.has(key)) fail(Errc::MissingParam, key);
    want = descriptor.payload_rule(params);

    const bool marked = header.data_marker == wire::kMarkerData;
    if (marked != (want > 0))
      fail(Errc::PayloadMismatch,
           marked ? "marker promises payload, expected length 0"
                  : "no payload marker, expected " + std::to_string(want) +
                        " bytes");
  } catch (const Error& e) {
    log.status = "ERR:" + task::response_code(e.code());
    log.bytes_out = send_error(stream, e, header.output_name);
    log.responded = true;
    return log;
  }

  wire::Frame request;
  request.header = header;
  if (want > 0) {
    request.payload.resize(want);
    wire::read_exact(stream, request.payload);  // Truncated / TimedOut
    log.bytes_in += want;
  }

  const task::DispatchResult result = task::dispatch(registry, request);
  const wire::Frame response =
      task::make_response_frame(result, header.output_name);
  wire::write_frame(stream, response);

  log.status = result.status;
  log.bytes_out = wire::kHeaderSize + response.payload.size();
  log.responded = true;
  return log;
}

Server::Server(ServerConfig config, const task::TaskRegistry& registry)
    : config_(std::move(config)), registry_(registry) {
  workers_configured_ =
      config_.max_tasks > 0 ? config_.max_tasks
                            : 2 * par::ExecPlan::default_workers();
}

Server::~Server() { stop(); }

void Server::start() {
  listener_.emplace(config_.bind_addr, config_.port);
  started_ = true;
  stopping_ = false;

  workers_.reserve(workers_configured_);
  for (int i = 0; i < workers_configured_; ++i)
    workers_.emplace_back([this] { worker_loop(); });
  acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
  if (!started_) return;
  stopping_ = true;
  ready_.notify_all();
  if (acceptor_.joinable()) acceptor_.join();
  ready_.notify_all();
  for (std::thread& w : workers_)
    if (w.joinable()) w.join();
  workers_.clear();
  listener_.reset();
  started_ = false;
}

std::uint16_t Server::port() const {
  return listener_ ? listener_->port() : config_.port;
}

void Server::accept_loop() {
  while (!stopping_) {
    std::optional<net::Socket> socket =
        listener_->accept_for(std::chrono::milliseconds(100));
    if (!socket) continue;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      pending_.push_back(std::move(*socket));
    }
    ready_.notify_one();
  }
}

void Server::worker_loop() {
  while (true) {
    net::Socket socket;
    {
      std::unique_lock<std::mutex> lock(mutex_);
      ready_.wait(lock, [this] { return stopping_ || !pending_.empty(); });
      if (pending_.empty()) {
        if (stopping_) return;
        continue;
      }
      socket = std::move(pending_.front());
      pending_.pop_front();
    }
    serve_one(std::move(socket));
  }
}

void Server::serve_one(net::Socket socket) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string peer = socket.peer();
  socket.set_read_timeout(config_.idle_timeout);

  ConnectionLog log;
  try {
    log = handle_connection(socket, registry_);
  } catch (const Error& e) {
    // Transport failure: half-read request or unreachable peer. No
    // response by design; the connection just closes.
    log.status = std::string("dropped:") + errc_name(e.code());
  } catch (const std::exception&) {
    log.status = "dropped:internal";
  }

  const auto t1 = std::chrono::steady_clock::now();
  const double ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
          t1 - t0)
          .count();
  log_line(peer, log, ms);
}

}  // namespace gpc::srv
