// gpc: command-line front end for the compute-offload server.
//
//   gpc serve    run the server
//   gpc submit   send one task and save the result
//   gpc devinfo  fetch and pretty-print the device inventory
//   gpc bench    compare the serial reference against the parallel kernels
//
// Exit codes: 0 success, 1 remote or task failure, 2 usage error.

#include <algorithm>
#include <array>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gpc/client.hpp"
#include "gpc/demosaic.hpp"
#include "gpc/lsq.hpp"
#include "gpc/pgm.hpp"
#include "gpc/server.hpp"
#include "gpc/tasks.hpp"
#include "reference.hpp"
#include "xml_lite.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRemote = 1;
constexpr int kExitUsage = 2;

int usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return kExitUsage;
}

double ms_between(std::chrono::steady_clock::time_point a,
                  std::chrono::steady_clock::time_point b) {
  return std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
             b - a)
      .count();
}

bool parse_uint_list(const std::string& text, std::vector<std::uint64_t>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string token = text.substr(pos, comma - pos);
    pos = comma + 1;
    if (token.empty()) return false;
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(token, &used);
      if (used != token.size()) return false;
      out.push_back(v);
    } catch (...) {
      return false;
    }
    if (comma == text.size()) break;
  }
  return !out.empty();
}

bool parse_dims(const std::string& text, std::uint64_t& a, std::uint64_t& b) {
  const std::size_t x = text.find('x');
  if (x == std::string::npos) return false;
  std::vector<std::uint64_t> first, second;
  if (!parse_uint_list(text.substr(0, x), first) || first.size() != 1)
    return false;
  if (!parse_uint_list(text.substr(x + 1), second) || second.size() != 1)
    return false;
  a = first[0];
  b = second[0];
  return a > 0 && b > 0;
}

// --- serve ---------------------------------------------------------------

struct ServeArgs {
  std::string bind = "0.0.0.0";
  std::uint16_t port = 7711;
  int workers = 0;
  int max_tasks = 0;
  int timeout_secs = 30;
};

int run_serve(const ServeArgs& args) {
  gpc::par::ExecPlan plan;
  if (args.workers > 0) plan.workers = args.workers;

  const gpc::task::TaskRegistry registry =
      gpc::task::make_builtin_registry(plan);

  gpc::srv::ServerConfig config;
  config.bind_addr = args.bind;
  config.port = args.port;
  config.max_tasks = args.max_tasks;
  config.idle_timeout = std::chrono::seconds(args.timeout_secs);

  // Block the shutdown signals before the server threads exist so they
  // inherit the mask and sigwait below is the only consumer.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  gpc::srv::Server server(config, registry);
  server.start();

  std::printf("gpc server listening on %s:%u (workers=%d, max_tasks=%d, timeout=%ds)\n",
              args.bind.c_str(), static_cast<unsigned>(server.port()),
              plan.workers, server.worker_count(), args.timeout_secs);
  std::fflush(stdout);

  int signal = 0;
  sigwait(&signals, &signal);
  std::fprintf(stderr, "signal %d, draining\n", signal);
  server.stop();
  return kExitOk;
}

// --- submit ----------------------------------------------------------------

struct SubmitArgs {
  std::string server = "127.0.0.1";
  std::uint16_t port = 7711;
  std::string task;
  std::string input;
  std::string output;
  std::string dir = ".";
  std::vector<std::string> params;
};

int parse_params(const std::vector<std::string>& raw,
                 gpc::wire::ParamMap& params) {
  for (const std::string& pair : raw) {
    const std::size_t eq = pair.find('=');
    if (eq == std::string::npos || eq == 0)
      return usage_error("--param needs key=value, got '" + pair + "'");
    try {
      params.set(pair.substr(0, eq), pair.substr(eq + 1));
    } catch (const gpc::Error& e) {
      return usage_error(std::string("--param ") + pair + ": " + e.what());
    }
  }
  return kExitOk;
}

int run_submit(const SubmitArgs& args) {
  if (args.output.size() > gpc::wire::kOutputNameSize)
    return usage_error("--output exceeds " +
                       std::to_string(gpc::wire::kOutputNameSize) + " bytes");

  gpc::wire::ParamMap params;
  if (const int rc = parse_params(args.params, params); rc != kExitOk)
    return rc;

  std::vector<std::uint8_t> payload;
  if (!args.input.empty())
    payload = gpc::client::load_input(args.input, args.task, params);

  const auto t0 = std::chrono::steady_clock::now();
  const gpc::client::TaskResult result = gpc::client::submit(
      args.server, args.port, args.task, params, payload, args.output);
  const auto t1 = std::chrono::steady_clock::now();

  std::printf("%s %s %llu %.1f\n", args.task.c_str(), result.status.c_str(),
              static_cast<unsigned long long>(result.payload.size()),
              ms_between(t0, t1));
  std::fflush(stdout);

  if (!result.ok()) {
    const std::string msg = result.message();
    if (!msg.empty()) std::fprintf(stderr, "server: %s\n", msg.c_str());
    return kExitRemote;
  }

  if (!result.payload.empty()) {
    const std::filesystem::path path =
        gpc::client::save_result(result, args.dir);
    std::fprintf(stderr, "saved %s\n", path.c_str());
  }
  return kExitOk;
}

// --- devinfo ---------------------------------------------------------------

struct DevinfoArgs {
  std::string server = "127.0.0.1";
  std::uint16_t port = 7711;
  std::string output = "devinfo.xml";
  std::string dir = ".";
};

int run_devinfo(const DevinfoArgs& args) {
  const gpc::wire::ParamMap params;
  const gpc::client::TaskResult result = gpc::client::submit(
      args.server, args.port, "DEVINFO", params, {}, args.output);

  if (!result.ok()) {
    std::fprintf(stderr, "DEVINFO %s: %s\n", result.status.c_str(),
                 result.message().c_str());
    return kExitRemote;
  }

  const std::filesystem::path path = gpc::client::save_result(result, args.dir);

  const std::string xml(result.payload.begin(), result.payload.end());
  try {
    const gpcref::XmlNode root = gpcref::parse_xml(xml);
    for (const gpcref::XmlNode& device : root.children) {
      std::printf("device %s\n", device.attr("index").c_str());
      for (const gpcref::XmlNode& field : device.children)
        std::printf("  %-24s %s\n", field.name.c_str(), field.text.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cannot pretty-print %s: %s\n", path.c_str(),
                 e.what());
    return kExitRemote;
  }
  std::fprintf(stderr, "saved %s\n", path.c_str());
  return kExitOk;
}

// --- bench -------------------------------------------------------------

struct BenchArgs {
  std::string task = "BAYER_BILINEAR";
  std::string dims;
  std::string orders = "3";
  std::string workers_list;
  std::string input;
};

template <class Run>
double median_ms(Run&& run) {
  std::array<double, 5> samples{};
  for (double& sample : samples) {
    const auto t0 = std::chrono::steady_clock::now();
    run();
    const auto t1 = std::chrono::steady_clock::now();
    sample = ms_between(t0, t1);
  }
  std::sort(samples.begin(), samples.end());
  return samples[2];
}

int run_bench(const BenchArgs& args) {
  const bool is_bilinear = args.task == "BAYER_BILINEAR";
  const bool is_gradient = args.task == "BAYER_GRADIENT";
  const bool is_lsq = args.task == "LSQ_POLYFIT";
  if (!is_bilinear && !is_gradient && !is_lsq)
    return usage_error("--task must be BAYER_BILINEAR, BAYER_GRADIENT or "
                       "LSQ_POLYFIT");

  std::vector<std::uint64_t> workers;
  std::string workers_text = args.workers_list;
  if (workers_text.empty()) {
    workers_text = "1";
    const int hw = gpc::par::ExecPlan::default_workers();
    if (hw > 1) workers_text += "," + std::to_string(hw);
  }
  if (!parse_uint_list(workers_text, workers) ||
      std::any_of(workers.begin(), workers.end(),
                  [](std::uint64_t w) { return w == 0 || w > 1024; }))
    return usage_error("bad --workers-list '" + workers_text + "'");

  std::printf("task\tconfig\tworkers\tserial_ms\tparallel_ms\tspeedup\n");

  std::mt19937 rng(0x5eed);

  if (is_bilinear || is_gradient) {
    gpc::img::BayerImage image;
    if (!args.input.empty()) {
      const gpc::pgm::Image16 pgm = gpc::pgm::read16(args.input);
      image.rows = pgm.rows;
      image.cols = pgm.cols;
      image.samples = pgm.samples;
    } else {
      std::uint64_t rows = 2048, cols = 2048;
      if (!args.dims.empty() && !parse_dims(args.dims, rows, cols))
        return usage_error("bad --dims '" + args.dims + "'");
      image.rows = rows;
      image.cols = cols;
      image.samples.resize(rows * cols);
      std::uniform_int_distribution<int> dist(0, 65535);
      for (std::uint16_t& s : image.samples)
        s = static_cast<std::uint16_t>(dist(rng));
    }

    const std::string config =
        std::to_string(image.rows) + "x" + std::to_string(image.cols);
    const double serial = median_ms([&] {
      const gpc::img::RgbImage out = is_gradient
                                         ? gpcref::demosaic_gradient_ref(image)
                                         : gpcref::demosaic_bilinear_ref(image);
      (void)out;
    });

    for (const std::uint64_t w : workers) {
      gpc::par::ExecPlan plan;
      plan.workers = static_cast<int>(w);
      const double parallel = median_ms([&] {
        const gpc::img::RgbImage out =
            is_gradient ? gpc::img::demosaic_gradient(image, plan)
                        : gpc::img::demosaic_bilinear(image, plan);
        (void)out;
      });
      std::printf("%s\t%s\t%llu\t%.3f\t%.3f\t%.2f\n", args.task.c_str(),
                  config.c_str(), static_cast<unsigned long long>(w), serial,
                  parallel, serial / parallel);
    }
    return kExitOk;
  }

  // LSQ_POLYFIT: one row per order per worker count.
  std::vector<std::uint64_t> orders;
  if (!parse_uint_list(args.orders, orders) ||
      std::any_of(orders.begin(), orders.end(), [](std::uint64_t m) {
        return m > static_cast<std::uint64_t>(gpc::lsq::kMaxOrder);
      }))
    return usage_error("bad --orders '" + args.orders + "'");

  gpc::lsq::ScanLineSet set;
  if (!args.input.empty()) {
    gpc::wire::ParamMap params;
    const std::vector<std::uint8_t> payload =
        gpc::client::load_input(args.input, "LSQ_POLYFIT", params);
    set = gpc::lsq::scanlines_from_le_bytes(
        params.get_uint("lines"), params.get_uint("pixels"),
        gpc::lsq::Dtype::f64, payload);
  } else {
    std::uint64_t lines = 6, pixels = 6000;
    if (!args.dims.empty() && !parse_dims(args.dims, lines, pixels))
      return usage_error("bad --dims '" + args.dims + "'");
    set.lines = lines;
    set.pixels = pixels;
    set.y.resize(lines * pixels);
    std::uniform_real_distribution<double> dist(0.0, 65535.0);
    for (double& y : set.y) y = dist(rng);
  }

  const std::string dims_text =
      std::to_string(set.lines) + "x" + std::to_string(set.pixels);
  for (const std::uint64_t order : orders) {
    const double serial = median_ms(
        [&] { (void)gpcref::batch_fit_ref(set, static_cast<int>(order)); });
    for (const std::uint64_t w : workers) {
      gpc::par::ExecPlan plan;
      plan.workers = static_cast<int>(w);
      const double parallel = median_ms([&] {
        (void)gpc::lsq::batch_fit(set, static_cast<int>(order), plan);
      });
      std::printf("%s\t%s/order=%llu\t%llu\t%.3f\t%.3f\t%.2f\n",
                  args.task.c_str(), dims_text.c_str(),
                  static_cast<unsigned long long>(order),
                  static_cast<unsigned long long>(w), serial, parallel,
                  serial / parallel);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compute-offload client/server tool"};
  app.require_subcommand(1);

  ServeArgs serve_args;
  CLI::App* serve = app.add_subcommand("serve", "run the server");
  serve->add_option("--bind", serve_args.bind, "bind address");
  serve->add_option("--port", serve_args.port, "TCP port (0 = ephemeral)");
  serve->add_option("--workers", serve_args.workers, "kernel worker threads")
      ->envname("GPC_WORKERS")
      ->check(CLI::Range(1, 1024));
  serve->add_option("--max-tasks", serve_args.max_tasks,
                    "simultaneous requests (default 2x hardware threads)")
      ->check(CLI::Range(1, 4096));
  serve->add_option("--timeout-secs", serve_args.timeout_secs,
                    "idle connection timeout")
      ->check(CLI::Range(1, 86400));

  SubmitArgs submit_args;
  CLI::App* submit = app.add_subcommand("submit", "send one task");
  submit->add_option("--server", submit_args.server, "server host")
      ->envname("GPC_SERVER");
  submit->add_option("--port", submit_args.port, "server port");
  submit->add_option("--task", submit_args.task, "task flag")->required();
  submit->add_option("--input", submit_args.input,
                     "input file (PGM, CSV or raw)");
  submit->add_option("--output", submit_args.output, "result name (echoed)")
      ->required();
  submit->add_option("--dir", submit_args.dir, "directory for saved results");
  submit->add_option("--param", submit_args.params,
                     "extra key=value param (repeatable)");

  DevinfoArgs devinfo_args;
  CLI::App* devinfo = app.add_subcommand("devinfo", "fetch device inventory");
  devinfo->add_option("--server", devinfo_args.server, "server host")
      ->envname("GPC_SERVER");
  devinfo->add_option("--port", devinfo_args.port, "server port");
  devinfo->add_option("--output", devinfo_args.output, "result name");
  devinfo->add_option("--dir", devinfo_args.dir,
                      "directory for saved results");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand(
      "bench", "serial reference vs parallel kernels (median of 5)");
  bench->add_option("--task", bench_args.task,
                    "BAYER_BILINEAR | BAYER_GRADIENT | LSQ_POLYFIT");
  bench->add_option("--dims", bench_args.dims,
                    "rows x cols (demosaic) or lines x pixels (fit)");
  bench->add_option("--orders", bench_args.orders,
                    "comma-separated fit orders");
  bench->add_option("--workers-list", bench_args.workers_list,
                    "comma-separated worker counts");
  bench->add_option("--input", bench_args.input, "PGM or CSV input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (serve->parsed()) return run_serve(serve_args);
    if (submit->parsed()) return run_submit(submit_args);
    if (devinfo->parsed()) return run_devinfo(devinfo_args);
    if (bench->parsed()) return run_bench(bench_args);
  } catch (const gpc::Error& e) {
    std::fprintf(stderr, "error: %s (%s)\n", e.what(),
                 gpc::errc_name(e.code()));
    return kExitRemote;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRemote;
  }
  return kExitUsage;
}
