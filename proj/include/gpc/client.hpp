#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gpc/wire.hpp"

// Blocking single-request client.
//
// submit() returns normally for both OK and ERR:<CODE> responses; an ERR
// is data, not an exception (require_ok() converts it into one). Transport
// problems (ConnectFailed, Truncated, IoError, TimedOut) and headers that
// cannot encode (FieldTooLong) do throw.

namespace gpc::client {

struct TaskResult {
  std::string status;  // "OK" or "ERR:<CODE>"
  wire::ParamMap params;
  std::vector<std::uint8_t> payload;
  std::string output_name;  // echoed by the server

  bool ok() const { return status == "OK"; }
  std::string error_code() const;  // "" when ok
  std::string message() const;     // msg param, "" when absent
  void require_ok() const;         // throws ServerError on ERR
};

// Header exactly as submit() would send it; exposed so its invariants can
// be checked without a live server.
wire::TaskHeader make_request_header(std::string_view task_flag,
                                     const wire::ParamMap& params,
                                     std::string_view output_name,
                                     bool has_payload);

TaskResult submit(const std::string& host, std::uint16_t port,
                  std::string_view task_flag, const wire::ParamMap& params,
                  std::span<const std::uint8_t> payload,
                  std::string_view output_name);

// Writes the payload to dir/<output_name>. Rejects names that are empty or
// could escape dir ('/', '\' or ".." anywhere) with UnsafeName.
std::filesystem::path save_result(const TaskResult& result,
                                  const std::filesystem::path& dir);

// Reads a task input file and auto-fills dimension params:
//   Bayer tasks:  16-bit PGM (fills rows=, cols=) or raw little-endian u16
//                 (rows= and cols= must already be set; size checked)
//   LSQ_POLYFIT:  .csv with one scan line per row (fills lines=, pixels=,
//                 dtype=f64) or raw scalars per dtype (lines=, pixels=
//                 required; size checked)
// Other flags load the file verbatim.
std::vector<std::uint8_t> load_input(const std::filesystem::path& path,
                                     std::string_view task_flag,
                                     wire::ParamMap& params);

}  // namespace gpc::client
