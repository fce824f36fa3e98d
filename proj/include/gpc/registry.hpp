#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gpc/wire.hpp"

// Task lookup and uniform dispatch.
//
// A descriptor names the task (the exact bytes of the task_flag slot,
// case-sensitive), lists the params that must be present, sizes the
// expected payload from the params, and runs the handler. dispatch() never
// throws: every failure becomes an ERR:<CODE> status so the caller can
// always produce a well-formed response.

namespace gpc::task {

struct TaskOutput {
  wire::ParamMap params;              // task metadata; bytes= is added later
  std::vector<std::uint8_t> payload;
};

using PayloadRule = std::function<std::uint64_t(const wire::ParamMap&)>;
using Handler = std::function<TaskOutput(const wire::ParamMap&,
                                         std::span<const std::uint8_t>)>;

struct TaskDescriptor {
  std::string flag;
  std::vector<std::string> required_params;
  PayloadRule payload_rule;
  Handler handler;
};

class TaskRegistry {
 public:
  // Validates the flag (fits the slot, printable) and rejects duplicates
  // with DuplicateFlag.
  void add(TaskDescriptor descriptor);

  const TaskDescriptor& lookup(std::string_view flag) const;  // UnknownTask
  std::vector<std::string> flags() const;

 private:
  std::map<std::string, TaskDescriptor, std::less<>> tasks_;
};

// Response status codes; everything the wire or a handler can throw maps
// onto this closed set.
std::string response_code(Errc code);

struct DispatchResult {
  std::string status;  // "OK" or "ERR:<CODE>"
  wire::ParamMap params;
  std::vector<std::uint8_t> payload;

  bool ok() const { return status == "OK"; }
};

// Validates flag, required params and payload length, runs the handler.
// On success params gain bytes=<payload length>; on failure the result is
// ERR:<CODE> with a msg= param (sanitized and truncated to fit the slot).
DispatchResult dispatch(const TaskRegistry& registry,
                        const wire::Frame& request);

// Printable-ASCII msg= value that still fits the params slot next to the
// pairs already present.
std::string sanitize_message(std::string_view text,
                             const wire::ParamMap& existing);

// Response frame: status in the task_flag slot, request output_name echoed
// (dropped if it would not itself encode).
wire::Frame make_response_frame(const DispatchResult& result,
                                std::string_view output_name);

}  // namespace gpc::task
