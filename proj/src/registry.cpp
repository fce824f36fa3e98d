#include "gpc/registry.hpp"

#include <algorithm>

namespace gpc::task {

void TaskRegistry::add(TaskDescriptor descriptor) {
  if (descriptor.flag.empty() ||
      descriptor.flag.size() > wire::kTaskFlagSize)
    fail(Errc::FieldTooLong, "task flag '" + descriptor.flag + "'");
  for (char c : descriptor.flag) {
    if (static_cast<unsigned char>(c) < 0x20 ||
        static_cast<unsigned char>(c) > 0x7E)
      fail(Errc::InvalidCharacter, "task flag '" + descriptor.flag + "'");
  }
  if (!descriptor.payload_rule || !descriptor.handler)
    fail(Errc::BadValue, "descriptor for '" + descriptor.flag +
                             "' lacks a payload rule or handler");
  if (tasks_.contains(descriptor.flag))
    fail(Errc::DuplicateFlag, descriptor.flag);
  std::string key = descriptor.flag;
  tasks_.emplace(std::move(key), std::move(descriptor));
}

const TaskDescriptor& TaskRegistry::lookup(std::string_view flag) const {
  const auto it = tasks_.find(flag);
  if (it == tasks_.end()) fail(Errc::UnknownTask, std::string(flag));
  return it->second;
}

std::vector<std::string> TaskRegistry::flags() const {
  std::vector<std::string> out;
  out.reserve(tasks_.size());
  for (const auto& [flag, descriptor] : tasks_) out.push_back(flag);
  return out;
}

std::string response_code(Errc code) {
  switch (code) {
    case Errc::UnknownTask:
      return "UNKNOWN_TASK";
    case Errc::MissingParam:
      return "MISSING_PARAM";
    case Errc::PayloadMismatch:
      return "PAYLOAD_MISMATCH";
    case Errc::Overflow:
    case Errc::TooLarge:
      return "TOO_LARGE";
    case Errc::FieldTooLong:
    case Errc::InvalidCharacter:
    case Errc::BadMarker:
    case Errc::MalformedPadding:
    case Errc::DuplicateKey:
    case Errc::BadToken:
    case Errc::BadValue:
      return "BAD_HEADER";
    default:
      return "TASK_FAILED";
  }
}

std::string sanitize_message(std::string_view text,
                             const wire::ParamMap& existing) {
  // ",msg=" plus the value must fit next to what is already serialized.
  const std::size_t used = existing.serialize().size();
  const std::size_t overhead = (used > 0 ? 1 : 0) + 4;  // ",": "msg="
  const std::size_t budget =
      wire::kParamsSize > used + overhead ? wire::kParamsSize - used - overhead
                                          : 0;
  std::string out;
  for (char c : text) {
    if (out.size() >= budget) break;
    const unsigned char b = static_cast<unsigned char>(c);
    out.push_back((b >= 0x20 && b <= 0x7E) ? c : '?');
  }
  return out;
}

DispatchResult dispatch(const TaskRegistry& registry,
                        const wire::Frame& request) {
  DispatchResult result;
  try {
    const TaskDescriptor& descriptor =
        registry.lookup(request.header.task_flag);
    const wire::ParamMap params = wire::ParamMap::parse(request.header.params);
    for (const std::string& key : descriptor.required_params) {
      if (!params.has(key)) fail(Errc::MissingParam, key);
    }

    const std::uint64_t want = descriptor.payload_rule(params);
    const bool marked = request.header.data_marker == wire::kMarkerData;
    if (marked != (want > 0))
      fail(Errc::PayloadMismatch,
           marked ? "marker promises payload, expected length 0"
                  : "no payload marker, expected " + std::to_string(want) +
                        " bytes");
    if (request.payload.size() != want)
      fail(Errc::PayloadMismatch,
           "payload is " + std::to_string(request.payload.size()) +
               " bytes, want " + std::to_string(want));

    TaskOutput output = descriptor.handler(params, request.payload);
    output.params.set("bytes",
                      static_cast<std::uint64_t>(output.payload.size()));
    result.status = "OK";
    result.params = std::move(output.params);
    result.payload = std::move(output.payload);
  } catch (const Error& e) {
    result.status = "ERR:" + response_code(e.code());
    result.params = wire::ParamMap();
    result.params.set("msg", sanitize_message(e.what(), result.params));
    result.payload.clear();
  } catch (const std::exception& e) {
    result.status = "ERR:TASK_FAILED";
    result.params = wire::ParamMap();
    result.params.set("msg", sanitize_message(e.what(), result.params));
    result.payload.clear();
  }
  return result;
}

wire::Frame make_response_frame(const DispatchResult& result,
                                std::string_view output_name) {
  wire::Frame frame;
  frame.header.task_flag = result.status;
  frame.header.data_marker =
      result.payload.empty() ? wire::kMarkerNone : wire::kMarkerData;
  frame.header.params = result.params.serialize();
  frame.payload = result.payload;

  // Echo the request's output_name when it is itself a valid slot value.
  const bool echoable =
      output_name.size() <= wire::kOutputNameSize &&
      std::all_of(output_name.begin(), output_name.end(), [](char c) {
        const unsigned char b = static_cast<unsigned char>(c);
        return b >= 0x20 && b <= 0x7E;
      });
  frame.header.output_name = echoable ? std::string(output_name) : "";
  return frame;
}

}  // namespace gpc::task
