#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gpc/error.hpp"

// Fixed-size request/response framing.
//
// Every message starts with a 260-byte header:
//
//   offset  size  field
//   ------  ----  -----------------------------------------------
//        0    29  task_flag    e.g. "BAYER_BILINEAR"
//       29     1  data_marker  0x2B ('+') payload follows, 0x00 none
//       30   200  params       "key=value,key=value,..."
//      230    30  output_name  client-chosen result name, echoed back
//
// String slots are NUL-padded: content runs up to the first 0x00 and every
// byte after it in the slot must also be 0x00. Content bytes are printable
// ASCII (0x20..0x7E) only. Responses reuse the same layout with the status
// string in the task_flag slot and the payload length in a bytes= param.
//
// Param values may not contain a comma on the wire; writers fold ',' to ';'
// and parsers fold ';' back to ','. The mapping is lossy for values that
// legitimately contain ';' and that is accepted.

namespace gpc::wire {

inline constexpr std::size_t kHeaderSize = 260;
inline constexpr std::size_t kTaskFlagSize = 29;
inline constexpr std::size_t kMarkerOffset = 29;
inline constexpr std::size_t kParamsOffset = 30;
inline constexpr std::size_t kParamsSize = 200;
inline constexpr std::size_t kOutputNameOffset = 230;
inline constexpr std::size_t kOutputNameSize = 30;

inline constexpr std::uint8_t kMarkerData = 0x2B;  // '+'
inline constexpr std::uint8_t kMarkerNone = 0x00;

inline constexpr std::uint64_t kMaxPayload = 1ull << 30;  // 1 GiB

using HeaderBytes = std::array<std::uint8_t, kHeaderSize>;

struct TaskHeader {
  std::string task_flag;
  std::uint8_t data_marker = kMarkerNone;
  std::string params;
  std::string output_name;

  bool operator==(const TaskHeader&) const = default;
};

// Throws FieldTooLong / InvalidCharacter / BadMarker.
HeaderBytes encode_header(const TaskHeader& header);

// Throws BadMarker / MalformedPadding / InvalidCharacter.
TaskHeader decode_header(std::span<const std::uint8_t> buffer);

// Ordered key=value map for the params slot. Keys match [a-z_][a-z0-9_]*
// and are unique; values are stored unescaped (may contain ',').
class ParamMap {
 public:
  ParamMap() = default;

  // Throws FieldTooLong / BadToken / DuplicateKey.
  static ParamMap parse(std::string_view text);

  // Inverse of parse up to the ';' folding. Throws FieldTooLong if the
  // result would not fit the params slot.
  std::string serialize() const;

  // Insert or overwrite. Throws BadToken on a malformed key.
  void set(std::string_view key, std::string_view value);
  void set(std::string_view key, std::uint64_t value);

  bool has(std::string_view key) const;
  const std::string& get(std::string_view key) const;  // throws MissingParam
  std::string get_or(std::string_view key, std::string_view fallback) const;
  std::uint64_t get_uint(std::string_view key) const;  // throws BadValue

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<std::pair<std::string, std::string>>& items() const {
    return items_;
  }

  bool operator==(const ParamMap&) const = default;

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

// Payload length implied by a task flag and its params:
//   BAYER_*      rows * cols * 2
//   LSQ_POLYFIT  lines * pixels * dtype_size   (dtype f32|f64, default f64)
//   DEVINFO      0
// Throws MissingParam / BadValue / Overflow (above kMaxPayload) and
// UnknownTask for flags without a sizing rule.
std::uint64_t expected_payload_len(std::string_view task_flag,
                                   const ParamMap& params);

struct Frame {
  TaskHeader header;
  std::vector<std::uint8_t> payload;

  bool operator==(const Frame&) const = default;
};

// Minimal blocking byte stream; implemented by net::Socket and by
// MemoryStream for tests.
class ByteStream {
 public:
  virtual ~ByteStream() = default;

  // Reads at least one byte unless the stream is exhausted (returns 0).
  // Throws TimedOut / IoError.
  virtual std::size_t read_some(std::span<std::uint8_t> out) = 0;
  virtual void write_all(std::span<const std::uint8_t> data) = 0;
};

// Reads exactly out.size() bytes. Throws Truncated with got/want counts if
// the stream ends early.
void read_exact(ByteStream& stream, std::span<std::uint8_t> out);

// Maps a decoded header to the payload length that should follow it.
using PayloadSizer = std::function<std::uint64_t(const TaskHeader&)>;

// Sizer for request frames: parses header.params and applies
// expected_payload_len.
std::uint64_t request_payload_len(const TaskHeader& header);

// Sizer for response frames: 0 when the marker says no payload, otherwise
// the bytes= param (capped at kMaxPayload).
std::uint64_t response_payload_len(const TaskHeader& header);

// Reads one frame: 260-byte header, then the payload the sizer promises.
// Throws PayloadMismatch when the marker contradicts the expected length.
Frame read_frame(ByteStream& stream, const PayloadSizer& sizer);
Frame read_frame(ByteStream& stream);  // sizer = request_payload_len

// Writes header then payload. Throws PayloadMismatch when the marker
// contradicts the payload, TooLarge above kMaxPayload.
void write_frame(ByteStream& stream, const Frame& frame);

class MemoryStream : public ByteStream {
 public:
  MemoryStream() = default;
  explicit MemoryStream(std::vector<std::uint8_t> input)
      : input_(std::move(input)) {}

  std::size_t read_some(std::span<std::uint8_t> out) override;
  void write_all(std::span<const std::uint8_t> data) override;

  const std::vector<std::uint8_t>& written() const { return output_; }
  void feed(std::span<const std::uint8_t> data);

 private:
  std::vector<std::uint8_t> input_;
  std::size_t pos_ = 0;
  std::vector<std::uint8_t> output_;
};

}  // namespace gpc::wire
