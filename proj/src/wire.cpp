#include "gpc/wire.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>

namespace gpc::wire {

namespace {

bool printable(std::uint8_t b) { return b >= 0x20 && b <= 0x7E; }

void check_field(std::string_view field, std::string_view value,
                 std::size_t slot) {
  if (value.size() > slot)
    fail(Errc::FieldTooLong, std::string(field) + " is " +
                                 std::to_string(value.size()) +
                                 " bytes, slot is " + std::to_string(slot));
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!printable(static_cast<std::uint8_t>(value[i])))
      fail(Errc::InvalidCharacter,
           std::string(field) + "[" + std::to_string(i) + "]");
  }
}

// Reads a NUL-padded slot: content up to the first 0x00, everything after
// it must be 0x00 and the content must be printable.
std::string read_slot(std::string_view field, const std::uint8_t* slot,
                      std::size_t size) {
  std::size_t len = 0;
  while (len < size && slot[len] != 0x00) ++len;
  for (std::size_t i = len; i < size; ++i) {
    if (slot[i] != 0x00)
      fail(Errc::MalformedPadding,
           std::string(field) + ": non-zero byte after padding start");
  }
  for (std::size_t i = 0; i < len; ++i) {
    if (!printable(slot[i]))
      fail(Errc::InvalidCharacter,
           std::string(field) + "[" + std::to_string(i) + "]");
  }
  return std::string(reinterpret_cast<const char*>(slot), len);
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  const char c0 = key[0];
  if (!((c0 >= 'a' && c0 <= 'z') || c0 == '_')) return false;
  for (char c : key) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'))
      return false;
  }
  return true;
}

std::uint64_t parse_uint(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || value.empty())
    fail(Errc::BadValue,
         std::string(key) + "=" + std::string(value) + " is not an integer");
  return out;
}

std::uint64_t dim_product(std::string_view a_key, std::uint64_t a,
                          std::string_view b_key, std::uint64_t b,
                          std::uint64_t scale) {
  if (a == 0) fail(Errc::BadValue, std::string(a_key) + " must be positive");
  if (b == 0) fail(Errc::BadValue, std::string(b_key) + " must be positive");
  // Each dim alone may not exceed the cap, so a*b*scale fits in 64 bits.
  if (a > kMaxPayload || b > kMaxPayload)
    fail(Errc::Overflow, "dimension exceeds payload cap");
  const std::uint64_t len = a * b * scale;
  if (len > kMaxPayload)
    fail(Errc::Overflow, "payload length " + std::to_string(len) +
                             " exceeds cap " + std::to_string(kMaxPayload));
  return len;
}

}  // namespace

HeaderBytes encode_header(const TaskHeader& header) {
  check_field("task_flag", header.task_flag, kTaskFlagSize);
  check_field("params", header.params, kParamsSize);
  check_field("output_name", header.output_name, kOutputNameSize);
  if (header.data_marker != kMarkerData && header.data_marker != kMarkerNone)
    fail(Errc::BadMarker,
         "marker byte " + std::to_string(header.data_marker));

  HeaderBytes out{};
  std::memcpy(out.data(), header.task_flag.data(), header.task_flag.size());
  out[kMarkerOffset] = header.data_marker;
  std::memcpy(out.data() + kParamsOffset, header.params.data(),
              header.params.size());
  std::memcpy(out.data() + kOutputNameOffset, header.output_name.data(),
              header.output_name.size());
  return out;
}

TaskHeader decode_header(std::span<const std::uint8_t> buffer) {
  if (buffer.size() != kHeaderSize)
    fail(Errc::Truncated, "header buffer is " + std::to_string(buffer.size()) +
                              " bytes, want " + std::to_string(kHeaderSize));

  TaskHeader h;
  h.task_flag = read_slot("task_flag", buffer.data(), kTaskFlagSize);
  const std::uint8_t marker = buffer[kMarkerOffset];
  if (marker != kMarkerData && marker != kMarkerNone)
    fail(Errc::BadMarker, "marker byte " + std::to_string(marker));
  h.data_marker = marker;
  h.params = read_slot("params", buffer.data() + kParamsOffset, kParamsSize);
  h.output_name =
      read_slot("output_name", buffer.data() + kOutputNameOffset,
                kOutputNameSize);
  return h;
}

ParamMap ParamMap::parse(std::string_view text) {
  if (text.size() > kParamsSize)
    fail(Errc::FieldTooLong, "params text exceeds slot");

  ParamMap map;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view token = text.substr(pos, end - pos);
    pos = end + 1;

    const std::size_t eq = token.find('=');
    if (eq == std::string_view::npos)
      fail(Errc::BadToken, "token '" + std::string(token) + "' lacks '='");
    const std::string_view key = token.substr(0, eq);
    if (!valid_key(key))
      fail(Errc::BadToken, "bad key '" + std::string(key) + "'");
    if (map.has(key))
      fail(Errc::DuplicateKey, std::string(key));

    std::string value(token.substr(eq + 1));
    std::replace(value.begin(), value.end(), ';', ',');
    map.items_.emplace_back(std::string(key), std::move(value));
  }
  return map;
}

std::string ParamMap::serialize() const {
  std::string out;
  for (const auto& [key, value] : items_) {
    if (!out.empty()) out.push_back(',');
    out += key;
    out.push_back('=');
    std::string folded = value;
    std::replace(folded.begin(), folded.end(), ',', ';');
    out += folded;
  }
  if (out.size() > kParamsSize)
    fail(Errc::FieldTooLong, "serialized params are " +
                                 std::to_string(out.size()) +
                                 " bytes, slot is " +
                                 std::to_string(kParamsSize));
  return out;
}

void ParamMap::set(std::string_view key, std::string_view value) {
  if (!valid_key(key))
    fail(Errc::BadToken, "bad key '" + std::string(key) + "'");
  for (auto& item : items_) {
    if (item.first == key) {
      item.second = std::string(value);
      return;
    }
  }
  items_.emplace_back(std::string(key), std::string(value));
}

void ParamMap::set(std::string_view key, std::uint64_t value) {
  set(key, std::string_view(std::to_string(value)));
}

bool ParamMap::has(std::string_view key) const {
  for (const auto& item : items_)
    if (item.first == key) return true;
  return false;
}

const std::string& ParamMap::get(std::string_view key) const {
  for (const auto& item : items_)
    if (item.first == key) return item.second;
  fail(Errc::MissingParam, std::string(key));
}

std::string ParamMap::get_or(std::string_view key,
                             std::string_view fallback) const {
  for (const auto& item : items_)
    if (item.first == key) return item.second;
  return std::string(fallback);
}

std::uint64_t ParamMap::get_uint(std::string_view key) const {
  return parse_uint(key, get(key));
}

std::uint64_t expected_payload_len(std::string_view task_flag,
                                   const ParamMap& params) {
  if (task_flag.starts_with("BAYER_")) {
    const std::uint64_t rows = params.get_uint("rows");
    const std::uint64_t cols = params.get_uint("cols");
    return dim_product("rows", rows, "cols", cols, 2);
  }
  if (task_flag == "LSQ_POLYFIT") {
    const std::uint64_t lines = params.get_uint("lines");
    const std::uint64_t pixels = params.get_uint("pixels");
    const std::string dtype = params.get_or("dtype", "f64");
    std::uint64_t scale = 0;
    if (dtype == "f32")
      scale = 4;
    else if (dtype == "f64")
      scale = 8;
    else
      fail(Errc::BadValue, "dtype=" + dtype);
    return dim_product("lines", lines, "pixels", pixels, scale);
  }
  if (task_flag == "DEVINFO") return 0;
  fail(Errc::UnknownTask, std::string(task_flag));
}

void read_exact(ByteStream& stream, std::span<std::uint8_t> out) {
  std::size_t got = 0;
  while (got < out.size()) {
    const std::size_t n = stream.read_some(out.subspan(got));
    if (n == 0)
      fail(Errc::Truncated, "got " + std::to_string(got) + " of " +
                                std::to_string(out.size()) + " bytes");
    got += n;
  }
}

std::uint64_t request_payload_len(const TaskHeader& header) {
  const ParamMap params = ParamMap::parse(header.params);
  return expected_payload_len(header.task_flag, params);
}

std::uint64_t response_payload_len(const TaskHeader& header) {
  if (header.data_marker == kMarkerNone) return 0;
  const ParamMap params = ParamMap::parse(header.params);
  const std::uint64_t len = params.get_uint("bytes");
  if (len > kMaxPayload)
    fail(Errc::Overflow, "bytes=" + std::to_string(len));
  return len;
}

Frame read_frame(ByteStream& stream, const PayloadSizer& sizer) {
  HeaderBytes raw;
  read_exact(stream, raw);

  Frame frame;
  frame.header = decode_header(raw);
  const std::uint64_t want = sizer(frame.header);

  if (frame.header.data_marker == kMarkerData && want == 0)
    fail(Errc::PayloadMismatch, "marker promises payload, expected length 0");
  if (frame.header.data_marker == kMarkerNone && want > 0)
    fail(Errc::PayloadMismatch,
         "no payload marker, expected " + std::to_string(want) + " bytes");

  if (want > 0) {
    frame.payload.resize(want);
    read_exact(stream, frame.payload);
  }
  return frame;
}

Frame read_frame(ByteStream& stream) {
  return read_frame(stream, request_payload_len);
}

void write_frame(ByteStream& stream, const Frame& frame) {
  if (frame.payload.size() > kMaxPayload)
    fail(Errc::TooLarge, "payload is " + std::to_string(frame.payload.size()) +
                             " bytes");
  const bool has_payload = !frame.payload.empty();
  if (has_payload != (frame.header.data_marker == kMarkerData))
    fail(Errc::PayloadMismatch, "marker does not match payload presence");

  const HeaderBytes raw = encode_header(frame.header);
  stream.write_all(raw);
  if (has_payload) stream.write_all(frame.payload);
}

std::size_t MemoryStream::read_some(std::span<std::uint8_t> out) {
  const std::size_t avail = input_.size() - pos_;
  const std::size_t n = std::min(avail, out.size());
  std::memcpy(out.data(), input_.data() + pos_, n);
  pos_ += n;
  return n;
}

void MemoryStream::write_all(std::span<const std::uint8_t> data) {
  output_.insert(output_.end(), data.begin(), data.end());
}

void MemoryStream::feed(std::span<const std::uint8_t> data) {
  input_.insert(input_.end(), data.begin(), data.end());
}

}  // namespace gpc::wire
