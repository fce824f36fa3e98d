#include "gpc/client.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "gpc/net.hpp"
#include "gpc/pgm.hpp"

namespace gpc::client {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(Errc::IoError, "read failed on " + path.string());
  return bytes;
}

void put_le64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// One scan line per text row, comma-separated samples, all rows the same
// length. Blank lines are skipped.
std::vector<std::uint8_t> csv_to_f64(const std::vector<std::uint8_t>& bytes,
                                     std::size_t& lines_out,
                                     std::size_t& pixels_out) {
  std::vector<std::uint8_t> payload;
  std::size_t lines = 0;
  std::size_t pixels = 0;

  const std::string text(bytes.begin(), bytes.end());
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string row = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.find_first_not_of(" \t") == std::string::npos) continue;

    std::size_t count = 0;
    std::size_t cell = 0;
    while (cell <= row.size()) {
      std::size_t comma = row.find(',', cell);
      if (comma == std::string::npos) comma = row.size();
      const std::string token = row.substr(cell, comma - cell);
      cell = comma + 1;

      char* end = nullptr;
      const double value = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0')
        fail(Errc::BadFormat, "line " + std::to_string(lines + 1) +
                                  ": bad number '" + token + "'");
      put_le64(payload, std::bit_cast<std::uint64_t>(value));
      ++count;
      if (comma == row.size()) break;
    }

    if (lines == 0)
      pixels = count;
    else if (count != pixels)
      fail(Errc::BadFormat, "line " + std::to_string(lines + 1) + " has " +
                                std::to_string(count) + " samples, first has " +
                                std::to_string(pixels));
    ++lines;
  }

  if (lines == 0) fail(Errc::BadFormat, "no scan lines");
  lines_out = lines;
  pixels_out = pixels;
  return payload;
}

}  // namespace

std::string TaskResult::error_code() const {
  if (ok()) return "";
  if (status.starts_with("ERR:")) return status.substr(4);
  return status;
}

std::string TaskResult::message() const { return params.get_or("msg", ""); }

void TaskResult::require_ok() const {
  if (ok()) return;
  const std::string msg = message();
  fail(Errc::ServerError, error_code() + (msg.empty() ? "" : ": " + msg));
}

wire::TaskHeader make_request_header(std::string_view task_flag,
                                     const wire::ParamMap& params,
                                     std::string_view output_name,
                                     bool has_payload) {
  wire::TaskHeader header;
  header.task_flag = std::string(task_flag);
  header.data_marker = has_payload ? wire::kMarkerData : wire::kMarkerNone;
  header.params = params.serialize();
  header.output_name = std::string(output_name);
  return header;
}

TaskResult submit(const std::string& host, std::uint16_t port,
                  std::string_view task_flag, const wire::ParamMap& params,
                  std::span<const std::uint8_t> payload,
                  std::string_view output_name) {
  wire::Frame request;
  request.header =
      make_request_header(task_flag, params, output_name, !payload.empty());
  request.payload.assign(payload.begin(), payload.end());

  net::Socket socket = net::Socket::connect_to(host, port);
  wire::write_frame(socket, request);

  wire::Frame response = wire::read_frame(socket, wire::response_payload_len);

  TaskResult result;
  result.status = response.header.task_flag;
  result.params = wire::ParamMap::parse(response.header.params);
  result.payload = std::move(response.payload);
  result.output_name = response.header.output_name;
  return result;
}

std::filesystem::path save_result(const TaskResult& result,
                                  const std::filesystem::path& dir) {
  const std::string& name = result.output_name;
  if (name.empty()) fail(Errc::UnsafeName, "empty output name");
  if (name.find('/') != std::string::npos ||
      name.find('\\') != std::string::npos ||
      name.find("..") != std::string::npos)
    fail(Errc::UnsafeName, "'" + name + "'");

  const std::filesystem::path path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::IoError, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(result.payload.data()),
            static_cast<std::streamsize>(result.payload.size()));
  out.flush();
  if (!out) fail(Errc::IoError, "write failed on " + path.string());
  return path;
}

std::vector<std::uint8_t> load_input(const std::filesystem::path& path,
                                     std::string_view task_flag,
                                     wire::ParamMap& params) {
  std::vector<std::uint8_t> bytes = read_file(path);

  if (task_flag.starts_with("BAYER_")) {
    if (pgm::looks_like_pgm(bytes)) {
      const pgm::Image16 image = pgm::parse16(bytes);
      params.set("rows", static_cast<std::uint64_t>(image.rows));
      params.set("cols", static_cast<std::uint64_t>(image.cols));
      std::vector<std::uint8_t> payload(image.samples.size() * 2);
      for (std::size_t i = 0; i < image.samples.size(); ++i) {
        payload[2 * i] = static_cast<std::uint8_t>(image.samples[i] & 0xFF);
        payload[2 * i + 1] = static_cast<std::uint8_t>(image.samples[i] >> 8);
      }
      return payload;
    }
    const std::uint64_t rows = params.get_uint("rows");
    const std::uint64_t cols = params.get_uint("cols");
    const std::uint64_t want = rows * cols * 2;
    if (bytes.size() != want)
      fail(Errc::SizeMismatch, path.string() + " is " +
                                   std::to_string(bytes.size()) +
                                   " bytes, want " + std::to_string(want));
    return bytes;
  }

  if (task_flag == "LSQ_POLYFIT") {
    if (path.extension() == ".csv") {
      std::size_t lines = 0, pixels = 0;
      std::vector<std::uint8_t> payload = csv_to_f64(bytes, lines, pixels);
      params.set("lines", static_cast<std::uint64_t>(lines));
      params.set("pixels", static_cast<std::uint64_t>(pixels));
      params.set("dtype", "f64");
      return payload;
    }
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
    const std::uint64_t want = lines * pixels * scale;
    if (bytes.size() != want)
      fail(Errc::SizeMismatch, path.string() + " is " +
                                   std::to_string(bytes.size()) +
                                   " bytes, want " + std::to_string(want));
    return bytes;
  }

  return bytes;
}

}  // namespace gpc::client
