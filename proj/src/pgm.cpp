#include "gpc/pgm.hpp"

#include <fstream>

namespace gpc::pgm {

namespace {

struct Cursor {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }
  std::uint8_t peek() const { return bytes[pos]; }
};

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Whitespace and #-to-end-of-line comments between header tokens.
void skip_separators(Cursor& c) {
  while (!c.eof()) {
    if (is_space(c.peek())) {
      ++c.pos;
    } else if (c.peek() == '#') {
      while (!c.eof() && c.peek() != '\n') ++c.pos;
    } else {
      break;
    }
  }
}

std::uint64_t read_number(Cursor& c, const char* what) {
  skip_separators(c);
  if (c.eof() || c.peek() < '0' || c.peek() > '9')
    fail(Errc::BadFormat, std::string("expected ") + what);
  std::uint64_t value = 0;
  while (!c.eof() && c.peek() >= '0' && c.peek() <= '9') {
    value = value * 10 + (c.peek() - '0');
    if (value > 0xFFFFFFFFull) fail(Errc::BadFormat, std::string(what) + " out of range");
    ++c.pos;
  }
  return value;
}

}  // namespace

bool looks_like_pgm(std::span<const std::uint8_t> bytes) {
  return bytes.size() > 2 && bytes[0] == 'P' && bytes[1] == '5' &&
         is_space(bytes[2]);
}

Image16 parse16(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    fail(Errc::BadFormat, "not a P5 PGM");

  Cursor c{bytes, 2};
  const std::uint64_t width = read_number(c, "width");
  const std::uint64_t height = read_number(c, "height");
  const std::uint64_t maxval = read_number(c, "maxval");
  if (maxval < 256 || maxval > 65535)
    fail(Errc::BadFormat,
         "maxval " + std::to_string(maxval) + " is not a 16-bit PGM");
  if (width == 0 || height == 0)
    fail(Errc::BadFormat, "zero image dimension");

  // Exactly one whitespace byte separates the header from the raster.
  if (c.eof() || !is_space(c.peek()))
    fail(Errc::BadFormat, "missing raster separator");
  ++c.pos;

  const std::size_t count =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - c.pos != count * 2)
    fail(Errc::BadFormat, "raster is " + std::to_string(bytes.size() - c.pos) +
                              " bytes, want " + std::to_string(count * 2));

  Image16 image;
  image.rows = height;
  image.cols = width;
  image.samples.resize(count);
  const std::uint8_t* raster = bytes.data() + c.pos;
  for (std::size_t i = 0; i < count; ++i) {
    image.samples[i] = static_cast<std::uint16_t>(
        (static_cast<std::uint16_t>(raster[2 * i]) << 8) | raster[2 * i + 1]);
  }
  return image;
}

Image16 read16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(Errc::IoError, "read failed on " + path.string());
  return parse16(bytes);
}

std::vector<std::uint8_t> write16(const Image16& image) {
  if (image.samples.size() != image.rows * image.cols)
    fail(Errc::BadFormat, "sample count does not match dimensions");
  std::string header = "P5\n" + std::to_string(image.cols) + " " +
                       std::to_string(image.rows) + "\n65535\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + image.samples.size() * 2);
  for (std::uint16_t s : image.samples) {
    out.push_back(static_cast<std::uint8_t>(s >> 8));
    out.push_back(static_cast<std::uint8_t>(s & 0xFF));
  }
  return out;
}

void write16_file(const Image16& image, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = write16(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::IoError, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Errc::IoError, "write failed on " + path.string());
}

}  // namespace gpc::pgm
