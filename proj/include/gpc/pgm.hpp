#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gpc/error.hpp"

// Binary 16-bit PGM (P5). Samples on disk are big-endian per the format;
// in memory they are host u16. Readers accept any maxval in 256..65535
// (two-byte samples) and pass values through unscaled; the writer always
// emits maxval 65535. Comments (#...) are allowed anywhere in the text
// header.

namespace gpc::pgm {

struct Image16 {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint16_t> samples;  // row-major
};

bool looks_like_pgm(std::span<const std::uint8_t> bytes);

Image16 parse16(std::span<const std::uint8_t> bytes);   // throws BadFormat
Image16 read16(const std::filesystem::path& path);      // throws IoError too

std::vector<std::uint8_t> write16(const Image16& image);
void write16_file(const Image16& image, const std::filesystem::path& path);

}  // namespace gpc::pgm
