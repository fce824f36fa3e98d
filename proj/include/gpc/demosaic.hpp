#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gpc/error.hpp"
#include "gpc/parexec.hpp"

// Bilinear and gradient-corrected demosaicing of 16-bit Bayer mosaics.
//
// The four CFA phases are shifts of the same 2x2 RGGB tile; cfa_color maps
// (phase, row, col) to the site type. Interpolation rules per site:
//
//   R site:           G = mean(N,S,E,W)      B = mean(4 diagonals)
//   B site:           G = mean(N,S,E,W)      R = mean(4 diagonals)
//   G in a red row:   R = mean(E,W)          B = mean(N,S)
//   G in a blue row:  R = mean(N,S)          B = mean(E,W)
//
// The gradient kernel replaces G at R/B sites: dH = |W-E|, dV = |N-S| over
// the green cross neighbours; the smaller-gradient pair is averaged, a tie
// falls back to all four. Averages round half-up in integer arithmetic and
// off-image neighbours clamp to the nearest edge pixel. Native samples are
// copied through untouched.

namespace gpc::img {

enum class CfaPhase { RGGB, BGGR, GRBG, GBRG };

CfaPhase phase_from_string(std::string_view name);  // throws BadValue
std::string_view to_string(CfaPhase phase);

enum class CfaColor { Red, GreenInRedRow, GreenInBlueRow, Blue };

CfaColor cfa_color(CfaPhase phase, std::size_t row, std::size_t col);

struct BayerImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  CfaPhase phase = CfaPhase::RGGB;
  std::vector<std::uint16_t> samples;  // row-major, rows*cols

  void validate() const;  // throws BadImage
};

// Planar output: three rows*cols planes.
struct RgbImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint16_t> r, g, b;
};

RgbImage demosaic_bilinear(const BayerImage& in, const par::ExecPlan& plan);
RgbImage demosaic_gradient(const BayerImage& in, const par::ExecPlan& plan);

// Payload codecs: little-endian u16, row-major; RGB as the three planes
// R, G, B concatenated.
BayerImage bayer_from_le_bytes(std::size_t rows, std::size_t cols,
                               CfaPhase phase,
                               std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> rgb_to_le_bytes(const RgbImage& image);

}  // namespace gpc::img
