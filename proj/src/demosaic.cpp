#include "gpc/demosaic.hpp"

#include <algorithm>

namespace gpc::img {

namespace {

// Row/col shift that maps a phase onto the canonical RGGB tile.
struct Shift {
  std::size_t dr, dc;
};

Shift phase_shift(CfaPhase phase) {
  switch (phase) {
    case CfaPhase::RGGB: return {0, 0};
    case CfaPhase::GRBG: return {0, 1};
    case CfaPhase::GBRG: return {1, 0};
    case CfaPhase::BGGR: return {1, 1};
  }
  return {0, 0};
}

// Edge-clamped sample access; accumulation stays in 32 bits (4 * 65535
// plus rounding bias fits easily).
struct Accessor {
  const std::uint16_t* samples;
  std::ptrdiff_t rows, cols;

  std::uint32_t operator()(std::ptrdiff_t r, std::ptrdiff_t c) const {
    r = std::clamp<std::ptrdiff_t>(r, 0, rows - 1);
    c = std::clamp<std::ptrdiff_t>(c, 0, cols - 1);
    return samples[r * cols + c];
  }
};

std::uint16_t avg2(std::uint32_t a, std::uint32_t b) {
  const std::uint32_t v = (a + b + 1) / 2;
  return static_cast<std::uint16_t>(std::min<std::uint32_t>(v, 65535));
}

std::uint16_t avg4(std::uint32_t a, std::uint32_t b, std::uint32_t c,
                   std::uint32_t d) {
  const std::uint32_t v = (a + b + c + d + 2) / 4;
  return static_cast<std::uint16_t>(std::min<std::uint32_t>(v, 65535));
}

std::uint32_t absdiff(std::uint32_t a, std::uint32_t b) {
  return a > b ? a - b : b - a;
}

template <bool UseGradient>
RgbImage demosaic_impl(const BayerImage& in, const par::ExecPlan& plan) {
  in.validate();

  RgbImage out;
  out.rows = in.rows;
  out.cols = in.cols;
  const std::size_t total = in.rows * in.cols;
  out.r.resize(total);
  out.g.resize(total);
  out.b.resize(total);

  const Accessor at{in.samples.data(), static_cast<std::ptrdiff_t>(in.rows),
                    static_cast<std::ptrdiff_t>(in.cols)};

  par::parallel_for(in.rows, plan, [&](std::size_t row) {
    const std::ptrdiff_t r = static_cast<std::ptrdiff_t>(row);
    for (std::size_t col = 0; col < in.cols; ++col) {
      const std::ptrdiff_t c = static_cast<std::ptrdiff_t>(col);
      const std::size_t i = row * in.cols + col;
      const std::uint16_t s = in.samples[i];

      std::uint16_t pr, pg, pb;
      switch (cfa_color(in.phase, row, col)) {
        case CfaColor::Red: {
          pr = s;
          const std::uint32_t gn = at(r - 1, c), gs = at(r + 1, c),
                              gw = at(r, c - 1), ge = at(r, c + 1);
          if constexpr (UseGradient) {
            const std::uint32_t dh = absdiff(gw, ge);
            const std::uint32_t dv = absdiff(gn, gs);
            pg = dh < dv   ? avg2(gw, ge)
                 : dv < dh ? avg2(gn, gs)
                           : avg4(gn, gs, gw, ge);
          } else {
            pg = avg4(gn, gs, gw, ge);
          }
          pb = avg4(at(r - 1, c - 1), at(r - 1, c + 1), at(r + 1, c - 1),
                    at(r + 1, c + 1));
          break;
        }
        case CfaColor::Blue: {
          pb = s;
          const std::uint32_t gn = at(r - 1, c), gs = at(r + 1, c),
                              gw = at(r, c - 1), ge = at(r, c + 1);
          if constexpr (UseGradient) {
            const std::uint32_t dh = absdiff(gw, ge);
            const std::uint32_t dv = absdiff(gn, gs);
            pg = dh < dv   ? avg2(gw, ge)
                 : dv < dh ? avg2(gn, gs)
                           : avg4(gn, gs, gw, ge);
          } else {
            pg = avg4(gn, gs, gw, ge);
          }
          pr = avg4(at(r - 1, c - 1), at(r - 1, c + 1), at(r + 1, c - 1),
                    at(r + 1, c + 1));
          break;
        }
        case CfaColor::GreenInRedRow:
          pg = s;
          pr = avg2(at(r, c - 1), at(r, c + 1));
          pb = avg2(at(r - 1, c), at(r + 1, c));
          break;
        case CfaColor::GreenInBlueRow:
        default:
          pg = s;
          pr = avg2(at(r - 1, c), at(r + 1, c));
          pb = avg2(at(r, c - 1), at(r, c + 1));
          break;
      }
      out.r[i] = pr;
      out.g[i] = pg;
      out.b[i] = pb;
    }
  });

  return out;
}

}  // namespace

CfaPhase phase_from_string(std::string_view name) {
  if (name == "RGGB") return CfaPhase::RGGB;
  if (name == "BGGR") return CfaPhase::BGGR;
  if (name == "GRBG") return CfaPhase::GRBG;
  if (name == "GBRG") return CfaPhase::GBRG;
  fail(Errc::BadValue, "phase=" + std::string(name));
}

std::string_view to_string(CfaPhase phase) {
  switch (phase) {
    case CfaPhase::RGGB: return "RGGB";
    case CfaPhase::BGGR: return "BGGR";
    case CfaPhase::GRBG: return "GRBG";
    case CfaPhase::GBRG: return "GBRG";
  }
  return "RGGB";
}

CfaColor cfa_color(CfaPhase phase, std::size_t row, std::size_t col) {
  const Shift shift = phase_shift(phase);
  const bool even_row = ((row + shift.dr) % 2) == 0;
  const bool even_col = ((col + shift.dc) % 2) == 0;
  if (even_row) return even_col ? CfaColor::Red : CfaColor::GreenInRedRow;
  return even_col ? CfaColor::GreenInBlueRow : CfaColor::Blue;
}

void BayerImage::validate() const {
  if (rows < 2 || cols < 2)
    fail(Errc::BadImage, "image is " + std::to_string(rows) + "x" +
                             std::to_string(cols) + ", need at least 2x2");
  if (samples.size() != rows * cols)
    fail(Errc::BadImage, "sample count " + std::to_string(samples.size()) +
                             " does not match " + std::to_string(rows) + "x" +
                             std::to_string(cols));
}

RgbImage demosaic_bilinear(const BayerImage& in, const par::ExecPlan& plan) {
  return demosaic_impl<false>(in, plan);
}

RgbImage demosaic_gradient(const BayerImage& in, const par::ExecPlan& plan) {
  return demosaic_impl<true>(in, plan);
}

BayerImage bayer_from_le_bytes(std::size_t rows, std::size_t cols,
                               CfaPhase phase,
                               std::span<const std::uint8_t> bytes) {
  if (bytes.size() != rows * cols * 2)
    fail(Errc::SizeMismatch, "payload is " + std::to_string(bytes.size()) +
                                 " bytes, want " +
                                 std::to_string(rows * cols * 2));
  BayerImage image;
  image.rows = rows;
  image.cols = cols;
  image.phase = phase;
  image.samples.resize(rows * cols);
  for (std::size_t i = 0; i < image.samples.size(); ++i) {
    image.samples[i] = static_cast<std::uint16_t>(
        bytes[2 * i] | (static_cast<std::uint16_t>(bytes[2 * i + 1]) << 8));
  }
  return image;
}

std::vector<std::uint8_t> rgb_to_le_bytes(const RgbImage& image) {
  const std::size_t plane = image.rows * image.cols;
  std::vector<std::uint8_t> out(plane * 6);
  const std::vector<std::uint16_t>* planes[3] = {&image.r, &image.g, &image.b};
  for (std::size_t p = 0; p < 3; ++p) {
    const auto& src = *planes[p];
    std::uint8_t* dst = out.data() + p * plane * 2;
    for (std::size_t i = 0; i < plane; ++i) {
      dst[2 * i] = static_cast<std::uint8_t>(src[i] & 0xFF);
      dst[2 * i + 1] = static_cast<std::uint8_t>(src[i] >> 8);
    }
  }
  return out;
}

}  // namespace gpc::img
