#include "reference.hpp"

#include <cmath>
#include <cstdlib>

namespace gpcref {

namespace {

using gpc::img::BayerImage;
using gpc::img::CfaPhase;
using gpc::img::RgbImage;

// 2x2 CFA tiles by [row%2][col%2]. 'R' red, 'B' blue, 'g' green in a red
// row, 'G' green in a blue row.
char site_kind(CfaPhase phase, std::size_t r, std::size_t c) {
  static const char kTile[4][2][2] = {
      /* RGGB */ {{'R', 'g'}, {'G', 'B'}},
      /* BGGR */ {{'B', 'G'}, {'g', 'R'}},
      /* GRBG */ {{'g', 'R'}, {'B', 'G'}},
      /* GBRG */ {{'G', 'B'}, {'R', 'g'}},
  };
  int p = 0;
  switch (phase) {
    case CfaPhase::RGGB: p = 0; break;
    case CfaPhase::BGGR: p = 1; break;
    case CfaPhase::GRBG: p = 2; break;
    case CfaPhase::GBRG: p = 3; break;
  }
  return kTile[p][r % 2][c % 2];
}

unsigned long sample_at(const BayerImage& in, long r, long c) {
  if (r < 0) r = 0;
  if (c < 0) c = 0;
  if (r >= static_cast<long>(in.rows)) r = static_cast<long>(in.rows) - 1;
  if (c >= static_cast<long>(in.cols)) c = static_cast<long>(in.cols) - 1;
  return in.samples[static_cast<std::size_t>(r) * in.cols +
                    static_cast<std::size_t>(c)];
}

const long kCross[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
const long kDiag[4][2] = {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
const long kHoriz[2][2] = {{0, -1}, {0, 1}};
const long kVert[2][2] = {{-1, 0}, {1, 0}};

std::uint16_t mean_at(const BayerImage& in, long r, long c,
                      const long (*offsets)[2], int count) {
  unsigned long sum = 0;
  for (int i = 0; i < count; ++i)
    sum += sample_at(in, r + offsets[i][0], c + offsets[i][1]);
  sum = (sum + static_cast<unsigned long>(count) / 2) /
        static_cast<unsigned long>(count);
  if (sum > 65535) sum = 65535;
  return static_cast<std::uint16_t>(sum);
}

RgbImage demosaic_ref(const BayerImage& in, bool gradient) {
  in.validate();
  RgbImage out;
  out.rows = in.rows;
  out.cols = in.cols;
  out.r.assign(in.rows * in.cols, 0);
  out.g.assign(in.rows * in.cols, 0);
  out.b.assign(in.rows * in.cols, 0);

  for (std::size_t r = 0; r < in.rows; ++r) {
    for (std::size_t c = 0; c < in.cols; ++c) {
      const std::size_t i = r * in.cols + c;
      const long lr = static_cast<long>(r);
      const long lc = static_cast<long>(c);
      const std::uint16_t s = in.samples[i];

      std::uint16_t green;
      if (gradient) {
        const unsigned long gw = sample_at(in, lr, lc - 1);
        const unsigned long ge = sample_at(in, lr, lc + 1);
        const unsigned long gn = sample_at(in, lr - 1, lc);
        const unsigned long gs = sample_at(in, lr + 1, lc);
        const unsigned long dh = gw > ge ? gw - ge : ge - gw;
        const unsigned long dv = gn > gs ? gn - gs : gs - gn;
        if (dh < dv)
          green = mean_at(in, lr, lc, kHoriz, 2);
        else if (dv < dh)
          green = mean_at(in, lr, lc, kVert, 2);
        else
          green = mean_at(in, lr, lc, kCross, 4);
      } else {
        green = mean_at(in, lr, lc, kCross, 4);
      }

      switch (site_kind(in.phase, r, c)) {
        case 'R':
          out.r[i] = s;
          out.g[i] = green;
          out.b[i] = mean_at(in, lr, lc, kDiag, 4);
          break;
        case 'B':
          out.b[i] = s;
          out.g[i] = green;
          out.r[i] = mean_at(in, lr, lc, kDiag, 4);
          break;
        case 'g':  // green, red row: red left/right, blue above/below
          out.g[i] = s;
          out.r[i] = mean_at(in, lr, lc, kHoriz, 2);
          out.b[i] = mean_at(in, lr, lc, kVert, 2);
          break;
        default:  // green, blue row: red above/below, blue left/right
          out.g[i] = s;
          out.r[i] = mean_at(in, lr, lc, kVert, 2);
          out.b[i] = mean_at(in, lr, lc, kHoriz, 2);
          break;
      }
    }
  }
  return out;
}

}  // namespace

RgbImage demosaic_bilinear_ref(const BayerImage& in) {
  return demosaic_ref(in, false);
}

RgbImage demosaic_gradient_ref(const BayerImage& in) {
  return demosaic_ref(in, true);
}

std::vector<double> solve_by_inverse(gpc::lsq::Matrix a,
                                     std::vector<double> b) {
  const std::size_t n = a.n;
  if (b.size() != n) gpc::fail(gpc::Errc::BadValue, "dimension mismatch");
  if (n == 0) return {};

  double max_abs = 0.0;
  for (double v : a.a) max_abs = std::max(max_abs, std::abs(v));
  const double floor = 1e-12 * max_abs;

  // Gauss-Jordan on [A | I].
  gpc::lsq::Matrix inv(n);
  for (std::size_t i = 0; i < n; ++i) inv.at(i, i) = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a.at(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a.at(r, col)) > best) {
        best = std::abs(a.at(r, col));
        pivot = r;
      }
    }
    if (best == 0.0 || best < floor)
      gpc::fail(gpc::Errc::Singular, "pivot " + std::to_string(col));
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(a.at(col, k), a.at(pivot, k));
        std::swap(inv.at(col, k), inv.at(pivot, k));
      }
    }
    const double d = a.at(col, col);
    for (std::size_t k = 0; k < n; ++k) {
      a.at(col, k) /= d;
      inv.at(col, k) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a.at(r, col);
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        a.at(r, k) -= f * a.at(col, k);
        inv.at(r, k) -= f * inv.at(col, k);
      }
    }
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += inv.at(r, k) * b[k];
    x[r] = acc;
  }
  return x;
}

gpc::lsq::PolyFit polyfit_by_inverse(std::span<const double> xs,
                                     std::span<const double> ys, int order) {
  if (order < 0) gpc::fail(gpc::Errc::BadValue, "order must be >= 0");
  if (xs.size() != ys.size())
    gpc::fail(gpc::Errc::BadValue, "length mismatch");
  const std::size_t m1 = static_cast<std::size_t>(order) + 1;
  if (xs.size() < m1)
    gpc::fail(gpc::Errc::InsufficientPoints, "too few points");

  double scale = 1.0;
  for (double x : xs) scale = std::max(scale, std::abs(x));

  // Plain serial power and moment sums over t = x/scale.
  std::vector<double> s(2 * static_cast<std::size_t>(order) + 1, 0.0);
  std::vector<double> t(m1, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double tx = xs[i] / scale;
    double p = 1.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      s[k] += p;
      if (k < m1) t[k] += p * ys[i];
      p *= tx;
    }
  }

  gpc::lsq::Matrix a(m1);
  for (std::size_t j = 0; j < m1; ++j)
    for (std::size_t k = 0; k < m1; ++k) a.at(j, k) = s[j + k];
  std::vector<double> coeffs = solve_by_inverse(std::move(a), t);

  gpc::lsq::PolyFit fit;
  fit.order = order;
  fit.coeffs.resize(m1);
  double unscale = 1.0;
  for (std::size_t k = 0; k < m1; ++k) {
    fit.coeffs[k] = coeffs[k] / unscale;
    unscale *= scale;
  }

  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double value = 0.0;
    for (std::size_t k = m1; k-- > 0;) value = value * xs[i] + fit.coeffs[k];
    const double d = ys[i] - value;
    sse += d * d;
  }
  fit.sse = sse;
  return fit;
}

std::vector<gpc::lsq::PolyFit> batch_fit_ref(const gpc::lsq::ScanLineSet& set,
                                             int order) {
  set.validate();
  std::vector<double> xs(set.pixels);
  for (std::size_t i = 0; i < set.pixels; ++i) xs[i] = static_cast<double>(i);

  std::vector<gpc::lsq::PolyFit> fits;
  fits.reserve(set.lines);
  for (std::size_t line = 0; line < set.lines; ++line) {
    const std::span<const double> row(set.y.data() + line * set.pixels,
                                      set.pixels);
    fits.push_back(polyfit_by_inverse(xs, row, order));
  }
  return fits;
}

}  // namespace gpcref
