#include "gpc/lsq.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

namespace gpc::lsq {

namespace {

// x^p by plain repeated multiplication; exact for p = 0 and deterministic
// everywhere (no pow() library variance).
double ipow(double x, int p) {
  double out = 1.0;
  for (int i = 0; i < p; ++i) out *= x;
  return out;
}

void check_lengths(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    fail(Errc::BadValue, "xs has " + std::to_string(xs.size()) +
                             " points, ys has " + std::to_string(ys.size()));
}

std::uint64_t le64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint32_t le32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void put_le64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

}  // namespace

std::vector<double> power_sums(std::span<const double> xs, int max_p,
                               const par::ExecPlan& plan) {
  if (max_p < 0) fail(Errc::BadValue, "max_p must be >= 0");
  std::vector<double> sums(static_cast<std::size_t>(max_p) + 1);
  for (int p = 0; p <= max_p; ++p) {
    sums[p] = par::reduce_sum(xs.size(), plan,
                              [&xs, p](std::size_t i) { return ipow(xs[i], p); });
  }
  return sums;
}

std::vector<double> moment_sums(std::span<const double> xs,
                                std::span<const double> ys, int max_j,
                                const par::ExecPlan& plan) {
  if (max_j < 0) fail(Errc::BadValue, "max_j must be >= 0");
  check_lengths(xs, ys);
  std::vector<double> sums(static_cast<std::size_t>(max_j) + 1);
  for (int j = 0; j <= max_j; ++j) {
    sums[j] = par::reduce_sum(xs.size(), plan, [&xs, &ys, j](std::size_t i) {
      return ipow(xs[i], j) * ys[i];
    });
  }
  return sums;
}

NormalSystem build_normal_system(std::span<const double> xs,
                                 std::span<const double> ys, int order,
                                 const par::ExecPlan& plan) {
  if (order < 0) fail(Errc::BadValue, "order must be >= 0");
  check_lengths(xs, ys);
  const std::size_t m1 = static_cast<std::size_t>(order) + 1;
  if (xs.size() < m1)
    fail(Errc::InsufficientPoints,
         std::to_string(xs.size()) + " points for order " +
             std::to_string(order));

  const std::vector<double> s = power_sums(xs, 2 * order, plan);
  const std::vector<double> t = moment_sums(xs, ys, order, plan);

  NormalSystem sys;
  sys.order = order;
  sys.a = Matrix(m1);
  sys.b = t;
  for (std::size_t j = 0; j < m1; ++j)
    for (std::size_t k = 0; k < m1; ++k) sys.a.at(j, k) = s[j + k];
  return sys;
}

std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
  const std::size_t n = a.n;
  if (b.size() != n)
    fail(Errc::BadValue, "matrix is " + std::to_string(n) + "x" +
                             std::to_string(n) + ", rhs has " +
                             std::to_string(b.size()));
  if (n == 0) return {};

  double max_abs = 0.0;
  for (double v : a.a) max_abs = std::max(max_abs, std::abs(v));
  const double pivot_floor = 1e-12 * max_abs;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a.at(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double mag = std::abs(a.at(r, col));
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (best == 0.0 || best < pivot_floor)
      fail(Errc::Singular, "pivot " + std::to_string(col) + " is " +
                               std::to_string(best) + ", floor " +
                               std::to_string(pivot_floor));
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k)
        std::swap(a.at(col, k), a.at(pivot, k));
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a.at(r, col) / a.at(col, col);
      if (f == 0.0) continue;
      a.at(r, col) = 0.0;
      for (std::size_t k = col + 1; k < n; ++k)
        a.at(r, k) -= f * a.at(col, k);
      b[r] -= f * b[col];
    }
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (std::size_t k = r + 1; k < n; ++k) acc -= a.at(r, k) * x[k];
    x[r] = acc / a.at(r, r);
  }
  return x;
}

PolyFit polyfit(std::span<const double> xs, std::span<const double> ys,
                int order, const par::ExecPlan& plan) {
  if (order < 0) fail(Errc::BadValue, "order must be >= 0");
  if (order > kMaxOrder)
    fail(Errc::OrderTooHigh, "order " + std::to_string(order) + " exceeds " +
                                 std::to_string(kMaxOrder));
  check_lengths(xs, ys);
  const std::size_t m1 = static_cast<std::size_t>(order) + 1;
  if (xs.size() < m1)
    fail(Errc::InsufficientPoints,
         std::to_string(xs.size()) + " points for order " +
             std::to_string(order));

  double scale = 1.0;
  for (double x : xs) scale = std::max(scale, std::abs(x));

  std::vector<double> ts(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ts[i] = xs[i] / scale;

  NormalSystem sys = build_normal_system(ts, ys, order, plan);
  const std::vector<double> scaled = solve_linear(std::move(sys.a),
                                                  std::move(sys.b));

  PolyFit fit;
  fit.order = order;
  fit.coeffs.resize(m1);
  for (std::size_t k = 0; k < m1; ++k)
    fit.coeffs[k] = scaled[k] / ipow(scale, static_cast<int>(k));
  fit.sse = sse(fit, xs, ys, plan);
  return fit;
}

double evaluate(const PolyFit& fit, double x) {
  double acc = 0.0;
  for (std::size_t k = fit.coeffs.size(); k-- > 0;) acc = acc * x + fit.coeffs[k];
  return acc;
}

double sse(const PolyFit& fit, std::span<const double> xs,
           std::span<const double> ys, const par::ExecPlan& plan) {
  check_lengths(xs, ys);
  return par::reduce_sum(xs.size(), plan, [&](std::size_t i) {
    const double d = ys[i] - evaluate(fit, xs[i]);
    return d * d;
  });
}

void ScanLineSet::validate() const {
  if (lines == 0) fail(Errc::BadValue, "lines must be positive");
  if (pixels < 2) fail(Errc::BadValue, "pixels must be at least 2");
  if (y.size() != lines * pixels)
    fail(Errc::BadValue, "sample count " + std::to_string(y.size()) +
                             " does not match " + std::to_string(lines) + "x" +
                             std::to_string(pixels));
}

std::vector<LineFit> batch_fit(const ScanLineSet& set, int order,
                               const par::ExecPlan& plan) {
  set.validate();

  std::vector<double> xs(set.pixels);
  for (std::size_t i = 0; i < set.pixels; ++i) xs[i] = static_cast<double>(i);

  return par::parallel_map<LineFit>(set.lines, plan, [&](std::size_t line) {
    LineFit result;
    const std::span<const double> row(set.y.data() + line * set.pixels,
                                      set.pixels);
    try {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!std::isfinite(row[i]))
          fail(Errc::BadValue, "line " + std::to_string(line) +
                                   ": non-finite sample at " +
                                   std::to_string(i));
      }
      result.fit = polyfit(xs, row, order, plan);
    } catch (const Error& e) {
      result.code = e.code();
      result.message = e.what();
    }
    return result;
  });
}

Dtype dtype_from_string(std::string_view name) {
  if (name == "f32") return Dtype::f32;
  if (name == "f64") return Dtype::f64;
  fail(Errc::BadValue, "dtype=" + std::string(name));
}

std::size_t dtype_size(Dtype dtype) {
  return dtype == Dtype::f32 ? 4 : 8;
}

ScanLineSet scanlines_from_le_bytes(std::size_t lines, std::size_t pixels,
                                    Dtype dtype,
                                    std::span<const std::uint8_t> bytes) {
  const std::size_t count = lines * pixels;
  const std::size_t want = count * dtype_size(dtype);
  if (bytes.size() != want)
    fail(Errc::SizeMismatch, "payload is " + std::to_string(bytes.size()) +
                                 " bytes, want " + std::to_string(want));

  ScanLineSet set;
  set.lines = lines;
  set.pixels = pixels;
  set.y.resize(count);
  if (dtype == Dtype::f64) {
    for (std::size_t i = 0; i < count; ++i)
      set.y[i] = std::bit_cast<double>(le64(bytes.data() + 8 * i));
  } else {
    for (std::size_t i = 0; i < count; ++i)
      set.y[i] = std::bit_cast<float>(le32(bytes.data() + 4 * i));
  }
  return set;
}

std::vector<std::uint8_t> fits_to_le_bytes(std::span<const LineFit> fits,
                                           int order) {
  const std::size_t stride = static_cast<std::size_t>(order) + 2;
  std::vector<std::uint8_t> out(fits.size() * stride * 8);
  for (std::size_t line = 0; line < fits.size(); ++line) {
    const LineFit& lf = fits[line];
    if (!lf.ok())
      fail(Errc::TaskFailed,
           "line " + std::to_string(line) + ": " + lf.message);
    std::uint8_t* dst = out.data() + line * stride * 8;
    for (std::size_t k = 0; k + 1 < stride; ++k)
      put_le64(dst + 8 * k, std::bit_cast<std::uint64_t>(lf.fit->coeffs[k]));
    put_le64(dst + 8 * (stride - 1), std::bit_cast<std::uint64_t>(lf.fit->sse));
  }
  return out;
}

}  // namespace gpc::lsq
