#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gpc/error.hpp"
#include "gpc/parexec.hpp"

// Polynomial least squares via the normal equations.
//
// For order m over points (x_i, y_i) the system is A X = B with the Hankel
// matrix A[j][k] = S_{j+k} built from power sums S_p = sum x_i^p (so
// A[0][0] = n) and B[j] = T_j = sum x_i^j * y_i. solve_linear runs Gaussian
// elimination with partial pivoting and reports Singular when the best
// pivot drops below 1e-12 * max|A|.
//
// polyfit solves the equivalent system in the t = x/s basis with
// s = max(1, max|x_i|) and unscales the coefficients; the raw power-sum
// matrix for wide x ranges is too ill-conditioned to recover coefficients
// in double precision, the equilibrated one is not. For |x| <= 1 the two
// paths coincide. Reported coefficients are always for the plain monomial
// basis, constant term first.
//
// All sums go through the fixed-chunk reductions, so every result is
// bitwise reproducible for any worker count.

namespace gpc::lsq {

inline constexpr int kMaxOrder = 8;

struct Matrix {
  std::size_t n = 0;
  std::vector<double> a;  // row-major n*n

  Matrix() = default;
  explicit Matrix(std::size_t size) : n(size), a(size * size, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return a[r * n + c]; }
  double at(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

struct NormalSystem {
  int order = 0;
  Matrix a;                // (order+1)^2 Hankel matrix of power sums
  std::vector<double> b;   // moment sums T_0..T_m
};

struct PolyFit {
  int order = 0;
  std::vector<double> coeffs;  // a_0..a_m, constant term first
  double sse = 0.0;            // sum of squared residuals
};

// S_0..S_max_p for the given abscissae. S_0 == n exactly.
std::vector<double> power_sums(std::span<const double> xs, int max_p,
                               const par::ExecPlan& plan);

// T_0..T_max_j with T_j = sum x_i^j * y_i.
std::vector<double> moment_sums(std::span<const double> xs,
                                std::span<const double> ys, int max_j,
                                const par::ExecPlan& plan);

// Throws BadValue on length mismatch, InsufficientPoints when n < order+1.
NormalSystem build_normal_system(std::span<const double> xs,
                                 std::span<const double> ys, int order,
                                 const par::ExecPlan& plan);

// Solves A x = b in place. Throws Singular / BadValue.
std::vector<double> solve_linear(Matrix a, std::vector<double> b);

// Throws OrderTooHigh (order > kMaxOrder), InsufficientPoints, Singular,
// BadValue (negative order).
PolyFit polyfit(std::span<const double> xs, std::span<const double> ys,
                int order, const par::ExecPlan& plan);

double evaluate(const PolyFit& fit, double x);  // Horner

double sse(const PolyFit& fit, std::span<const double> xs,
           std::span<const double> ys, const par::ExecPlan& plan);

// A batch of scan lines sharing the abscissa x = 0..pixels-1.
struct ScanLineSet {
  std::size_t lines = 0;
  std::size_t pixels = 0;
  std::vector<double> y;  // row-major lines*pixels

  void validate() const;  // throws BadValue
};

struct LineFit {
  std::optional<PolyFit> fit;
  Errc code = Errc::TaskFailed;  // meaningful only when !ok()
  std::string message;

  bool ok() const { return fit.has_value(); }
};

// Fits every line independently; a failing line (non-finite samples,
// singular system) is reported in its slot without aborting the others.
std::vector<LineFit> batch_fit(const ScanLineSet& set, int order,
                               const par::ExecPlan& plan);

enum class Dtype { f32, f64 };

Dtype dtype_from_string(std::string_view name);  // throws BadValue
std::size_t dtype_size(Dtype dtype);

// Little-endian payload codecs. Request payload: lines*pixels scalars of
// the given dtype. Response payload: per line, coefficients a_0..a_m then
// the SSE, all f64 (lines * (order+2) doubles).
ScanLineSet scanlines_from_le_bytes(std::size_t lines, std::size_t pixels,
                                    Dtype dtype,
                                    std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> fits_to_le_bytes(std::span<const LineFit> fits,
                                           int order);

}  // namespace gpc::lsq
