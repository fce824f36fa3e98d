#pragma once

#include <span>
#include <vector>

#include "gpc/demosaic.hpp"
#include "gpc/lsq.hpp"

// Serial reference implementations, written independently of the parallel
// kernels and kept for testing and benchmarking against them.
//
// The demosaic routines use their own CFA layout tables and neighbour
// offset lists; the solver inverts the matrix explicitly (Gauss-Jordan)
// and multiplies, instead of elimination with back-substitution. Outputs
// are expected to match the production kernels byte-for-byte (demosaic)
// or to well-conditioned tolerance (solver).

namespace gpcref {

gpc::img::RgbImage demosaic_bilinear_ref(const gpc::img::BayerImage& in);
gpc::img::RgbImage demosaic_gradient_ref(const gpc::img::BayerImage& in);

// Explicit inverse: X = A^-1 B. Throws Singular on a vanishing pivot.
std::vector<double> solve_by_inverse(gpc::lsq::Matrix a,
                                     std::vector<double> b);

// Serial polyfit on the inverse route (same x-scaling as production).
gpc::lsq::PolyFit polyfit_by_inverse(std::span<const double> xs,
                                     std::span<const double> ys, int order);

// Serial batch fit over the inverse route; x = 0..pixels-1 per line.
std::vector<gpc::lsq::PolyFit> batch_fit_ref(const gpc::lsq::ScanLineSet& set,
                                             int order);

}  // namespace gpcref
