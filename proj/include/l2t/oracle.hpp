#pragma once

#include <cstdint>

#include "l2t/complex.hpp"

namespace l2t {

// Reference computations that only share the realize primitive with the main path.
struct OracleOptions {
  double tolerance = 1e-8;
  int start_resolution = 64;
  std::int64_t max_points = std::int64_t{1} << 22;
  double cutoff = 1e-10;  // relative, on singular values
};

// (1/2) sum_i (-1)^{i+1} i ln Det'(Delta_i). Throws NotDeterminantClass when the
// torus integral cannot be certified.
double torsion_via_laplacian(const CochainComplex& c, const OracleOptions& options = {});

// Classical torsion of the unrolled complex, sum_i (-1)^{i+1} ln|det[u_i | h_i | b_i]| / |G|.
// Finite models only (Unsupported otherwise).
double torsion_via_dense(const CochainComplex& c, const OracleOptions& options = {});

struct MahlerEstimate {
  double value = 0.0;
  double error = 0.0;  // geometric tail bound from the last two doublings
  int resolution = 0;
};

// Mean of ln|p| over the torus of p's model. Throws NonConvergent when the doubling
// residuals stop decreasing or the budget runs out, InvalidInput for p = 0.
MahlerEstimate mahler_refine(const GroupRingElement& p, double target_tol,
                             std::int64_t max_points = std::int64_t{1} << 24);

}  // namespace l2t
