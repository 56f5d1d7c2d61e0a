#pragma once

#include <string>
#include <vector>

#include "avsfe/assembly.hpp"

namespace avsfe {

/// Outcome of one invariant check: `value` is the measured quantity (an
/// error, a mismatch count or an order) compared against `tolerance`.
struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Quadrature rules of degree 1..12 against the closed form
/// int x^a y^b = a! b! / (a + b + 2)! on the reference triangle.
CheckResult check_quadrature_exactness(int max_degree = 12);

/// int_K div phi = int_dK phi.n for every mapped RT_k basis function on a
/// skewed cell, k = 0..3.
CheckResult check_piola_divergence();

/// For a random globally conforming RT_1 field and a continuous v, the two
/// contributions int_F (sigma n) v of every interior facet cancel.
CheckResult check_facet_telescoping();

/// Doerfler marking against brute-force subset enumeration (<= 12 cells):
/// the marked set satisfies the criterion and has minimal cardinality.
CheckResult check_dorfler_minimality(int trials = 300);

/// Finite-difference divergence of the exact stress matches -f at second
/// order for both manufactured solutions and every study material.
CheckResult check_body_force_order();

/// Condensed matrix on the 2-cell mesh is symmetric to 1e-10 (relative) and
/// admits a Cholesky factorization.
CheckResult check_condensed_spd(int p, StressSpace stress);

/// Condensed solution against a dense monolithic solve of the saddle-point
/// system [G B; B^T 0] on the 2-cell mesh.
CheckResult check_saddle_equivalence(int p, StressSpace stress);

/// max_j |B(phi_j, e)| over free trial basis functions, relative to ||A||.
CheckResult check_galerkin_orthogonality(int p, StressSpace stress);

/// Linear displacement with constant stress on a distorted patch, p = 1:
/// L2(u), L2(sigma) and every eta_m vanish.
CheckResult check_patch(StressSpace stress);

/// Every check above in a fixed order (both stress spaces where relevant).
std::vector<CheckResult> run_all_checks();

}  // namespace avsfe
