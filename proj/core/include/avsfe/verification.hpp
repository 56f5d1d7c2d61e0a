#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "avsfe/solver.hpp"

namespace avsfe {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Manufactured solution with closed-form gradient and body force.
struct ExactSolution {
  std::string id;
  IsotropicMaterial material;
  std::function<Vector2(const Point2&)> displacement;
  std::function<Eigen::Matrix2d(const Point2&)> gradient;  // G(i,j) = du_i/dx_j
  VectorField body_force;                                  // f = -div sigma

  Eigen::Matrix2d stress(const Point2& x) const {
    return apply_hooke(strain_of(gradient(x)), material);
  }
};

/// u = (s, s), s = sin(pi x) sin(pi y).
ExactSolution exact_case_A(const IsotropicMaterial& material);

/// u = (sin 2pi y (cos 2pi x - 1), sin 2pi x (1 - cos 2pi y)) + s/(1+lambda) (1, 1).
/// The leading part is divergence free.
ExactSolution exact_case_B(const IsotropicMaterial& material);

/// Observed order of the central-difference divergence of the exact stress
/// against -f, from steps h and h/2 at `samples` pseudo-random interior
/// points of the unit square. Returns log2(e(h) / e(h/2)).
double body_force_residual_order(const ExactSolution& exact, double h = 1e-2, int samples = 100);

struct ErrorNorms {
  double l2_u = 0.0;
  double h1_u = 0.0;      // full H1 norm of the error
  double hdiv_sigma = 0.0;
  double u_norm = 0.0;    // sqrt(h1_u^2 + hdiv_sigma^2)
};

/// Elementwise quadrature of degree `quadrature_degree` (default 2p+4).
/// Displacement-only solutions report NaN for the stress terms.
ErrorNorms error_norms(const TrialSolution& solution, const ExactSolution& exact,
                       int quadrature_degree = -1);

/// (1/2) int eps(u) : E eps(u) dx.
double strain_energy(const TrialSolution& solution, const MaterialField& materials,
                     int quadrature_degree = -1);

/// rate_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i), one entry per consecutive pair.
std::vector<double> convergence_rate(const std::vector<std::pair<double, double>>& errors);

/// One row of a study table. Unavailable quantities are NaN.
struct StudyRecord {
  int step = 0;
  double h_max = 0.0;
  int ndof = 0;
  int num_cells = 0;
  double l2_u = kNaN;
  double h1_u = kNaN;
  double hdiv_sigma = kNaN;
  double u_norm = kNaN;
  double energy_estimate = kNaN;
  double strain_energy = kNaN;
  double rate_l2 = kNaN;
  double rate_h1 = kNaN;
  double rate_energy = kNaN;
  double wall_seconds = 0.0;
};

/// Fills rate_l2, rate_h1 and rate_energy from consecutive records
/// (against h_max for uniform sequences, against ndof^{-1/2} otherwise).
void fill_rates(std::vector<StudyRecord>& records, bool use_dofs = false);

/// L2 norm of the displacement field (for tests and scaling checks).
double displacement_l2(const TrialSolution& solution, int quadrature_degree = -1);

/// Cell averages of the stress components (xx, xy, yx, yy).
std::vector<Eigen::Vector4d> cell_average_stress(const TrialSolution& solution);

}  // namespace avsfe
