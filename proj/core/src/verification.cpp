#include "avsfe/verification.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "avsfe/error.hpp"

namespace avsfe {

namespace {

constexpr double kPi = std::numbers::pi;

int default_degree(const TrialSolution& s, int requested) {
  return requested > 0 ? requested : std::min(2 * s.spaces->p() + 4, kMaxQuadratureDegree);
}

}  // namespace

ExactSolution exact_case_A(const IsotropicMaterial& material) {
  ExactSolution ex;
  ex.id = "case_A";
  ex.material = material;
  ex.displacement = [](const Point2& x) {
    const double s = std::sin(kPi * x.x()) * std::sin(kPi * x.y());
    return Vector2(s, s);
  };
  ex.gradient = [](const Point2& x) {
    const double sx = kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y());
    const double sy = kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y());
    Eigen::Matrix2d g;
    g << sx, sy, sx, sy;
    return g;
  };
  const double lam = material.lambda, mu = material.mu;
  ex.body_force = [lam, mu](const Point2& x) {
    const double s = std::sin(kPi * x.x()) * std::sin(kPi * x.y());
    const double cc = std::cos(kPi * x.x()) * std::cos(kPi * x.y());
    const double f = kPi * kPi * (2.0 * mu * s + (lam + mu) * (s - cc));
    return Vector2(f, f);
  };
  return ex;
}

ExactSolution exact_case_B(const IsotropicMaterial& material) {
  ExactSolution ex;
  ex.id = "case_B";
  ex.material = material;
  const double lam = material.lambda, mu = material.mu;
  const double a = 1.0 / (1.0 + lam);
  ex.displacement = [a](const Point2& x) {
    const double s = std::sin(kPi * x.x()) * std::sin(kPi * x.y());
    const double tx = 2.0 * kPi * x.x(), ty = 2.0 * kPi * x.y();
    return Vector2(std::sin(ty) * (std::cos(tx) - 1.0) + a * s,
                   std::sin(tx) * (1.0 - std::cos(ty)) + a * s);
  };
  ex.gradient = [a](const Point2& x) {
    const double sx = kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y());
    const double sy = kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y());
    const double tx = 2.0 * kPi * x.x(), ty = 2.0 * kPi * x.y();
    const double w = 2.0 * kPi;
    Eigen::Matrix2d g;
    g << -w * std::sin(ty) * std::sin(tx) + a * sx, w * std::cos(ty) * (std::cos(tx) - 1.0) + a * sy,
        w * std::cos(tx) * (1.0 - std::cos(ty)) + a * sx, w * std::sin(tx) * std::sin(ty) + a * sy;
    return g;
  };
  ex.body_force = [a, lam, mu](const Point2& x) {
    const double s = std::sin(kPi * x.x()) * std::sin(kPi * x.y());
    const double cc = std::cos(kPi * x.x()) * std::cos(kPi * x.y());
    const double tx = 2.0 * kPi * x.x(), ty = 2.0 * kPi * x.y();
    const double p2 = kPi * kPi;
    // Laplacian of each component and gradient of the divergence.
    const double lap_x = 4.0 * p2 * std::sin(ty) * (1.0 - 2.0 * std::cos(tx)) - 2.0 * p2 * a * s;
    const double lap_y = 4.0 * p2 * std::sin(tx) * (2.0 * std::cos(ty) - 1.0) - 2.0 * p2 * a * s;
    const double graddiv = a * p2 * (cc - s);
    return Vector2(-(mu * lap_x + (lam + mu) * graddiv), -(mu * lap_y + (lam + mu) * graddiv));
  };
  return ex;
}

double body_force_residual_order(const ExactSolution& exact, double h, int samples) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> dist(0.1, 0.9);
  std::vector<Point2> pts(samples);
  for (auto& p : pts) p = Point2(dist(rng), dist(rng));
  auto residual = [&](double step) {
    double worst = 0.0;
    for (const Point2& x : pts) {
      const Eigen::Matrix2d dx =
          (exact.stress(x + Point2(step, 0.0)) - exact.stress(x - Point2(step, 0.0))) / (2.0 * step);
      const Eigen::Matrix2d dy =
          (exact.stress(x + Point2(0.0, step)) - exact.stress(x - Point2(0.0, step))) / (2.0 * step);
      const Vector2 div(dx(0, 0) + dy(0, 1), dx(1, 0) + dy(1, 1));
      worst = std::max(worst, (div + exact.body_force(x)).norm());
    }
    return worst;
  };
  return std::log2(residual(h) / residual(0.5 * h));
}

ErrorNorms error_norms(const TrialSolution& solution, const ExactSolution& exact,
                       int quadrature_degree) {
  const QuadratureRule rule = quadrature_rule(default_degree(solution, quadrature_degree));
  const FieldEvaluator eval(solution, rule.points);
  double l2 = 0.0, grad = 0.0, sig = 0.0, div = 0.0;
  const Mesh& mesh = *solution.mesh;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const FieldValues v = eval.evaluate(c);
    const double det = mesh.geometry(c).det_jacobian;
    for (int q = 0; q < rule.size(); ++q) {
      const Point2 x = v.x.row(q).transpose();
      const double w = rule.weights[q] * det;
      const Vector2 ue = exact.displacement(x);
      const Eigen::Matrix2d ge = exact.gradient(x);
      l2 += w * (Vector2(v.u(q, 0), v.u(q, 1)) - ue).squaredNorm();
      const Eigen::Vector4d gh = v.grad_u.row(q).transpose();
      grad += w * (Eigen::Vector4d(ge(0, 0), ge(0, 1), ge(1, 0), ge(1, 1)) - gh).squaredNorm();
      if (solution.has_stress) {
        const Eigen::Matrix2d se = apply_hooke(strain_of(ge), exact.material);
        const Eigen::Vector4d sh = v.sigma.row(q).transpose();
        sig += w * (Eigen::Vector4d(se(0, 0), se(0, 1), se(1, 0), se(1, 1)) - sh).squaredNorm();
        const Vector2 de = -exact.body_force(x);
        div += w * (Vector2(v.div_sigma(q, 0), v.div_sigma(q, 1)) - de).squaredNorm();
      }
    }
  }
  ErrorNorms n;
  n.l2_u = std::sqrt(l2);
  n.h1_u = std::sqrt(l2 + grad);
  if (solution.has_stress) {
    n.hdiv_sigma = std::sqrt(sig + div);
    n.u_norm = std::sqrt(n.h1_u * n.h1_u + n.hdiv_sigma * n.hdiv_sigma);
  } else {
    n.hdiv_sigma = std::numeric_limits<double>::quiet_NaN();
    n.u_norm = std::numeric_limits<double>::quiet_NaN();
  }
  return n;
}

double strain_energy(const TrialSolution& solution, const MaterialField& materials,
                     int quadrature_degree) {
  const QuadratureRule rule = quadrature_rule(default_degree(solution, quadrature_degree));
  const FieldEvaluator eval(solution, rule.points);
  const Mesh& mesh = *solution.mesh;
  double energy = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const FieldValues v = eval.evaluate(c);
    const IsotropicMaterial& mat = materials.at(mesh.material(c));
    const double det = mesh.geometry(c).det_jacobian;
    for (int q = 0; q < rule.size(); ++q) {
      Eigen::Matrix2d g;
      g << v.grad_u(q, 0), v.grad_u(q, 1), v.grad_u(q, 2), v.grad_u(q, 3);
      const Eigen::Matrix2d eps = strain_of(g);
      energy += 0.5 * rule.weights[q] * det * (eps.array() * apply_hooke(eps, mat).array()).sum();
    }
  }
  return energy;
}

std::vector<double> convergence_rate(const std::vector<std::pair<double, double>>& errors) {
  std::vector<double> rates;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const auto [h0, e0] = errors[i - 1];
    const auto [h1, e1] = errors[i];
    AVSFE_REQUIRE(e0 > 0.0 && e1 > 0.0, ConfigError, "convergence rates need positive errors");
    AVSFE_REQUIRE(h0 > 0.0 && h1 > 0.0 && h0 != h1, ConfigError,
                  "convergence rates need distinct positive mesh sizes");
    rates.push_back(std::log(e0 / e1) / std::log(h0 / h1));
  }
  return rates;
}

void fill_rates(std::vector<StudyRecord>& records, bool use_dofs) {
  auto size = [&](const StudyRecord& r) {
    return use_dofs ? 1.0 / std::sqrt(static_cast<double>(r.ndof)) : r.h_max;
  };
  auto rate = [&](double e0, double e1, double h0, double h1) {
    if (!(e0 > 0.0) || !(e1 > 0.0) || h0 == h1) return kNaN;
    return std::log(e0 / e1) / std::log(h0 / h1);
  };
  for (std::size_t i = 1; i < records.size(); ++i) {
    const StudyRecord& a = records[i - 1];
    StudyRecord& b = records[i];
    const double h0 = size(a), h1 = size(b);
    b.rate_l2 = rate(a.l2_u, b.l2_u, h0, h1);
    b.rate_h1 = rate(a.h1_u, b.h1_u, h0, h1);
    b.rate_energy = rate(a.energy_estimate, b.energy_estimate, h0, h1);
  }
}

double displacement_l2(const TrialSolution& solution, int quadrature_degree) {
  const QuadratureRule rule = quadrature_rule(default_degree(solution, quadrature_degree));
  const FieldEvaluator eval(solution, rule.points);
  double s = 0.0;
  for (int c = 0; c < solution.mesh->num_cells(); ++c) {
    const FieldValues v = eval.evaluate(c);
    const double det = solution.mesh->geometry(c).det_jacobian;
    for (int q = 0; q < rule.size(); ++q) s += rule.weights[q] * det * v.u.row(q).squaredNorm();
  }
  return std::sqrt(s);
}

std::vector<Eigen::Vector4d> cell_average_stress(const TrialSolution& solution) {
  const Mesh& mesh = *solution.mesh;
  std::vector<Eigen::Vector4d> out(mesh.num_cells(), Eigen::Vector4d::Zero());
  if (!solution.has_stress) return out;
  const QuadratureRule rule = quadrature_rule(2 * solution.spaces->p() + 2);
  const FieldEvaluator eval(solution, rule.points);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const FieldValues v = eval.evaluate(c);
    // Reference weights sum to 1/2; the average is independent of the map.
    out[c] = 2.0 * (v.sigma.transpose() * rule.weights);
  }
  return out;
}

}  // namespace avsfe
