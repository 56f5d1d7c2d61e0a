#pragma once

#include <map>

#include <Eigen/Dense>

namespace avsfe {

using Tensor2 = Eigen::Matrix2d;

/// Isotropic material under plane strain.
struct IsotropicMaterial {
  double youngs_modulus = 0.0;
  double poisson_ratio = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
};

/// Plane-strain Lame parameters from (E, nu). Rejects nu >= 0.5.
IsotropicMaterial from_engineering(double youngs_modulus, double poisson_ratio);

/// 2 mu eps + lambda tr(eps) I.
Tensor2 apply_hooke(const Tensor2& strain, const IsotropicMaterial& mat);

/// Symmetric part of a displacement gradient (G(i, j) = d u_i / d x_j).
Tensor2 strain_of(const Tensor2& displacement_gradient);

/// Material per cell tag.
class MaterialField {
 public:
  MaterialField() = default;
  explicit MaterialField(IsotropicMaterial uniform) { materials_[0] = uniform; }
  explicit MaterialField(std::map<int, IsotropicMaterial> by_tag) : materials_(std::move(by_tag)) {}

  void set(int tag, const IsotropicMaterial& mat) { materials_[tag] = mat; }
  bool has(int tag) const { return materials_.count(tag) != 0; }
  /// Throws ConfigError for an unknown tag.
  const IsotropicMaterial& at(int tag) const;
  const std::map<int, IsotropicMaterial>& entries() const { return materials_; }

 private:
  std::map<int, IsotropicMaterial> materials_;
};

}  // namespace avsfe
