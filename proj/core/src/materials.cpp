#include "avsfe/materials.hpp"

#include <cmath>
#include <string>

#include "avsfe/error.hpp"

namespace avsfe {

IsotropicMaterial from_engineering(double youngs_modulus, double poisson_ratio) {
  AVSFE_REQUIRE(std::isfinite(youngs_modulus) && youngs_modulus > 0.0, ConfigError,
                "Young's modulus must be positive");
  AVSFE_REQUIRE(poisson_ratio < 0.5, ConfigError,
                "Poisson ratio " + std::to_string(poisson_ratio) +
                    " reaches the incompressible limit (nu must be < 0.5)");
  AVSFE_REQUIRE(poisson_ratio >= 0.0, ConfigError, "Poisson ratio must be >= 0");
  IsotropicMaterial m;
  m.youngs_modulus = youngs_modulus;
  m.poisson_ratio = poisson_ratio;
  m.lambda = youngs_modulus * poisson_ratio / ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
  m.mu = youngs_modulus / (2.0 * (1.0 + poisson_ratio));
  return m;
}

Tensor2 apply_hooke(const Tensor2& strain, const IsotropicMaterial& mat) {
  return 2.0 * mat.mu * strain + mat.lambda * strain.trace() * Tensor2::Identity();
}

Tensor2 strain_of(const Tensor2& g) { return 0.5 * (g + g.transpose()); }

const IsotropicMaterial& MaterialField::at(int tag) const {
  auto it = materials_.find(tag);
  AVSFE_REQUIRE(it != materials_.end(), ConfigError,
                "no material defined for cell tag " + std::to_string(tag));
  return it->second;
}

}  // namespace avsfe
