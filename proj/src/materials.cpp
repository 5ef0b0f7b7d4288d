#include "spinphonon/materials.hpp"

#include <cmath>
#include <string>

#include "spinphonon/error.hpp"

namespace spinphonon {

void validate(const Material& m) {
  const std::string label = m.name.empty() ? "material" : "material '" + m.name + "'";
  if (!(m.youngs_modulus > 0.0) || !std::isfinite(m.youngs_modulus)) {
    throw ValidationError(label + ": youngs_modulus must be positive and finite");
  }
  if (!(m.density > 0.0) || !std::isfinite(m.density)) {
    throw ValidationError(label + ": density must be positive and finite");
  }
  if (!(m.poisson_ratio > -1.0 && m.poisson_ratio < 0.5)) {
    throw ValidationError(label + ": poisson_ratio must lie in (-1, 0.5), got " +
                          std::to_string(m.poisson_ratio));
  }
}

LameConstants lame_constants(const Material& m) {
  validate(m);
  const double e = m.youngs_modulus;
  const double nu = m.poisson_ratio;
  return {nu * e / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu))};
}

double rod_sound_speed(const Material& m) {
  validate(m);
  return std::sqrt(m.youngs_modulus / m.density);
}

double bulk_sound_speed(const Material& m) {
  return std::sqrt(longitudinal_modulus(m, SpeedModel::bulk) / m.density);
}

double longitudinal_modulus(const Material& m, SpeedModel model) {
  if (model == SpeedModel::rod) {
    validate(m);
    return m.youngs_modulus;
  }
  const LameConstants lc = lame_constants(m);
  return lc.lambda + 2.0 * lc.mu;
}

double sound_speed(const Material& m, SpeedModel model) {
  return model == SpeedModel::rod ? rod_sound_speed(m) : bulk_sound_speed(m);
}

Material diamond() { return {"diamond", 1050e9, 0.2, 3539.0}; }
Material silicon() { return {"silicon", 170e9, 0.28, 2329.0}; }

std::optional<Material> preset_material(std::string_view name) {
  if (name == "diamond") return diamond();
  if (name == "silicon") return silicon();
  return std::nullopt;
}

}  // namespace spinphonon
