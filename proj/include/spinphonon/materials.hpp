#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace spinphonon {

/// Isotropic elastic medium. SI units: Pa, dimensionless, kg/m^3.
struct Material {
  std::string name;
  double youngs_modulus = 0.0;
  double poisson_ratio = 0.0;
  double density = 0.0;
};

struct LameConstants {
  double lambda = 0.0;  // Pa
  double mu = 0.0;      // Pa
};

/// Longitudinal speed used for dispersion: thin rod sqrt(E/rho) or bulk sqrt((lambda+2mu)/rho).
enum class SpeedModel { rod, bulk };

/// Throws ValidationError unless E > 0, rho > 0 and -1 < nu < 0.5.
void validate(const Material& m);

LameConstants lame_constants(const Material& m);

double rod_sound_speed(const Material& m);
double bulk_sound_speed(const Material& m);
double sound_speed(const Material& m, SpeedModel model);

/// Elastic modulus matching `model`: E for a rod, lambda + 2 mu for bulk.
double longitudinal_modulus(const Material& m, SpeedModel model);

Material diamond();
Material silicon();

/// Built-in presets by name ("diamond", "silicon").
std::optional<Material> preset_material(std::string_view name);

/// Quoted longitudinal speed of sound in diamond (m/s); differs from
/// rod_sound_speed(diamond()) by about 0.7%.
inline constexpr double kDiamondQuotedSoundSpeed = 1.71e4;

}  // namespace spinphonon
