#pragma once

// Experiment configuration: JSON schema, defaults and validation.
// Frequencies are held in Hz (w / 2 pi) exactly as written so that the
// serialization round-trips; accessors convert to rad/s.

#include <complex>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "spinphonon/bandstructure.hpp"
#include "spinphonon/dynamics.hpp"
#include "spinphonon/materials.hpp"
#include "spinphonon/siv.hpp"

namespace spinphonon {

struct LayerSpec {
  std::string material;
  double thickness = 0.0;
};

struct GeometryConfig {
  std::optional<double> lattice_constant;  // required when no layers are given
  double cross_section = 2e-15;
  double total_length = 1e-4;
  SpeedModel speed_model = SpeedModel::rod;
  std::vector<LayerSpec> layers;

  double period() const;
};

struct BandOverride {
  double omega_be_hz = 45.5e9;
  double alpha_hz = 3.5e9;
};

struct TransferMatrixBand {
  int band_index = 1;
  int k_points = 401;
  double fit_fraction = 0.1;
  double fit_tolerance = kDefaultEdgeFitTolerance;
};

using BandSource = std::variant<BandOverride, TransferMatrixBand>;

struct QuotedCoupling {
  double g_hz = 178e6;
};

struct FormulaCoupling {
  std::string material = "diamond";
  CouplingNormalization normalization = CouplingNormalization::pi;
  double profile = 1.0;
};

using CouplingSource = std::variant<QuotedCoupling, FormulaCoupling>;

struct RamanDrive {
  double rabi_over_g = 1.0;
  double raman_detuning_over_g = 10.0;
};

struct DirectDrive {
  double g_eff_hz = 0.0;
};

using DriveSource = std::variant<RamanDrive, DirectDrive>;

struct DetuningGrid {
  std::vector<double> values_over_galpha;  // overrides the range when non-empty
  double min_over_galpha = -50.0;
  double max_over_galpha = 50.0;
  int points = 200;
  double headline_over_galpha = 43.0;

  std::vector<double> grid() const;
};

struct SiteSpec {
  double position = 0.0;              // m
  std::optional<double> g_eff_hz;  // defaults to the drive value
};

struct EnvelopeConfig {
  double x0_over_a = 0.0;
  double half_width_over_lc = 5.0;
  int points = 201;
};

struct SpinspinConfig {
  std::vector<double> detunings_over_galpha{10.0, 43.0, 100.0};
  double max_separation_over_a = 60.0;
  int points = 121;
  bool nearest_neighbour = false;
};

struct DynamicsConfig {
  double separation_over_lc = 0.1;
  int points = 400;
  double periods = 3.0;
  std::complex<double> alpha{1.0, 0.0};  // spin 1 starts in alpha|g> + beta|e>
  std::complex<double> beta{0.0, 0.0};   // spin 2 starts in |e>
};

struct SivConfig {
  double lambda_so_hz = 46e9;
  double jt_shift_x_hz = 0.0;
  double jt_shift_y_hz = 0.0;
  double b_field_t = 0.0;
  double gamma_spin_hz_per_t = 28e9;
  double gamma_orbital_hz_per_t = 0.0;
  double d_hz = 1e15;
  double f_hz = 0.0;
  double t_perp_hz = 0.0;
  double t_par_hz = 0.0;

  SivParams params() const;
  StrainSusceptibilities susceptibilities() const;
};

struct NoiseConfig {
  double gamma_s_over_lambda = 0.1;
  std::optional<double> gamma_s;  // 1/s, takes precedence when set
  double gamma_relax = 0.0;       // 1/s
  double quality_factor = 1e7;
  double n_th = 0.0;
  DephasingConvention convention = DephasingConvention::sigma_z_half;
  bool dephase_both = true;
  bool mechanical_dressing = false;
};

enum class OutputFormat { csv, json };

struct OutputConfig {
  std::string directory = "out";
  OutputFormat format = OutputFormat::csv;
};

struct ExperimentConfig {
  GeometryConfig geometry;
  std::map<std::string, Material> materials;  // overrides and additions to presets
  BandSource band = BandOverride{};
  SivConfig siv;
  CouplingSource coupling = QuotedCoupling{};
  DriveSource drive = RamanDrive{};
  DetuningGrid detuning;
  std::vector<SiteSpec> sites;
  EnvelopeConfig envelope;
  SpinspinConfig spinspin;
  DynamicsConfig dynamics;
  NoiseConfig noise;
  OutputConfig output;

  /// Preset or user material; throws ConfigError when unknown.
  Material material(const std::string& name) const;
  LatticeGeometry lattice() const;
};

/// Defaults reproduce the type-I crystal numbers (178 MHz, 45.5 GHz, 3.5 GHz).
ExperimentConfig default_config();

/// Parses and validates. Throws ConfigError naming the offending field, or
/// reporting line and column for malformed JSON.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical serialization; parse_config(to_json(c).dump()) reproduces c.
nlohmann::ordered_json to_json(const ExperimentConfig& c);

}  // namespace spinphonon
