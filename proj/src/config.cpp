#include "spinphonon/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spinphonon/error.hpp"
#include "spinphonon/units.hpp"

namespace spinphonon {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(field(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) fail(field(key), "must be finite");
    return x;
  }

  double required_number(const std::string& key) {
    if (!has(key)) fail(field(key), "required");
    return number(key, 0.0);
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) {
      seen_.insert(key);
      return std::nullopt;
    }
    return number(key, 0.0);
  }

  int integer(const std::string& key, int fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(field(key), "expected an integer");
    return v->get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(field(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_array()) fail(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (const json& e : *v) {
      if (!e.is_number()) fail(field(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(field(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) fail(path, what);
}

std::complex<double> complex_value(Section& s, const std::string& key, std::complex<double> def) {
  const json* v = s.find(key);
  if (!v) return def;
  if (v->is_number()) return {v->get<double>(), 0.0};
  if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number()) {
    return {(*v)[0].get<double>(), (*v)[1].get<double>()};
  }
  fail(s.field(key), "expected a number or [re, im]");
}

const char* speed_model_name(SpeedModel m) { return m == SpeedModel::rod ? "rod" : "bulk"; }

const char* normalization_name(CouplingNormalization n) {
  return n == CouplingNormalization::pi ? "pi" : "two_pi";
}

const char* convention_name(DephasingConvention c) {
  return c == DephasingConvention::sigma_z_half ? "sigma_z_half" : "excited_projector";
}

void parse_geometry(const json& j, ExperimentConfig& c) {
  Section s(j, "geometry");
  GeometryConfig& g = c.geometry;
  g.lattice_constant = s.optional_number("lattice_constant_m");
  g.cross_section = s.number("cross_section_m2", g.cross_section);
  g.total_length = s.number("total_length_m", g.total_length);
  const std::string model = s.string("speed_model", "rod");
  if (model == "rod") g.speed_model = SpeedModel::rod;
  else if (model == "bulk") g.speed_model = SpeedModel::bulk;
  else fail(s.field("speed_model"), "expected \"rod\" or \"bulk\"");
  if (const json* layers = s.find("layers")) {
    require(layers->is_array(), s.field("layers"), "expected an array");
    for (std::size_t i = 0; i < layers->size(); ++i) {
      Section ls((*layers)[i], "geometry.layers[" + std::to_string(i) + "]");
      if (!ls.has("material")) fail(ls.field("material"), "required");
      LayerSpec spec{ls.string("material", ""), ls.required_number("thickness_m")};
      require(spec.thickness > 0.0, ls.field("thickness_m"), "must be positive");
      ls.finish();
      g.layers.push_back(spec);
    }
  }
  s.finish();
  require(g.cross_section > 0.0, "geometry.cross_section_m2", "must be positive");
  require(g.total_length > 0.0, "geometry.total_length_m", "must be positive");
  if (g.lattice_constant) {
    require(*g.lattice_constant > 0.0, "geometry.lattice_constant_m", "must be positive");
  }
  if (g.layers.empty() && !g.lattice_constant) {
    fail("geometry.lattice_constant_m", "required when no layers are given");
  }
  if (!g.layers.empty() && g.lattice_constant) {
    double sum = 0.0;
    for (const LayerSpec& l : g.layers) sum += l.thickness;
    require(std::abs(sum - *g.lattice_constant) <= 1e-9 * sum, "geometry.lattice_constant_m",
            "does not equal the sum of layer thicknesses");
  }
  require(g.total_length >= 100.0 * g.period(), "geometry.total_length_m",
          "must be at least 100 lattice constants");
}

void parse_materials(const json& j, ExperimentConfig& c) {
  require(j.is_object(), "materials", "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string path = "materials." + it.key();
    Section s(it.value(), path);
    Material m = preset_material(it.key()).value_or(Material{it.key(), 0.0, 0.0, 0.0});
    m.name = it.key();
    m.youngs_modulus = s.number("youngs_modulus_pa", m.youngs_modulus);
    m.poisson_ratio = s.number("poisson_ratio", m.poisson_ratio);
    m.density = s.number("density_kg_m3", m.density);
    s.finish();
    try {
      validate(m);
    } catch (const ValidationError& e) {
      fail(path, e.what());
    }
    c.materials[it.key()] = m;
  }
}

void parse_band(const json& j, ExperimentConfig& c) {
  Section s(j, "band");
  const std::string source = s.string("source", "");
  if (source == "override") {
    BandOverride b;
    b.omega_be_hz = s.required_number("omega_be_hz");
    b.alpha_hz = s.required_number("alpha_hz");
    require(b.omega_be_hz > 0.0, s.field("omega_be_hz"), "must be positive");
    require(b.alpha_hz > 0.0, s.field("alpha_hz"), "must be positive");
    c.band = b;
  } else if (source == "transfer_matrix") {
    TransferMatrixBand b;
    b.band_index = s.integer("band_index", b.band_index);
    b.k_points = s.integer("k_points", b.k_points);
    b.fit_fraction = s.number("fit_fraction", b.fit_fraction);
    b.fit_tolerance = s.number("fit_tolerance", b.fit_tolerance);
    require(b.band_index >= 1, s.field("band_index"), "must be >= 1");
    require(b.k_points >= 16, s.field("k_points"), "must be >= 16");
    require(b.fit_fraction > 0.0 && b.fit_fraction <= 0.5, s.field("fit_fraction"),
            "must lie in (0, 0.5]");
    require(b.fit_tolerance > 0.0, s.field("fit_tolerance"), "must be positive");
    c.band = b;
  } else {
    fail(s.field("source"), "expected exactly one of \"override\" or \"transfer_matrix\"");
  }
  s.finish();
}

void parse_siv(const json& j, ExperimentConfig& c) {
  Section s(j, "siv");
  SivConfig& v = c.siv;
  v.lambda_so_hz = s.number("lambda_so_hz", v.lambda_so_hz);
  v.jt_shift_x_hz = s.number("jt_shift_x_hz", v.jt_shift_x_hz);
  v.jt_shift_y_hz = s.number("jt_shift_y_hz", v.jt_shift_y_hz);
  v.b_field_t = s.number("b_field_t", v.b_field_t);
  v.gamma_spin_hz_per_t = s.number("gamma_spin_hz_per_t", v.gamma_spin_hz_per_t);
  v.gamma_orbital_hz_per_t = s.number("gamma_orbital_hz_per_t", v.gamma_orbital_hz_per_t);
  v.d_hz = s.number("d_hz", v.d_hz);
  v.f_hz = s.number("f_hz", v.f_hz);
  v.t_perp_hz = s.number("t_perp_hz", v.t_perp_hz);
  v.t_par_hz = s.number("t_par_hz", v.t_par_hz);
  s.finish();
  require(v.lambda_so_hz > 0.0, "siv.lambda_so_hz", "must be positive");
}

void parse_coupling(const json& j, ExperimentConfig& c) {
  Section s(j, "coupling");
  const std::string source = s.string("source", "");
  if (source == "quoted") {
    QuotedCoupling q;
    q.g_hz = s.required_number("g_hz");
    require(q.g_hz > 0.0, s.field("g_hz"), "must be positive");
    c.coupling = q;
  } else if (source == "formula") {
    FormulaCoupling f;
    f.material = s.string("material", f.material);
    const std::string norm = s.string("normalization", "pi");
    if (norm == "pi") f.normalization = CouplingNormalization::pi;
    else if (norm == "two_pi") f.normalization = CouplingNormalization::two_pi;
    else fail(s.field("normalization"), "expected \"pi\" or \"two_pi\"");
    f.profile = s.number("profile", f.profile);
    require(f.profile > 0.0, s.field("profile"), "must be positive");
    c.coupling = f;
  } else {
    fail(s.field("source"), "expected \"quoted\" or \"formula\"");
  }
  s.finish();
}

void parse_drive(const json& j, ExperimentConfig& c) {
  Section s(j, "drive");
  const bool direct = s.has("g_eff_hz");
  const bool raman = s.has("rabi_over_g") || s.has("raman_detuning_over_g");
  require(!(direct && raman), "drive", "give either g_eff_hz or the Raman ratios, not both");
  if (direct) {
    DirectDrive d{s.required_number("g_eff_hz")};
    require(d.g_eff_hz > 0.0, s.field("g_eff_hz"), "must be positive");
    c.drive = d;
  } else {
    RamanDrive r;
    r.rabi_over_g = s.number("rabi_over_g", r.rabi_over_g);
    r.raman_detuning_over_g = s.number("raman_detuning_over_g", r.raman_detuning_over_g);
    require(r.rabi_over_g > 0.0, s.field("rabi_over_g"), "must be positive");
    require(r.raman_detuning_over_g > 0.0, s.field("raman_detuning_over_g"), "must be positive");
    c.drive = r;
  }
  s.finish();
}

void parse_detuning(const json& j, ExperimentConfig& c) {
  Section s(j, "detuning");
  DetuningGrid& d = c.detuning;
  d.values_over_galpha = s.numbers("values_over_galpha", {});
  d.min_over_galpha = s.number("min_over_galpha", d.min_over_galpha);
  d.max_over_galpha = s.number("max_over_galpha", d.max_over_galpha);
  d.points = s.integer("points", d.points);
  d.headline_over_galpha = s.number("headline_over_galpha", d.headline_over_galpha);
  s.finish();
  require(d.points >= 2, "detuning.points", "must be >= 2");
  require(d.max_over_galpha > d.min_over_galpha, "detuning.max_over_galpha",
          "must exceed min_over_galpha");
  require(d.headline_over_galpha > 0.0, "detuning.headline_over_galpha",
          "must be positive for the dispersive coupling");
}

void parse_sites(const json& j, ExperimentConfig& c) {
  require(j.is_array(), "sites", "expected an array");
  for (std::size_t i = 0; i < j.size(); ++i) {
    Section s(j[i], "sites[" + std::to_string(i) + "]");
    SiteSpec site{s.required_number("position_m"), s.optional_number("g_eff_hz")};
    s.finish();
    require(site.position >= 0.0 && site.position <= c.geometry.total_length,
            s.field("position_m"), "must lie within [0, total_length_m]");
    if (site.g_eff_hz) require(*site.g_eff_hz > 0.0, s.field("g_eff_hz"), "must be positive");
    c.sites.push_back(site);
  }
  require(c.sites.size() <= 12, "sites", "at most 12 sites are supported");
}

void parse_envelope(const json& j, ExperimentConfig& c) {
  Section s(j, "envelope");
  EnvelopeConfig& e = c.envelope;
  e.x0_over_a = s.number("x0_over_a", e.x0_over_a);
  e.half_width_over_lc = s.number("half_width_over_lc", e.half_width_over_lc);
  e.points = s.integer("points", e.points);
  s.finish();
  require(e.half_width_over_lc > 0.0, "envelope.half_width_over_lc", "must be positive");
  require(e.points >= 2, "envelope.points", "must be >= 2");
}

void parse_spinspin(const json& j, ExperimentConfig& c) {
  Section s(j, "spinspin");
  SpinspinConfig& p = c.spinspin;
  p.detunings_over_galpha = s.numbers("detunings_over_galpha", p.detunings_over_galpha);
  p.max_separation_over_a = s.number("max_separation_over_a", p.max_separation_over_a);
  p.points = s.integer("points", p.points);
  p.nearest_neighbour = s.boolean("nearest_neighbour", p.nearest_neighbour);
  s.finish();
  require(!p.detunings_over_galpha.empty(), "spinspin.detunings_over_galpha", "must not be empty");
  for (double d : p.detunings_over_galpha) {
    require(d > 0.0, "spinspin.detunings_over_galpha", "values must be positive");
  }
  require(p.max_separation_over_a > 0.0, "spinspin.max_separation_over_a", "must be positive");
  require(p.points >= 2, "spinspin.points", "must be >= 2");
}

void parse_dynamics(const json& j, ExperimentConfig& c) {
  Section s(j, "dynamics");
  DynamicsConfig& d = c.dynamics;
  d.separation_over_lc = s.number("separation_over_lc", d.separation_over_lc);
  d.points = s.integer("points", d.points);
  d.periods = s.number("periods", d.periods);
  d.alpha = complex_value(s, "alpha", d.alpha);
  d.beta = complex_value(s, "beta", d.beta);
  s.finish();
  require(d.separation_over_lc >= 0.0, "dynamics.separation_over_lc", "must be >= 0");
  require(d.points >= 2, "dynamics.points", "must be >= 2");
  require(d.periods > 0.0, "dynamics.periods", "must be positive");
  require(std::norm(d.alpha) + std::norm(d.beta) > 0.0, "dynamics.alpha",
          "initial amplitudes must not both vanish");
}

void parse_noise(const json& j, ExperimentConfig& c) {
  Section s(j, "noise");
  NoiseConfig& n = c.noise;
  n.gamma_s_over_lambda = s.number("gamma_s_over_lambda", n.gamma_s_over_lambda);
  n.gamma_s = s.optional_number("gamma_s_per_s");
  n.gamma_relax = s.number("gamma_relax_per_s", n.gamma_relax);
  n.quality_factor = s.number("quality_factor", n.quality_factor);
  n.n_th = s.number("n_th", n.n_th);
  const std::string conv = s.string("convention", "sigma_z_half");
  if (conv == "sigma_z_half") n.convention = DephasingConvention::sigma_z_half;
  else if (conv == "excited_projector") n.convention = DephasingConvention::excited_projector;
  else fail(s.field("convention"), "expected \"sigma_z_half\" or \"excited_projector\"");
  n.dephase_both = s.boolean("dephase_both", n.dephase_both);
  n.mechanical_dressing = s.boolean("mechanical_dressing", n.mechanical_dressing);
  s.finish();
  require(n.gamma_s_over_lambda >= 0.0, "noise.gamma_s_over_lambda", "must be >= 0");
  if (n.gamma_s) require(*n.gamma_s >= 0.0, "noise.gamma_s_per_s", "must be >= 0");
  require(n.gamma_relax >= 0.0, "noise.gamma_relax_per_s", "must be >= 0");
  require(n.quality_factor > 0.0, "noise.quality_factor", "must be positive");
  require(n.n_th >= 0.0, "noise.n_th", "must be >= 0");
}

void parse_output(const json& j, ExperimentConfig& c) {
  Section s(j, "output");
  c.output.directory = s.string("directory", c.output.directory);
  const std::string fmt = s.string("format", "csv");
  if (fmt == "csv") c.output.format = OutputFormat::csv;
  else if (fmt == "json") c.output.format = OutputFormat::json;
  else fail(s.field("format"), "expected \"csv\" or \"json\"");
  s.finish();
}

void check_references(const ExperimentConfig& c) {
  for (std::size_t i = 0; i < c.geometry.layers.size(); ++i) {
    const std::string path = "geometry.layers[" + std::to_string(i) + "].material";
    try {
      validate(c.material(c.geometry.layers[i].material));
    } catch (const ConfigError& e) {
      fail(path, e.what());
    } catch (const ValidationError& e) {
      fail(path, e.what());
    }
  }
  if (std::holds_alternative<TransferMatrixBand>(c.band) && c.geometry.layers.empty()) {
    fail("band.source", "transfer_matrix requires geometry.layers");
  }
  if (const auto* f = std::get_if<FormulaCoupling>(&c.coupling)) {
    try {
      c.material(f->material);
    } catch (const ConfigError& e) {
      fail("coupling.material", e.what());
    }
  }
}

std::string position_message(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

double GeometryConfig::period() const {
  if (layers.empty()) return lattice_constant.value_or(0.0);
  double sum = 0.0;
  for (const LayerSpec& l : layers) sum += l.thickness;
  return sum;
}

std::vector<double> DetuningGrid::grid() const {
  if (!values_over_galpha.empty()) return values_over_galpha;
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] =
        min_over_galpha + (max_over_galpha - min_over_galpha) * i / (points - 1);
  }
  return out;
}

SivParams SivConfig::params() const {
  SivParams p;
  p.lambda_so = hz_to_angular(lambda_so_hz);
  p.jt_shift_x = hz_to_angular(jt_shift_x_hz);
  p.jt_shift_y = hz_to_angular(jt_shift_y_hz);
  p.b_field = b_field_t;
  p.gamma_spin = hz_to_angular(gamma_spin_hz_per_t);
  p.gamma_orbital = hz_to_angular(gamma_orbital_hz_per_t);
  return p;
}

StrainSusceptibilities SivConfig::susceptibilities() const {
  return {hz_to_angular(d_hz), hz_to_angular(f_hz), hz_to_angular(t_perp_hz),
          hz_to_angular(t_par_hz)};
}

Material ExperimentConfig::material(const std::string& name) const {
  if (auto it = materials.find(name); it != materials.end()) return it->second;
  if (auto preset = preset_material(name)) return *preset;
  throw ConfigError("unknown material \"" + name + "\"");
}

LatticeGeometry ExperimentConfig::lattice() const {
  LatticeGeometry g;
  for (const LayerSpec& l : geometry.layers) g.layers.push_back({material(l.material), l.thickness});
  g.cross_section = geometry.cross_section;
  g.total_length = geometry.total_length;
  g.speed_model = geometry.speed_model;
  return g;
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.geometry.lattice_constant = 150e-9;
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
  if (blank) {
    j = json::object();
  } else {
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("config parse error at " + position_message(text, e.byte) + ": " +
                        e.what());
    }
  }
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  if (!j.contains("geometry")) throw ConfigError("missing required section: geometry");

  ExperimentConfig c;
  Section top(j, "config");
  static const char* const sections[] = {"geometry", "materials", "band",     "siv",
                                         "coupling", "drive",     "detuning", "sites",
                                         "envelope", "spinspin",  "dynamics", "noise",
                                         "output"};
  for (const char* name : sections) top.find(name);
  top.finish();

  // Materials first so that layers can refer to user-defined names.
  if (j.contains("materials")) parse_materials(j["materials"], c);
  parse_geometry(j["geometry"], c);
  if (j.contains("band")) parse_band(j["band"], c);
  if (j.contains("siv")) parse_siv(j["siv"], c);
  if (j.contains("coupling")) parse_coupling(j["coupling"], c);
  if (j.contains("drive")) parse_drive(j["drive"], c);
  if (j.contains("detuning")) parse_detuning(j["detuning"], c);
  if (j.contains("sites")) parse_sites(j["sites"], c);
  if (j.contains("envelope")) parse_envelope(j["envelope"], c);
  if (j.contains("spinspin")) parse_spinspin(j["spinspin"], c);
  if (j.contains("dynamics")) parse_dynamics(j["dynamics"], c);
  if (j.contains("noise")) parse_noise(j["noise"], c);
  if (j.contains("output")) parse_output(j["output"], c);
  check_references(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  ordered_json& g = j["geometry"];
  if (c.geometry.lattice_constant) g["lattice_constant_m"] = *c.geometry.lattice_constant;
  g["cross_section_m2"] = c.geometry.cross_section;
  g["total_length_m"] = c.geometry.total_length;
  g["speed_model"] = speed_model_name(c.geometry.speed_model);
  if (!c.geometry.layers.empty()) {
    ordered_json layers = ordered_json::array();
    for (const LayerSpec& l : c.geometry.layers) {
      layers.push_back({{"material", l.material}, {"thickness_m", l.thickness}});
    }
    g["layers"] = layers;
  }
  if (!c.materials.empty()) {
    ordered_json& m = j["materials"];
    for (const auto& [name, mat] : c.materials) {
      m[name] = {{"youngs_modulus_pa", mat.youngs_modulus},
                 {"poisson_ratio", mat.poisson_ratio},
                 {"density_kg_m3", mat.density}};
    }
  }
  if (const auto* o = std::get_if<BandOverride>(&c.band)) {
    j["band"] = {{"source", "override"}, {"omega_be_hz", o->omega_be_hz}, {"alpha_hz", o->alpha_hz}};
  } else {
    const auto& t = std::get<TransferMatrixBand>(c.band);
    j["band"] = {{"source", "transfer_matrix"},
                 {"band_index", t.band_index},
                 {"k_points", t.k_points},
                 {"fit_fraction", t.fit_fraction},
                 {"fit_tolerance", t.fit_tolerance}};
  }
  const SivConfig& v = c.siv;
  j["siv"] = {{"lambda_so_hz", v.lambda_so_hz},
              {"jt_shift_x_hz", v.jt_shift_x_hz},
              {"jt_shift_y_hz", v.jt_shift_y_hz},
              {"b_field_t", v.b_field_t},
              {"gamma_spin_hz_per_t", v.gamma_spin_hz_per_t},
              {"gamma_orbital_hz_per_t", v.gamma_orbital_hz_per_t},
              {"d_hz", v.d_hz},
              {"f_hz", v.f_hz},
              {"t_perp_hz", v.t_perp_hz},
              {"t_par_hz", v.t_par_hz}};
  if (const auto* q = std::get_if<QuotedCoupling>(&c.coupling)) {
    j["coupling"] = {{"source", "quoted"}, {"g_hz", q->g_hz}};
  } else {
    const auto& f = std::get<FormulaCoupling>(c.coupling);
    j["coupling"] = {{"source", "formula"},
                     {"material", f.material},
                     {"normalization", normalization_name(f.normalization)},
                     {"profile", f.profile}};
  }
  if (const auto* r = std::get_if<RamanDrive>(&c.drive)) {
    j["drive"] = {{"rabi_over_g", r->rabi_over_g},
                  {"raman_detuning_over_g", r->raman_detuning_over_g}};
  } else {
    j["drive"] = {{"g_eff_hz", std::get<DirectDrive>(c.drive).g_eff_hz}};
  }
  ordered_json& d = j["detuning"];
  if (!c.detuning.values_over_galpha.empty()) d["values_over_galpha"] = c.detuning.values_over_galpha;
  d["min_over_galpha"] = c.detuning.min_over_galpha;
  d["max_over_galpha"] = c.detuning.max_over_galpha;
  d["points"] = c.detuning.points;
  d["headline_over_galpha"] = c.detuning.headline_over_galpha;
  if (!c.sites.empty()) {
    ordered_json sites = ordered_json::array();
    for (const SiteSpec& s : c.sites) {
      ordered_json e = {{"position_m", s.position}};
      if (s.g_eff_hz) e["g_eff_hz"] = *s.g_eff_hz;
      sites.push_back(e);
    }
    j["sites"] = sites;
  }
  j["envelope"] = {{"x0_over_a", c.envelope.x0_over_a},
                   {"half_width_over_lc", c.envelope.half_width_over_lc},
                   {"points", c.envelope.points}};
  j["spinspin"] = {{"detunings_over_galpha", c.spinspin.detunings_over_galpha},
                   {"max_separation_over_a", c.spinspin.max_separation_over_a},
                   {"points", c.spinspin.points},
                   {"nearest_neighbour", c.spinspin.nearest_neighbour}};
  j["dynamics"] = {{"separation_over_lc", c.dynamics.separation_over_lc},
                   {"points", c.dynamics.points},
                   {"periods", c.dynamics.periods},
                   {"alpha", {c.dynamics.alpha.real(), c.dynamics.alpha.imag()}},
                   {"beta", {c.dynamics.beta.real(), c.dynamics.beta.imag()}}};
  ordered_json& n = j["noise"];
  n["gamma_s_over_lambda"] = c.noise.gamma_s_over_lambda;
  if (c.noise.gamma_s) n["gamma_s_per_s"] = *c.noise.gamma_s;
  n["gamma_relax_per_s"] = c.noise.gamma_relax;
  n["quality_factor"] = c.noise.quality_factor;
  n["n_th"] = c.noise.n_th;
  n["convention"] = convention_name(c.noise.convention);
  n["dephase_both"] = c.noise.dephase_both;
  n["mechanical_dressing"] = c.noise.mechanical_dressing;
  j["output"] = {{"directory", c.output.directory},
                 {"format", c.output.format == OutputFormat::csv ? "csv" : "json"}};
  return j;
}

}  // namespace spinphonon
