#include "spinphonon/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "spinphonon/dynamics.hpp"
#include "spinphonon/error.hpp"
#include "spinphonon/spinspin.hpp"
#include "spinphonon/units.hpp"

#ifndef SPINPHONON_VERSION
#define SPINPHONON_VERSION "0.0.0"
#endif

namespace spinphonon {

using nlohmann::ordered_json;

namespace {

// Re-throws module errors with the stage name in front, preserving the type.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(name) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(name) + ": " + e.what());
  }
}

double resolve_g(const ExperimentConfig& cfg, double omega_be) {
  if (const auto* q = std::get_if<QuotedCoupling>(&cfg.coupling)) return hz_to_angular(q->g_hz);
  const auto& f = std::get<FormulaCoupling>(cfg.coupling);
  const Material mat = cfg.material(f.material);
  BareCouplingInput in;
  in.sound_speed = sound_speed(mat, cfg.geometry.speed_model);
  in.omega_be = omega_be;
  in.density = mat.density;
  in.period = cfg.geometry.period();
  in.cross_section = cfg.geometry.cross_section;
  in.profile = f.profile;
  in.normalization = f.normalization;
  return bare_coupling_g(cfg.siv.susceptibilities(), in);
}

}  // namespace

PhysicsChain resolve_chain(const ExperimentConfig& cfg) {
  PhysicsChain chain;
  const double a = cfg.geometry.period();
  double omega_be = 0.0, alpha = 0.0;
  if (const auto* o = std::get_if<BandOverride>(&cfg.band)) {
    omega_be = hz_to_angular(o->omega_be_hz);
    alpha = hz_to_angular(o->alpha_hz);
  } else {
    const auto& t = std::get<TransferMatrixBand>(cfg.band);
    chain.fitted_edge = stage("bandstructure", [&] {
      const LatticeGeometry g = cfg.lattice();
      const std::vector<Band> bands = solve_bands(g, t.band_index, t.k_points);
      const BandEdge edge =
          fit_band_edge(bands.back(), a, edge_window_samples(t.k_points, t.fit_fraction),
                        std::nullopt, t.fit_tolerance);
      if (!edge.within_tolerance) {
        std::ostringstream msg;
        msg << "quadratic band-edge fit residual " << edge.fit_residual << " exceeds "
            << t.fit_tolerance;
        throw NumericalError(msg.str());
      }
      return edge;
    });
    omega_be = chain.fitted_edge->omega_be;
    alpha = chain.fitted_edge->alpha;
  }
  chain.band = stage("boundstate", [&] {
    return make_band_edge_model(omega_be, alpha, a, cfg.geometry.cross_section);
  });
  chain.g = stage("siv", [&] { return resolve_g(cfg, omega_be); });
  chain.siv_splitting = stage("siv", [&] { return siv_eigensystem(cfg.siv.params()).delta; });

  if (const auto* r = std::get_if<RamanDrive>(&cfg.drive)) {
    chain.raman = stage("raman", [&] {
      return raman_chain(chain.g, r->rabi_over_g * chain.g, r->raman_detuning_over_g * chain.g,
                         chain.siv_splitting, omega_be);
    });
    chain.g_eff = chain.raman->g_eff;
  } else {
    chain.g_eff = hz_to_angular(std::get<DirectDrive>(cfg.drive).g_eff_hz);
  }
  chain.g_alpha = g_alpha(chain.g_eff, alpha);
  return chain;
}

std::optional<BareCouplingPair> bare_coupling_pair(const ExperimentConfig& cfg, double omega_be) {
  std::string name = "diamond";
  if (const auto* f = std::get_if<FormulaCoupling>(&cfg.coupling)) name = f->material;
  else if (!cfg.geometry.layers.empty()) name = cfg.geometry.layers.front().material;
  const Material mat = cfg.material(name);
  BareCouplingInput in;
  in.sound_speed = sound_speed(mat, cfg.geometry.speed_model);
  in.omega_be = omega_be;
  in.density = mat.density;
  in.period = cfg.geometry.period();
  in.cross_section = cfg.geometry.cross_section;
  if (const auto* f = std::get_if<FormulaCoupling>(&cfg.coupling)) in.profile = f->profile;
  const StrainSusceptibilities s = cfg.siv.susceptibilities();
  BareCouplingPair out;
  in.normalization = CouplingNormalization::two_pi;
  out.two_pi = bare_coupling_g(s, in);
  in.normalization = CouplingNormalization::pi;
  out.pi = bare_coupling_g(s, in);
  return out;
}

HeadlineNumbers compute_headline(const ExperimentConfig& cfg) {
  HeadlineNumbers h;
  h.chain = resolve_chain(cfg);
  const double dbe = cfg.detuning.headline_over_galpha * h.chain.g_alpha;
  h.bound_state =
      stage("boundstate", [&] { return solve_bound_state(h.chain.band, h.chain.g_eff, dbe); });
  h.lambda_eff = stage("spinspin", [&] { return lambda_eff(h.bound_state.g_c, dbe); });
  h.tau_epr = kPi / (4.0 * h.lambda_eff);
  h.bare = stage("siv", [&] { return bare_coupling_pair(cfg, h.chain.band.omega_be); });
  return h;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

ordered_json to_json(const Table& t) {
  ordered_json j;
  j["columns"] = t.columns;
  j["rows"] = t.rows;
  return j;
}

std::optional<Command> parse_command(std::string_view name) {
  if (name == "bands") return Command::bands;
  if (name == "boundstate") return Command::boundstate;
  if (name == "spinspin") return Command::spinspin;
  if (name == "dynamics") return Command::dynamics;
  if (name == "headline") return Command::headline;
  return std::nullopt;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::bands: return "bands";
    case Command::boundstate: return "boundstate";
    case Command::spinspin: return "spinspin";
    case Command::dynamics: return "dynamics";
    case Command::headline: return "headline";
  }
  return "?";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

const char* tool_version() { return SPINPHONON_VERSION; }

ordered_json RunManifest::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["tool_version"] = tool_version;
  j["timestamp"] = timestamp;
  j["files"] = ordered_json::array();
  for (const EmittedFile& f : files) {
    j["files"].push_back({{"name", f.name}, {"fnv1a", f.fnv1a}, {"bytes", f.bytes}});
  }
  return j;
}

namespace {

class Emitter {
 public:
  Emitter(std::filesystem::path dir, OutputFormat format) : dir_(std::move(dir)), format_(format) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void table(const std::string& stem, const Table& t) {
    if (format_ == OutputFormat::csv) write(stem + ".csv", to_csv(t));
    else write(stem + ".json", spinphonon::to_json(t).dump(2) + "\n");
  }

  void json(const std::string& name, const ordered_json& j) { write(name, j.dump(2) + "\n"); }

  void write(const std::string& name, const std::string& body) {
    const std::filesystem::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << body;
    if (!out) throw ConfigError("write failed for " + p.string());
    files_.push_back({name, hex64(fnv1a64(body)), body.size()});
  }

  const std::vector<EmittedFile>& files() const { return files_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  OutputFormat format_;
  std::vector<EmittedFile> files_;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double to_hz(double w) { return angular_to_hz(w); }

void run_bands(const ExperimentConfig& cfg, Emitter& out) {
  if (cfg.geometry.layers.empty()) {
    throw ConfigError("geometry.layers: the bands command needs a layered unit cell");
  }
  TransferMatrixBand t;
  if (const auto* tb = std::get_if<TransferMatrixBand>(&cfg.band)) t = *tb;
  const LatticeGeometry g = cfg.lattice();
  const int n_bands = std::max(t.band_index + 1, 4);
  const std::vector<Band> bands =
      stage("bandstructure", [&] { return solve_bands(g, n_bands, t.k_points); });
  const double a = g.period();
  Table table{{"band_index", "k_over_pi_a", "omega_over_2pi_Hz"}, {}};
  for (const Band& b : bands) {
    for (const BandSample& s : b.samples) {
      table.rows.push_back({static_cast<double>(b.index), s.k * a / kPi, to_hz(s.omega)});
    }
  }
  out.table("bands", table);

  ordered_json edges = ordered_json::array();
  for (std::size_t i = 0; i + 1 < bands.size(); ++i) {
    // Gap between consecutive bands at the zone edge.
    const double lower = bands[i].samples.back().omega;
    const double upper = bands[i + 1].samples.back().omega;
    ordered_json e = {{"band", bands[i].index},
                      {"edge_omega_over_2pi_hz", to_hz(lower)},
                      {"gap_at_zone_edge_hz", to_hz(upper - lower)}};
    try {
      const BandEdge fit = fit_band_edge(bands[i], a, edge_window_samples(t.k_points, t.fit_fraction),
                                         std::nullopt, t.fit_tolerance);
      e["fit"] = {{"omega_be_hz", to_hz(fit.omega_be)},
                  {"k0", fit.k0},
                  {"alpha_hz", to_hz(fit.alpha)},
                  {"residual", fit.fit_residual},
                  {"within_tolerance", fit.within_tolerance}};
    } catch (const ValidationError& err) {
      e["fit"] = {{"skipped", err.what()}};
    }
    edges.push_back(e);
  }
  out.json("band_edges.json", {{"lattice_constant_m", a}, {"edges", edges}});
}

void run_boundstate(const ExperimentConfig& cfg, const RunOptions& opt, Emitter& out) {
  const PhysicsChain chain = resolve_chain(cfg);
  const std::vector<double> grid = cfg.detuning.grid();
  const auto states = stage("boundstate", [&] {
    return parallel_map<BoundState>(grid.size(), opt.jobs, [&](std::size_t i) {
      return solve_bound_state(chain.band, chain.g_eff, grid[i] * chain.g_alpha);
    });
  });
  Table table{{"dbe_over_galpha", "omega_b_minus_be_over_galpha", "p_e", "lc_over_a",
               "gc_over_2pi_hz"},
              {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const BoundState& bs = states[i];
    table.rows.push_back({grid[i], bs.gap_offset / chain.g_alpha, bs.p_e,
                          bs.l_c / chain.band.period, to_hz(bs.g_c)});
  }
  out.table("boundstate", table);

  const BoundState bs = stage("boundstate", [&] {
    return solve_bound_state(chain.band, chain.g_eff,
                             cfg.detuning.headline_over_galpha * chain.g_alpha);
  });
  const double a = chain.band.period;
  const double x0 = cfg.envelope.x0_over_a * a;
  const double half = cfg.envelope.half_width_over_lc * bs.l_c;
  const int n = cfg.envelope.points;
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = x0 - half + 2.0 * half * i / (n - 1);
  const double peak = envelope(x0, x0, bs, chain.band);
  Table env{{"x_over_a", "amplitude_normalized"}, {}};
  std::vector<double> summed;
  if (opt.oracle) {
    env.columns.push_back("amplitude_mode_sum_normalized");
    summed = parallel_map<double>(xs.size(), opt.jobs, [&](std::size_t i) {
      return envelope_by_mode_sum(xs[i], x0, bs, chain.band) / peak;
    });
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<double> row{xs[i] / a, envelope(xs[i], x0, bs, chain.band) / peak};
    if (opt.oracle) row.push_back(summed[i]);
    env.rows.push_back(std::move(row));
  }
  out.table("envelope", env);
}

void run_spinspin(const ExperimentConfig& cfg, const RunOptions& opt, Emitter& out) {
  const PhysicsChain chain = resolve_chain(cfg);
  const double a = chain.band.period;
  const SpinspinConfig& sc = cfg.spinspin;
  Table table{{"separation_over_a", "j_over_2pi_hz", "detuning_over_galpha"}, {}};
  if (opt.oracle) table.columns.push_back("j_oracle_over_2pi_hz");

  for (double d : sc.detunings_over_galpha) {
    const double dbe = d * chain.g_alpha;
    const BoundState bs =
        stage("boundstate", [&] { return solve_bound_state(chain.band, chain.g_eff, dbe); });
    const double lam = stage("spinspin", [&] { return lambda_eff(bs.g_c, dbe); });
    const SpinSite origin{0.0, chain.g_eff};
    std::vector<double> seps(static_cast<std::size_t>(sc.points));
    for (int i = 0; i < sc.points; ++i) {
      seps[static_cast<std::size_t>(i)] = sc.max_separation_over_a * a * i / (sc.points - 1);
    }
    std::vector<double> oracle;
    if (opt.oracle) {
      oracle = stage("spinspin", [&] {
        return parallel_map<double>(seps.size(), opt.jobs, [&](std::size_t i) {
          // Deep in the tail J is a cancellation of O(1) oscillating panels,
          // so the relative accuracy there is set by rounding, not the rule.
          return coupling_j_oracle(origin, {seps[i], chain.g_eff}, bs.omega_s, chain.band, 1e-6)
              .value;
        });
      });
    }
    for (std::size_t i = 0; i < seps.size(); ++i) {
      std::vector<double> row{seps[i] / a, to_hz(coupling_j(origin, {seps[i], chain.g_eff}, lam, bs.l_c)), d};
      if (opt.oracle) row.push_back(to_hz(oracle[i]));
      table.rows.push_back(std::move(row));
    }
  }
  out.table("spinspin", table);

  if (!cfg.sites.empty()) {
    const BoundState bs = stage("boundstate", [&] {
      return solve_bound_state(chain.band, chain.g_eff,
                               cfg.detuning.headline_over_galpha * chain.g_alpha);
    });
    std::vector<SpinSite> sites;
    for (const SiteSpec& s : cfg.sites) {
      sites.push_back({s.position, s.g_eff_hz ? hz_to_angular(*s.g_eff_hz) : chain.g_eff});
    }
    CouplingMatrix cm = stage("spinspin", [&] {
      return build_coupling_matrix(sites, bs, cfg.geometry.total_length);
    });
    if (sc.nearest_neighbour) {
      for (Eigen::Index i = 0; i < cm.j.rows(); ++i) {
        for (Eigen::Index k = 0; k < cm.j.cols(); ++k) {
          if (std::abs(i - k) > 1) cm.j(i, k) = 0.0;
        }
      }
    }
    const Eigen::MatrixXcd h = build_spin_hamiltonian(sites.size(), cm);
    const Eigen::MatrixXcd block = single_excitation_block(h, sites.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block, Eigen::EigenvaluesOnly);
    ordered_json j;
    j["detuning_over_galpha"] = cfg.detuning.headline_over_galpha;
    j["lambda_eff_over_2pi_hz"] = to_hz(cm.lambda_eff);
    j["lc_over_a"] = cm.l_c / a;
    j["nearest_neighbour"] = sc.nearest_neighbour;
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < cm.j.rows(); ++i) {
      std::vector<double> row;
      for (Eigen::Index k = 0; k < cm.j.cols(); ++k) row.push_back(to_hz(cm.j(i, k)));
      rows.push_back(row);
    }
    j["j_over_2pi_hz"] = rows;
    std::vector<double> levels;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) levels.push_back(to_hz(es.eigenvalues()(i)));
    j["single_excitation_levels_over_2pi_hz"] = levels;
    out.json("coupling_matrix.json", j);
  }
}

void run_dynamics(const ExperimentConfig& cfg, const RunOptions& opt, Emitter& out) {
  const PhysicsChain chain = resolve_chain(cfg);
  const double dbe = cfg.detuning.headline_over_galpha * chain.g_alpha;
  const BoundState bs =
      stage("boundstate", [&] { return solve_bound_state(chain.band, chain.g_eff, dbe); });
  const double lam = stage("spinspin", [&] { return lambda_eff(bs.g_c, dbe); });
  const double sep = opt.separation_over_lc.value_or(cfg.dynamics.separation_over_lc);
  if (!(sep >= 0.0)) throw ConfigError("--separation-lc: must be >= 0");
  const double j12 = lam * std::exp(-sep);

  NoiseModel noise;
  const double ratio = opt.gamma_s_over_lambda.value_or(cfg.noise.gamma_s_over_lambda);
  if (!(ratio >= 0.0)) throw ConfigError("--gamma-s-over-lambda: must be >= 0");
  noise.gamma_s = (cfg.noise.gamma_s && !opt.gamma_s_over_lambda) ? *cfg.noise.gamma_s : ratio * lam;
  noise.gamma_relax = cfg.noise.gamma_relax;
  noise.gamma_m = chain.band.omega_be / cfg.noise.quality_factor;
  noise.n_th = cfg.noise.n_th;
  noise.convention = cfg.noise.convention;
  noise.dephase_both = cfg.noise.dephase_both;
  noise.mechanical_dressing = cfg.noise.mechanical_dressing;
  noise.sin2_theta = 1.0 - bs.p_e;

  const DynamicsConfig& dc = cfg.dynamics;
  const Ket2 psi0 = product_ket(dc.alpha, dc.beta, 0.0, 1.0).normalized();
  const Ket2 target = state_transfer_target(dc.alpha, dc.beta).normalized();
  const std::vector<double> times = default_time_grid(j12, dc.points, dc.periods);
  const std::vector<DensityMatrix> traj = stage("dynamics", [&] {
    return lindblad_evolve(exchange_hamiltonian(j12), noise, DensityMatrix::from_ket(psi0), times);
  });
  Table table{{"t_us", "pop_ge", "pop_eg", "concurrence", "fidelity"}, {}};
  for (std::size_t i = 0; i < times.size(); ++i) {
    table.rows.push_back({times[i] * 1e6, traj[i].population(kGE), traj[i].population(kEG),
                          concurrence(traj[i]), transfer_fidelity(traj[i], target)});
  }
  out.table("dynamics", table);
}

ordered_json headline_json(const HeadlineNumbers& h, const ExperimentConfig& cfg) {
  const BoundState& bs = h.bound_state;
  const PhysicsChain& c = h.chain;
  ordered_json j;
  j["g_over_2pi_hz"] = to_hz(c.g);
  j["g_eff_over_2pi_hz"] = to_hz(c.g_eff);
  j["omega_be_over_2pi_hz"] = to_hz(c.band.omega_be);
  j["alpha_over_2pi_hz"] = to_hz(c.band.alpha);
  j["g_alpha_over_2pi_hz"] = to_hz(c.g_alpha);
  j["detuning_be_over_galpha"] = cfg.detuning.headline_over_galpha;
  j["omega_b_minus_be_over_galpha"] = bs.gap_offset / c.g_alpha;
  j["p_e"] = bs.p_e;
  j["lc_over_a"] = bs.l_c / c.band.period;
  j["v_eff_m3"] = bs.v_eff;
  j["g_c_over_2pi_hz"] = to_hz(bs.g_c);
  j["delta_b_over_2pi_hz"] = to_hz(bs.delta_b);
  j["delta_e_over_2pi_hz"] = to_hz(bs.delta_e);
  j["lambda_eff_over_2pi_hz"] = to_hz(h.lambda_eff);
  j["tau_epr_s"] = h.tau_epr;
  j["tau_epr_below_1us"] = h.tau_epr <= 1e-6;
  j["siv_splitting_over_2pi_hz"] = to_hz(c.siv_splitting);
  if (h.bare) {
    j["bare_coupling"] = {{"two_pi_normalized_over_2pi_hz", to_hz(h.bare->two_pi)},
                          {"pi_normalized_over_2pi_hz", to_hz(h.bare->pi)}};
  }
  if (c.fitted_edge) {
    j["band_fit"] = {{"omega_be_over_2pi_hz", to_hz(c.fitted_edge->omega_be)},
                     {"alpha_over_2pi_hz", to_hz(c.fitted_edge->alpha)},
                     {"fit_residual", c.fitted_edge->fit_residual}};
  }
  if (c.raman) {
    j["raman"] = {{"rabi_over_2pi_hz", to_hz(c.raman->rabi)},
                  {"raman_detuning_over_2pi_hz", to_hz(c.raman->raman_detuning)},
                  {"delta_be_over_2pi_hz", to_hz(c.raman->delta_be)},
                  {"dispersive", c.raman->dispersive},
                  {"warnings", c.raman->warnings}};
  }
  return j;
}

}  // namespace

RunManifest run_pipeline(const ExperimentConfig& cfg, Command command, const RunOptions& opt) {
  if (opt.jobs < 1) throw ConfigError("--jobs: must be >= 1");
  const std::filesystem::path dir =
      opt.out_dir.empty() ? std::filesystem::path(cfg.output.directory) : opt.out_dir;
  Emitter out(dir, opt.format.value_or(cfg.output.format));
  switch (command) {
    case Command::bands: run_bands(cfg, out); break;
    case Command::boundstate: run_boundstate(cfg, opt, out); break;
    case Command::spinspin: run_spinspin(cfg, opt, out); break;
    case Command::dynamics: run_dynamics(cfg, opt, out); break;
    case Command::headline: out.json("headline.json", headline_json(compute_headline(cfg), cfg)); break;
  }
  RunManifest m;
  m.command = command_name(command);
  m.config_hash = hex64(fnv1a64(to_json(cfg).dump()));
  m.tool_version = tool_version();
  m.timestamp = utc_timestamp();
  m.files = out.files();
  const std::string body = m.to_json().dump(2) + "\n";
  std::ofstream mf(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!mf) throw ConfigError("cannot write " + (dir / "manifest.json").string());
  mf << body;
  return m;
}

}  // namespace spinphonon
