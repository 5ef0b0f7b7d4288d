#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spinphonon/config.hpp"
#include "spinphonon/error.hpp"
#include "spinphonon/pipeline.hpp"
#include "spinphonon/units.hpp"

using namespace spinphonon;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spinphonon_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::vector<std::string>* header) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  if (header) {
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header->push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

RunOptions to(const fs::path& dir) {
  RunOptions o;
  o.out_dir = dir;
  return o;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("number formatting and hashing") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
    CHECK(parse_command("headline") == Command::headline);
    CHECK_FALSE(parse_command("plot").has_value());
  }

  TEST_CASE("parallel_map keeps order and propagates errors") {
    const auto squares =
        parallel_map<double>(50, 4, [](std::size_t i) { return static_cast<double>(i * i); });
    for (std::size_t i = 0; i < 50; ++i) CHECK(squares[i] == static_cast<double>(i * i));
    CHECK_THROWS_AS(parallel_map<double>(10, 3,
                                         [](std::size_t i) -> double {
                                           if (i == 7) throw NumericalError("seven");
                                           return 0.0;
                                         }),
                    NumericalError);
  }

  TEST_CASE("headline chain with defaults") {
    const HeadlineNumbers h = compute_headline(default_config());
    CHECK(angular_to_hz(h.bound_state.g_c) == doctest::Approx(21.2e6).epsilon(0.02));
    CHECK(angular_to_hz(h.lambda_eff) == doctest::Approx(1.27e6).epsilon(0.02));
    CHECK(h.tau_epr < 1e-6);
    CHECK(h.tau_epr == doctest::Approx(98.7e-9).epsilon(1e-3));
    REQUIRE(h.bare.has_value());
    CHECK(h.bare->pi / h.bare->two_pi == doctest::Approx(std::sqrt(2.0)));
    REQUIRE(h.chain.raman.has_value());
    CHECK(h.chain.raman->dispersive);

    const fs::path dir = scratch("headline");
    const RunManifest m = run_pipeline(default_config(), Command::headline, to(dir));
    REQUIRE(m.files.size() == 1);
    const auto j = nlohmann::json::parse(slurp(dir / "headline.json"));
    CHECK(j["g_c_over_2pi_hz"].get<double>() == doctest::Approx(21.2216e6).epsilon(1e-4));
    CHECK(j["tau_epr_below_1us"].get<bool>());
    CHECK(fs::exists(dir / "manifest.json"));
    fs::remove_all(dir);
  }

  TEST_CASE("boundstate sweep has 200 rows and a monotone localization length") {
    const fs::path dir = scratch("boundstate");
    run_pipeline(default_config(), Command::boundstate, to(dir));
    std::vector<std::string> header;
    const auto rows = read_csv(dir / "boundstate.csv", &header);
    CHECK(header == std::vector<std::string>{"dbe_over_galpha", "omega_b_minus_be_over_galpha",
                                             "p_e", "lc_over_a", "gc_over_2pi_hz"});
    REQUIRE(rows.size() == 200);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][3] < rows[i - 1][3]);
    const auto env = read_csv(dir / "envelope.csv", nullptr);
    CHECK(env.size() == 201);
    CHECK(env[100][1] == doctest::Approx(1.0));
    fs::remove_all(dir);
  }

  TEST_CASE("identical configs give byte-identical data files") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    RunOptions oa = to(a), ob = to(b);
    ob.jobs = 3;
    for (Command c : {Command::boundstate, Command::spinspin, Command::dynamics, Command::headline}) {
      const RunManifest ma = run_pipeline(default_config(), c, oa);
      const RunManifest mb = run_pipeline(default_config(), c, ob);
      REQUIRE(ma.files.size() == mb.files.size());
      CHECK(ma.config_hash == mb.config_hash);
      for (std::size_t i = 0; i < ma.files.size(); ++i) {
        CHECK(ma.files[i].fnv1a == mb.files[i].fnv1a);
        CHECK(slurp(a / ma.files[i].name) == slurp(b / mb.files[i].name));
      }
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("spinspin with the oracle column") {
    const fs::path dir = scratch("spinspin");
    RunOptions o = to(dir);
    o.oracle = true;
    run_pipeline(default_config(), Command::spinspin, o);
    std::vector<std::string> header;
    const auto rows = read_csv(dir / "spinspin.csv", &header);
    CHECK(header.back() == "j_oracle_over_2pi_hz");
    CHECK(rows.size() == 3 * 121);
    for (const auto& r : rows) {
      if (r[0] * 150e-9 > 3 * 4.5 * 150e-9) continue;
      CHECK(r[1] > 0.0);
    }
    fs::remove_all(dir);
  }

  TEST_CASE("dynamics columns and overrides") {
    const fs::path dir = scratch("dynamics");
    RunOptions o = to(dir);
    o.separation_over_lc = 1.5;
    o.gamma_s_over_lambda = 0.0;
    run_pipeline(default_config(), Command::dynamics, o);
    std::vector<std::string> header;
    const auto rows = read_csv(dir / "dynamics.csv", &header);
    CHECK(header == std::vector<std::string>{"t_us", "pop_ge", "pop_eg", "concurrence", "fidelity"});
    REQUIRE(rows.size() == 400);
    double best = 0.0;
    for (const auto& r : rows) best = std::max(best, r[3]);
    CHECK(best == doctest::Approx(1.0).epsilon(1e-3));
    fs::remove_all(dir);
  }

  TEST_CASE("bands from a layered config, JSON tables") {
    const std::string text = R"({
      "geometry": {"cross_section_m2": 2e-15, "total_length_m": 1e-4,
                   "layers": [{"material": "diamond", "thickness_m": 7.5e-8},
                              {"material": "silicon", "thickness_m": 7.5e-8}]},
      "band": {"source": "transfer_matrix", "k_points": 101},
      "output": {"format": "json"}})";
    const ExperimentConfig cfg = parse_config(text);
    const fs::path dir = scratch("bands");
    run_pipeline(cfg, Command::bands, to(dir));
    const auto j = nlohmann::json::parse(slurp(dir / "bands.json"));
    CHECK(j["columns"].size() == 3);
    CHECK(j["rows"].size() == 4 * 101);
    const auto edges = nlohmann::json::parse(slurp(dir / "band_edges.json"));
    CHECK(edges["edges"][0]["gap_at_zone_edge_hz"].get<double>() > 0.0);
    const HeadlineNumbers h = compute_headline(cfg);
    REQUIRE(h.chain.fitted_edge.has_value());
    CHECK(h.chain.fitted_edge->within_tolerance);
    fs::remove_all(dir);
  }

  TEST_CASE("errors carry their stage") {
    ExperimentConfig cfg = default_config();
    cfg.siv.lambda_so_hz = 40e9;  // puts the spin transition below the band edge
    CHECK_THROWS_WITH_AS(compute_headline(cfg), doctest::Contains("raman:"), ValidationError);
    const fs::path dir = scratch("errors");
    CHECK_THROWS_AS(run_pipeline(default_config(), Command::bands, to(dir)), ConfigError);
    fs::remove_all(dir);
  }
}
