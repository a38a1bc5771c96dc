#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rydcav/cli.hpp"
#include "rydcav/config.hpp"
#include "rydcav/csv.hpp"

using namespace rydcav;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("rydcav_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

int run(const std::string& cmd, const CommandOptions& o, std::string* err_text = nullptr) {
  std::ostringstream log, err;
  const int code = run_command(cmd, o, log, err);
  if (err_text) *err_text = err.str();
  return code;
}

const char* kRabi =
    "omega = 20\ng = 10\ndelta_e = 200\ngamma_e = 1\ngamma_r = 0.01\nkappa = 0.5\n"
    "t_end = 1\n";

const char* kMcwf =
    "omega = 4\ng = 1\ndelta_e = 10\ngamma_e = 1\ngamma_r = 0.2\nkappa = 0.2\n"
    "alpha = 1\ncutoff = 6\ntail_tolerance = 1e-3\nt_end = 1\ndt = 1e-3\n"
    "sample_interval = 0.1\ntraces = 40\nseed = 3\n";

}  // namespace

TEST_CASE("rabi writes both trajectories and a reproducing manifest") {
  TempDir tmp("rabi");
  CommandOptions o;
  o.config = write(tmp.path / "rabi.cfg", kRabi);
  o.out = tmp.path / "a";
  REQUIRE(run("rabi", o) == kExitOk);
  const auto full = read_csv(slurp(tmp.path / "a" / "rabi_full.csv"));
  const auto red = read_csv(slurp(tmp.path / "a" / "rabi_adiabatic.csv"));
  CHECK(full.rows.size() == 101);
  CHECK(red.rows.size() == full.rows.size());
  const auto manifest = Config::load(tmp.path / "a" / "rabi_manifest.txt");
  CHECK(manifest.get_double("dt") > 0.0);

  CommandOptions again;
  again.config = tmp.path / "a" / "rabi_manifest.txt";
  again.out = tmp.path / "b";
  REQUIRE(run("rabi", again) == kExitOk);
  CHECK(slurp(tmp.path / "a" / "rabi_full.csv") == slurp(tmp.path / "b" / "rabi_full.csv"));
  CHECK(slurp(tmp.path / "a" / "rabi_adiabatic.csv") ==
        slurp(tmp.path / "b" / "rabi_adiabatic.csv"));
}

TEST_CASE("mcwf output is byte-identical across worker counts and manifest re-runs") {
  TempDir tmp("mcwf");
  CommandOptions o;
  o.config = write(tmp.path / "m.cfg", kMcwf);
  o.out = tmp.path / "w1";
  o.workers = 1;
  REQUIRE(run("mcwf", o) == kExitOk);
  const std::string ref = slurp(tmp.path / "w1" / "mcwf.csv");
  CHECK(read_csv(ref).rows.size() == 11);

  CommandOptions from_manifest;
  from_manifest.config = tmp.path / "w1" / "mcwf_manifest.txt";
  from_manifest.out = tmp.path / "w4";
  from_manifest.workers = 4;
  REQUIRE(run("mcwf", from_manifest) == kExitOk);
  CHECK(slurp(tmp.path / "w4" / "mcwf.csv") == ref);

  CommandOptions reseeded = o;
  reseeded.out = tmp.path / "s";
  reseeded.seed = 4;
  REQUIRE(run("mcwf", reseeded) == kExitOk);
  CHECK(slurp(tmp.path / "s" / "mcwf.csv") != ref);
  CHECK(Config::load(tmp.path / "s" / "mcwf_manifest.txt").get_int("seed") == 4);
}

TEST_CASE("gate-scan writes grid rows and the lattice geometry") {
  TempDir tmp("scan");
  CommandOptions o;
  o.config = write(tmp.path / "g.cfg",
                   "omega = 100\ng_single = 0.5\ndelta_e = 1000\ngamma_e = 1\ngamma_r = 0.01\n"
                   "gamma_p = 0.01\nkappa = 1\nlattice = 2 2 2\nspacing_um = 0.37\nc3 = 1e4\n"
                   "scan_axis_1 = g_single 0.1 0.5 3\nscan_axis_2 = probe_delta -1 1 5\n");
  o.out = tmp.path / "out";
  o.workers = 2;
  REQUIRE(run("gate-scan", o) == kExitOk);
  const auto scan = read_csv(slurp(tmp.path / "out" / "scan.csv"));
  CHECK(scan.rows.size() == 15);
  CHECK(scan.header.front() == "g_single");
  const auto geom = read_csv(slurp(tmp.path / "out" / "geometry.csv"));
  CHECK(geom.rows.size() == 8);
  CHECK(Config::load(tmp.path / "out" / "gate-scan_manifest.txt").get_int("n_atoms") == 8);
}

TEST_CASE("input errors map to exit code 2") {
  TempDir tmp("errors");
  std::string err;
  CommandOptions none;
  none.out = tmp.path;
  CHECK(run("rabi", none, &err) == kExitInputError);
  CHECK(err.find("--config") != std::string::npos);

  CommandOptions unknown;
  unknown.out = tmp.path;
  unknown.config = write(tmp.path / "u.cfg", std::string(kRabi) + "colour = blue\n");
  CHECK(run("rabi", unknown, &err) == kExitInputError);
  CHECK(err.find("colour") != std::string::npos);

  CommandOptions missing;
  missing.out = tmp.path;
  missing.config = tmp.path / "does_not_exist.cfg";
  CHECK(run("mcwf", missing) == kExitInputError);

  CommandOptions cutoff;
  cutoff.out = tmp.path;
  cutoff.config = write(tmp.path / "c.cfg", kMcwf);
  cutoff.cutoff = 2;
  CHECK(run("mcwf", cutoff, &err) == kExitInputError);

  CommandOptions big;
  big.out = tmp.path;
  big.config = write(tmp.path / "o.cfg", "n_atoms = 5\n");
  CHECK(run("oracle-check", big) == kExitInputError);

  CommandOptions mismatch;
  mismatch.out = tmp.path;
  mismatch.config = write(tmp.path / "n.cfg",
                          "omega = 100\ng_single = 0.5\nn_atoms = 7\ndelta_e = 1000\nkappa = 1\n"
                          "lattice = 2 2 2\nc3 = 1e4\n");
  CHECK(run("gate-scan", mismatch) == kExitInputError);

  CHECK(run("nonsense", none) == kExitInputError);
}

TEST_CASE("numerical errors map to exit code 3") {
  TempDir tmp("numerical");
  CommandOptions o;
  o.out = tmp.path;
  o.config = write(tmp.path / "r.cfg", kRabi);
  o.dt = 1e-2;
  std::string err;
  CHECK(run("rabi", o, &err) == kExitNumericalError);
  CHECK(err.find("dt") != std::string::npos);
}

TEST_CASE("output directory resolution") {
  CommandOptions o;
  ::setenv("RYDCAV_OUT", "/tmp/from_env", 1);
  CHECK(resolve_output_dir(o) == fs::path("/tmp/from_env"));
  o.out = "/tmp/explicit";
  CHECK(resolve_output_dir(o) == fs::path("/tmp/explicit"));
  ::unsetenv("RYDCAV_OUT");
  CHECK(resolve_output_dir(CommandOptions{}) == fs::path("."));
}

TEST_CASE("zero coupling leaves a purely decaying cavity photon") {
  TempDir tmp("zero");
  CommandOptions o;
  o.config = write(tmp.path / "z.cfg",
                   "omega = 20\ng = 0\ndelta_e = 200\ngamma_e = 1\nkappa = 0.5\nt_end = 2\n");
  o.out = tmp.path;
  REQUIRE(run("rabi", o) == kExitOk);
  const auto csv = read_csv(slurp(tmp.path / "rabi_full.csv"));
  const auto t = csv.numeric_column("t_us");
  const auto pb = csv.numeric_column("pop_b");
  const double kappa = 2.0 * 3.141592653589793 * 0.5;
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(pb[k] == doctest::Approx(std::exp(-kappa * t[k])).epsilon(1e-9));
  }
}

TEST_CASE("a single trace gives a single-trajectory CSV") {
  TempDir tmp("single");
  CommandOptions o;
  o.config = write(tmp.path / "m.cfg", kMcwf);
  o.out = tmp.path;
  o.traces = 1;
  REQUIRE(run("mcwf", o) == kExitOk);
  const auto csv = read_csv(slurp(tmp.path / "mcwf.csv"));
  for (double s : csv.numeric_column("stderr_photon")) CHECK(s == 0.0);
  CHECK(Config::load(tmp.path / "mcwf_manifest.txt").get_int("traces") == 1);
}

TEST_CASE("single-point grid and vanishing blockade") {
  TempDir tmp("point");
  CommandOptions o;
  o.config = write(tmp.path / "g.cfg",
                   "omega = 100\ng_single = 0.5\ndelta_e = 1000\ngamma_e = 1\ngamma_r = 0.01\n"
                   "gamma_p = 0.01\nkappa = 1\nlattice = 2 2 2\nc3 = 1e-12\n");
  o.out = tmp.path;
  REQUIRE(run("gate-scan", o) == kExitOk);
  const auto csv = read_csv(slurp(tmp.path / "scan.csv"));
  REQUIRE(csv.rows.size() == 1);
  // with no blockade both reflections coincide and F_z = |2|^2 / 16
  CHECK(csv.numeric_column("F_z")[0] == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(csv.rows[0].back() == "ok");
}
