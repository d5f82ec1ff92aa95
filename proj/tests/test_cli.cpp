#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ozf/io.hpp"

using namespace ozf;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(OZFCERT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("ozfcert_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

AnalysisProblem example_deadzone(double L) {
  Matrix A(2, 2), B(2, 1), C(1, 2);
  A << 0.8, 0.5, -0.4, 1.2;
  B << -0.18, 1.0;
  C << 0.3, -1.8;
  const DeadzoneLoop loop = loop_transform_saturation(LtiSystem::make(A, B, C), 0.1, L);
  AnalysisProblem p;
  p.system = loop.system;
  p.band = SlopeBand{0.0, L};
  p.rho = 1.0;
  p.alpha = 0.0;
  p.beta = 1.0;
  p.sector = SectorSpec{0.1, true};
  p.shape = MultiplierShape{1, 1};
  return p;
}

AnalysisProblem example_saturated_base() {
  Matrix A(2, 2), B(2, 1), C(1, 2);
  A << 0.8, 0.5, -0.4, 1.2;
  B << -0.18, 1.0;
  C << 0.3, -1.8;
  AnalysisProblem p;
  p.system = LtiSystem::make(A, B, C);
  p.band = SlopeBand{0.0, 1.0};
  p.rho = 1.0;
  p.alpha = 0.0;
  p.beta = 1.0;
  p.sector = SectorSpec{0.1, true};
  p.shape = MultiplierShape{1, 1};
  return p;
}

}  // namespace

TEST_CASE("sha256 known vector and fingerprint canonicalization") {
  CHECK(io::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const io::json a = io::json::parse(R"({"b": 1, "a": [1.5, 2]})");
  const io::json b = io::json::parse(R"({ "a" : [1.5, 2],   "b" : 1 })");
  CHECK(io::problem_fingerprint(a) == io::problem_fingerprint(b));
}

TEST_CASE("problem and certificate files round-trip through their readers") {
  TempDir tmp;
  const AnalysisProblem p = example_deadzone(1.0);
  io::save_problem(p, tmp.file("problem.json"));
  std::string sha;
  const AnalysisProblem q = io::load_problem(tmp.file("problem.json"), &sha);
  CHECK(!sha.empty());
  CHECK((p.system.A - q.system.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p.system.B - q.system.B).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.band.L == q.band.L);
  CHECK(p.sector.l == q.sector.l);
  CHECK(p.shape.nu1 == q.shape.nu1);

  const LineSearchResult ls = mu_linesearch(p, {1.0, 10.0});
  REQUIRE(ls.best.has_value());
  Certificate cert = *ls.best;
  cert.problem_sha = sha;
  io::save_certificate(cert, tmp.file("cert.json"));
  const Certificate back = io::load_certificate(tmp.file("cert.json"));
  CHECK((cert.calX - back.calX).cwiseAbs().maxCoeff() == 0.0);
  CHECK((cert.lambda - back.lambda).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cert.gamma == back.gamma);
  CHECK(cert.mu == back.mu);
  CHECK(cert.problem_sha == back.problem_sha);
  CHECK(cert.margins.size() == back.margins.size());
}

TEST_CASE("function and multiplier fixtures round-trip") {
  const auto f = make_profile(ProfileKind::RandomPiecewiseLinear, SlopeBand{-0.5, 1.5}, 3, 17);
  const auto f2 = io::function_from_json(io::to_json(f));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 50; ++k) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x[i] = 4.0 * gauss(rng);
    CHECK(f.value(x) == f2.value(x));
    CHECK((f.gradient(x) - f2.gradient(x)).cwiseAbs().maxCoeff() == 0.0);
  }

  const FirMultiplier mult = sample_feasible_multiplier(2, 1, 0.9, rng);
  const FirMultiplier m2 = io::multiplier_from_json(io::to_json(mult));
  CHECK((mult.lambda - m2.lambda).cwiseAbs().maxCoeff() == 0.0);
  CHECK((mult.E - m2.E).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cli certify/validate lifecycle") {
  TempDir tmp;
  io::save_problem(example_deadzone(1.0), tmp.file("problem.json"));

  CHECK(run("certify --problem " + tmp.file("problem.json") + " --out " + tmp.path.string() +
            " --mu-grid 1,3,10") == 0);
  REQUIRE(fs::exists(tmp.file("certificate.json")));

  CHECK(run("validate --problem " + tmp.file("problem.json") + " --certificate " +
            tmp.file("certificate.json") + " --samples 15 --horizon 80") == 0);

  SUBCASE("tampered certificate fails with exit 3") {
    io::json doc;
    {
      std::ifstream in(tmp.file("certificate.json"));
      in >> doc;
    }
    doc["calX"]["data"][1] = doc["calX"]["data"][1].get<double>() + 0.25;
    doc["calX"]["data"][4] = doc["calX"]["data"][1];
    {
      std::ofstream out(tmp.file("tampered.json"));
      out << doc.dump(2);
    }
    CHECK(run("validate --problem " + tmp.file("problem.json") + " --certificate " +
              tmp.file("tampered.json") + " --samples 5 --horizon 40") == 3);
  }

  SUBCASE("fingerprint mismatch exits 1") {
    io::save_problem(example_deadzone(0.9), tmp.file("other.json"));
    CHECK(run("validate --problem " + tmp.file("other.json") + " --certificate " +
              tmp.file("certificate.json") + " --samples 5") == 1);
  }
}

TEST_CASE("cli certify exit codes") {
  TempDir tmp;

  SUBCASE("infeasible problem exits 2") {
    io::save_problem(example_deadzone(1.3), tmp.file("inf.json"));
    CHECK(run("certify --problem " + tmp.file("inf.json") + " --out " + tmp.path.string() +
              " --mu-grid 1,10,100") == 2);
  }

  SUBCASE("invalid band exits 1") {
    std::ofstream out(tmp.file("bad.json"));
    out << R"({"system":{"A":[[0.5]],"B":[[1.0]],"C":[[1.0]],"D":[[0.0]]},
               "band":{"m":2.0,"L":1.0},"rho":1.0,"alpha":0.0,"beta":1.0,
               "sector":{"l":0.1,"enabled":false},"multiplier":{"nu1":0,"nu2":0}})";
    out.close();
    CHECK(run("certify --problem " + tmp.file("bad.json") + " --out " + tmp.path.string()) == 1);
  }

  SUBCASE("missing problem file exits 1") {
    CHECK(run("certify --problem " + tmp.file("nope.json") + " --out " + tmp.path.string()) == 1);
  }

  SUBCASE("unknown flag exits 1") {
    CHECK(run("certify --does-not-exist") == 1);
  }
}

TEST_CASE("cli simulate") {
  TempDir tmp;
  io::save_problem(example_saturated_base(), tmp.file("problem.json"));

  SUBCASE("zero initial state writes all-zero rows") {
    CHECK(run("simulate --problem " + tmp.file("problem.json") + " --out " + tmp.path.string() +
              " --x0 0,0 --horizon 10 --nonlin sat") == 0);
    const auto rows = io::read_csv(tmp.file("trajectory.csv"));
    REQUIRE(rows.size() == 11);  // header + 10 steps
    CHECK(rows[0][0] == "t");
    for (std::size_t r = 1; r < rows.size(); ++r)
      for (std::size_t c = 1; c < rows[r].size(); ++c)
        CHECK(std::stod(rows[r][c]) == 0.0);
  }

  SUBCASE("saturated loop from (0.1, 0) stays bounded for 50 steps") {
    CHECK(run("simulate --problem " + tmp.file("problem.json") + " --out " + tmp.path.string() +
              " --x0 0.1,0 --horizon 50 --nonlin sat") == 0);
    const auto rows = io::read_csv(tmp.file("trajectory.csv"));
    REQUIRE(rows.size() == 51);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const double x1 = std::stod(rows[r][1]), x2 = std::stod(rows[r][2]);
      CHECK(std::isfinite(x1));
      CHECK(std::abs(x1) < 1e3);
      CHECK(std::abs(x2) < 1e3);
    }
  }

  SUBCASE("zero nonlinearity exposes the unstable open loop") {
    CHECK(run("simulate --problem " + tmp.file("problem.json") + " --out " + tmp.path.string() +
              " --x0 0.1,0 --horizon 50 --nonlin zero") == 0);
    const auto rows = io::read_csv(tmp.file("trajectory.csv"));
    double first = 0.0, last = 0.0;
    first = std::abs(std::stod(rows[1][1])) + std::abs(std::stod(rows[1][2]));
    last = std::abs(std::stod(rows[50][1])) + std::abs(std::stod(rows[50][2]));
    CHECK(last > 10.0 * first);  // spectral radius sqrt(1.16) > 1
  }
}

TEST_CASE("cli sweep determinism modulo the timing column") {
  TempDir tmp;
  io::save_problem(example_saturated_base(), tmp.file("problem.json"));
  const std::string args = "sweep --problem " + tmp.file("problem.json") +
                           " --grid-L 0.6:0.8:0.2 --variant both --mu-grid 1,3,10,30 --out ";
  CHECK(run(args + tmp.file("a")) == 0);
  CHECK(run(args + tmp.file("b")) == 0);
  const auto a = io::read_csv(tmp.file("a") + "/sweep.csv");
  const auto b = io::read_csv(tmp.file("b") + "/sweep.csv");
  REQUIRE(a.size() == 5);  // header + 2 gains x 2 variants
  REQUIRE(a.size() == b.size());
  CHECK(a[0] == std::vector<std::string>{"L", "variant", "gamma", "size", "mu", "feasible",
                                         "seconds"});
  for (std::size_t r = 1; r < a.size(); ++r)
    for (std::size_t c = 0; c + 1 < a[r].size(); ++c) CHECK(a[r][c] == b[r][c]);
}

TEST_CASE("solver options come from the environment file") {
  TempDir tmp;
  io::save_problem(example_deadzone(1.0), tmp.file("problem.json"));
  {
    std::ofstream out(tmp.file("opts.json"));
    out << R"({"mu_grid": [10.0]})";
  }
  ::setenv("OZFCERT_SOLVER_OPTIONS", tmp.file("opts.json").c_str(), 1);
  const int rc = run("certify --problem " + tmp.file("problem.json") + " --out " +
                     tmp.path.string());
  ::unsetenv("OZFCERT_SOLVER_OPTIONS");
  REQUIRE(rc == 0);
  const Certificate cert = io::load_certificate(tmp.file("certificate.json"));
  CHECK(cert.mu == 10.0);
}
