#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "conecert/cli.hpp"
#include "conecert/random.hpp"
#include "support.hpp"

using namespace conecert;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "conecert");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("conecert_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write(const fs::path& dir, const std::string& name, const Json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Json ad_map(const ComplexMatrix& a, bool transposed) {
  return Json{{"kind", "ad"}, {"A", matrix_to_json(a)}, {"transposed", transposed}};
}

}  // namespace

TEST_CASE("format_complex") {
  CHECK(cli::format_complex({1.0, 0.0}) == "1.0 + 0.0i");
  CHECK(cli::format_complex({0.0, 0.0}) == "0.0 + 0.0i");
  CHECK(cli::format_complex({-2.5, -1.0}) == "-2.5 - 1.0i");
  CHECK(cli::format_complex({0.1, 1e-20}) == "0.1 + 1e-20i");
  CHECK(cli::format_complex({1.0 / 3.0, 0.0}) == "0.333333333333333 + 0.0i");
}

TEST_CASE("pairing command") {
  const fs::path dir = scratch("pairing");
  const Json id = ad_map(ComplexMatrix::Identity(2, 2), false);
  const fs::path map = write(dir, "id.json", id);
  const ComplexMatrix e11 = oracle::unit(2, 2, 0, 0);
  const ComplexMatrix e22 = oracle::unit(2, 2, 1, 1);
  const fs::path w11 = write(dir, "w11.json", matrix_to_json(oracle::kron(e11, e11)));
  const fs::path w12 = write(
      dir, "w12.json",
      Json{{"kind", "product"}, {"X", matrix_to_json(e11)}, {"Y", matrix_to_json(e22)}});

  auto r = run_cli({"pairing", map.string(), w11.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "1.0 + 0.0i\n");
  r = run_cli({"pairing", map.string(), w12.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "0.0 + 0.0i\n");

  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK(run_cli({"pairing", map.string(), bad.string()}).code == 2);
  CHECK(run_cli({"pairing", map.string(), (dir / "missing.json").string()}).code == 2);
  const fs::path wrong = write(dir, "wrong.json", matrix_to_json(ComplexMatrix::Identity(3, 3)));
  CHECK(run_cli({"pairing", map.string(), wrong.string()}).code == 2);
  const fs::path badkind = write(dir, "badkind.json", Json{{"kind", "nope"}});
  CHECK(run_cli({"pairing", badkind.string(), w11.string()}).code == 2);
}

TEST_CASE("pairing command on sampled separable elements stays nonnegative") {
  const fs::path dir = scratch("pairing_dual");
  Rng rng = make_rng(81);
  for (int t = 0; t < 5; ++t) {
    const fs::path map =
        write(dir, "m.json", ad_map(random_complex_normal(2, 3, rng), t % 2 == 1));
    const fs::path op = write(dir, "w.json",
                              Json{{"kind", "product"},
                                   {"X", matrix_to_json(random_psd(2, 1, rng))},
                                   {"Y", matrix_to_json(random_psd(3, 2, rng))}});
    const auto r = run_cli({"pairing", map.string(), op.string()});
    REQUIRE(r.code == 0);
    CHECK(std::stod(r.out) >= -1e-10);
  }
}

TEST_CASE("expose command exit codes and report") {
  const fs::path dir = scratch("expose");
  const fs::path id = write(dir, "id.json", matrix_to_json(ComplexMatrix::Identity(2, 2)));
  const fs::path e11 = write(dir, "e11.json", matrix_to_json(oracle::unit(2, 2, 0, 0)));
  const fs::path zero = write(dir, "zero.json", matrix_to_json(ComplexMatrix::Zero(2, 2)));

  auto r = run_cli({"expose", id.string(), "--report", (dir / "id_report.json").string()});
  CHECK(r.code == 0);
  const Json rep = read_json_file(dir / "id_report.json");
  CHECK(rep["verdict"] == "EXPOSED_LINEAR");
  CHECK(rep["nullspace_dim"] == 1);
  CHECK(rep["fallback"].is_null());
  for (const char* key : {"singular_values", "pairs_used", "overlap_with_phi", "seed",
                          "tolerances", "wall_time_ms", "config"}) {
    CHECK(rep.contains(key));
  }
  CHECK(rep["config"]["command"] == "expose");

  r = run_cli({"expose", e11.string(), "--report", (dir / "e11.json.out").string()});
  CHECK(r.code == 0);
  const Json rep2 = read_json_file(dir / "e11.json.out");
  CHECK(rep2["verdict"] == "EXPOSED_CONE_EVIDENCE");
  CHECK(rep2["nullspace_dim"] == 3);
  CHECK(rep2["fallback"]["all_violated"] == true);

  CHECK(run_cli({"expose", id.string(), "--transposed"}).code == 0);
  r = run_cli({"expose", zero.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("apex") != std::string::npos);
  CHECK(run_cli({"expose", id.string(), "--bogus-flag"}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"--version"}).code == 0);
}

TEST_CASE("expose reports are deterministic without timing") {
  const fs::path dir = scratch("expose_det");
  const fs::path e11 = write(dir, "a.json", matrix_to_json(oracle::unit(2, 2, 0, 0)));
  for (const char* out : {"r1.json", "r2.json"}) {
    REQUIRE(run_cli({"expose", e11.string(), "--seed", "5", "--no-timing", "--report",
                     (dir / out).string()})
                .code == 0);
  }
  CHECK(slurp(dir / "r1.json") == slurp(dir / "r2.json"));
  CHECK(read_json_file(dir / "r1.json")["wall_time_ms"] == 0);
}

TEST_CASE("sweep command examples") {
  SUBCASE("n = m = 2, count = 5 gives 20 certified reports") {
    const fs::path dir = scratch("sweep5");
    const auto r = run_cli({"sweep", "--n", "2", "--m", "2", "--count", "5", "--seed", "1",
                            "--no-timing", "--report", dir.string()});
    CHECK(r.code == 0);
    const Json s = read_json_file(dir / "summary.json");
    CHECK(s["reports"] == 20);
    CHECK_FALSE(s["verdict_counts"].contains("NOT_CERTIFIED"));
    int total = 0;
    for (const auto& [k, v] : s["verdict_counts"].items()) total += v.get<int>();
    CHECK(total == 20);
    int hist = 0;
    for (const auto& [k, v] : s["nullspace_dim_histogram"].items()) hist += v.get<int>();
    CHECK(hist == 20);
    int files = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().filename() != "summary.json") ++files;
    }
    CHECK(files == 20);
    const Json one = read_json_file(dir / "n2_m2_r1_i0000_adt.json");
    CHECK(one["instance"]["rank"] == 1);
    CHECK(one["instance"]["transposed"] == true);
    CHECK(one["config"]["command"] == "sweep");
  }
  SUBCASE("count = 0 gives an empty summary") {
    const fs::path dir = scratch("sweep0");
    const auto r = run_cli({"sweep", "--n", "3", "--m", "2", "--count", "0", "--report",
                            dir.string()});
    CHECK(r.code == 0);
    const Json s = read_json_file(dir / "summary.json");
    CHECK(s["reports"] == 0);
    CHECK(s["verdict_counts"].empty());
  }
  SUBCASE("negative count is an input error") {
    CHECK(run_cli({"sweep", "--n", "2", "--m", "2", "--count", "-1", "--report",
                   scratch("sweepneg").string()})
              .code == 2);
  }
}

TEST_CASE("sweep output does not depend on the thread count") {
  const fs::path one = scratch("sweep_t1");
  const fs::path four = scratch("sweep_t4");
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  REQUIRE(run_cli({"sweep", "--n", "2", "--m", "3", "--count", "2", "--seed", "9",
                   "--no-timing", "--report", one.string()})
              .code == 0);
  omp_set_num_threads(4);
  REQUIRE(run_cli({"sweep", "--n", "2", "--m", "3", "--count", "2", "--seed", "9",
                   "--no-timing", "--report", four.string()})
              .code == 0);
  omp_set_num_threads(saved);
  int compared = 0;
  for (const auto& e : fs::directory_iterator(one)) {
    CHECK(slurp(e.path()) == slurp(four / e.path().filename()));
    ++compared;
  }
  CHECK(compared == 2 * 2 * 2 + 1);
}

TEST_CASE("seed falls back to the environment") {
  const fs::path dir = scratch("envseed");
  const fs::path id = write(dir, "id.json", matrix_to_json(ComplexMatrix::Identity(2, 2)));
  ::setenv("CONECERT_SEED", "1234", 1);
  REQUIRE(run_cli({"expose", id.string(), "--report", (dir / "r.json").string()}).code == 0);
  ::unsetenv("CONECERT_SEED");
  CHECK(read_json_file(dir / "r.json")["seed"] == 1234);
}

TEST_CASE("classify, positivity, lemma-my and random-map commands") {
  const fs::path dir = scratch("misc");
  const fs::path swap = write(dir, "swap.json", ad_map(ComplexMatrix::Identity(2, 2), true));
  auto r = run_cli({"classify", swap.string()});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["case"] == "AD_TRANSPOSE");

  const fs::path trace_map =
      write(dir, "trace.json",
            Json{{"kind", "choi"}, {"n", 2}, {"m", 2},
                 {"choi", matrix_to_json(ComplexMatrix::Identity(4, 4))}});
  CHECK(run_cli({"classify", trace_map.string()}).code == 2);

  const ComplexMatrix e11 = oracle::unit(2, 2, 0, 0);
  const ComplexMatrix e22 = oracle::unit(2, 2, 1, 1);
  const fs::path indefinite =
      write(dir, "indef.json",
            Json{{"kind", "choi"}, {"n", 2}, {"m", 2},
                 {"choi", matrix_to_json(oracle::kron(e11, e11) - oracle::kron(e22, e22))}});
  r = run_cli({"positivity", indefinite.string()});
  CHECK(r.code == 0);
  const Json pj = Json::parse(r.out);
  CHECK(pj["verdict"] == "NOT_POSITIVE");
  CHECK(pj.contains("witness"));
  r = run_cli({"positivity", swap.string()});
  CHECK(Json::parse(r.out)["verdict"] == "POSITIVE_EVIDENCE");

  Rng rng = make_rng(82);
  const ComplexVector zeta = random_complex_vector(2, rng);
  const ComplexVector rho = random_complex_vector(3, rng);
  const fs::path rank1 = write(dir, "r1.json", matrix_to_json(zeta * rho.adjoint()));
  r = run_cli({"lemma-my", rank1.string()});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["dim"] == 1);

  r = run_cli({"random-map", "--kind", "omega-q", "--n", "3", "--m", "2", "--seed", "4"});
  CHECK(r.code == 0);
  const MapRep w = cli::map_from_json(Json::parse(r.out));
  CHECK(w.dim_out() == 3);
  CHECK(w.dim_in() == 2);
  CHECK(run_cli({"random-map", "--kind", "ad", "--rank", "5"}).code == 2);
  CHECK(run_cli({"random-map", "--kind", "ad", "--rank", "-4"}).code == 2);
  CHECK(run_cli({"random-map", "--kind", "weird"}).code == 2);
  // identical seeds give identical maps
  CHECK(run_cli({"random-map", "--seed", "7"}).out == run_cli({"random-map", "--seed", "7"}).out);
}

TEST_CASE("map JSON round trip through the Choi encoding") {
  Rng rng = make_rng(83);
  const MapRep phi = choi_from_ad(random_complex_normal(3, 2, rng), true);
  const MapRep back = cli::map_from_json(cli::choi_map_to_json(phi));
  CHECK(back.choi() == phi.choi());
  CHECK_THROWS_AS(cli::map_from_json(Json{{"kind", "ad"}, {"A", matrix_to_json(phi.choi())}}),
                  InputError);
  CHECK_THROWS_AS(cli::map_from_json(Json{{"kind", "choi"}, {"n", 2}, {"m", 2},
                                          {"choi", matrix_to_json(phi.choi())}}),
                  InputError);
}
