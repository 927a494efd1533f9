#include "conecert/cli.hpp"

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "conecert/random.hpp"
#include "parallel_guard.hpp"

namespace conecert::cli {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::string format_real(double x) {
  if (x == 0.0) return "0.0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  std::string s(buf);
  if (s.find_first_of(".enN") == std::string::npos) s += ".0";
  return s;
}

Json tolerances_json(const ExposednessReport& rep) {
  return Json{{"rel_eps", rep.tol.rel_eps},
              {"abs_floor", rep.tol.abs_floor},
              {"pair_tol", rep.pair_tol},
              {"overlap_tol", rep.overlap_tol},
              {"violation_tol", rep.violation_tol}};
}

Json vector_of(const RealVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// Options shared by expose and sweep.
struct ExposeOptions {
  double rel_eps = TolerancePolicy{}.rel_eps;
  double abs_floor = TolerancePolicy{}.abs_floor;
  int batch_size = HullParams{}.batch_size;
  int max_batches = HullParams{}.max_batches;
  int restarts = SearchParams{}.restarts;
  int iterations = SearchParams{}.iterations;

  void attach(CLI::App* app) {
    app->add_option("--rel-eps", rel_eps, "relative singular-value cutoff")
        ->check(CLI::PositiveNumber);
    app->add_option("--abs-floor", abs_floor, "absolute singular-value floor")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--batch-size", batch_size, "random probes per batch")
        ->check(CLI::PositiveNumber);
    app->add_option("--max-batches", max_batches, "random probe batches")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--restarts", restarts, "positivity search restarts")
        ->check(CLI::PositiveNumber);
    app->add_option("--iterations", iterations, "iterations per restart")
        ->check(CLI::PositiveNumber);
  }

  ExposeParams params(std::uint64_t seed) const {
    ExposeParams p;
    p.seed = seed;
    p.tol = {rel_eps, abs_floor};
    p.hull.batch_size = batch_size;
    p.hull.max_batches = max_batches;
    p.fallback.search.restarts = restarts;
    p.fallback.search.iterations = iterations;
    return p;
  }

  Json to_json() const {
    return Json{{"rel_eps", rel_eps},         {"abs_floor", abs_floor},
                {"batch_size", batch_size},   {"max_batches", max_batches},
                {"restarts", restarts},       {"iterations", iterations}};
  }
};

void write_report(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_json_file_atomic(path, j);
}

int verdict_exit_code(Verdict v) {
  switch (v) {
    case Verdict::ExposedLinear:
    case Verdict::ExposedConeEvidence: return kExitOk;
    case Verdict::NotCertified: return kExitNotCertified;
    case Verdict::InputRejected: return kExitInput;
  }
  return kExitInput;
}

// Resolved sweep parameters; the report directory is not echoed so that runs
// into different directories produce identical files.
Json sweep_config_json(const SweepConfig& cfg) {
  const ExposeParams& p = cfg.expose;
  return Json{{"command", "sweep"},
              {"n", cfg.n},
              {"m", cfg.m},
              {"count", cfg.count},
              {"seed", cfg.seed},
              {"timing", cfg.timing},
              {"rel_eps", p.tol.rel_eps},
              {"abs_floor", p.tol.abs_floor},
              {"batch_size", p.hull.batch_size},
              {"max_batches", p.hull.max_batches},
              {"restarts", p.fallback.search.restarts},
              {"iterations", p.fallback.search.iterations}};
}

}  // namespace

MapRep map_from_json(const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "ad") {
    const Json& t = field(j, "transposed");
    if (!t.is_boolean()) throw InputError("'transposed' must be a boolean");
    return choi_from_ad(matrix_from_json(field(j, "A")), t.get<bool>());
  }
  if (kind == "omega_q") {
    return choi_from_omega_q(matrix_from_json(field(j, "R")),
                             vector_from_json(field(j, "zeta")));
  }
  if (kind == "choi") {
    const Json& n = field(j, "n");
    const Json& m = field(j, "m");
    if (!n.is_number_integer() || !m.is_number_integer()) {
      throw InputError("'n' and 'm' must be integers");
    }
    return MapRep(n.get<int>(), m.get<int>(), matrix_from_json(field(j, "choi")));
  }
  throw InputError("unknown map kind '" + kind + "'");
}

Json choi_map_to_json(const MapRep& map) {
  return Json{{"kind", "choi"},
              {"n", map.dim_out()},
              {"m", map.dim_in()},
              {"choi", matrix_to_json(map.choi())}};
}

Complex pairing_from_json(const MapRep& map, const Json& op) {
  if (op.is_object() && op.contains("kind")) {
    if (op["kind"] != "product") {
      throw InputError("pairing operand kind must be 'product'");
    }
    const SeparableElement w(matrix_from_json(field(op, "X")),
                             matrix_from_json(field(op, "Y")));
    if (w.y_factor().rows() != map.dim_in()) {
      throw InputError("pairing: Y factor does not match dim K");
    }
    return pairing(map, w);
  }
  return pairing(map, matrix_from_json(op));
}

std::string format_complex(Complex z) {
  const double im = z.imag();
  return format_real(z.real()) + (im < 0.0 ? " - " : " + ") +
         format_real(std::abs(im)) + "i";
}

Json report_to_json(const ExposednessReport& rep, bool timing) {
  const auto& ns = rep.nullspace;
  Json j;
  j["verdict"] = to_string(rep.verdict);
  j["nullspace_dim"] = ns.dim;
  j["singular_values"] = vector_of(ns.singular_values);
  j["pairs_used"] = ns.pairs_used;
  j["overlap_with_phi"] = rep.overlap_with_phi;
  if (rep.fallback) {
    const auto& f = *rep.fallback;
    int violated = 0;
    for (const auto& v : f.violations) violated += v.violated ? 1 : 0;
    j["fallback"] = Json{{"directions_tested", f.directions_tested},
                         {"epsilons", f.epsilons},
                         {"all_violated", f.all_violated},
                         {"control_positive", f.control_positive},
                         {"tests", f.violations.size()},
                         {"violations_found", violated},
                         {"weakest_violation", f.weakest_violation}};
  } else {
    j["fallback"] = nullptr;
  }
  j["seed"] = rep.seed;
  j["tolerances"] = tolerances_json(rep);
  j["wall_time_ms"] = timing ? rep.wall_time_ms : 0;
  j["span_residual"] = rep.span_residual;
  j["dim_history"] = ns.dim_history;
  j["random_batches"] = ns.batches;
  j["gap"] = Json{{"threshold", ns.threshold},
                  {"smallest_retained", ns.smallest_retained},
                  {"largest_null", ns.largest_null}};
  j["message"] = rep.message;
  return j;
}

ComplexMatrix sweep_instance(std::uint64_t seed, int n, int m, int rank,
                             int index) {
  Rng rng = make_rng(seed, {0x5eedULL, static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(m),
                            static_cast<std::uint64_t>(rank),
                            static_cast<std::uint64_t>(index)});
  return random_rank_matrix(n, m, rank, rng);
}

SweepSummary run_sweep(const SweepConfig& cfg, std::ostream& log) {
  if (cfg.n < 1 || cfg.m < 1) throw InputError("sweep: n and m must be >= 1");
  if (cfg.count < 0) throw InputError("sweep: count must be >= 0");

  struct Instance {
    int rank;
    int index;
    bool transposed;
  };
  std::vector<Instance> instances;
  const int max_rank = std::min(cfg.n, cfg.m);
  for (int rank = max_rank; rank >= 1; --rank) {
    for (int i = 0; i < cfg.count; ++i) {
      instances.push_back({rank, i, false});
      instances.push_back({rank, i, true});
    }
  }

  std::vector<Json> reports(instances.size());
  std::vector<ExposednessReport> results(instances.size());
  const Json config = sweep_config_json(cfg);
  const auto total = static_cast<std::int64_t>(instances.size());
  detail::ParallelGuard guard;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < total; ++k) guard.run([&] {
    const Instance& inst = instances[k];
    const ComplexMatrix a = sweep_instance(cfg.seed, cfg.n, cfg.m, inst.rank, inst.index);
    ExposeParams p = cfg.expose;
    p.seed = derive_seed(cfg.seed, {0xe7ULL, static_cast<std::uint64_t>(inst.rank),
                                    static_cast<std::uint64_t>(inst.index),
                                    inst.transposed ? 1ULL : 0ULL});
    // nested regions fall back to the serial kernels
    results[k] = certify_exposed(a, inst.transposed, p);
    Json j = report_to_json(results[k], cfg.timing);
    j["instance"] = Json{{"n", cfg.n},
                         {"m", cfg.m},
                         {"rank", inst.rank},
                         {"index", inst.index},
                         {"transposed", inst.transposed},
                         {"A", matrix_to_json(a)}};
    j["config"] = config;
    reports[k] = std::move(j);
  });
  guard.rethrow();

  std::filesystem::create_directories(cfg.report_dir);
  SweepSummary summary;
  Json by_class = Json::object();
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const Instance& inst = instances[k];
    std::ostringstream name;
    name << "n" << cfg.n << "_m" << cfg.m << "_r" << inst.rank << "_i"
         << std::setw(4) << std::setfill('0') << inst.index
         << (inst.transposed ? "_adt" : "_ad") << ".json";
    write_json_file_atomic(cfg.report_dir / name.str(), reports[k]);
    const std::string v = to_string(results[k].verdict);
    ++summary.verdict_counts[v];
    ++summary.dim_histogram[results[k].nullspace.dim];
    const std::string cls = "rank" + std::to_string(inst.rank) +
                            (inst.transposed ? "_adt" : "_ad");
    Json& slot = by_class[cls][v];
    slot = slot.is_null() ? 1 : slot.get<int>() + 1;
    ++summary.reports;
  }

  Json hist = Json::object();
  for (const auto& [d, c] : summary.dim_histogram) hist[std::to_string(d)] = c;
  summary.json = Json{{"n", cfg.n},
                      {"m", cfg.m},
                      {"count", cfg.count},
                      {"seed", cfg.seed},
                      {"reports", summary.reports},
                      {"verdict_counts", summary.verdict_counts},
                      {"nullspace_dim_histogram", hist},
                      {"by_class", by_class}};
  write_json_file_atomic(cfg.report_dir / "summary.json", summary.json);

  log << "sweep n=" << cfg.n << " m=" << cfg.m << " count=" << cfg.count
      << " seed=" << cfg.seed << ": " << summary.reports << " reports\n";
  for (const auto& [v, c] : summary.verdict_counts) {
    log << "  " << std::left << std::setw(24) << v << c << "\n";
  }
  for (const auto& [d, c] : summary.dim_histogram) {
    log << "  nullspace dim " << d << ": " << c << "\n";
  }
  return summary;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"conecert: exposedness certificates for positive maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "conecert 1.0");

  std::uint64_t seed = 0;
  bool no_timing = false;
  int verbosity = 0;
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "random seed")->envname("CONECERT_SEED");
  };

  // pairing
  auto* pairing_cmd = app.add_subcommand("pairing", "evaluate <phi, W>");
  std::string map_path, op_path;
  pairing_cmd->add_option("map", map_path, "map JSON")->required();
  pairing_cmd->add_option("operand", op_path, "operand JSON")->required();

  // expose
  auto* expose_cmd = app.add_subcommand("expose", "certify an exposed point");
  std::string a_path, report_path;
  bool transposed = false;
  ExposeOptions expose_opts;
  expose_cmd->add_option("A", a_path, "operator A as matrix JSON")->required();
  expose_cmd->add_flag("--transposed", transposed, "use X -> A X^T A^*");
  expose_cmd->add_option("--report", report_path, "report output path");
  expose_cmd->add_flag("--no-timing", no_timing, "write wall_time_ms as 0");
  expose_cmd->add_flag("-v,--verbose", verbosity, "more output");
  add_seed(expose_cmd);
  expose_opts.attach(expose_cmd);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "certify seeded instances");
  int sweep_n = 2, sweep_m = 2, sweep_count = 1;
  std::string sweep_dir;
  ExposeOptions sweep_opts;
  sweep_cmd->add_option("--n", sweep_n, "dim H")->required();
  sweep_cmd->add_option("--m", sweep_m, "dim K")->required();
  sweep_cmd->add_option("--count", sweep_count, "instances per rank class")
      ->required()
      ->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--report", sweep_dir, "report directory")->required();
  sweep_cmd->add_flag("--no-timing", no_timing, "write wall_time_ms as 0");
  add_seed(sweep_cmd);
  sweep_opts.attach(sweep_cmd);

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "classify a rank-1 non-increasing map");
  double classify_tol = 1e-8;
  classify_cmd->add_option("map", map_path, "map JSON")->required();
  classify_cmd->add_option("--tol", classify_tol, "relative tolerance")
      ->check(CLI::PositiveNumber);

  // positivity
  auto* pos_cmd = app.add_subcommand("positivity", "block-positivity search");
  SearchParams search;
  pos_cmd->add_option("map", map_path, "map JSON")->required();
  pos_cmd->add_option("--restarts", search.restarts, "random restarts")->check(CLI::PositiveNumber);
  pos_cmd->add_option("--iterations", search.iterations, "iterations per restart")->check(CLI::PositiveNumber);
  pos_cmd->add_option("--tol", search.tol, "block value counted as a violation below -tol")->check(CLI::NonNegativeNumber);
  add_seed(pos_cmd);

  // lemma-my
  auto* lemma_cmd = app.add_subcommand(
      "lemma-my", "solution space of <xi,A eta> = 0 => <xi,B conj(eta)> = 0");
  lemma_cmd->add_option("A", a_path, "operator A as matrix JSON")->required();

  // random-map
  auto* random_cmd = app.add_subcommand("random-map", "emit a seeded map JSON");
  std::string kind = "ad";
  int rn = 2, rm = 2, rank = -1;
  std::string out_path;
  random_cmd->add_option("--kind", kind, "ad | ad-transpose | omega-q")
      ->check(CLI::IsMember({"ad", "ad-transpose", "omega-q"}));
  random_cmd->add_option("--n", rn, "dim H")->check(CLI::PositiveNumber);
  random_cmd->add_option("--m", rm, "dim K")->check(CLI::PositiveNumber);
  random_cmd->add_option("--rank", rank, "rank of A (default full)");
  random_cmd->add_option("--out", out_path, "output path (default stdout)");
  add_seed(random_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << "conecert 1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "conecert: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*pairing_cmd) {
      const MapRep map = map_from_json(read_json_file(map_path));
      out << format_complex(pairing_from_json(map, read_json_file(op_path))) << "\n";
      return kExitOk;
    }

    if (*expose_cmd) {
      const ComplexMatrix a = matrix_from_json(read_json_file(a_path));
      const ExposeParams params = expose_opts.params(seed);
      ExposednessReport rep;
      try {
        rep = certify_exposed(a, transposed, params);
      } catch (const NumericalError& e) {
        err << "conecert: " << e.what() << "\n";
        return kExitNotCertified;
      }
      Json j = report_to_json(rep, !no_timing);
      Json cfg = expose_opts.to_json();
      cfg["command"] = "expose";
      cfg["input"] = a_path;
      cfg["transposed"] = transposed;
      cfg["seed"] = seed;
      cfg["timing"] = !no_timing;
      j["config"] = cfg;
      if (!report_path.empty()) write_report(report_path, j);
      out << to_string(rep.verdict) << " nullspace_dim=" << rep.nullspace.dim
          << " pairs=" << rep.nullspace.pairs_used
          << " overlap=" << std::setprecision(12) << rep.overlap_with_phi << "\n";
      if (verbosity > 0 && !rep.message.empty()) out << rep.message << "\n";
      if (rep.verdict == Verdict::InputRejected) {
        err << "conecert: " << rep.message << "\n";
      }
      return verdict_exit_code(rep.verdict);
    }

    if (*sweep_cmd) {
      if (sweep_n > 4 || sweep_m > 4) {
        err << "conecert: warning: dimensions above 4 can be slow\n";
      }
      SweepConfig cfg;
      cfg.n = sweep_n;
      cfg.m = sweep_m;
      cfg.count = sweep_count;
      cfg.seed = seed;
      cfg.report_dir = sweep_dir;
      cfg.timing = !no_timing;
      cfg.expose = sweep_opts.params(seed);
      SweepSummary s;
      try {
        s = run_sweep(cfg, out);
      } catch (const std::filesystem::filesystem_error& e) {
        err << "conecert: " << e.what() << "\n";
        return kExitInput;
      }
      return s.verdict_counts.count("NOT_CERTIFIED") ? kExitNotCertified : kExitOk;
    }

    if (*classify_cmd) {
      const MapRep map = map_from_json(read_json_file(map_path));
      Classification c;
      try {
        c = classify(map, classify_tol);
      } catch (const ClassificationError& e) {
        err << "conecert: " << e.what() << "\n";
        return kExitInput;
      }
      Json j{{"case", to_string(c.kind)},
             {"reconstruction_error", c.reconstruction_error}};
      if (c.kind == MapCase::OmegaQ) {
        j["R"] = matrix_to_json(c.r);
        j["zeta"] = vector_to_json(c.zeta);
      } else {
        j["B"] = matrix_to_json(c.b);
      }
      out << j.dump(2) << "\n";
      return kExitOk;
    }

    if (*pos_cmd) {
      const MapRep map = map_from_json(read_json_file(map_path));
      search.seed = seed;
      const PositivityResult r = is_positive(map, search);
      Json j{{"verdict", r.verdict == PositivityVerdict::PositiveEvidence
                             ? "POSITIVE_EVIDENCE"
                             : "NOT_POSITIVE"},
             {"min_value", r.min_value},
             {"restarts_run", r.restarts_run}};
      if (r.verdict == PositivityVerdict::NotPositive) {
        j["witness"] = Json{{"xi", vector_to_json(r.xi)}, {"eta", vector_to_json(r.eta)}};
      }
      out << j.dump(2) << "\n";
      return kExitOk;
    }

    if (*lemma_cmd) {
      const ComplexMatrix a = matrix_from_json(read_json_file(a_path));
      const LemmaMySolution s = lemma_my_solution_space(a);
      Json basis = Json::array();
      for (const auto& b : s.basis) basis.push_back(matrix_to_json(b));
      out << Json{{"rank", s.rank},
                  {"dim", s.dim},
                  {"constraint_rows", s.constraint_rows},
                  {"basis", basis}}
                 .dump(2)
          << "\n";
      return kExitOk;
    }

    if (*random_cmd) {
      Rng rng = make_rng(seed, {0x7a9dULL});
      Json j;
      if (kind == "omega-q") {
        const ComplexMatrix r = random_psd(rm, rm, rng);
        const ComplexVector zeta = random_complex_vector(rn, rng);
        j = Json{{"kind", "omega_q"}, {"R", matrix_to_json(r)}, {"zeta", vector_to_json(zeta)}};
      } else {
        const int full = std::min(rn, rm);
        if (rank != -1 && (rank < 1 || rank > full)) {
          throw InputError("--rank must lie in [1, min(n, m)]");
        }
        const ComplexMatrix a = random_rank_matrix(rn, rm, rank < 0 ? full : rank, rng);
        j = Json{{"kind", "ad"}, {"A", matrix_to_json(a)}, {"transposed", kind == "ad-transpose"}};
      }
      if (out_path.empty()) {
        out << j.dump(2) << "\n";
      } else {
        write_report(out_path, j);
      }
      return kExitOk;
    }
  } catch (const InputError& e) {
    err << "conecert: " << e.what() << "\n";
    return kExitInput;
  } catch (const Json::exception& e) {
    err << "conecert: malformed JSON: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "conecert: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace conecert::cli
