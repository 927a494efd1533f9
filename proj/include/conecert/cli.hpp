#pragma once

// Command-line front end. All commands live here so tests can drive them
// without spawning processes; tools/conecert.cpp only forwards argv.
//
// Exit codes: 0 success / certified, 2 input error, 3 not certified.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "conecert/exposedness.hpp"
#include "conecert/json_io.hpp"
#include "conecert/posmaps.hpp"

namespace conecert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNotCertified = 3;

/// Map JSON:
///   {"kind": "ad", "A": <matrix>, "transposed": bool}
///   {"kind": "omega_q", "R": <matrix>, "zeta": <vector>}
///   {"kind": "choi", "n": n, "m": m, "choi": <matrix>}
MapRep map_from_json(const Json& j);
Json choi_map_to_json(const MapRep& map);

/// Pairing operand: a full (nm) x (nm) matrix, or
/// {"kind": "product", "X": <matrix>, "Y": <matrix>} with PSD factors.
Complex pairing_from_json(const MapRep& map, const Json& op);

/// "1.0 + 0.0i" style, 15 significant digits.
std::string format_complex(Complex z);

Json report_to_json(const ExposednessReport& rep, bool timing);

struct SweepConfig {
  int n = 2;
  int m = 2;
  int count = 1;
  std::uint64_t seed = 0;
  std::filesystem::path report_dir;
  bool timing = true;
  ExposeParams expose;  // seed is replaced per instance
};

struct SweepSummary {
  int reports = 0;
  std::map<std::string, int> verdict_counts;
  std::map<int, int> dim_histogram;
  Json json;
};

/// Writes one report per instance plus summary.json into cfg.report_dir.
SweepSummary run_sweep(const SweepConfig& cfg, std::ostream& log);

/// Instance matrix used by the sweep for (n, m, rank, index).
ComplexMatrix sweep_instance(std::uint64_t seed, int n, int m, int rank,
                             int index);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace conecert::cli
