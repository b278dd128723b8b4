#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "swkb/config.hpp"
#include "swkb/potential.hpp"
#include "swkb/spectral.hpp"

namespace swkb {

enum class Command { Validate, Eigenvalues, Transfer, Fit, Study, Check };

const char* to_string(Command c) noexcept;
Command parse_command(const std::string& name);

/// Exit statuses of the batch runner.
enum ExitStatus : int { kExitOk = 0, kExitValidation = 1, kExitTolerance = 2, kExitConfig = 64 };

struct StudyConfig {
  StudyConfig(Potential p, EnergyWindow w) : potential(std::move(p)), window(w) {}

  Potential potential;
  EnergyWindow window;
  /// Descending, all >= 1e-4.
  std::vector<double> h_list;
  std::vector<Method> methods;
  /// Energy for `transfer`, `fit` and `check`; defaults to the window midpoint.
  double energy = 0.0;
  int max_m = 3;
  int max_n = 1;
  double det_tol = 1e-6;
  double imag_rel_tol = 1e-6;
  SpectralConfig spectral;
};

/// Potential keys plus window.*, study.h, study.methods, study.N, study.delta_int, study.eps,
/// study.energy, study.max_m, study.max_n, study.det_tol, study.imag_rel_tol, study.imag_tol,
/// study.oracle_rtol, study.oracle_atol. Throws ConfigParse.
StudyConfig parse_study(const KeyValues& kv);

/// FNV-1a over the sorted `key=value\n` lines, as 16 hex digits.
std::string config_hash(const KeyValues& kv);

/// Explicit value if nonzero, else SWKB_THREADS, else 1.
unsigned resolve_threads(unsigned requested, const char* env);

/// Shortest round-trip decimal, with ".0" appended to integral values.
std::string format_real(double x);

struct RunOptions {
  std::string config_path;
  std::string out_dir = ".";
  unsigned threads = 0;
};

/// Runs one command; CSV files go to out_dir, diagnostics to `err`. Returns the exit status.
int run(Command command, const RunOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace swkb
