#include "swkb/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swkb/error.hpp"
#include "swkb/matching.hpp"
#include "swkb/wkb.hpp"

namespace swkb {
namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string real17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const RunOptions& opts, const std::string& hash, const std::string& name, const std::string& header,
               const std::string& body) {
  std::filesystem::create_directories(opts.out_dir);
  const auto path = std::filesystem::path(opts.out_dir) / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::InvalidArgument, "cannot write " + path.string());
  f << "# config-hash: " << hash << '\n' << header << '\n' << body;
}

int cmd_validate(const EnergyWindow& win, std::ostream& out) {
  out << "delta=" << format_real(win.delta) << '\n';
  out << "admissible=true\n";
  return kExitOk;
}

int cmd_eigenvalues(const StudyConfig& cfg, const RunOptions& opts, const std::string& hash, std::ostream& out) {
  std::ostringstream methods, oracle;
  for (double h : cfg.h_list) {
    for (Method m : cfg.methods) {
      if (m == Method::Oracle) continue;
      const auto r = compute_spectrum(cfg.potential, cfg.window, h, m, cfg.spectral);
      write_spectrum(methods, r);
      out << "h=" << real17(h) << " method=" << to_string(m) << " count=" << r.eigenvalues.size() << '\n';
    }
    write_spectrum(oracle, oracle_eigenvalues(cfg.potential, cfg.window, h, cfg.spectral.oracle, cfg.spectral.threads));
  }
  write_csv(opts, hash, "eigenvalues.csv", "h,method,k,E", methods.str());
  write_csv(opts, hash, "oracle.csv", "h,method,k,E", oracle.str());
  return kExitOk;
}

std::vector<TransferMatrix> sweep(const StudyConfig& cfg) {
  return transfer_sweep(cfg.potential, cfg.energy, cfg.h_list, cfg.spectral.matching, cfg.spectral.threads);
}

int cmd_transfer(const StudyConfig& cfg, const RunOptions& opts, const std::string& hash, std::ostream& out) {
  std::ostringstream body;
  const auto ms = sweep(cfg);
  for (const auto& m : ms) write_transfer_row(body, m);
  write_csv(opts, hash, "transfer.csv", "h,E,m11,m12,m21,m22,det,imag_defect", body.str());
  out << "rows=" << ms.size() << '\n';
  return kExitOk;
}

int cmd_fit(const StudyConfig& cfg, const RunOptions& opts, const std::string& hash, std::ostream& out) {
  const auto fit = fit_corrections(sweep(cfg), cfg.potential.gamma(), cfg.max_m, cfg.max_n);
  std::ostringstream body;
  write_fit(body, fit);
  write_csv(opts, hash, "fit.csv", "entry,m,n,a_plus,a_minus", body.str());
  out << "residual=" << real17(fit.residual) << '\n';
  const auto lead = fit.smallest_active();
  out << "smallest_active=" << (lead ? format_real(*lead) : std::string("none")) << '\n';
  return kExitOk;
}

int cmd_study(const StudyConfig& cfg, const RunOptions& opts, const std::string& hash, std::ostream& out) {
  const auto report = convergence_study(cfg.potential, cfg.window, cfg.h_list, cfg.methods, cfg.spectral);
  std::ostringstream body;
  write_study(body, report);
  write_csv(opts, hash, "study.csv", "h,method,max_err,fitted_slope", body.str());
  for (const auto& s : report.slopes)
    out << "method=" << to_string(s.method) << " slope=" << (s.floor ? std::string("floor") : real17(s.slope))
        << '\n';
  bool aligned = true;
  for (const auto& row : report.rows) aligned = aligned && !row.alignment_failure;
  if (!aligned) out << "warning: " << to_string(ErrorCode::AlignmentFailure) << " in at least one row\n";
  return kExitOk;
}

int cmd_check(const StudyConfig& cfg, const RunOptions& opts, const std::string& hash, std::ostream& out,
              std::ostream& err) {
  const auto& p = cfg.potential;
  const auto ms = sweep(cfg);
  std::ostringstream body;
  std::size_t failures = 0;
  for (const auto& m : ms) {
    const auto q = build_quasimode(p, cfg.energy, cfg.spectral.matching.N, m.x_match, cfg.spectral.matching.quasimode);
    std::vector<double> grid;
    for (int i = 0; i <= 32; ++i) grid.push_back(m.x_match * std::pow(p.b() / m.x_match, i / 32.0));
    const double wd = wronskian_defect(q, m.h, grid);
    const double res = residual(q, m.h, m.x_match);
    const double det_defect = std::abs(m.det() - 1.0);
    const bool ok = det_defect <= cfg.det_tol && m.imag_defect <= cfg.imag_rel_tol * m.entries.norm();
    if (!ok) ++failures;
    body << real17(m.h) << ',' << real17(m.E) << ',' << real17(wd) << ',' << real17(det_defect) << ','
         << real17(m.imag_defect) << ',' << real17(res) << ',' << (ok ? "ok" : "fail") << '\n';
  }
  write_csv(opts, hash, "check.csv", "h,E,wronskian_defect,det_defect,imag_defect,residual,status", body.str());
  out << "checked=" << ms.size() << " failed=" << failures << '\n';
  if (failures > 0) {
    err << "swkb: " << failures << " invariant check(s) out of tolerance\n";
    return kExitTolerance;
  }
  return kExitOk;
}

bool is_validation_code(ErrorCode c) {
  return c == ErrorCode::NonPositiveGap || c == ErrorCode::NotIncreasing || c == ErrorCode::NonPositiveW ||
         c == ErrorCode::InvalidArgument || c == ErrorCode::GammaMismatch || c == ErrorCode::NonPositiveEnergy;
}

}  // namespace

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::Validate: return "validate";
    case Command::Eigenvalues: return "eigenvalues";
    case Command::Transfer: return "transfer";
    case Command::Fit: return "fit";
    case Command::Study: return "study";
    case Command::Check: return "check";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::Validate, Command::Eigenvalues, Command::Transfer, Command::Fit, Command::Study,
                    Command::Check})
    if (name == to_string(c)) return c;
  fail(ErrorCode::ConfigParse, "unknown command '" + name + "'");
}

StudyConfig parse_study(const KeyValues& kv) {
  Potential p = parse_potential(kv);
  const EnergyWindow win = parse_window(kv);
  StudyConfig cfg(std::move(p), win);
  cfg.h_list = kv.has("study.h") ? kv.numbers("study.h") : std::vector<double>{1e-2};
  for (std::size_t i = 0; i < cfg.h_list.size(); ++i) {
    if (!(cfg.h_list[i] >= 1e-4)) fail(ErrorCode::ConfigParse, "study.h entries must be >= 1e-4");
    if (i > 0 && !(cfg.h_list[i] < cfg.h_list[i - 1]))
      fail(ErrorCode::ConfigParse, "study.h must be strictly descending");
  }
  const auto names =
      kv.has("study.methods") ? kv.strings("study.methods") : std::vector<std::string>{"bs_leading", "matched"};
  for (const auto& n : names) {
    try {
      cfg.methods.push_back(parse_method(n));
    } catch (const Error&) {
      fail(ErrorCode::ConfigParse, "unknown method '" + n + "'");
    }
  }
  cfg.energy = kv.number("study.energy", 0.5 * (win.e_min + win.e_max));
  cfg.max_m = kv.integer("study.max_m", 3);
  cfg.max_n = kv.integer("study.max_n", 1);
  cfg.det_tol = kv.number("study.det_tol", 1e-6);
  cfg.imag_rel_tol = kv.number("study.imag_rel_tol", 1e-6);

  auto& mc = cfg.spectral.matching;
  mc.N = kv.integer("study.N", 4);
  if (mc.N < 0 || mc.N > 12) fail(ErrorCode::ConfigParse, "study.N must lie in [0, 12]");
  if (kv.has("study.eps") && kv.has("study.delta_int"))
    fail(ErrorCode::ConfigParse, "study.eps and study.delta_int are exclusive");
  const double g = cfg.potential.gamma();
  if (kv.has("study.eps")) {
    const double eps = kv.number("study.eps");
    if (!(eps > 0.0) || !(eps < g / (g + 1.0))) fail(ErrorCode::ConfigParse, "study.eps outside (0, gamma/(gamma+1))");
    mc.delta_int = delta_for_eps(g, eps);
  } else {
    mc.delta_int = kv.number("study.delta_int", 0.0);
  }
  mc.imag_tol = kv.number("study.imag_tol", mc.imag_tol);
  cfg.spectral.oracle.rtol = kv.number("study.oracle_rtol", cfg.spectral.oracle.rtol);
  cfg.spectral.oracle.atol = kv.number("study.oracle_atol", cfg.spectral.oracle.atol);
  return cfg;
}

std::string config_hash(const KeyValues& kv) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : kv.entries()) feed(k + "=" + v + "\n");
  return hex64(h);
}

unsigned resolve_threads(unsigned requested, const char* env) {
  if (requested > 0) return requested;
  if (env && *env) {
    unsigned v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc() || ptr != end || v == 0) fail(ErrorCode::ConfigParse, "SWKB_THREADS must be a positive integer");
    return v;
  }
  return 1;
}

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, ec == std::errc() ? ptr : buf);
  if (std::isfinite(x) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

int run(Command command, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  KeyValues kv;
  std::optional<StudyConfig> cfg;
  try {
    kv = KeyValues::load(opts.config_path);
    cfg.emplace(parse_study(kv));
    cfg->spectral.threads = resolve_threads(opts.threads, std::getenv("SWKB_THREADS"));
  } catch (const Error& e) {
    err << "swkb: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigParse ? kExitConfig : kExitValidation;
  }

  EnergyWindow win;
  try {
    win = validate(cfg->potential, cfg->window);
    cfg->window = win;
  } catch (const Error& e) {
    if (command == Command::Validate) out << "admissible=false\n";
    err << "swkb: " << e.what() << '\n';
    return is_validation_code(e.code()) ? kExitValidation : kExitTolerance;
  }

  const std::string hash = config_hash(kv);
  try {
    switch (command) {
      case Command::Validate: return cmd_validate(win, out);
      case Command::Eigenvalues: return cmd_eigenvalues(*cfg, opts, hash, out);
      case Command::Transfer: return cmd_transfer(*cfg, opts, hash, out);
      case Command::Fit: return cmd_fit(*cfg, opts, hash, out);
      case Command::Study: return cmd_study(*cfg, opts, hash, out);
      case Command::Check: return cmd_check(*cfg, opts, hash, out, err);
    }
  } catch (const Error& e) {
    err << "swkb: " << e.what() << '\n';
    return kExitTolerance;
  } catch (const std::exception& e) {
    err << "swkb: " << e.what() << '\n';
    return kExitTolerance;
  }
  return kExitTolerance;
}

}  // namespace swkb
