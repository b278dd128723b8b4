#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swkb/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Singular WKB transfer matrices and spectra"};
  app.require_subcommand(1);
  swkb::RunOptions opts;
  swkb::Command command = swkb::Command::Validate;

  const struct {
    swkb::Command cmd;
    const char* help;
  } commands[] = {
      {swkb::Command::Validate, "Check admissibility and print the gap delta"},
      {swkb::Command::Eigenvalues, "Eigenvalues by each configured method and by the oracle"},
      {swkb::Command::Transfer, "Transfer matrices over study.h at study.energy"},
      {swkb::Command::Fit, "Least-squares fit of the correction matrices"},
      {swkb::Command::Study, "Convergence of each method against the oracle"},
      {swkb::Command::Check, "Wronskian, determinant and realness checks"},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(swkb::to_string(c.cmd), c.help);
    sub->add_option("--config", opts.config_path, "Config file (key=value lines)")->required();
    sub->add_option("--out", opts.out_dir, "Output directory for CSV files");
    sub->add_option("--threads", opts.threads, "Worker threads (default: SWKB_THREADS or 1)");
    sub->callback([&command, cmd = c.cmd] { command = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return swkb::kExitConfig;
  }
  return swkb::run(command, opts, std::cout, std::cerr);
}
