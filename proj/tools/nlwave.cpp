// nlwave: simulate, converge, truncation and decay studies for
// u_t + (beta * f(u))_x = 0 on a truncated uniform grid.

#include <CLI11.hpp>

#include <map>
#include <string>

#include "nlwave/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Semi-discrete solver and experiment harness for nonlocal unidirectional wave equations"};
  app.require_subcommand(1);

  std::string config;
  std::string output;
  unsigned workers = nlwave::default_worker_count();
  nlwave::ConvolutionPath path = nlwave::ConvolutionPath::Auto;
  bool no_timing = false;

  const std::map<std::string, nlwave::ConvolutionPath> paths{
      {"auto", nlwave::ConvolutionPath::Auto}, {"on", nlwave::ConvolutionPath::Fast}, {"off", nlwave::ConvolutionPath::Direct}};

  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "integrate one configuration and write profiles at every output time"},
      {"converge", "mesh-refinement study on a fixed domain (convergence.csv)"},
      {"truncation", "domain-truncation study at fixed mesh size (truncation.csv)"},
      {"decay", "check a calibrated exponential decay envelope at every snapshot (decay.csv)"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", output, "output directory (overrides $NLWAVE_OUTPUT_DIR and [output] dir)");
    sub->add_option("--workers", workers, "concurrent runs")->check(CLI::PositiveNumber);
    sub->add_option("--fast-conv", path, "convolution path")
        ->transform(CLI::CheckedTransformer(paths, CLI::ignore_case));
    sub->add_flag("--no-timing", no_timing, "write 0 for wall-clock columns (byte-reproducible output)");
  }

  CLI11_PARSE(app, argc, argv);

  nlwave::CommandOptions opt;
  if (!output.empty()) opt.output_dir = output;
  opt.workers = workers;
  opt.path = path;
  opt.record_timing = !no_timing;

  const std::map<std::string, nlwave::Command> dispatch{{"simulate", nlwave::Command::Simulate},
                                                        {"converge", nlwave::Command::Converge},
                                                        {"truncation", nlwave::Command::Truncation},
                                                        {"decay", nlwave::Command::Decay}};
  const auto* sub = app.get_subcommands().front();
  return nlwave::run_command(dispatch.at(sub->get_name()), config, opt);
}
