// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0
//
// dwlab command-line front end. Links only the C API.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dwlab.h"

int main(int argc, char **argv)
{
  CLI::App app{"dwlab: damped-wave spectra, pressure, and decay experiments"};
  app.require_subcommand(0, 1);

  std::string config_path, out_dir = ".";
  unsigned long seed = 0;
  bool seed_given = false;
  int threads = 0;
  bool print_defaults = false;

  app.add_flag("--print-defaults", print_defaults,
               "Print the default config JSON and exit");

  std::vector<CLI::App *> subs;
  for (const char *name : {"spectrum", "pressure", "decay", "verify-gap"})
  {
    CLI::App *sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Experiment config (JSON)")
        ->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Seed override")
        ->each([&seed_given](const std::string &) { seed_given = true; });
    sub->add_option("--threads", threads, "Thread cap");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  if (print_defaults)
  {
    const int n = dwlab_default_config(nullptr, 0);
    std::string buf(n + 1, '\0');
    dwlab_default_config(buf.data(), n + 1);
    std::printf("%s\n", buf.c_str());
    return 0;
  }
  if (app.get_subcommands().empty())
  {
    std::fprintf(stderr, "%s\n", app.help().c_str());
    return DWLAB_ERR_VALIDATION;
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  if (threads == 0)
    if (const char *env = std::getenv("DWLAB_THREADS"))
      threads = std::atoi(env);

  dwlab_config *cfg = nullptr;
  int rc = dwlab_config_load(config_path.c_str(), &cfg);
  if (rc != DWLAB_OK)
  {
    std::fprintf(stderr, "dwlab: %s\n", dwlab_last_error());
    return rc;
  }
  rc = dwlab_config_set_experiment(cfg, experiment.c_str());
  if (rc == DWLAB_OK)
  {
    if (seed_given)
      dwlab_config_set_seed(cfg, seed);
    dwlab_config_set_out_dir(cfg, out_dir.c_str());
    dwlab_config_set_threads(cfg, threads);
    rc = dwlab_run(cfg);
  }
  if (rc != DWLAB_OK)
    std::fprintf(stderr, "dwlab: %s\n", dwlab_last_error());
  else
    std::printf("dwlab %s: wrote artifacts to %s\n", experiment.c_str(),
                out_dir.c_str());
  dwlab_config_free(cfg);
  return rc;
}
