// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#include "dwlab.h"

#include <cstring>
#include <string>

#include <Eigen/Core>

#include "runner.hpp"

struct dwlab_config
{
  dwlab::RunConfig cfg;
};

namespace
{

thread_local std::string g_last_error;

int fail(int code, const std::string &msg)
{
  g_last_error = msg;
  return code;
}

}  // namespace

extern "C"
{

int dwlab_config_load(const char *path, dwlab_config **out)
{
  if (out == nullptr)
    return DWLAB_ERR_VALIDATION;
  *out = nullptr;
  if (path == nullptr)
    return fail(DWLAB_ERR_VALIDATION, "null config path");
  try
  {
    auto *handle = new dwlab_config{dwlab::load_config(path)};
    *out = handle;
    g_last_error.clear();
    return DWLAB_OK;
  }
  catch (const std::exception &e)
  {
    return fail(DWLAB_ERR_VALIDATION, e.what());
  }
}

void dwlab_config_free(dwlab_config *cfg)
{
  delete cfg;
}

void dwlab_config_set_seed(dwlab_config *cfg, unsigned long seed)
{
  if (cfg)
  {
    cfg->cfg.seed = seed;
    cfg->cfg.pressure.seed = seed;
  }
}

void dwlab_config_set_out_dir(dwlab_config *cfg, const char *dir)
{
  if (cfg && dir)
    cfg->cfg.out_dir = dir;
}

void dwlab_config_set_threads(dwlab_config *cfg, int threads)
{
  if (cfg)
    cfg->cfg.threads = threads;
}

int dwlab_config_set_experiment(dwlab_config *cfg, const char *name)
{
  if (cfg == nullptr || name == nullptr)
    return fail(DWLAB_ERR_VALIDATION, "null experiment override");
  cfg->cfg.experiment = name;
  const std::string err = dwlab::experiment_compat_error(cfg->cfg);
  if (!err.empty())
    return fail(DWLAB_ERR_VALIDATION, err);
  g_last_error.clear();
  return DWLAB_OK;
}

int dwlab_run(const dwlab_config *cfg)
{
  if (cfg == nullptr)
    return fail(DWLAB_ERR_VALIDATION, "null config handle");
  const std::string err = dwlab::experiment_compat_error(cfg->cfg);
  if (!err.empty())
    return fail(DWLAB_ERR_VALIDATION, err);
  try
  {
    if (cfg->cfg.threads > 0)
      Eigen::setNbThreads(cfg->cfg.threads);
    const dwlab::RunManifest man = dwlab::run_experiment(cfg->cfg);
    if (!man.ok)
      return fail(DWLAB_ERR_NUMERICAL, man.error);
    g_last_error.clear();
    return DWLAB_OK;
  }
  catch (const std::exception &e)
  {
    return fail(DWLAB_ERR_NUMERICAL, e.what());
  }
}

const char *dwlab_last_error(void)
{
  return g_last_error.c_str();
}

const char *dwlab_version(void)
{
  return dwlab::kVersion;
}

int dwlab_default_config(char *buf, int cap)
{
  const std::string s = dwlab::default_config_json();
  if (buf != nullptr && cap > 0)
  {
    const int n = std::min(cap - 1, int(s.size()));
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return int(s.size());
}

}  // extern "C"
