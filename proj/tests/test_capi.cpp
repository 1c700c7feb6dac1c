// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "dwlab.h"

namespace fs = std::filesystem;

namespace
{

std::string write_tmp(const std::string &name, const std::string &body)
{
  const std::string path = (fs::temp_directory_path() / name).string();
  std::ofstream f(path, std::ios::binary);
  f << body;
  return path;
}

}  // namespace

TEST_CASE("version and default config")
{
  CHECK(std::strlen(dwlab_version()) > 0);
  const int n = dwlab_default_config(nullptr, 0);
  REQUIRE(n > 0);
  std::string buf(size_t(n) + 1, '\0');
  CHECK(dwlab_default_config(buf.data(), n + 1) == n);
  CHECK(buf.find("\"experiment\"") != std::string::npos);
}

TEST_CASE("load failure returns the validation code and a message")
{
  dwlab_config *cfg = reinterpret_cast<dwlab_config *>(1);
  CHECK(dwlab_config_load("/nonexistent/cfg.json", &cfg) ==
        DWLAB_ERR_VALIDATION);
  CHECK(cfg == nullptr);
  CHECK(std::strlen(dwlab_last_error()) > 0);

  const auto bad = write_tmp("dwlab_capi_bad.json",
                             R"({"experiment": "spectrum",
                                 "geometry": {"kind": "circle"},
                                 "bogus": 1})");
  CHECK(dwlab_config_load(bad.c_str(), &cfg) == DWLAB_ERR_VALIDATION);
  CHECK(std::string(dwlab_last_error()).find("bogus") != std::string::npos);
}

TEST_CASE("full run through the C API")
{
  const auto path = write_tmp(
      "dwlab_capi_ok.json",
      R"({"geometry": {"kind": "circle", "length": 6.283185307179586,
                       "resolution": 16},
          "damping": {"kind": "constant", "a0": 0.1},
          "seed": 2})");
  dwlab_config *cfg = nullptr;
  REQUIRE(dwlab_config_load(path.c_str(), &cfg) == DWLAB_OK);
  // Subcommand-style experiment override with compatibility checking.
  CHECK(dwlab_config_set_experiment(cfg, "warp") == DWLAB_ERR_VALIDATION);
  REQUIRE(dwlab_config_set_experiment(cfg, "spectrum") == DWLAB_OK);

  const std::string out = (fs::temp_directory_path() / "dwlab_capi_out")
                              .string();
  fs::remove_all(out);
  dwlab_config_set_out_dir(cfg, out.c_str());
  dwlab_config_set_seed(cfg, 9);
  dwlab_config_set_threads(cfg, 1);
  CHECK(dwlab_run(cfg) == DWLAB_OK);
  CHECK(fs::exists(out + "/spectrum.csv"));
  CHECK(fs::exists(out + "/manifest.json"));
  dwlab_config_free(cfg);
}
