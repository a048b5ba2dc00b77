#pragma once

#include "config.hpp"

#include <filesystem>

namespace loop3pt::cli {

enum ExitCode { kOk = 0, kValidation = 2, kPartial = 3 };

struct Options {
  std::filesystem::path out = "loop3pt_out";
  int workers = 1;
  bool resume = false;
};

int cmd_omega(const RunConfig& cfg, const Options& opt);
int cmd_lattice(const RunConfig& cfg, const Options& opt);
int cmd_compare(const RunConfig& cfg, const Options& opt);
int cmd_oracle(const RunConfig& cfg, const Options& opt);

}  // namespace loop3pt::cli
