#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lfrac::cli {

struct CommonArgs {
  std::string config_path;
  std::string out_path;             // empty when --out was not given
  std::vector<std::string> spaces;  // --space occurrences, in order
  int steps = -1;                   // -1 falls back to the config value
  std::uint64_t seed = 0;
  int threads = 1;
};

int cmd_validate(const CommonArgs& a);
int cmd_solve(const CommonArgs& a);
int cmd_check(const CommonArgs& a);
int cmd_seminorm(const CommonArgs& a);
int cmd_attractor(const CommonArgs& a);

}  // namespace lfrac::cli
