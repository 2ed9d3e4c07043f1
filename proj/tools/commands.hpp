#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace impalloc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitVerify = 4,
  kExitReproduce = 5,
};

struct AllocateArgs {
  std::filesystem::path config;
  std::filesystem::path out;
  std::string format = "json";
};

struct SweepArgs {
  std::filesystem::path config;
  std::string param;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
  std::filesystem::path out;
};

struct VerifyArgs {
  std::filesystem::path config;
  std::string oracle;
  int trials = 1000;
  std::optional<std::uint64_t> seed;
};

struct ReproduceArgs {
  std::string experiment;
  std::filesystem::path out;
};

/// Each command reports on `out`/`err` and returns the process exit code.
int cmd_allocate(const AllocateArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int cmd_reproduce(const ReproduceArgs& args, std::ostream& out, std::ostream& err);

}  // namespace impalloc::cli
