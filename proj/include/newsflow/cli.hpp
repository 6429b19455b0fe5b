#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace newsflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;

std::string_view version() noexcept;

/// Entry point of the `newsflow` tool. `args` excludes the program name;
/// `seed_env` is the raw NEWSFLOW_SEED value (nullptr when unset).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const char* seed_env = nullptr);

}  // namespace newsflow
