#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace satakit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;
inline constexpr int kExitInternal = 70;
inline constexpr int kExitIo = 74;

/// Environment variable that makes every time-sensitive command require --now.
inline constexpr const char* kDeterministicEnv = "SATAKIT_DETERMINISTIC";

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace satakit::cli
