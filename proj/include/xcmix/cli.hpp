#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xcmix::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kSamplerError = 3;

inline constexpr const char* kOutputRootEnv = "XCMIX_OUTPUT_ROOT";

// Runs one command line (args excludes the program name) and returns its exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_file(const std::string& path);

} // namespace xcmix::cli
