#pragma once

// Command-line front end: bench | estimate | verify.
//
// Exit status: 0 success, 2 usage error, 1 runtime or numerical error.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "steinshrink/linalg.hpp"

namespace steinshrink::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Bad or inconsistent flags.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Dense matrix, one row per line, comma-separated, no header. Throws Error
/// naming the first bad line (1-based) for ragged or unparsable rows.
Matrix read_matrix_csv(const std::filesystem::path& path);
Matrix parse_matrix_csv(const std::string& text);
std::string format_matrix_csv(const Matrix& m);

/// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace steinshrink::cli
