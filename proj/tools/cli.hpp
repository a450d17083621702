#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace parosc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Run one command; `args` excludes the program name. Data goes to `out`
/// unless --out names a file, diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace parosc::cli
