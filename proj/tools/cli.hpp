#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace degennes::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitVerification = 3;

/// Row-oriented output: CSV (header, rows, trailing "# key,value" summary
/// lines) or JSON (metadata, columns, rows, summary; numbers as strings).
struct Table {
    std::string command;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> summary;
};

/// "%.12e".
std::string fmt(double value);

void write_csv(const Table& table, std::ostream& os);
void write_json(const Table& table, std::ostream& os);

/// Entry point shared by the executable and the tests. Data goes to the
/// --out file (or `out` with --stdout); diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace degennes::cli
