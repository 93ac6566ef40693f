#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace jspec::cli {

/// Raised when the harness finds a broken exact identity (exit code 2).
class IdentityFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a ratio window violates the stability policy (exit code 3).
class WindowBreach : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIdentity = 2;
inline constexpr int kExitWindow = 3;

/// Resolved option values of one run, recorded in every output header.
struct RunMetadata {
  std::string command;
  std::map<std::string, std::string> config;  // option name -> resolved value
  std::uint64_t seed = 0;

  /// FNV-1a 64 over the sorted "name=value" lines, as 16 hex digits.
  std::string config_hash() const;
};

/// A table of already formatted cells plus free-form check lines.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;  // "name: value" lines

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

/// %.17g
std::string fmt(double x);

std::string table_csv(const Table& t, const RunMetadata& meta);
std::string table_json(const Table& t, const RunMetadata& meta);

/// "# key: value" lines for CSV headers.
std::string metadata_comment(const RunMetadata& meta);
/// Metadata as a JSON object string.
std::string metadata_json(const RunMetadata& meta);

/// Writes all files only after every one has been rendered; throws std::runtime_error on I/O failure.
void write_files(const std::vector<std::pair<std::string, std::string>>& files);

/// argv with the keys of any `--config FILE` JSON object inserted as flags right after the
/// subcommand name, so that explicit flags (which come later) take precedence.
std::vector<std::string> expand_config(int argc, char** argv);

/// "n=3" or "3" -> value of the key; throws std::invalid_argument.
double keyed_value(const std::string& text, const std::string& key);

/// "1,-1,1" -> {1, -1, 1}
std::vector<int> parse_int_list(const std::string& text);

}  // namespace jspec::cli
