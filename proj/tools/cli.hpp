#pragma once

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace bplab::cli {

// Bad configuration or command line (exit status 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  nlohmann::json params;  // every schema key present after validation
};

std::vector<std::string> commands();

// Reads a JSON object from a file path or, if the text starts with '{', from
// the text itself. The object holds "command" unless one is passed in.
RunConfig parse_config(const std::string& path_or_json, const std::string& command = "");
// Fills defaults, converts flag strings to their types and rejects unknown keys.
RunConfig validate(const std::string& command, const nlohmann::json& params);

// Runs a validated config; text results go to out. Returns the exit status.
int execute(const RunConfig& config, std::ostream& out);

// Whole command line, including usage errors mapped to status 2.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& bytes);

}  // namespace bplab::cli
