#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selforg/io.hpp"

namespace selforg::cli {

struct Invocation {
  std::string subcommand;
  Config config;           ///< resolved, every schema key present
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
};

struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;  ///< name, content
};

const std::vector<std::string>& subcommand_names();
const std::vector<KeySpec>& schema_for(const std::string& subcommand);

/// Runs a subcommand and returns the files it produces, not yet written.
Outputs run_command(const Invocation& inv, const std::string& manifest_id);

}  // namespace selforg::cli
