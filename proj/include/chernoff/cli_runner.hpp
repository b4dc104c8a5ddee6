#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chernoff/mary_database.hpp"
#include "chernoff/measurement.hpp"

namespace chernoff {

struct RunConfig {
  std::optional<PsfModel> psf;
  int basis_order = 4;
  std::vector<ObjectModel> objects;
  bool recenter = true;
  std::vector<double> gammas;
  std::vector<MeasurementSpec> measurements;
  DatabaseSpec database;
  std::vector<int> mx_values;
  double threshold = 1e-4;
  bool threshold_relative = false;
  long trials = 100000;
  std::vector<long> photons;
  double photons_xi_min = 1.5;
  double photons_xi_max = 6.0;
  int photons_count = 7;
  std::uint64_t seed = 1;
  double epsilon = 1e-3;
  int llr_bins = 192;
  std::string canonical;  // normalized JSON used for the config hash
};

// Parses and validates a JSON document for the given subcommand. Unknown keys and invalid
// values throw Error(Config) with the offending path in the message.
RunConfig parse_config(const std::string& text, const std::string& command,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

std::uint64_t fnv1a64(const std::string& data);

struct RunOptions {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

// Runs one subcommand and writes its CSV files. Returns 0, 1 (config error) or 2 (some rows failed).
int run_command(const RunOptions& opts, std::ostream& log);

// Full command-line entry point.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace chernoff
