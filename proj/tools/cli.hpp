#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "stablemix/estimation.hpp"

namespace stablemix::cli {

// Process exit codes.
enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kIdentifiability = 3,
  kNonConvergence = 4,
  kCapacity = 5,
};

/// Runs the command line `args` (without the program name). Documents go to
/// `out` unless --output is given; structured errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

nlohmann::ordered_json fit_to_json(const FitResult& fit);
FitResult fit_from_json(const nlohmann::ordered_json& doc);

}  // namespace stablemix::cli
