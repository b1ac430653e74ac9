#pragma once

#include <stdexcept>
#include <string>

namespace ltcprune {

// Error categories map 1:1 onto CLI exit codes:
//   config_error -> 2, data_error -> 3, mismatch_error -> 4.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad or degenerate data: failed integrations, malformed files, short segments.
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model/dataset disagreement: unknown channel names, shape conflicts.
struct mismatch_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ltcprune
