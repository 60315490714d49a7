#pragma once

#include <string>
#include <vector>

namespace bpa {

/// Collects non-fatal warnings raised while processing one input.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

inline void warn(Diagnostics* diag, std::string message) {
  if (diag != nullptr) diag->warn(std::move(message));
}

}  // namespace bpa
