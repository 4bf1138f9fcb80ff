#pragma once

#include <string>
#include <vector>

namespace fraclab {

/// Non-fatal numerical warning raised by an operation (for example a lattice
/// truncation whose analytic tail bound exceeds the configured tolerance).
struct Diagnostic {
  std::string code;
  std::string message;
  double value = 0.0;
};

using Diagnostics = std::vector<Diagnostic>;

inline void report(Diagnostics* sink, std::string code, std::string message, double value) {
  if (sink != nullptr) {
    sink->push_back(Diagnostic{std::move(code), std::move(message), value});
  }
}

}  // namespace fraclab
