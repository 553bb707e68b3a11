#pragma once

#include <string>

namespace netmisfit {

inline constexpr const char* kVersion = "0.1.0";

enum class Decision { WellSpecified, Misspecified, Degenerate };

inline std::string to_string(Decision d) {
  switch (d) {
    case Decision::WellSpecified: return "WellSpecified";
    case Decision::Misspecified: return "Misspecified";
    case Decision::Degenerate: return "Degenerate";
  }
  return "Degenerate";
}

}  // namespace netmisfit
