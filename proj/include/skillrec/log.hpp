#pragma once

#include <iostream>
#include <string_view>

namespace skillrec {

inline void log_warning(std::string_view message) {
  std::cerr << "[warn] " << message << '\n';
}

inline void log_info(std::string_view message) {
  std::cerr << "[info] " << message << '\n';
}

}  // namespace skillrec
