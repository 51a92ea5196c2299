#include "pai/log.hpp"

#include <cstdlib>
#include <iostream>

namespace pai::log {

Level level() {
  static const Level parsed = [] {
    const char* env = std::getenv("PAI_LOG");
    if (env == nullptr) return Level::off;
    const std::string value(env);
    if (value == "debug") return Level::debug;
    if (value == "info") return Level::info;
    return Level::off;
  }();
  return parsed;
}

void info(const std::string& message) {
  if (level() >= Level::info) std::cerr << "[pai] " << message << "\n";
}

void debug(const std::string& message) {
  if (level() >= Level::debug) std::cerr << "[pai:debug] " << message << "\n";
}

}  // namespace pai::log
