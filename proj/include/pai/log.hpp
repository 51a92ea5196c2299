#pragma once

#include <string>

namespace pai::log {

enum class Level { off = 0, info = 1, debug = 2 };

/// Parsed once from the PAI_LOG environment variable (off|info|debug).
Level level();

void info(const std::string& message);
void debug(const std::string& message);

}  // namespace pai::log
