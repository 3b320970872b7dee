#pragma once

#include <string_view>

namespace excitnet::log {

enum class Level { quiet, warning, info };

/// Process-wide verbosity; defaults to warning.
void set_level(Level level);
Level level();

void warn(std::string_view message);
void info(std::string_view message);

}  // namespace excitnet::log
