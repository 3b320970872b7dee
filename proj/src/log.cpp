#include "excitnet/log.hpp"

#include <atomic>
#include <cstdio>

namespace excitnet::log {
namespace {
std::atomic<Level> g_level{Level::warning};
}

void set_level(Level l) { g_level.store(l); }
Level level() { return g_level.load(); }

void warn(std::string_view message) {
  if (level() >= Level::warning)
    std::fprintf(stderr, "warning: %.*s\n", static_cast<int>(message.size()), message.data());
}

void info(std::string_view message) {
  if (level() >= Level::info)
    std::fprintf(stderr, "%.*s\n", static_cast<int>(message.size()), message.data());
}

}  // namespace excitnet::log
