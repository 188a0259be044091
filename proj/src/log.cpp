#include "qospred/log.hpp"

#include <iostream>
#include <mutex>

namespace qospred::log {

namespace {

std::mutex g_mutex;
Level g_min = Level::Info;

std::string_view level_name(Level l) {
  switch (l) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warning: return "warning";
    case Level::Error: return "error";
  }
  return "?";
}

Sink& sink() {
  static Sink s = [](Level l, std::string_view m) {
    std::cerr << '[' << level_name(l) << "] " << m << '\n';
  };
  return s;
}

}  // namespace

Sink set_sink(Sink s) {
  std::lock_guard lock(g_mutex);
  Sink old = std::move(sink());
  sink() = std::move(s);
  return old;
}

void set_min_level(Level level) {
  std::lock_guard lock(g_mutex);
  g_min = level;
}

void write(Level level, std::string_view msg) {
  std::lock_guard lock(g_mutex);
  if (level < g_min || !sink()) return;
  sink()(level, msg);
}

}  // namespace qospred::log
