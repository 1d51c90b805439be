#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

namespace depmig::log {

enum class Level { debug, info, warn, error };

using Field = std::pair<std::string_view, std::string>;

/// Writes one `LEVEL key=value ...` line. Values containing spaces or quotes are quoted.
void write(Level level, std::string_view event, std::initializer_list<Field> fields = {});

inline void debug(std::string_view event, std::initializer_list<Field> fields = {}) {
    write(Level::debug, event, fields);
}
inline void info(std::string_view event, std::initializer_list<Field> fields = {}) {
    write(Level::info, event, fields);
}
inline void warn(std::string_view event, std::initializer_list<Field> fields = {}) {
    write(Level::warn, event, fields);
}
inline void error(std::string_view event, std::initializer_list<Field> fields = {}) {
    write(Level::error, event, fields);
}

void set_min_level(Level level);
/// Redirects output (default std::cerr). The stream must outlive all logging.
void set_sink(std::ostream& sink);

std::string format_line(Level level, std::string_view event, std::initializer_list<Field> fields);

} // namespace depmig::log
