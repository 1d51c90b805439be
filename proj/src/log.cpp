#include "depmig/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace depmig::log {
namespace {

std::mutex sink_mutex;
std::ostream* sink = &std::cerr;
std::atomic<Level> min_level{Level::info};

std::string_view level_name(Level level) {
    switch (level) {
    case Level::debug: return "DEBUG";
    case Level::info: return "INFO";
    case Level::warn: return "WARN";
    case Level::error: return "ERROR";
    }
    return "INFO";
}

void append_value(std::string& line, std::string_view value) {
    const bool plain = !value.empty() && value.find_first_of(" \t\n\"=") == std::string_view::npos;
    if (plain) {
        line += value;
        return;
    }
    line += '"';
    for (char c : value) {
        switch (c) {
        case '"': line += "\\\""; break;
        case '\\': line += "\\\\"; break;
        case '\n': line += "\\n"; break;
        case '\t': line += "\\t"; break;
        default: line += c;
        }
    }
    line += '"';
}

} // namespace

std::string format_line(Level level, std::string_view event, std::initializer_list<Field> fields) {
    std::string line(level_name(level));
    line += " event=";
    append_value(line, event);
    for (const auto& [key, value] : fields) {
        line += ' ';
        line += key;
        line += '=';
        append_value(line, value);
    }
    return line;
}

void write(Level level, std::string_view event, std::initializer_list<Field> fields) {
    if (level < min_level.load()) {
        return;
    }
    const auto line = format_line(level, event, fields);
    const std::lock_guard lock(sink_mutex);
    *sink << line << '\n';
    sink->flush();
}

void set_min_level(Level level) { min_level.store(level); }

void set_sink(std::ostream& stream) {
    const std::lock_guard lock(sink_mutex);
    sink = &stream;
}

} // namespace depmig::log
