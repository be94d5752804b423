#pragma once
#include <array>
#include <cstdio>
#include <string>
#include <vector>

namespace torfek {

// 17 significant digits: round-trip exact for doubles, byte-stable across runs.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Minimal CSV: no quoting needed for numeric tables.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace torfek
