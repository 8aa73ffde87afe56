#pragma once

#include <string>

namespace stokeshape {

// Shortest round-trip decimal representation (deterministic across runs).
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);
bool file_exists(const std::string& path);

}  // namespace stokeshape
