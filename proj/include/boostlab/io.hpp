#pragma once

#include <filesystem>
#include <string>

namespace boostlab {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over the target, so readers
// never observe a partially written output.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace boostlab
