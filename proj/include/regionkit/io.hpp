#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace regionkit::io {

// Throws input_error naming the path when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view content);

// Writes to "<path>.tmp" and renames into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string_view trim(std::string_view s);

// Splits one CSV record. Double-quoted fields may contain commas; "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line);

// Splits text into lines, dropping '\r' and a UTF-8 BOM on the first line.
std::vector<std::string> split_lines(std::string_view text);

}  // namespace regionkit::io
