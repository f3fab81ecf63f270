#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include <nlohmann/json.hpp>

namespace skillrec::io {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

nlohmann::json read_json(const std::filesystem::path& path);

/// Calls `on_line(json, line_number)` for every non-blank line. Parse
/// failures become Error(ParseError) naming the file and line.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&, std::size_t)>& on_line);

}  // namespace skillrec::io
