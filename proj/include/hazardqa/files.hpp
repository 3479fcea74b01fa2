#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace hazardqa {

/// Writes `contents` to a sibling temp file, flushes it, then renames it over
/// `path`. Readers observe either the old or the new contents.
void atomic_write_file(const std::filesystem::path& path, std::string_view contents);

/// Reads a whole file. Throws IoFailure when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace hazardqa
