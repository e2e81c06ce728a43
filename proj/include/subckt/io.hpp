// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

namespace subckt {

std::string read_file(const std::filesystem::path& path);

/// Write-then-rename so readers never observe partial files.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace subckt
