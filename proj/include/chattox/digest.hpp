#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

namespace chattox {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// First `chars` hex characters of the SHA-256 of `data`.
std::string short_digest(std::string_view data, std::size_t chars = 16);

/// SHA-256 over the file contents; throws Error(FileNotReadable).
std::string file_sha256_hex(const std::filesystem::path& path);

}  // namespace chattox
