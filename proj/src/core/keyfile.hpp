#pragma once

#include <string>
#include <vector>

#include "onetime.hpp"

namespace stego {

// Binary one-time key file: header (magic, version, m, t, eps_F, r), the
// 2r seed bits, the code block, and the channel binding. Round-trips
// bit-exactly.
std::vector<std::uint8_t> serialize_key(const StegoKey& key);
StegoKey deserialize_key(const std::vector<std::uint8_t>& bytes);

void save_key_file(const StegoKey& key, const std::string& path);
StegoKey load_key_file(const std::string& path);

// Atomic write: temp file in the same directory, then rename over target.
void atomic_write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_file_bytes(const std::string& path);

}  // namespace stego
