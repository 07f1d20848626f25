// Copyright 2026 the meshplane authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mesh::crypto {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kKeyBytes = 32;    // AES-256 / HMAC-SHA-256
inline constexpr std::size_t kNonceBytes = 12;  // GCM 96-bit nonce
inline constexpr std::size_t kTagBytes = 16;

Bytes random_bytes(std::size_t n);

Bytes hmac_sha256(const Bytes& key, const Bytes& message);
std::string sha256_hex(const std::string& data);

// Encrypted blob layout: nonce(12) || ciphertext || tag(16). A fresh random
// nonce is drawn per call.
Bytes aes256gcm_encrypt(const Bytes& key, const Bytes& plaintext);
// Empty optional on authentication failure (wrong key, tamper, truncation).
std::optional<Bytes> aes256gcm_decrypt(const Bytes& key, const Bytes& blob);

// Unpadded URL-safe base64 (RFC 4648 §5).
std::string base64url_encode(const Bytes& data);
std::optional<Bytes> base64url_decode(const std::string& text);

std::string hex_encode(const Bytes& data);
std::optional<Bytes> hex_decode(const std::string& text);

bool constant_time_equal(const Bytes& a, const Bytes& b);

inline Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(const Bytes& b) { return std::string(b.begin(), b.end()); }

}  // namespace mesh::crypto
