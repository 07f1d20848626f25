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

#include "mesh/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <memory>
#include <stdexcept>

#include "mesh/errors.hpp"

namespace mesh::crypto {

namespace {

constexpr char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '-') return 62;
  if (c == '_') return 63;
  return -1;
}

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

}  // namespace

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
    throw MeshError(ErrorCode::kIo, "system entropy source failed");
  }
  return out;
}

Bytes hmac_sha256(const Bytes& key, const Bytes& message) {
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(), message.size(),
           out.data(), &len) == nullptr) {
    throw MeshError(ErrorCode::kIo, "HMAC computation failed");
  }
  out.resize(len);
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  return hex_encode(Bytes(digest, digest + SHA256_DIGEST_LENGTH));
}

Bytes aes256gcm_encrypt(const Bytes& key, const Bytes& plaintext) {
  if (key.size() != kKeyBytes) {
    throw MeshError(ErrorCode::kInvalidArgument, "AES-256-GCM requires a 32-byte key");
  }
  Bytes nonce = random_bytes(kNonceBytes);
  Bytes out(kNonceBytes + plaintext.size() + kTagBytes);
  std::copy(nonce.begin(), nonce.end(), out.begin());

  CipherCtx ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1) {
    throw MeshError(ErrorCode::kIo, "cipher initialization failed");
  }
  int len = 0;
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), out.data() + kNonceBytes, &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    throw MeshError(ErrorCode::kIo, "encryption failed");
  }
  int final_len = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + kNonceBytes + len, &final_len) != 1) {
    throw MeshError(ErrorCode::kIo, "encryption finalization failed");
  }
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagBytes,
                          out.data() + kNonceBytes + plaintext.size()) != 1) {
    throw MeshError(ErrorCode::kIo, "tag extraction failed");
  }
  return out;
}

std::optional<Bytes> aes256gcm_decrypt(const Bytes& key, const Bytes& blob) {
  if (key.size() != kKeyBytes || blob.size() < kNonceBytes + kTagBytes) {
    return std::nullopt;
  }
  const std::size_t ct_len = blob.size() - kNonceBytes - kTagBytes;
  Bytes plaintext(ct_len);

  CipherCtx ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), blob.data()) != 1) {
    return std::nullopt;
  }
  int len = 0;
  if (ct_len > 0 && EVP_DecryptUpdate(ctx.get(), plaintext.data(), &len, blob.data() + kNonceBytes,
                                      static_cast<int>(ct_len)) != 1) {
    return std::nullopt;
  }
  Bytes tag(blob.end() - kTagBytes, blob.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagBytes, tag.data()) != 1) {
    return std::nullopt;
  }
  int final_len = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), plaintext.data() + len, &final_len) != 1) {
    return std::nullopt;  // authentication failure
  }
  return plaintext;
}

std::string base64url_encode(const Bytes& data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= data.size()) {
    std::uint32_t chunk = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += kB64Alphabet[(chunk >> 18) & 0x3f];
    out += kB64Alphabet[(chunk >> 12) & 0x3f];
    out += kB64Alphabet[(chunk >> 6) & 0x3f];
    out += kB64Alphabet[chunk & 0x3f];
    i += 3;
  }
  if (i + 1 == data.size()) {
    std::uint32_t chunk = data[i] << 16;
    out += kB64Alphabet[(chunk >> 18) & 0x3f];
    out += kB64Alphabet[(chunk >> 12) & 0x3f];
  } else if (i + 2 == data.size()) {
    std::uint32_t chunk = (data[i] << 16) | (data[i + 1] << 8);
    out += kB64Alphabet[(chunk >> 18) & 0x3f];
    out += kB64Alphabet[(chunk >> 12) & 0x3f];
    out += kB64Alphabet[(chunk >> 6) & 0x3f];
  }
  return out;
}

std::optional<Bytes> base64url_decode(const std::string& text) {
  if (text.size() % 4 == 1) return std::nullopt;
  Bytes out;
  out.reserve(text.size() / 4 * 3 + 2);
  std::uint32_t buffer = 0;
  int bits = 0;
  for (char c : text) {
    int v = b64_value(c);
    if (v < 0) return std::nullopt;
    buffer = (buffer << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((buffer >> bits) & 0xff));
    }
  }
  // Leftover bits must be zero padding of the final byte.
  if (bits > 0 && (buffer & ((1u << bits) - 1)) != 0) return std::nullopt;
  return out;
}

std::string hex_encode(const Bytes& data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out += digits[b >> 4];
    out += digits[b & 0xf];
  }
  return out;
}

std::optional<Bytes> hex_decode(const std::string& text) {
  if (text.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Bytes out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    int hi = nibble(text[i]);
    int lo = nibble(text[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

bool constant_time_equal(const Bytes& a, const Bytes& b) {
  if (a.size() != b.size()) return false;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace mesh::crypto
