#pragma once

// Test-only reference HMAC-SHA256, written from FIPS 180-4 / RFC 2104 and
// validated against the RFC 4231 vectors. Deliberately shares no code with
// the library's OpenSSL-backed path so the two can check each other.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace refcrypto {

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> message);

}  // namespace refcrypto
