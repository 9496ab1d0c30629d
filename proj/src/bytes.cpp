#include "tileof/bytes.hpp"

#include <cstdio>

namespace tileof {

namespace {

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_nibble(hex[i]);
    int lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

std::string mac_to_string(const MacAddress& mac) {
  char buf[18];
  const auto& a = mac.array();
  std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", a[0], a[1], a[2], a[3], a[4],
                a[5]);
  return buf;
}

MacAddress mac_from_string(std::string_view text) {
  if (text.size() != 17) throw std::invalid_argument("MAC address must be aa:bb:cc:dd:ee:ff");
  std::array<std::uint8_t, 6> a{};
  for (std::size_t i = 0; i < 6; ++i) {
    if (i > 0 && text[i * 3 - 1] != ':') throw std::invalid_argument("MAC address missing ':'");
    int hi = hex_nibble(text[i * 3]);
    int lo = hex_nibble(text[i * 3 + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid MAC hex digit");
    a[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return MacAddress(a);
}

Bytes concat(std::initializer_list<std::span<const std::uint8_t>> parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  Bytes out;
  out.reserve(total);
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace tileof
