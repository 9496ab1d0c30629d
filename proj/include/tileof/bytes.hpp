#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tileof {

using Bytes = std::vector<std::uint8_t>;

// Simulation time, in seconds since the scenario epoch.
using Timestamp = std::int64_t;
using Duration = std::int64_t;

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(std::string_view hex);

// Fixed-length byte string with a phantom tag so the different 16-byte
// secrets cannot be mixed up at compile time.
template <std::size_t N, typename Tag>
class FixedBytes {
 public:
  static constexpr std::size_t kSize = N;

  constexpr FixedBytes() = default;
  explicit constexpr FixedBytes(const std::array<std::uint8_t, N>& data) : data_(data) {}

  static FixedBytes from_bytes(std::span<const std::uint8_t> data) {
    if (data.size() != N) {
      throw std::invalid_argument("expected " + std::to_string(N) + " bytes, got " +
                                  std::to_string(data.size()));
    }
    FixedBytes out;
    std::copy(data.begin(), data.end(), out.data_.begin());
    return out;
  }

  static FixedBytes from_hex(std::string_view hex) { return from_bytes(tileof::from_hex(hex)); }

  static constexpr FixedBytes filled(std::uint8_t value) {
    FixedBytes out;
    out.data_.fill(value);
    return out;
  }

  std::string hex() const { return to_hex(data_); }
  const std::array<std::uint8_t, N>& array() const { return data_; }
  std::span<const std::uint8_t, N> bytes() const { return data_; }
  std::uint8_t operator[](std::size_t i) const { return data_[i]; }

  auto operator<=>(const FixedBytes&) const = default;

 private:
  std::array<std::uint8_t, N> data_{};
};

// The three 16-byte secrets at the vendor, tag-owner-server, and session
// trust layers.
using InterimAuthKey = FixedBytes<16, struct InterimAuthKeyTag>;
using AuthKey = FixedBytes<16, struct AuthKeyTag>;
using TagKey = FixedBytes<16, struct TagKeyTag>;

// Static 8-byte tag identifier, a deterministic function of the tag's MAC.
using TileId = FixedBytes<8, struct TileIdTag>;

// Full 32-byte HMAC output used as the per-tag identifier seed.
using PrivateIdSeed = FixedBytes<32, struct PrivateIdSeedTag>;

// Challenge-response fields.
using RandA = FixedBytes<14, struct RandATag>;
using RandT = FixedBytes<10, struct RandTTag>;
using SresT = FixedBytes<4, struct SresTTag>;

using ToaToken = FixedBytes<4, struct ToaTokenTag>;

using ClientUuid = FixedBytes<16, struct ClientUuidTag>;
using UserUuid = FixedBytes<16, struct UserUuidTag>;

using MacAddress = FixedBytes<6, struct MacAddressTag>;

// "aa:bb:cc:dd:ee:ff" (lowercase).
std::string mac_to_string(const MacAddress& mac);
MacAddress mac_from_string(std::string_view text);

// 8-byte rotating pseudonymous identifier. Identity (comparison, hashing)
// is the broadcast bytes alone; the derivation counter is carried along as
// metadata when the deriving side knows it, and is kUnknownCtr for
// identifiers merely observed on the air.
class PrivateId {
 public:
  static constexpr int kUnknownCtr = -1;

  constexpr PrivateId() = default;
  explicit constexpr PrivateId(const std::array<std::uint8_t, 8>& data, int ctr = kUnknownCtr)
      : data_(data), ctr_(ctr) {}

  static PrivateId from_bytes(std::span<const std::uint8_t> data, int ctr = kUnknownCtr) {
    if (data.size() != 8) throw std::invalid_argument("PrivateId expects 8 bytes");
    std::array<std::uint8_t, 8> a{};
    std::copy(data.begin(), data.end(), a.begin());
    return PrivateId(a, ctr);
  }

  static PrivateId from_hex(std::string_view hex, int ctr = kUnknownCtr) {
    return from_bytes(tileof::from_hex(hex), ctr);
  }

  std::string hex() const { return to_hex(data_); }
  const std::array<std::uint8_t, 8>& array() const { return data_; }
  int ctr() const { return ctr_; }

  bool operator==(const PrivateId& other) const { return data_ == other.data_; }
  std::strong_ordering operator<=>(const PrivateId& other) const { return data_ <=> other.data_; }

 private:
  std::array<std::uint8_t, 8> data_{};
  int ctr_ = kUnknownCtr;
};

using MacBytes = FixedBytes<4, struct MacBytesTag>;

// 4-byte message authentication tag plus the counter value it covers.
struct MessageMac {
  MacBytes bytes;
  std::uint16_t ctr = 0;
};

// Activation / session challenge-response triplet.
struct AuthTriplet {
  RandA rand_a;
  RandT rand_t;
  SresT sres_t;

  auto operator<=>(const AuthTriplet&) const = default;
};

Bytes concat(std::initializer_list<std::span<const std::uint8_t>> parts);

}  // namespace tileof

template <std::size_t N, typename Tag>
struct std::hash<tileof::FixedBytes<N, Tag>> {
  std::size_t operator()(const tileof::FixedBytes<N, Tag>& v) const noexcept {
    // FNV-1a over the bytes.
    std::size_t h = 14695981039346656037ull;
    for (std::uint8_t b : v.array()) h = (h ^ b) * 1099511628211ull;
    return h;
  }
};

template <>
struct std::hash<tileof::PrivateId> {
  std::size_t operator()(const tileof::PrivateId& v) const noexcept {
    std::size_t h = 14695981039346656037ull;
    for (std::uint8_t b : v.array()) h = (h ^ b) * 1099511628211ull;
    return h;
  }
};
