#include "tileof/crypto.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/params.h>

#include <memory>
#include <stdexcept>

namespace tileof::crypto {

namespace {

struct MacDeleter {
  void operator()(EVP_MAC* mac) const { EVP_MAC_free(mac); }
  void operator()(EVP_MAC_CTX* ctx) const { EVP_MAC_CTX_free(ctx); }
};

EVP_MAC* hmac_algorithm() {
  static EVP_MAC* mac = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
  if (mac == nullptr) throw std::runtime_error("OpenSSL HMAC unavailable");
  return mac;
}

SresT sres_slice(const std::array<std::uint8_t, 32>& digest) {
  return SresT::from_bytes(std::span(digest).subspan(kSresSliceOffset, SresT::kSize));
}

std::array<std::uint8_t, 32> hmac_over(std::span<const std::uint8_t> key,
                                       std::initializer_list<std::span<const std::uint8_t>> parts) {
  return hmac_sha256(key, concat(parts));
}

}  // namespace

std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> message) {
  std::unique_ptr<EVP_MAC_CTX, MacDeleter> ctx(EVP_MAC_CTX_new(hmac_algorithm()));
  if (!ctx) throw std::runtime_error("EVP_MAC_CTX_new failed");

  char digest_name[] = "SHA256";
  OSSL_PARAM params[] = {OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest_name, 0),
                         OSSL_PARAM_construct_end()};
  if (EVP_MAC_init(ctx.get(), key.data(), key.size(), params) != 1 ||
      EVP_MAC_update(ctx.get(), message.data(), message.size()) != 1) {
    throw std::runtime_error("HMAC-SHA256 computation failed");
  }
  std::array<std::uint8_t, 32> out{};
  std::size_t out_len = 0;
  if (EVP_MAC_final(ctx.get(), out.data(), &out_len, out.size()) != 1 || out_len != out.size()) {
    throw std::runtime_error("HMAC-SHA256 finalization failed");
  }
  return out;
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, 32> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != digest.size()) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  return digest;
}

std::string sha256_hex(std::string_view text) {
  return to_hex(sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size())));
}

TileId tile_id_from_mac(const MacAddress& mac) {
  static constexpr std::array<std::uint8_t, 2> kSuffix = {0x00, 0x01};
  return TileId::from_bytes(concat({mac.bytes(), kSuffix}));
}

SresT derive_sres_activation(const InterimAuthKey& key, const RandA& rand_a, const RandT& rand_t,
                             const TileId& tile_id) {
  return sres_slice(hmac_over(key.bytes(), {rand_a.bytes(), rand_t.bytes(), tile_id.bytes()}));
}

AuthKey derive_auth_key(const InterimAuthKey& key, const SresT& sres_t) {
  auto digest = hmac_sha256(key.bytes(), sres_t.bytes());
  return AuthKey::from_bytes(std::span(digest).first(AuthKey::kSize));
}

SresT derive_sres_session(const AuthKey& key, const RandA& rand_a, const RandT& rand_t) {
  Bytes seed(32, 0x00);
  std::copy(rand_a.bytes().begin(), rand_a.bytes().end(), seed.begin());
  std::copy(rand_t.bytes().begin(), rand_t.bytes().end(), seed.begin() + 16);
  return sres_slice(hmac_sha256(key.bytes(), seed));
}

PrivateIdSeed derive_private_id_seed(const AuthKey& key, const TileId& tile_id) {
  Bytes message(kSeedMessageLen, 0x00);
  std::copy(tile_id.bytes().begin(), tile_id.bytes().end(), message.begin());
  std::copy(kIdentityBytes.begin(), kIdentityBytes.end(), message.begin() + TileId::kSize);
  return PrivateIdSeed::from_bytes(hmac_sha256(key.bytes(), message));
}

PrivateId private_id(const PrivateIdSeed& seed, std::uint32_t ctr) {
  if (ctr >= kScheduleSize) throw std::invalid_argument("privateId ctr out of range [0, 8639]");
  const std::array<std::uint8_t, 4> ctr_le = {
      static_cast<std::uint8_t>(ctr), static_cast<std::uint8_t>(ctr >> 8),
      static_cast<std::uint8_t>(ctr >> 16), static_cast<std::uint8_t>(ctr >> 24)};
  auto digest = hmac_sha256(seed.bytes(), ctr_le);
  return PrivateId::from_bytes(std::span(digest).first(8), static_cast<int>(ctr));
}

std::uint32_t rotation_ctr(Timestamp activation_time, Timestamp now) {
  if (now < activation_time) throw std::invalid_argument("now precedes activation time");
  return static_cast<std::uint32_t>(((now - activation_time) / kRotationPeriodSec) %
                                    kScheduleSize);
}

PrivateId private_id_at(const AuthKey& key, const TileId& tile_id, Timestamp activation_time,
                        Timestamp now) {
  return private_id(derive_private_id_seed(key, tile_id), rotation_ctr(activation_time, now));
}

std::vector<PrivateId> private_id_schedule(const AuthKey& key, const TileId& tile_id) {
  const PrivateIdSeed seed = derive_private_id_seed(key, tile_id);
  std::vector<PrivateId> schedule;
  schedule.reserve(kScheduleSize);
  for (std::uint32_t ctr = 0; ctr < kScheduleSize; ++ctr) schedule.push_back(private_id(seed, ctr));
  return schedule;
}

TagKey derive_tag_key(const AuthKey& key, const RandA& rand_a,
                      std::span<const std::uint8_t> channel_data,
                      std::span<const std::uint8_t> channel_prefix, const ToaToken& toa_token,
                      const ChannelConfig& config) {
  if (channel_data.size() != config.channel_data_len) {
    throw std::invalid_argument("channelData length does not match channel config");
  }
  if (channel_prefix.size() != config.channel_prefix_len) {
    throw std::invalid_argument("channelPrefix length does not match channel config");
  }
  auto digest =
      hmac_over(key.bytes(), {rand_a.bytes(), channel_data, channel_prefix, toa_token.bytes()});
  return TagKey::from_bytes(std::span(digest).first(TagKey::kSize));
}

MessageMac mac_message(const TagKey& key, std::uint16_t ctr_a, std::span<const std::uint8_t> msg) {
  if (msg.size() > 255) throw std::invalid_argument("message exceeds 255 bytes");
  Bytes seed;
  seed.reserve(4 + msg.size());
  seed.push_back(static_cast<std::uint8_t>(ctr_a));
  seed.push_back(static_cast<std::uint8_t>(ctr_a >> 8));
  seed.push_back(0x01);
  seed.push_back(static_cast<std::uint8_t>(msg.size()));
  seed.insert(seed.end(), msg.begin(), msg.end());
  auto digest = hmac_sha256(key.bytes(), seed);
  return MessageMac{MacBytes::from_bytes(std::span(digest).first(4)), ctr_a};
}

namespace {

bool verify_triplet_impl(std::span<const std::uint8_t, 16> key, const AuthTriplet& triplet,
                         const TileId& tile_id, TripletMode mode) {
  SresT expected;
  switch (mode) {
    case TripletMode::kActivation:
      expected = derive_sres_activation(InterimAuthKey::from_bytes(key), triplet.rand_a,
                                        triplet.rand_t, tile_id);
      break;
    case TripletMode::kSession:
      expected = derive_sres_session(AuthKey::from_bytes(key), triplet.rand_a, triplet.rand_t);
      break;
  }
  return expected == triplet.sres_t;
}

}  // namespace

bool verify_triplet(const InterimAuthKey& key, const AuthTriplet& triplet, const TileId& tile_id,
                    TripletMode mode) {
  return verify_triplet_impl(key.bytes(), triplet, tile_id, mode);
}

bool verify_triplet(const AuthKey& key, const AuthTriplet& triplet, const TileId& tile_id,
                    TripletMode mode) {
  return verify_triplet_impl(key.bytes(), triplet, tile_id, mode);
}

}  // namespace tileof::crypto
