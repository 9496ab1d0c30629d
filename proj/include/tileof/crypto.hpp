#pragma once

// Key derivations, rotating-identifier generation, and message
// authentication for the tag / owner / server trust chain. All derivations
// bottom out in HMAC-SHA256; every layout constant that the protocol leaves
// implicit is named here so the whole artifact agrees on one encoding.

#include <cstdint>
#include <span>
#include <vector>

#include "tileof/bytes.hpp"

namespace tileof::crypto {

// Identifier rotation: one step every 15 minutes through an 8640-entry
// schedule, so the cycle repeats every 90 days.
inline constexpr Duration kRotationPeriodSec = 15 * 60;
inline constexpr std::uint32_t kScheduleSize = 8640;
inline constexpr Duration kCyclePeriodSec =
    static_cast<Duration>(kRotationPeriodSec) * kScheduleSize;  // 90 days

// Both sresT derivations take bytes [4, 8) of the HMAC output.
inline constexpr std::size_t kSresSliceOffset = 4;

// Suffix appended to tileId in the identifier-seed message: the bytes of
// "identity" in little-endian order.
inline constexpr std::array<std::uint8_t, 8> kIdentityBytes = {'y', 't', 'i', 't',
                                                               'n', 'e', 'd', 'i'};

// Seed message for the identifier seed is padded to this length.
inline constexpr std::size_t kSeedMessageLen = 32;

// Connected-channel parameters carried in TOA_OPEN_CHANNEL. Sizes are
// configurable; these are the defaults used across the artifact.
struct ChannelConfig {
  std::size_t channel_prefix_len = 1;
  std::size_t channel_data_len = 2;
};

std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> message);

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view text);

// tileId = MAC (6 bytes) followed by 0x00 0x01.
TileId tile_id_from_mac(const MacAddress& mac);

// Activation-mode response: bytes [4, 8) of
// HMAC-SHA256(interimAuthKey, randA || randT || tileId).
SresT derive_sres_activation(const InterimAuthKey& key, const RandA& rand_a, const RandT& rand_t,
                             const TileId& tile_id);

// authKey = first 16 bytes of HMAC-SHA256(interimAuthKey, sresT). Run
// identically by the tag and by the server, which is what makes the key
// three-way shared after activation.
AuthKey derive_auth_key(const InterimAuthKey& key, const SresT& sres_t);

// Session-mode response: randA and randT are each zero-padded to 16 bytes,
// concatenated, and bytes [4, 8) of HMAC-SHA256(authKey, seed) are taken.
SresT derive_sres_session(const AuthKey& key, const RandA& rand_a, const RandT& rand_t);

// Per-tag identifier seed: full 32-byte
// HMAC-SHA256(authKey, tileId || identityBytes || zero padding to 32).
PrivateIdSeed derive_private_id_seed(const AuthKey& key, const TileId& tile_id);

// privateId = first 8 bytes of HMAC-SHA256(seed, ctr) with ctr encoded as
// 4-byte little-endian. ctr must lie in [0, 8639].
PrivateId private_id(const PrivateIdSeed& seed, std::uint32_t ctr);

// The identifier the tag broadcasts at `now`, given its activation instant:
// ctr = floor((now - activation) / 15 min) mod 8640.
PrivateId private_id_at(const AuthKey& key, const TileId& tile_id, Timestamp activation_time,
                        Timestamp now);

std::uint32_t rotation_ctr(Timestamp activation_time, Timestamp now);

// All 8640 identifiers in counter order.
std::vector<PrivateId> private_id_schedule(const AuthKey& key, const TileId& tile_id);

// Session key for the connected channel: first 16 bytes of
// HMAC-SHA256(authKey, randA || channelData || channelPrefix || toaToken).
TagKey derive_tag_key(const AuthKey& key, const RandA& rand_a,
                      std::span<const std::uint8_t> channel_data,
                      std::span<const std::uint8_t> channel_prefix, const ToaToken& toa_token,
                      const ChannelConfig& config = {});

// Owner-to-tag message tag: first 4 bytes of HMAC-SHA256(tagKey, seed) with
// seed = ctrA (2-byte little-endian) || 0x01 || msgLen (1 byte) || msg.
MessageMac mac_message(const TagKey& key, std::uint16_t ctr_a, std::span<const std::uint8_t> msg);

enum class TripletMode { kActivation, kSession };

// Recomputes sresT for the triplet under the given mode and compares.
// Activation mode wants the interimAuthKey, session mode the authKey; both
// are accepted as raw 16-byte secrets here so callers pick the right one.
bool verify_triplet(const InterimAuthKey& key, const AuthTriplet& triplet, const TileId& tile_id,
                    TripletMode mode);
bool verify_triplet(const AuthKey& key, const AuthTriplet& triplet, const TileId& tile_id,
                    TripletMode mode);

}  // namespace tileof::crypto
