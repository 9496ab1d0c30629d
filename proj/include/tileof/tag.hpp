#pragma once

// Tile Mate 2022 emulator: pre-activation advertising, the device-info
// service, activation challenge-response, self-derivation of the shared
// secret, rotating-identifier broadcast over a static MAC, and the
// connected-channel state machine.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tileof/bytes.hpp"
#include "tileof/crypto.hpp"
#include "tileof/sim.hpp"
#include "tileof/wire.hpp"

namespace tileof {

class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ActivationRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// GATT service / characteristic UUIDs, verbatim.
namespace gatt {
inline constexpr char kDevInfoService[] = "180A";
inline constexpr char kTileIdCharacteristic[] = "9d410007-35d6-f4dd-ba60-e7bd8dc491c0";
inline constexpr char kModelCharacteristic[] = "00002a24-0000-1000-8000-00805f9b34fb";
inline constexpr char kFirmwareCharacteristic[] = "00002a26-0000-1000-8000-00805f9b34fb";
inline constexpr char kHardwareCharacteristic[] = "00002a27-0000-1000-8000-00805f9b34fb";
inline constexpr char kMepToaCmdCharacteristic[] = "9d410018-35d6-f4dd-ba60-e7bd8dc491c0";
inline constexpr char kMepToaRspCharacteristic[] = "9d410019-35d6-f4dd-ba60-e7bd8dc491c0";
inline constexpr char kSongCharacteristic[] = "9d410002-35d6-f4dd-ba60-e7bd8dc491c0";
inline constexpr char kReverseRingCharacteristic[] = "9d410000-35d6-f4dd-ba60-e7bd8dc491c0";
}  // namespace gatt

// The fixed owner-authentication message.
inline constexpr std::array<std::uint8_t, 2> kOwnerAuthMessage = {0x12, 0x13};

struct TagOptions {
  // Reject non-increasing ctrA on the connected channel. Production behavior
  // is unconfirmed; the toggle exists so the replay scenarios can probe both
  // readings.
  bool ctr_check = true;
  // Counterfactual mode for the cycle-fingerprinting scenarios: draw a fresh
  // MAC per advertisement instead of broadcasting the measured static one.
  bool randomized_mac = false;
};

struct OwnerMessageOutcome {
  enum class Status { kAccepted, kAuthReject, kReplayReject };
  Status status = Status::kAuthReject;
  // Populated when the fixed auth message is accepted.
  std::vector<std::string> features;
  std::optional<std::uint16_t> ctr_b;
};

class Tag : public sim::Beacon {
 public:
  Tag(sim::World& world, std::string label, const MacAddress& mac, std::string model,
      std::string firmware, std::string hardware_version, const InterimAuthKey& interim_key,
      TagOptions options = {});

  // sim::Beacon
  std::string label() const override { return label_; }
  sim::Position position() const override { return position_; }
  std::optional<wire::Advertisement> advertise(Timestamp now) override;

  void move_to(const sim::Position& p) { position_ = p; }

  const MacAddress& mac() const { return mac_; }
  const TileId& tile_id() const { return tdi_.tile_id; }
  bool activated() const { return std::holds_alternative<Activated>(phase_); }

  wire::TdiRecord read_tdi() const { return tdi_; }
  // The same four values keyed by their characteristic UUIDs.
  std::vector<std::pair<std::string, std::string>> read_tdi_characteristics() const;

  // Challenge-response: draws a fresh randT and answers under whichever key
  // the current phase holds (interim key before activation, authKey after).
  AuthTriplet auth_challenge(const RandA& rand_a);

  // Transitions to Activated iff sres_t matches the most recently issued
  // activation response. The identifier schedule starts at the activation
  // instant.
  void complete_activation(const SresT& sres_t);

  // Connected-channel lifecycle. Reopening resets the replay counter.
  void open_channel(std::span<const std::uint8_t> channel_prefix,
                    std::span<const std::uint8_t> channel_data, const ToaToken& toa_token,
                    const RandA& rand_a);
  bool channel_open() const { return channel_.has_value(); }

  OwnerMessageOutcome receive_owner_message(std::span<const std::uint8_t> msg,
                                            std::uint16_t ctr_a, const MessageMac& mac);

  void ring();
  void reverse_ring();

  // Activated-phase accessors for in-range protocol peers and tests.
  const AuthKey& auth_key() const;
  Timestamp activation_time() const;

  // Counterfactual rekey hook used by the fresh-key-on-transfer toggle; the
  // schedule keeps its original activation epoch.
  void apply_fresh_key(const AuthKey& key);

 private:
  struct Unactivated {
    InterimAuthKey interim_key;
    std::optional<SresT> pending_sres;
  };
  struct Activated {
    AuthKey auth_key;
    PrivateIdSeed seed;
    Timestamp activation_time = 0;
  };
  struct Channel {
    TagKey tag_key;
    std::optional<std::uint16_t> last_accepted_ctr_a;
    std::uint16_t ctr_b = 0;
  };

  sim::World& world_;
  std::string label_;
  MacAddress mac_;
  wire::TdiRecord tdi_;
  sim::Position position_;
  std::variant<Unactivated, Activated> phase_;
  std::optional<Channel> channel_;
  TagOptions options_;
  sim::Rng rng_;
};

}  // namespace tileof
