#include "tileof/tag.hpp"

#include <algorithm>

namespace tileof {

Tag::Tag(sim::World& world, std::string label, const MacAddress& mac, std::string model,
         std::string firmware, std::string hardware_version, const InterimAuthKey& interim_key,
         TagOptions options)
    : world_(world),
      label_(std::move(label)),
      mac_(mac),
      phase_(Unactivated{interim_key, std::nullopt}),
      options_(options),
      rng_(world.rng_for("tag:" + label_)) {
  tdi_.tile_id = crypto::tile_id_from_mac(mac_);
  tdi_.model = std::move(model);
  tdi_.firmware = std::move(firmware);
  tdi_.hardware_version = std::move(hardware_version);
  tdi_.validate();
}

std::optional<wire::Advertisement> Tag::advertise(Timestamp now) {
  wire::Advertisement adv;
  adv.mac = options_.randomized_mac ? rng_.fixed<MacAddress>() : mac_;
  adv.emitted_at = now;
  if (const auto* activated = std::get_if<Activated>(&phase_)) {
    adv.service = wire::ServiceUuid::kFeed;
    adv.payload =
        crypto::private_id(activated->seed, crypto::rotation_ctr(activated->activation_time, now));
  } else {
    adv.service = wire::ServiceUuid::kFeec;
  }
  return adv;
}

std::vector<std::pair<std::string, std::string>> Tag::read_tdi_characteristics() const {
  return {{gatt::kTileIdCharacteristic, tdi_.tile_id.hex()},
          {gatt::kModelCharacteristic, tdi_.model},
          {gatt::kFirmwareCharacteristic, tdi_.firmware},
          {gatt::kHardwareCharacteristic, tdi_.hardware_version}};
}

AuthTriplet Tag::auth_challenge(const RandA& rand_a) {
  AuthTriplet triplet;
  triplet.rand_a = rand_a;
  triplet.rand_t = rng_.fixed<RandT>();
  if (auto* unactivated = std::get_if<Unactivated>(&phase_)) {
    triplet.sres_t = crypto::derive_sres_activation(unactivated->interim_key, triplet.rand_a,
                                                    triplet.rand_t, tdi_.tile_id);
    unactivated->pending_sres = triplet.sres_t;
  } else {
    triplet.sres_t =
        crypto::derive_sres_session(std::get<Activated>(phase_).auth_key, triplet.rand_a,
                                    triplet.rand_t);
  }
  return triplet;
}

void Tag::complete_activation(const SresT& sres_t) {
  auto* unactivated = std::get_if<Unactivated>(&phase_);
  if (unactivated == nullptr) throw StateError("tag is already activated");
  if (!unactivated->pending_sres || *unactivated->pending_sres != sres_t) {
    throw ActivationRefused("sresT does not match the pending activation challenge");
  }
  Activated activated;
  activated.auth_key = crypto::derive_auth_key(unactivated->interim_key, sres_t);
  activated.seed = crypto::derive_private_id_seed(activated.auth_key, tdi_.tile_id);
  activated.activation_time = world_.clock.now();
  phase_ = activated;
  world_.log.append(world_.clock.now(), label_, "tag_activated",
                    wire::Json{{"tile_id", tdi_.tile_id.hex()}});
}

void Tag::open_channel(std::span<const std::uint8_t> channel_prefix,
                       std::span<const std::uint8_t> channel_data, const ToaToken& toa_token,
                       const RandA& rand_a) {
  const auto* activated = std::get_if<Activated>(&phase_);
  if (activated == nullptr) throw StateError("channel requires an activated tag");
  Channel channel;
  channel.tag_key =
      crypto::derive_tag_key(activated->auth_key, rand_a, channel_data, channel_prefix, toa_token);
  channel.ctr_b = static_cast<std::uint16_t>(rng_.below(0x10000));
  channel_ = channel;
  world_.log.append(world_.clock.now(), label_, "channel_opened",
                    wire::Json{{"characteristic", gatt::kMepToaCmdCharacteristic}});
}

OwnerMessageOutcome Tag::receive_owner_message(std::span<const std::uint8_t> msg,
                                               std::uint16_t ctr_a, const MessageMac& mac) {
  if (!channel_) throw StateError("no open channel");
  OwnerMessageOutcome outcome;

  if (crypto::mac_message(channel_->tag_key, ctr_a, msg).bytes != mac.bytes) {
    outcome.status = OwnerMessageOutcome::Status::kAuthReject;
    world_.log.append(world_.clock.now(), label_, "owner_message_rejected",
                      wire::Json{{"reason", "bad_mac"}, {"ctr_a", ctr_a}});
    return outcome;
  }
  if (options_.ctr_check && channel_->last_accepted_ctr_a &&
      ctr_a <= *channel_->last_accepted_ctr_a) {
    outcome.status = OwnerMessageOutcome::Status::kReplayReject;
    world_.log.append(world_.clock.now(), label_, "owner_message_rejected",
                      wire::Json{{"reason", "stale_ctr"}, {"ctr_a", ctr_a}});
    return outcome;
  }

  channel_->last_accepted_ctr_a = ctr_a;
  outcome.status = OwnerMessageOutcome::Status::kAccepted;
  if (msg.size() == kOwnerAuthMessage.size() &&
      std::equal(msg.begin(), msg.end(), kOwnerAuthMessage.begin())) {
    outcome.features = {"ring", "reverse_ring"};
    outcome.ctr_b = channel_->ctr_b;
  }
  world_.log.append(world_.clock.now(), label_, "owner_message_accepted",
                    wire::Json{{"ctr_a", ctr_a}, {"msg_len", msg.size()}});
  return outcome;
}

void Tag::ring() {
  if (!channel_) throw StateError("ring requires an open channel");
  world_.log.append(world_.clock.now(), label_, "ring",
                    wire::Json{{"characteristic", gatt::kSongCharacteristic}});
}

void Tag::reverse_ring() {
  if (!activated()) throw StateError("reverse ring requires an activated tag");
  world_.log.append(world_.clock.now(), label_, "reverse_ring",
                    wire::Json{{"characteristic", gatt::kReverseRingCharacteristic}});
}

const AuthKey& Tag::auth_key() const {
  const auto* activated = std::get_if<Activated>(&phase_);
  if (activated == nullptr) throw StateError("tag is not activated");
  return activated->auth_key;
}

Timestamp Tag::activation_time() const {
  const auto* activated = std::get_if<Activated>(&phase_);
  if (activated == nullptr) throw StateError("tag is not activated");
  return activated->activation_time;
}

void Tag::apply_fresh_key(const AuthKey& key) {
  auto* activated = std::get_if<Activated>(&phase_);
  if (activated == nullptr) throw StateError("tag is not activated");
  activated->auth_key = key;
  activated->seed = crypto::derive_private_id_seed(key, tdi_.tile_id);
  world_.log.append(world_.clock.now(), label_, "fresh_key_applied", wire::Json::object());
}

}  // namespace tileof
