#include "tileof/server.hpp"

#include <algorithm>

namespace tileof::server {

namespace {

constexpr int kBadRequest = 400;
constexpr int kUnauthorized = 401;
constexpr int kForbidden = 403;
constexpr int kNotFound = 404;
constexpr int kConflict = 409;

}  // namespace

ServerCore::ServerCore(ServerOptions options, std::function<Timestamp()> now)
    : options_(std::move(options)),
      now_(std::move(now)),
      rng_(sim::Rng::derive_seed(options_.seed, "server")) {}

const UserRecord& ServerCore::require_user(const UserUuid& uuid) const {
  auto it = users_.find(uuid);
  if (it == users_.end()) throw ApiError(kUnauthorized, "unknown user");
  return it->second;
}

UserRecord& ServerCore::require_user_mut(const UserUuid& uuid) {
  auto it = users_.find(uuid);
  if (it == users_.end()) throw ApiError(kUnauthorized, "unknown user");
  return it->second;
}

std::optional<UserUuid> ServerCore::find_user_by_email(const std::string& email) const {
  for (const auto& [uuid, user] : users_) {
    if (user.email == email) return uuid;
  }
  return std::nullopt;
}

TagRecord& ServerCore::require_owned_tag(const TileId& tile_id, const UserUuid& caller) {
  auto it = tags_.find(tile_id);
  // Unauthorized and nonexistent tiles are indistinguishable to the caller.
  if (it == tags_.end() || it->second.owner_uuid != caller) {
    throw ApiError(kForbidden, "denied");
  }
  return it->second;
}

const VendorConfig* ServerCore::find_vendor(const std::string& vendor_id) const {
  for (const auto& vendor : options_.vendors) {
    if (vendor.vendor_id == vendor_id) return &vendor;
  }
  return nullptr;
}

void ServerCore::index_tag(const TagRecord& tag) {
  const auto schedule = crypto::private_id_schedule(tag.auth_key, tag.tile_id);
  for (std::size_t ctr = 0; ctr < schedule.size(); ++ctr) {
    private_id_index_[schedule[ctr]] = {tag.tile_id, static_cast<int>(ctr)};
  }
}

void ServerCore::unindex_tag(const TileId& tile_id) {
  for (auto it = private_id_index_.begin(); it != private_id_index_.end();) {
    it = it->second.first == tile_id ? private_id_index_.erase(it) : std::next(it);
  }
}

AuthKey ServerCore::rotate_tag_key(TagRecord& tag) {
  unindex_tag(tag.tile_id);
  tag.auth_key = rng_.fixed<AuthKey>();
  index_tag(tag);
  return tag.auth_key;
}

std::string ServerCore::triplet_fingerprint(const TileId& tile_id,
                                            const AuthTriplet& triplet) const {
  return tile_id.hex() + ":" + triplet.rand_a.hex() + ":" + triplet.rand_t.hex() + ":" +
         triplet.sres_t.hex();
}

wire::RegistrationResponse ServerCore::create_user(const wire::RegistrationRequest& req) {
  if (find_user_by_email(req.email)) throw ApiError(kConflict, "email already registered");

  UserRecord user;
  user.user_uuid = rng_.fixed<UserUuid>();
  user.email = req.email;
  user.password_digest = crypto::sha256_hex(req.password);
  user.client_uuids.insert(req.client_uuid);
  // Six-digit code goes out by mail; proving receipt is optional.
  user.email_verification_code = std::to_string(100000 + rng_.below(900000));
  users_[user.user_uuid] = user;

  return wire::RegistrationResponse{user.user_uuid, "ACTIVATED"};
}

wire::GenerateTileUuidResponse ServerCore::generate_tile_uuid(
    const wire::GenerateTileUuidRequest& req, const UserUuid& caller) {
  UserRecord& user = require_user_mut(caller);
  if (req.tile_type != "PHONE") throw ApiError(kBadRequest, "unsupported tile_type");
  user.phone_tile_uuid = "p!" + rng_.fixed<ClientUuid>().hex();
  return wire::GenerateTileUuidResponse{user.phone_tile_uuid};
}

wire::ActivationResponse ServerCore::establish_auth_key(const wire::ActivationRequest& req,
                                                        const UserUuid& caller) {
  const UserRecord& owner = require_user(caller);
  const VendorConfig* vendor = find_vendor(req.model.substr(0, 4));
  if (vendor == nullptr) throw ApiError(kForbidden, "unknown vendor");

  const AuthTriplet triplet{req.rand_a, req.rand_t, req.sres_t};
  const std::string fingerprint = triplet_fingerprint(req.tile_uuid, triplet);
  if (consumed_triplets_.contains(fingerprint)) {
    throw ApiError(kForbidden, "authentication triplet already used");
  }
  if (!crypto::verify_triplet(vendor->interim_key, triplet, req.tile_uuid,
                              crypto::TripletMode::kActivation)) {
    throw ApiError(kForbidden, "invalid authentication triplet");
  }
  if (tags_.contains(req.tile_uuid)) throw ApiError(kConflict, "tile already activated");
  consumed_triplets_.insert(fingerprint);

  TagRecord tag;
  tag.tile_id = req.tile_uuid;
  tag.auth_key = crypto::derive_auth_key(vendor->interim_key, req.sres_t);
  tag.owner_uuid = caller;
  tag.anti_theft = owner.anti_theft;
  tag.vendor_id = vendor->vendor_id;
  tag.activation_time = now_();
  tag.name = req.name;
  tags_[tag.tile_id] = tag;
  index_tag(tag);

  return wire::ActivationResponse{tag.tile_id, tag.auth_key};
}

void ServerCore::note_position(const UserUuid& uploader, const wire::UpdateRecord& rec) {
  auto it = last_positions_.find(uploader);
  if (it == last_positions_.end() || rec.location.timestamp >= std::get<0>(it->second)) {
    last_positions_[uploader] = {rec.location.timestamp, rec.location.latitude,
                                 rec.location.longitude};
  }
}

void ServerCore::ingest_location_update(const wire::LocationUpdate& update,
                                        const UserUuid& uploader) {
  require_user(uploader);
  update.validate();
  reports_.push_back(IngestedReport{uploader, now_(), update});
  for (const auto& rec : update.updates) note_position(uploader, rec);
}

wire::HistoryResponse ServerCore::history(const TileId& tile_id, const UserUuid& caller) const {
  require_user(caller);
  auto it = tags_.find(tile_id);
  if (it == tags_.end() ||
      (it->second.owner_uuid != caller && !it->second.shared_uuids.contains(caller))) {
    throw ApiError(kForbidden, "denied");
  }

  wire::HistoryResponse resp;
  resp.tile_uuid = tile_id;
  for (const auto& report : reports_) {
    for (const auto& rec : report.update.updates) {
      for (const auto& entry : rec.tiles) {
        if (!entry.advertised_service_data) continue;
        auto hit = resolve_private_id(entry.advertised_service_data->payload_service_data);
        if (hit && hit->first == tile_id) {
          resp.locations.push_back(rec.location);
        }
      }
    }
  }
  std::stable_sort(resp.locations.begin(), resp.locations.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  return resp;
}

wire::ScanSecureResponse ServerCore::filter_scan(const wire::ScanSecureRequest& req) const {
  wire::ScanSecureResponse resp;
  for (std::size_t pass = 0; pass < wire::kScanPasses; ++pass) {
    for (const auto& id : req.scans[pass]) {
      auto hit = resolve_private_id(id);
      if (hit) {
        auto tag = tags_.find(hit->first);
        if (tag != tags_.end() && tag->second.anti_theft) continue;
      }
      // Ids that resolve to no registered tag pass through unchanged.
      resp.scans[pass].push_back(id);
    }
  }
  return resp;
}

wire::CommunityStatsResponse ServerCore::community_stats(double latitude,
                                                         double longitude) const {
  const sim::Position center = sim::from_geo(latitude, longitude);
  std::int64_t count = 0;
  for (const auto& [uuid, last] : last_positions_) {
    if (!users_.contains(uuid)) continue;  // deleted accounts no longer count
    const sim::Position p = sim::from_geo(std::get<1>(last), std::get<2>(last));
    if (sim::distance_m(center, p) <= sim::kCommunityRadiusMiles * sim::kMileMeters) ++count;
  }

  wire::CommunityStatsResponse resp;
  resp.timestamp_ms = static_cast<std::int64_t>(now_()) * 1000;
  resp.result_code = 0;
  resp.timestamp = now_();
  resp.center_latitude = latitude;
  resp.center_longitude = longitude;
  resp.center_radius = 5.0;
  resp.tilers_around = count;
  resp.display_tilers_around = true;
  resp.display_tiles_found = false;
  return resp;
}

wire::SharingResponse ServerCore::add_share(const wire::ShareRequest& req,
                                            const UserUuid& caller) {
  TagRecord& tag = require_owned_tag(req.tile_uuid, caller);
  auto recipient = find_user_by_email(req.email);
  if (!recipient) throw ApiError(kNotFound, "no such user");
  tag.shared_uuids.insert(*recipient);

  wire::SharingResponse resp;
  resp.tile_type = "TILE";
  resp.tile_uuid = tag.tile_id;
  resp.user_uuid = caller;
  resp.other_user_uuid = *recipient;
  resp.other_user_email = req.email;
  return resp;
}

ReassociationOutcome ServerCore::revoke_share(const wire::ShareRequest& req,
                                              const UserUuid& caller) {
  TagRecord& tag = require_owned_tag(req.tile_uuid, caller);
  auto recipient = find_user_by_email(req.email);
  if (!recipient || !tag.shared_uuids.contains(*recipient)) {
    throw ApiError(kNotFound, "no such share");
  }
  tag.shared_uuids.erase(*recipient);

  ReassociationOutcome outcome;
  if (options_.fresh_key_on_transfer) outcome.fresh_key = rotate_tag_key(tag);
  return outcome;
}

ReassociationOutcome ServerCore::transfer(const wire::TransferRequest& req,
                                          const UserUuid& caller) {
  TagRecord& tag = require_owned_tag(req.tile_uuid, caller);
  auto recipient = find_user_by_email(req.email);
  if (!recipient) throw ApiError(kNotFound, "no such user");

  tag.owner_uuid = *recipient;
  tag.shared_uuids.erase(*recipient);
  tag.anti_theft = require_user(*recipient).anti_theft;

  ReassociationOutcome outcome;
  if (options_.fresh_key_on_transfer) outcome.fresh_key = rotate_tag_key(tag);
  return outcome;
}

void ServerCore::enroll_anti_theft(const wire::AntiTheftEnrollRequest& req,
                                   const UserUuid& caller) {
  UserRecord& user = require_user_mut(caller);
  // Stand-in for the external identity-verification provider.
  if (options_.identity_verifier_rejects) {
    throw ApiError(kForbidden, "identity verification failed");
  }
  user.anti_theft = true;
  user.anti_theft_identity = req.identity_document;
  for (auto& [tile_id, tag] : tags_) {
    if (tag.owner_uuid == caller) tag.anti_theft = true;
  }
}

wire::DeletionResponse ServerCore::delete_user(const UserUuid& target,
                                               const wire::DeleteAccountRequest& req,
                                               const UserUuid& caller) {
  if (target != caller) throw ApiError(kForbidden, "denied");
  const UserRecord& user = require_user(caller);
  if (user.password_digest != crypto::sha256_hex(req.password)) {
    throw ApiError(kForbidden, "wrong password");
  }

  for (auto it = tags_.begin(); it != tags_.end();) {
    if (it->second.owner_uuid == target) {
      unindex_tag(it->first);
      it = tags_.erase(it);
    } else {
      it->second.shared_uuids.erase(target);
      ++it;
    }
  }
  users_.erase(target);
  last_positions_.erase(target);
  if (!options_.retention.retain_reports) {
    std::erase_if(reports_, [&](const IngestedReport& r) { return r.uploader == target; });
  }
  return wire::DeletionResponse{202};
}

wire::TileListResponse ServerCore::list_tiles(const UserUuid& caller) const {
  require_user(caller);
  wire::TileListResponse resp;
  for (const auto& [tile_id, tag] : tags_) {
    const bool owned = tag.owner_uuid == caller;
    const bool shared = tag.shared_uuids.contains(caller);
    if (!owned && !shared) continue;
    wire::TileListEntry entry;
    entry.tile_uuid = tile_id;
    entry.auth_key = tag.auth_key;  // the share/transfer paths forward the key as-is
    entry.name = tag.name;
    entry.shared = shared;
    entry.activation_timestamp = tag.activation_time;
    resp.tiles.push_back(entry);
  }
  return resp;
}

std::optional<std::pair<TileId, int>> ServerCore::resolve_private_id(const PrivateId& id) const {
  auto it = private_id_index_.find(id);
  if (it == private_id_index_.end()) return std::nullopt;
  return it->second;
}

wire::Json ServerCore::snapshot() const {
  wire::Json users = wire::Json::array();
  for (const auto& [uuid, user] : users_) {
    wire::Json client_uuids = wire::Json::array();
    for (const auto& c : user.client_uuids) client_uuids.push_back(c.hex());
    wire::Json j = wire::Json::object();
    j["user_uuid"] = uuid.hex();
    j["email"] = user.email;
    j["password_digest"] = user.password_digest;
    j["client_uuids"] = client_uuids;
    j["phone_tile_uuid"] = user.phone_tile_uuid;
    j["email_verification_code"] = user.email_verification_code;
    j["email_verified"] = user.email_verified;
    j["anti_theft"] = user.anti_theft;
    if (user.anti_theft_identity) j["anti_theft_identity"] = *user.anti_theft_identity;
    users.push_back(j);
  }

  wire::Json tags = wire::Json::array();
  for (const auto& [tile_id, tag] : tags_) {
    wire::Json shared = wire::Json::array();
    for (const auto& s : tag.shared_uuids) shared.push_back(s.hex());
    wire::Json j = wire::Json::object();
    j["tile_id"] = tile_id.hex();
    j["auth_key"] = tag.auth_key.hex();
    j["owner_uuid"] = tag.owner_uuid.hex();
    j["shared_uuids"] = shared;
    j["anti_theft"] = tag.anti_theft;
    j["vendor_id"] = tag.vendor_id;
    j["activation_time"] = tag.activation_time;
    j["name"] = tag.name;
    tags.push_back(j);
  }

  wire::Json triplets = wire::Json::array();
  for (const auto& t : consumed_triplets_) triplets.push_back(t);

  wire::Json reports = wire::Json::array();
  for (const auto& report : reports_) {
    wire::Json j = wire::Json::object();
    j["uploader"] = report.uploader.hex();
    j["received_at"] = report.received_at;
    j["update"] = report.update.encode();
    reports.push_back(j);
  }

  wire::Json snapshot = wire::Json::object();
  snapshot["users"] = users;
  snapshot["tags"] = tags;
  snapshot["triplets"] = triplets;
  snapshot["reports"] = reports;
  return snapshot;
}

ServerCore ServerCore::from_snapshot(const wire::Json& snapshot, ServerOptions options,
                                     std::function<Timestamp()> now) {
  ServerCore core(std::move(options), std::move(now));
  for (const auto& j : snapshot.at("users")) {
    UserRecord user;
    user.user_uuid = UserUuid::from_hex(j.at("user_uuid").get<std::string>());
    user.email = j.at("email").get<std::string>();
    user.password_digest = j.at("password_digest").get<std::string>();
    for (const auto& c : j.at("client_uuids")) {
      user.client_uuids.insert(ClientUuid::from_hex(c.get<std::string>()));
    }
    user.phone_tile_uuid = j.at("phone_tile_uuid").get<std::string>();
    user.email_verification_code = j.at("email_verification_code").get<std::string>();
    user.email_verified = j.at("email_verified").get<bool>();
    user.anti_theft = j.at("anti_theft").get<bool>();
    if (j.contains("anti_theft_identity")) {
      user.anti_theft_identity = j.at("anti_theft_identity").get<std::string>();
    }
    core.users_[user.user_uuid] = user;
  }
  for (const auto& j : snapshot.at("tags")) {
    TagRecord tag;
    tag.tile_id = TileId::from_hex(j.at("tile_id").get<std::string>());
    tag.auth_key = AuthKey::from_hex(j.at("auth_key").get<std::string>());
    tag.owner_uuid = UserUuid::from_hex(j.at("owner_uuid").get<std::string>());
    for (const auto& s : j.at("shared_uuids")) {
      tag.shared_uuids.insert(UserUuid::from_hex(s.get<std::string>()));
    }
    tag.anti_theft = j.at("anti_theft").get<bool>();
    tag.vendor_id = j.at("vendor_id").get<std::string>();
    tag.activation_time = j.at("activation_time").get<Timestamp>();
    tag.name = j.at("name").get<std::string>();
    core.tags_[tag.tile_id] = tag;
    core.index_tag(tag);
  }
  for (const auto& t : snapshot.at("triplets")) {
    core.consumed_triplets_.insert(t.get<std::string>());
  }
  for (const auto& j : snapshot.at("reports")) {
    IngestedReport report;
    report.uploader = UserUuid::from_hex(j.at("uploader").get<std::string>());
    report.received_at = j.at("received_at").get<Timestamp>();
    report.update = wire::LocationUpdate::decode(j.at("update"));
    core.reports_.push_back(report);
    for (const auto& rec : report.update.updates) core.note_position(report.uploader, rec);
  }
  return core;
}

}  // namespace tileof::server
