#include "tileof/client.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tileof {

namespace {

constexpr Duration kScanPassSeconds = 100;  // six passes ~ ten minutes
constexpr double kMinScanStepMeters = 10.0;

// Resamples a polyline into kScanPasses positions, uniform in arc length.
std::vector<sim::Position> resample_path(const std::vector<sim::Position>& path) {
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < path.size(); ++i) {
    cumulative.push_back(cumulative.back() + sim::distance_m(path[i - 1], path[i]));
  }
  const double total = cumulative.back();

  std::vector<sim::Position> samples;
  for (std::size_t k = 0; k < wire::kScanPasses; ++k) {
    const double target = total * static_cast<double>(k) / (wire::kScanPasses - 1);
    std::size_t seg = 1;
    while (seg + 1 < cumulative.size() && cumulative[seg] < target) ++seg;
    const double seg_len = cumulative[seg] - cumulative[seg - 1];
    const double f = seg_len > 0.0 ? (target - cumulative[seg - 1]) / seg_len : 0.0;
    samples.push_back(sim::Position{path[seg - 1].x + f * (path[seg].x - path[seg - 1].x),
                                    path[seg - 1].y + f * (path[seg].y - path[seg - 1].y)});
  }
  return samples;
}

}  // namespace

Client::Client(sim::World& world, std::string label, http::Transport& transport,
               ClientOptions options)
    : world_(world),
      label_(std::move(label)),
      transport_(transport),
      options_(options),
      rng_(world.rng_for("client:" + label_)),
      client_uuid_(rng_.fixed<ClientUuid>()) {}

const UserUuid& Client::user_uuid() const {
  if (!user_uuid_) throw RegistrationFailed("client is not registered");
  return *user_uuid_;
}

http::HttpResponse Client::send(http::HttpRequest request) { return transport_.send(request); }

http::HttpResponse Client::send_authed(http::HttpRequest request) {
  request.headers[http::kUserUuidHeader] = user_uuid().hex();
  return transport_.send(request);
}

wire::Json Client::parse_or_throw(const http::HttpResponse& response,
                                  const std::string& context) {
  if (response.status == 401 || response.status == 403) {
    throw AuthorizationDenied(context + ": " + response.body);
  }
  if (response.status != 200 && response.status != 202) {
    throw RequestFailed(response.status, context + ": " + response.body);
  }
  return wire::Json::parse(response.body);
}

wire::GeoLocation Client::current_location() const {
  const sim::GeoPoint geo = sim::to_geo(position_);
  wire::GeoLocation loc;
  loc.altitude = options_.altitude;
  loc.latitude = geo.latitude;
  loc.longitude = geo.longitude;
  loc.timestamp = world_.clock.now();
  return loc;
}

UserUuid Client::register_account(const std::string& email, const std::string& password,
                                  bool skip_email_verification) {
  if (user_uuid_) throw RegistrationFailed("client is already registered");

  wire::RegistrationRequest req{client_uuid_, email, password};
  auto response = send({"POST", "/api/v1/users", {}, {}, wire::encode_text(req)});
  if (response.status != 200) {
    throw RegistrationFailed("registration rejected: " + response.body);
  }
  auto reg = wire::decode_text<wire::RegistrationResponse>(response.body);
  user_uuid_ = reg.user_uuid;
  email_ = email;
  (void)skip_email_verification;  // the code is never checked either way

  wire::GenerateTileUuidRequest phone_req{client_uuid_.hex(), *user_uuid_, "PHONE"};
  auto phone_resp = send_authed(
      {"POST", "/api/v1/tiles/generate_tileUUID", {}, {}, wire::encode_text(phone_req)});
  auto phone =
      wire::GenerateTileUuidResponse::decode(parse_or_throw(phone_resp, "generate_tileUUID"));
  phone_tile_uuid_ = phone.tile_uuid;

  world_.log.append(world_.clock.now(), label_, "registered",
                    wire::Json{{"user_uuid", user_uuid_->hex()}});
  return *user_uuid_;
}

TileId Client::activate_tag(Tag& tag, const std::string& name) {
  user_uuid();  // must be registered
  if (sim::distance_m(position_, tag.position()) > world_.medium.range_m()) {
    throw NoTagInRange("tag is out of BLE range");
  }
  // The app's discovery scan, filtered on the pre-activation service.
  world_.medium.scan(position_, world_.clock.now(), 1, wire::ServiceUuid::kFeec);

  const wire::TdiRecord tdi = tag.read_tdi();
  const RandA rand_a = rng_.fixed<RandA>();
  const AuthTriplet triplet = tag.auth_challenge(rand_a);

  wire::ActivationRequest req;
  req.tile_uuid = tdi.tile_id;
  req.name = name;
  req.rand_a = triplet.rand_a;
  req.rand_t = triplet.rand_t;
  req.sres_t = triplet.sres_t;
  req.hw_version = tdi.hardware_version;
  req.model = tdi.model;
  req.firmware_version = tdi.firmware;

  auto response = send_authed({"POST", "/api/v1/tiles/activate", {}, {}, wire::encode_text(req)});
  if (response.status != 200) {
    throw ActivationFailed("server rejected activation: " + response.body);
  }
  auto act = wire::decode_text<wire::ActivationResponse>(response.body);

  tag.complete_activation(triplet.sres_t);

  OwnedTile tile;
  tile.auth_key = act.auth_key;
  tile.name = name;
  tile.activation_time = tag.activation_time();
  tiles_[tdi.tile_id] = tile;
  cache_schedule(tdi.tile_id, tile);
  paired_tags_[tdi.tile_id] = &tag;

  world_.log.append(world_.clock.now(), label_, "activated_tag",
                    wire::Json{{"tile_id", tdi.tile_id.hex()}});
  return tdi.tile_id;
}

void Client::pair_tag(Tag& tag) { paired_tags_[tag.tile_id()] = &tag; }

void Client::cache_schedule(const TileId& tile_id, const OwnedTile& tile) {
  for (const auto& id : crypto::private_id_schedule(tile.auth_key, tile_id)) {
    own_schedule_ids_.insert(id);
  }
}

bool Client::is_own_current_id(const PrivateId& id) const {
  const Timestamp now = world_.clock.now();
  for (const auto& [tile_id, tile] : tiles_) {
    if (crypto::private_id_at(tile.auth_key, tile_id, tile.activation_time, now) == id) {
      return true;
    }
  }
  return false;
}

bool Client::is_own_schedule_id(const PrivateId& id) const {
  return own_schedule_ids_.contains(id);
}

bool Client::report_connected() {
  user_uuid();
  wire::UpdateRecord rec;
  rec.record_id = next_record_id();
  rec.location = current_location();

  for (auto& [tile_id, tile] : tiles_) {
    auto paired = paired_tags_.find(tile_id);
    if (paired == paired_tags_.end()) continue;
    Tag& tag = *paired->second;
    if (!tag.activated() ||
        sim::distance_m(position_, tag.position()) > world_.medium.range_m()) {
      continue;  // not connected
    }
    // Fresh session triplet per report: the tag proves knowledge of the key.
    const RandA rand_a = rng_.fixed<RandA>();
    const AuthTriplet triplet = tag.auth_challenge(rand_a);
    if (!crypto::verify_triplet(tile.auth_key, triplet, tile_id,
                                crypto::TripletMode::kSession)) {
      continue;  // key mismatch, treat as unauthenticated
    }
    wire::TileEntry entry;
    entry.connected_auth_data =
        wire::ConnectedAuthData{triplet.rand_a, triplet.rand_t, triplet.sres_t, tile_id};
    entry.discovery_timestamp = world_.clock.now();
    entry.record_id = next_record_id();
    rec.tiles.push_back(entry);
  }

  if (rec.tiles.empty()) return false;

  wire::TileEntry self;
  self.client_data = wire::ClientData{phone_tile_uuid_};
  self.discovery_timestamp = world_.clock.now();
  self.record_id = next_record_id();
  rec.tiles.push_back(self);

  wire::LocationUpdate update;
  update.updates.push_back(rec);
  auto response =
      send_authed({"POST", "/api/v1/locations/update", {}, {}, wire::encode_text(update)});
  parse_or_throw(response, "location update");

  world_.log.append(world_.clock.now(), label_, "owner_report",
                    wire::Json{{"latitude", rec.location.latitude},
                               {"longitude", rec.location.longitude},
                               {"connected_tiles", rec.tiles.size() - 1}});
  return true;
}

bool Client::finder_cycle() {
  user_uuid();
  auto hits =
      world_.medium.scan(position_, world_.clock.now(), 1, wire::ServiceUuid::kFeed);

  wire::UpdateRecord rec;
  rec.record_id = next_record_id();
  rec.location = current_location();

  wire::Json observed = wire::Json::array();
  for (const auto& hit : hits) {
    if (!hit.adv.payload || is_own_current_id(*hit.adv.payload)) continue;
    wire::TileEntry entry;
    wire::AdvertisedServiceData data;
    data.mac_address = mac_to_string(hit.adv.mac);
    data.payload_service_data = *hit.adv.payload;
    entry.advertised_service_data = data;
    entry.discovery_timestamp = world_.clock.now();
    entry.record_id = next_record_id();
    rec.tiles.push_back(entry);
    observed.push_back(wire::Json{{"mac", data.mac_address},
                                  {"private_id", data.payload_service_data.hex()}});
  }
  if (rec.tiles.empty()) return false;

  wire::TileEntry self;
  self.client_data = wire::ClientData{phone_tile_uuid_};
  self.discovery_timestamp = world_.clock.now();
  self.record_id = next_record_id();
  rec.tiles.push_back(self);

  wire::LocationUpdate update;
  update.updates.push_back(rec);
  auto response =
      send_authed({"POST", "/api/v1/locations/update", {}, {}, wire::encode_text(update)});
  parse_or_throw(response, "finder upload");

  world_.log.append(world_.clock.now(), label_, "finder_report",
                    wire::Json{{"latitude", rec.location.latitude},
                               {"longitude", rec.location.longitude},
                               {"observed", observed}});
  return true;
}

std::vector<wire::GeoLocation> Client::query_history(const TileId& tile_id) {
  auto response =
      send_authed({"GET", "/api/v1/tiles/location/history/" + tile_id.hex(), {}, {}, ""});
  auto body = parse_or_throw(response, "history");
  return wire::HistoryResponse::decode(body).locations;
}

ScanSecureOutcome Client::scan_and_secure(const std::vector<sim::Position>& motion_path) {
  user_uuid();
  if (motion_path.size() < 2 ||
      std::all_of(motion_path.begin(), motion_path.end(),
                  [&](const sim::Position& p) { return p == motion_path.front(); })) {
    throw MotionRequired("scan requires a moving path");
  }
  const auto samples = resample_path(motion_path);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (sim::distance_m(samples[i - 1], samples[i]) < kMinScanStepMeters) {
      throw MotionRequired("consecutive scan positions closer than 10 m");
    }
  }

  ScanSecureOutcome outcome;
  outcome.started_at = world_.clock.now();
  outcome.scan_positions = samples;
  std::vector<std::string> known;
  std::map<PrivateId, int> unknown_counts;

  for (std::size_t pass = 0; pass < wire::kScanPasses; ++pass) {
    move_to(samples[pass]);
    auto hits = world_.medium.scan(position_, world_.clock.now(), kScanPassSeconds,
                                   wire::ServiceUuid::kFeed);
    std::set<PrivateId> seen_this_pass;
    for (const auto& hit : hits) {
      if (!hit.adv.payload) continue;
      const PrivateId& id = *hit.adv.payload;
      if (is_own_schedule_id(id)) {
        // Identify which tile matched for the display name.
        for (const auto& [tile_id, tile] : tiles_) {
          if (crypto::private_id_at(tile.auth_key, tile_id, tile.activation_time,
                                    world_.clock.now()) == id) {
            if (std::find(known.begin(), known.end(), tile.name) == known.end()) {
              known.push_back(tile.name);
            }
          }
        }
        continue;
      }
      if (seen_this_pass.insert(id).second) {
        outcome.posted.scans[pass].push_back(id);
        unknown_counts[id] += 1;
      }
    }
    world_.log.append(world_.clock.now(), label_, "scan_pass",
                      wire::Json{{"pass", pass}, {"unknown", outcome.posted.scans[pass].size()}});
    world_.clock.advance(kScanPassSeconds);
  }

  outcome.known_names = known;
  for (const auto& [id, count] : unknown_counts) outcome.recorded_unknown.push_back({id, count});

  auto response = send_authed(
      {"POST", "/api/v1/scan_and_secure", {}, {}, wire::encode_text(outcome.posted)});
  auto body = parse_or_throw(response, "scan_and_secure");
  outcome.returned = wire::ScanSecureResponse::decode(body);

  if (options_.modified_app) {
    // Circumvention build: display everything recorded, ignoring the
    // server's filtered subset.
    outcome.displayed = outcome.recorded_unknown;
  } else {
    std::set<PrivateId> returned_ids;
    for (const auto& pass : outcome.returned.scans) {
      returned_ids.insert(pass.begin(), pass.end());
    }
    for (const auto& [id, count] : outcome.recorded_unknown) {
      if (returned_ids.contains(id)) outcome.displayed.push_back({id, count});
    }
  }

  wire::Json displayed = wire::Json::array();
  for (const auto& [id, count] : outcome.displayed) {
    displayed.push_back(wire::Json{{"private_id", id.hex()}, {"count", count}});
  }
  world_.log.append(world_.clock.now(), label_, "scan_and_secure_result",
                    wire::Json{{"known", outcome.known_names}, {"displayed", displayed}});
  return outcome;
}

void Client::enable_anti_theft(const std::string& identity_document) {
  wire::AntiTheftEnrollRequest req{identity_document};
  auto response =
      send_authed({"POST", "/api/v1/anti_theft/enroll", {}, {}, wire::encode_text(req)});
  parse_or_throw(response, "anti_theft enroll");
  world_.log.append(world_.clock.now(), label_, "anti_theft_enabled", wire::Json::object());
}

wire::SharingResponse Client::share(const TileId& tile_id, const std::string& email) {
  wire::ShareRequest req{tile_id, email};
  auto response = send_authed(
      {"POST", "/api/v1/tiles/" + tile_id.hex() + "/share", {}, {}, wire::encode_text(req)});
  auto body = parse_or_throw(response, "share");
  return wire::SharingResponse::decode(body);
}

void Client::revoke_share(const TileId& tile_id, const std::string& email) {
  wire::ShareRequest req{tile_id, email};
  auto response = send_authed(
      {"DELETE", "/api/v1/tiles/" + tile_id.hex() + "/share", {}, {}, wire::encode_text(req)});
  auto body = parse_or_throw(response, "revoke share");
  if (body.contains("fresh_auth_key")) {
    // Control-toggle path: the rotated key reaches the tag via its owner.
    auto fresh = AuthKey::from_hex(body.at("fresh_auth_key").get<std::string>());
    auto it = tiles_.find(tile_id);
    if (it != tiles_.end()) {
      it->second.auth_key = fresh;
      cache_schedule(tile_id, it->second);
      auto paired = paired_tags_.find(tile_id);
      if (paired != paired_tags_.end() &&
          sim::distance_m(position_, paired->second->position()) <= world_.medium.range_m()) {
        paired->second->apply_fresh_key(fresh);
      }
    }
  }
}

void Client::transfer(const TileId& tile_id, const std::string& recipient_email) {
  wire::TransferRequest req{tile_id, recipient_email};
  auto response = send_authed(
      {"POST", "/api/v1/tiles/" + tile_id.hex() + "/transfer", {}, {}, wire::encode_text(req)});
  auto body = parse_or_throw(response, "transfer");
  if (body.contains("fresh_auth_key")) {
    auto fresh = AuthKey::from_hex(body.at("fresh_auth_key").get<std::string>());
    auto paired = paired_tags_.find(tile_id);
    if (paired != paired_tags_.end() &&
        sim::distance_m(position_, paired->second->position()) <= world_.medium.range_m()) {
      paired->second->apply_fresh_key(fresh);
    }
  }
  tiles_.erase(tile_id);
  paired_tags_.erase(tile_id);
  world_.log.append(world_.clock.now(), label_, "transferred_tile",
                    wire::Json{{"tile_id", tile_id.hex()}, {"to", recipient_email}});
}

void Client::sync_tiles() {
  auto response = send_authed({"GET", "/api/v1/tiles", {}, {}, ""});
  auto body = parse_or_throw(response, "tile list");
  auto list = wire::TileListResponse::decode(body);

  std::map<TileId, OwnedTile> fresh;
  for (const auto& entry : list.tiles) {
    OwnedTile tile;
    tile.auth_key = entry.auth_key;
    tile.name = entry.name;
    tile.activation_time = entry.activation_timestamp;
    tile.shared = entry.shared;
    fresh[entry.tile_uuid] = tile;
    cache_schedule(entry.tile_uuid, tile);

    // Push a rotated key down to the tag when we are next to it.
    auto paired = paired_tags_.find(entry.tile_uuid);
    if (paired != paired_tags_.end() && paired->second->activated() &&
        sim::distance_m(position_, paired->second->position()) <= world_.medium.range_m() &&
        paired->second->auth_key() != entry.auth_key) {
      paired->second->apply_fresh_key(entry.auth_key);
    }
  }
  tiles_ = std::move(fresh);
  for (auto it = paired_tags_.begin(); it != paired_tags_.end();) {
    it = tiles_.contains(it->first) ? std::next(it) : paired_tags_.erase(it);
  }
  world_.log.append(world_.clock.now(), label_, "synced_tiles",
                    wire::Json{{"count", tiles_.size()}});
}

std::int64_t Client::community_stats() {
  const sim::GeoPoint geo = sim::to_geo(position_);
  http::HttpRequest request{"GET", "/api/v1/community/stats", {}, {}, ""};
  request.query["latitude"] = std::to_string(geo.latitude);
  request.query["longitude"] = std::to_string(geo.longitude);
  auto response = send_authed(std::move(request));
  auto stats = wire::CommunityStatsResponse::decode(parse_or_throw(response, "community stats"));
  return stats.tilers_around;
}

void Client::delete_account(const std::string& password, const std::string& confirmation) {
  if (confirmation != "DELETE") {
    throw ConfirmationRefused("confirmation must be the literal string DELETE");
  }
  wire::DeleteAccountRequest req{password};
  auto response = send_authed(
      {"DELETE", "/api/v1/users/" + user_uuid().hex(), {}, {}, wire::encode_text(req)});
  if (response.status != 202) {
    throw RequestFailed(response.status, "deletion rejected: " + response.body);
  }
  world_.log.append(world_.clock.now(), label_, "account_deleted", wire::Json::object());
  user_uuid_.reset();
  tiles_.clear();
  paired_tags_.clear();
  own_schedule_ids_.clear();
}

}  // namespace tileof
