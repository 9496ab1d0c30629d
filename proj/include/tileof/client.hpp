#pragma once

// Owner/finder app emulator: registration, tag activation orchestration,
// connected-mode location reporting, background finding, history queries,
// the manual anti-stalking scan, anti-theft enrollment, transfer/sharing,
// and account deletion. A "modified app" flag reproduces the circumvention
// build that displays every recorded identifier instead of the
// server-filtered subset.

#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "tileof/http_api.hpp"
#include "tileof/sim.hpp"
#include "tileof/tag.hpp"
#include "tileof/wire.hpp"

namespace tileof {

class RegistrationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ActivationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NoTagInRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class MotionRequired : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ConfirmationRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class AuthorizationDenied : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class RequestFailed : public std::runtime_error {
 public:
  RequestFailed(int status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct ClientOptions {
  bool modified_app = false;
  double altitude = 0.0;
};

struct OwnedTile {
  AuthKey auth_key;
  std::string name;
  Timestamp activation_time = 0;
  bool shared = false;  // true when this client is a shared (non-primary) owner
};

struct ScanSecureOutcome {
  // User-assigned names of tiles recognized as the client's own.
  std::vector<std::string> known_names;
  // What the app displays under "Unknown Tiles": id with appearance count.
  std::vector<std::pair<PrivateId, int>> displayed;
  // Every unknown id recorded across the six passes, before server filtering.
  std::vector<std::pair<PrivateId, int>> recorded_unknown;
  wire::ScanSecureRequest posted;
  wire::ScanSecureResponse returned;
  // Where and when the six passes ran.
  std::vector<sim::Position> scan_positions;
  Timestamp started_at = 0;
};

class Client {
 public:
  Client(sim::World& world, std::string label, http::Transport& transport,
         ClientOptions options = {});

  const std::string& label() const { return label_; }
  const ClientUuid& client_uuid() const { return client_uuid_; }
  bool registered() const { return user_uuid_.has_value(); }
  const UserUuid& user_uuid() const;
  const std::string& phone_tile_uuid() const { return phone_tile_uuid_; }
  bool modified_app() const { return options_.modified_app; }

  sim::Position position() const { return position_; }
  void move_to(const sim::Position& p) { position_ = p; }

  const std::map<TileId, OwnedTile>& tiles() const { return tiles_; }

  // Creates the account and the "p!" phone tile. The email verification
  // code is generated server-side but never required.
  UserUuid register_account(const std::string& email, const std::string& password,
                            bool skip_email_verification = true);

  // Runs the activation exchange end to end against an in-range FEEC tag:
  // TDI read, challenge-response, server POST, key receipt, and the tag's
  // own activation. Returns the activated tileId.
  TileId activate_tag(Tag& tag, const std::string& name = "Mate");

  // Re-links a tag acquired through share/transfer so connected-mode
  // reporting can reach it.
  void pair_tag(Tag& tag);

  // Uploads an owner-form report with a fresh session triplet per connected
  // tag. Returns false (and sends nothing) when no owned tag is connected.
  bool report_connected();

  // Background finding pass: scan, drop own tiles, upload the rest with the
  // client's own plaintext position. Returns false when the scan found
  // nothing foreign.
  bool finder_cycle();

  std::vector<wire::GeoLocation> query_history(const TileId& tile_id);

  // Six scans walking along motion_path (resampled uniformly); requires
  // consecutive scan positions at least 10 m apart.
  ScanSecureOutcome scan_and_secure(const std::vector<sim::Position>& motion_path);

  void enable_anti_theft(const std::string& identity_document = "stub-government-id");

  wire::SharingResponse share(const TileId& tile_id, const std::string& email);
  void revoke_share(const TileId& tile_id, const std::string& email);
  void transfer(const TileId& tile_id, const std::string& recipient_email);

  // Pulls the server-side tile list: discovers shared/transferred tiles and
  // refreshed keys. The optional tag argument re-pairs a discovered tile.
  void sync_tiles();

  std::int64_t community_stats();

  // Confirmation must be the literal string "DELETE"; checked locally before
  // any request is sent.
  void delete_account(const std::string& password, const std::string& confirmation);

 private:
  http::HttpResponse send(http::HttpRequest request);
  http::HttpResponse send_authed(http::HttpRequest request);
  wire::Json parse_or_throw(const http::HttpResponse& response, const std::string& context);
  wire::GeoLocation current_location() const;
  bool is_own_current_id(const PrivateId& id) const;
  bool is_own_schedule_id(const PrivateId& id) const;
  void cache_schedule(const TileId& tile_id, const OwnedTile& tile);
  std::int64_t next_record_id() { return record_id_++; }

  sim::World& world_;
  std::string label_;
  http::Transport& transport_;
  ClientOptions options_;
  sim::Rng rng_;

  ClientUuid client_uuid_;
  std::optional<UserUuid> user_uuid_;
  std::string phone_tile_uuid_;
  std::string email_;
  sim::Position position_;
  std::int64_t record_id_ = 1;

  std::map<TileId, OwnedTile> tiles_;
  // Local database of every identifier our tiles can broadcast.
  std::unordered_set<PrivateId> own_schedule_ids_;
  std::map<TileId, Tag*> paired_tags_;
};

}  // namespace tileof
