#pragma once

// Service-provider emulator: user and tag registries, activation triplet
// verification and key issuance, verbatim ingestion of plaintext location
// reports, history authorization, scan filtering for anti-theft tags,
// community stats, sharing/transfer, and account deletion.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "tileof/bytes.hpp"
#include "tileof/crypto.hpp"
#include "tileof/sim.hpp"
#include "tileof/wire.hpp"

namespace tileof::server {

class ApiError : public std::runtime_error {
 public:
  ApiError(int status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct VendorConfig {
  std::string vendor_id;  // first four characters of the model string
  InterimAuthKey interim_key;
};

struct RetentionConfig {
  // Location reports survive account deletion.
  bool retain_reports = true;
};

struct ServerOptions {
  std::vector<VendorConfig> vendors;
  RetentionConfig retention;
  // Counterfactual control: rotate the authKey on transfer and share
  // revocation instead of forwarding the original key.
  bool fresh_key_on_transfer = false;
  // Lets tests exercise the enrollment-failed path of the mock verifier.
  bool identity_verifier_rejects = false;
  std::uint64_t seed = 1;
};

struct UserRecord {
  UserUuid user_uuid;
  std::string email;
  std::string password_digest;
  std::set<ClientUuid> client_uuids;
  std::string phone_tile_uuid;
  std::string email_verification_code;  // generated but never required
  bool email_verified = false;
  bool anti_theft = false;
  std::optional<std::string> anti_theft_identity;
};

struct TagRecord {
  TileId tile_id;
  AuthKey auth_key;
  UserUuid owner_uuid;
  std::set<UserUuid> shared_uuids;
  bool anti_theft = false;
  std::string vendor_id;
  Timestamp activation_time = 0;
  std::string name;
};

struct IngestedReport {
  UserUuid uploader;
  Timestamp received_at = 0;
  wire::LocationUpdate update;
};

// Outcome of a share revocation or transfer; carries the rotated key when
// the fresh-key control toggle is on.
struct ReassociationOutcome {
  std::optional<AuthKey> fresh_key;
};

class ServerCore {
 public:
  explicit ServerCore(ServerOptions options, std::function<Timestamp()> now);

  // POST /api/v1/users
  wire::RegistrationResponse create_user(const wire::RegistrationRequest& req);
  // POST /api/v1/tiles/generate_tileUUID
  wire::GenerateTileUuidResponse generate_tile_uuid(const wire::GenerateTileUuidRequest& req,
                                                    const UserUuid& caller);
  // POST /api/v1/tiles/activate
  wire::ActivationResponse establish_auth_key(const wire::ActivationRequest& req,
                                              const UserUuid& caller);
  // POST /api/v1/locations/update
  void ingest_location_update(const wire::LocationUpdate& update, const UserUuid& uploader);
  // GET /api/v1/tiles/location/history/{tileId}
  wire::HistoryResponse history(const TileId& tile_id, const UserUuid& caller) const;
  // POST /api/v1/scan_and_secure
  wire::ScanSecureResponse filter_scan(const wire::ScanSecureRequest& req) const;
  // GET /api/v1/community/stats
  wire::CommunityStatsResponse community_stats(double latitude, double longitude) const;
  // POST /api/v1/tiles/{tileId}/share
  wire::SharingResponse add_share(const wire::ShareRequest& req, const UserUuid& caller);
  // DELETE /api/v1/tiles/{tileId}/share
  ReassociationOutcome revoke_share(const wire::ShareRequest& req, const UserUuid& caller);
  // POST /api/v1/tiles/{tileId}/transfer
  ReassociationOutcome transfer(const wire::TransferRequest& req, const UserUuid& caller);
  // POST /api/v1/anti_theft/enroll
  void enroll_anti_theft(const wire::AntiTheftEnrollRequest& req, const UserUuid& caller);
  // DELETE /api/v1/users/{user_uuid}
  wire::DeletionResponse delete_user(const UserUuid& target,
                                     const wire::DeleteAccountRequest& req,
                                     const UserUuid& caller);
  // GET /api/v1/tiles
  wire::TileListResponse list_tiles(const UserUuid& caller) const;

  const UserRecord& require_user(const UserUuid& uuid) const;
  std::optional<UserUuid> find_user_by_email(const std::string& email) const;

  // Single JSON document {users, tags, triplets, reports}. The privateId
  // index is rebuilt from the tag registry on load.
  wire::Json snapshot() const;
  static ServerCore from_snapshot(const wire::Json& snapshot, ServerOptions options,
                                  std::function<Timestamp()> now);

  const std::map<TileId, TagRecord>& tags() const { return tags_; }
  const std::map<UserUuid, UserRecord>& users() const { return users_; }
  const std::vector<IngestedReport>& reports() const { return reports_; }
  const std::unordered_map<PrivateId, std::pair<TileId, int>>& private_id_index() const {
    return private_id_index_;
  }
  std::optional<std::pair<TileId, int>> resolve_private_id(const PrivateId& id) const;

 private:
  UserRecord& require_user_mut(const UserUuid& uuid);
  TagRecord& require_owned_tag(const TileId& tile_id, const UserUuid& caller);
  const VendorConfig* find_vendor(const std::string& vendor_id) const;
  void index_tag(const TagRecord& tag);
  void unindex_tag(const TileId& tile_id);
  AuthKey rotate_tag_key(TagRecord& tag);
  void note_position(const UserUuid& uploader, const wire::UpdateRecord& rec);
  std::string triplet_fingerprint(const TileId& tile_id, const AuthTriplet& triplet) const;

  ServerOptions options_;
  std::function<Timestamp()> now_;
  sim::Rng rng_;

  std::map<UserUuid, UserRecord> users_;
  std::map<TileId, TagRecord> tags_;
  std::set<std::string> consumed_triplets_;
  std::vector<IngestedReport> reports_;
  std::unordered_map<PrivateId, std::pair<TileId, int>> private_id_index_;
  // uploader -> (timestamp, latitude, longitude) of the newest report.
  std::map<UserUuid, std::tuple<Timestamp, double, double>> last_positions_;
};

}  // namespace tileof::server
