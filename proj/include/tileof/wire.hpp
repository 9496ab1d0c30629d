#pragma once

// Data model for every HTTP body and BLE payload the protocol exchanges,
// with validating JSON codecs. Field names and nesting mirror the captured
// traffic byte for byte; fields the captures elide are preserved through an
// open extension map on the objects that carry them.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tileof/bytes.hpp"

namespace tileof::wire {

// Insertion-ordered JSON so encoded bodies keep the captured field order.
using Json = nlohmann::ordered_json;

class WireError : public std::runtime_error {
 public:
  WireError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Shape problems: missing/mistyped/unknown fields, wrong arity.
class SchemaError : public WireError {
 public:
  using WireError::WireError;
};

// Well-formed but invariant-breaking values (and encode refusals).
class ValidationError : public WireError {
 public:
  using WireError::WireError;
};

enum class ServiceUuid { kFeec, kFeed };

std::string service_uuid_name(ServiceUuid uuid);
ServiceUuid service_uuid_from_name(const std::string& name);

// Simulated BLE advertisement: what a passive scanner observes.
struct Advertisement {
  MacAddress mac;
  ServiceUuid service = ServiceUuid::kFeec;
  std::optional<PrivateId> payload;  // present iff service == FEED
  Timestamp emitted_at = 0;

  void validate() const;
  Json encode() const;
  static Advertisement decode(const Json& j);
  bool operator==(const Advertisement& other) const;
};

// Tile Device Information, served over the devInfoService during activation.
struct TdiRecord {
  TileId tile_id;
  std::string model;             // "xxxx yy.yy"; first 4 chars are the vendor id
  std::string firmware;          // "xx.xx.xx.x"
  std::string hardware_version;  // "xx.xx"

  std::string vendor_id() const { return model.substr(0, 4); }
  void validate() const;
  Json encode() const;
  static TdiRecord decode(const Json& j);
  bool operator==(const TdiRecord&) const = default;
};

struct RegistrationRequest {
  ClientUuid client_uuid;
  std::string email;
  std::string password;

  void validate() const;
  Json encode() const;
  static RegistrationRequest decode(const Json& j);
  bool operator==(const RegistrationRequest&) const = default;
};

struct RegistrationResponse {
  UserUuid user_uuid;
  std::string status;  // always "ACTIVATED"

  void validate() const;
  Json encode() const;
  static RegistrationResponse decode(const Json& j);
  bool operator==(const RegistrationResponse&) const = default;
};

struct GenerateTileUuidRequest {
  std::string tile_uuid;  // the client_uuid, hex
  UserUuid user_uuid;
  std::string tile_type;  // "PHONE"

  void validate() const;
  Json encode() const;
  static GenerateTileUuidRequest decode(const Json& j);
  bool operator==(const GenerateTileUuidRequest&) const = default;
};

struct GenerateTileUuidResponse {
  std::string tile_uuid;  // fresh value prefixed "p!"

  void validate() const;
  Json encode() const;
  static GenerateTileUuidResponse decode(const Json& j);
  bool operator==(const GenerateTileUuidResponse&) const = default;
};

// Body POSTed by the owner during secret key establishment.
struct ActivationRequest {
  TileId tile_uuid;
  std::string name;
  RandA rand_a;
  RandT rand_t;
  SresT sres_t;
  std::string hw_version;
  std::string model;
  std::string firmware_version;

  void validate() const;
  Json encode() const;
  static ActivationRequest decode(const Json& j);
  bool operator==(const ActivationRequest&) const = default;
};

struct ActivationResponse {
  TileId tile_uuid;
  AuthKey auth_key;

  void validate() const;
  Json encode() const;
  static ActivationResponse decode(const Json& j);
  bool operator==(const ActivationResponse&) const = default;
};

struct GeoLocation {
  double altitude = 0.0;
  double latitude = 0.0;   // [-90, 90]
  double longitude = 0.0;  // [-180, 180]
  Timestamp timestamp = 0;
  Json ext = Json::object();

  void validate(const std::string& path) const;
  Json encode() const;
  static GeoLocation decode(const Json& j, const std::string& path);
  bool operator==(const GeoLocation&) const = default;
};

// Owner-form per-tag entry: a fresh session triplet for a connected tag.
struct ConnectedAuthData {
  RandA rand_a;
  RandT rand_t;
  SresT sres_t;
  TileId tile_uuid;

  Json encode() const;
  static ConnectedAuthData decode(const Json& j, const std::string& path);
  bool operator==(const ConnectedAuthData&) const = default;
};

// Finder-form per-tag entry: what was sniffed off the air.
struct AdvertisedServiceData {
  std::string mac_address;  // "aa:bb:cc:dd:ee:ff"
  PrivateId payload_service_data;
  Json ext = Json::object();

  void validate(const std::string& path) const;
  Json encode() const;
  static AdvertisedServiceData decode(const Json& j, const std::string& path);
  bool operator==(const AdvertisedServiceData&) const = default;
};

// The reporting phone's own entry.
struct ClientData {
  std::string tile_uuid;  // "p!"-prefixed phone tile uuid

  Json encode() const;
  static ClientData decode(const Json& j, const std::string& path);
  bool operator==(const ClientData&) const = default;
};

// Exactly one of the three payload forms is present.
struct TileEntry {
  std::optional<ConnectedAuthData> connected_auth_data;
  std::optional<AdvertisedServiceData> advertised_service_data;
  std::optional<ClientData> client_data;
  Timestamp discovery_timestamp = 0;
  std::int64_t record_id = 0;

  void validate(const std::string& path) const;
  Json encode() const;
  static TileEntry decode(const Json& j, const std::string& path);
  bool operator==(const TileEntry&) const = default;
};

struct UpdateRecord {
  std::int64_t record_id = 0;
  GeoLocation location;
  std::vector<TileEntry> tiles;

  void validate(const std::string& path) const;
  Json encode() const;
  static UpdateRecord decode(const Json& j, const std::string& path);
  bool operator==(const UpdateRecord&) const = default;
};

// Location report batch uploaded by owners and finders alike.
struct LocationUpdate {
  std::vector<UpdateRecord> updates;

  void validate() const;
  Json encode() const;
  static LocationUpdate decode(const Json& j);
  bool operator==(const LocationUpdate&) const = default;
};

inline constexpr std::size_t kScanPasses = 6;

// One list of observed privateIds per scan pass, exactly six lists.
struct ScanSecureRequest {
  std::array<std::vector<PrivateId>, kScanPasses> scans;

  void validate() const;
  Json encode() const;
  static ScanSecureRequest decode(const Json& j);
  bool operator==(const ScanSecureRequest&) const = default;
};

// Same shape as the request: the surviving subset per scan pass.
struct ScanSecureResponse {
  std::array<std::vector<PrivateId>, kScanPasses> scans;

  void validate() const;
  Json encode() const;
  static ScanSecureResponse decode(const Json& j);
  bool operator==(const ScanSecureResponse&) const = default;
};

struct SharingResponse {
  std::string tile_type;  // "TILE"
  TileId tile_uuid;
  UserUuid user_uuid;
  UserUuid other_user_uuid;
  std::string other_user_email;
  Json ext = Json::object();

  void validate() const;
  Json encode() const;
  static SharingResponse decode(const Json& j);
  bool operator==(const SharingResponse&) const = default;
};

struct CommunityStatsResponse {
  std::int64_t timestamp_ms = 0;
  int result_code = 0;
  Timestamp timestamp = 0;
  double center_latitude = 0.0;
  double center_longitude = 0.0;
  double center_radius = 5.0;  // always 5.0
  std::int64_t tilers_around = 0;
  bool display_tilers_around = true;
  bool display_tiles_found = false;
  Json result_ext = Json::object();
  Json ext = Json::object();

  void validate() const;
  Json encode() const;
  static CommunityStatsResponse decode(const Json& j);
  bool operator==(const CommunityStatsResponse&) const = default;
};

struct DeletionResponse {
  int http_status = 202;  // always 202

  void validate() const;
  Json encode() const;
  static DeletionResponse decode(const Json& j);
  bool operator==(const DeletionResponse&) const = default;
};

// Owner history query result: finder-reported points, time-ordered.
struct HistoryResponse {
  TileId tile_uuid;
  std::vector<GeoLocation> locations;

  void validate() const;
  Json encode() const;
  static HistoryResponse decode(const Json& j);
  bool operator==(const HistoryResponse&) const = default;
};

struct ShareRequest {
  TileId tile_uuid;
  std::string email;

  void validate() const;
  Json encode() const;
  static ShareRequest decode(const Json& j);
  bool operator==(const ShareRequest&) const = default;
};

struct TransferRequest {
  TileId tile_uuid;
  std::string email;

  void validate() const;
  Json encode() const;
  static TransferRequest decode(const Json& j);
  bool operator==(const TransferRequest&) const = default;
};

struct AntiTheftEnrollRequest {
  std::string identity_document;  // stub document recorded by the mock verifier

  void validate() const;
  Json encode() const;
  static AntiTheftEnrollRequest decode(const Json& j);
  bool operator==(const AntiTheftEnrollRequest&) const = default;
};

struct DeleteAccountRequest {
  std::string password;

  void validate() const;
  Json encode() const;
  static DeleteAccountRequest decode(const Json& j);
  bool operator==(const DeleteAccountRequest&) const = default;
};

// Per-tile row in the owner's tile list (lazy sync after share/transfer).
struct TileListEntry {
  TileId tile_uuid;
  AuthKey auth_key;
  std::string name;
  bool shared = false;
  Timestamp activation_timestamp = 0;

  Json encode() const;
  static TileListEntry decode(const Json& j, const std::string& path);
  bool operator==(const TileListEntry&) const = default;
};

struct TileListResponse {
  std::vector<TileListEntry> tiles;

  void validate() const;
  Json encode() const;
  static TileListResponse decode(const Json& j);
  bool operator==(const TileListResponse&) const = default;
};

// Serializes with validation; a violated invariant refuses the encode.
template <typename T>
std::string encode_text(const T& value) {
  return value.encode().dump();
}

template <typename T>
T decode_text(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw SchemaError("/", "body is not valid JSON");
  return T::decode(j);
}

}  // namespace tileof::wire
