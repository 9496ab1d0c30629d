#include "tileof/wire.hpp"

#include <algorithm>
#include <cmath>

namespace tileof::wire {

namespace {

const Json& require(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "/" + key, "missing field");
  return *it;
}

std::string req_string(const Json& j, const char* key, const std::string& path) {
  const Json& v = require(j, key, path);
  if (!v.is_string()) throw SchemaError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::int64_t req_int(const Json& j, const char* key, const std::string& path) {
  const Json& v = require(j, key, path);
  if (!v.is_number_integer()) throw SchemaError(path + "/" + key, "expected an integer");
  return v.get<std::int64_t>();
}

double req_number(const Json& j, const char* key, const std::string& path) {
  const Json& v = require(j, key, path);
  if (!v.is_number()) throw SchemaError(path + "/" + key, "expected a number");
  return v.get<double>();
}

bool req_bool(const Json& j, const char* key, const std::string& path) {
  const Json& v = require(j, key, path);
  if (!v.is_boolean()) throw SchemaError(path + "/" + key, "expected a boolean");
  return v.get<bool>();
}

Bytes req_hex(const Json& j, const char* key, const std::string& path, std::size_t expected_len) {
  const std::string text = req_string(j, key, path);
  Bytes out;
  try {
    out = from_hex(text);
  } catch (const std::invalid_argument&) {
    throw SchemaError(path + "/" + key, "expected a hex string");
  }
  if (out.size() != expected_len) {
    throw ValidationError(path + "/" + key,
                          "expected " + std::to_string(expected_len) + " bytes");
  }
  return out;
}

template <typename T>
T req_fixed(const Json& j, const char* key, const std::string& path) {
  return T::from_bytes(req_hex(j, key, path, T::kSize));
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known,
                    const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return it.key() == k; })) {
      throw SchemaError(path + "/" + it.key(), "unknown field");
    }
  }
}

// For objects the captures showed with trailing "...": everything beyond the
// named fields survives in an extension map.
Json take_extensions(const Json& j, std::initializer_list<const char*> known) {
  Json ext = Json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return it.key() == k; })) {
      ext[it.key()] = it.value();
    }
  }
  return ext;
}

void append_extensions(Json& j, const Json& ext) {
  for (auto it = ext.begin(); it != ext.end(); ++it) j[it.key()] = it.value();
}

bool all_digits_with_dots(const std::string& s, std::initializer_list<std::size_t> dot_positions) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool want_dot = std::find(dot_positions.begin(), dot_positions.end(), i) != dot_positions.end();
    if (want_dot ? s[i] != '.' : !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

PrivateId decode_private_id_text(const Json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a hex string");
  Bytes raw;
  try {
    raw = from_hex(v.get<std::string>());
  } catch (const std::invalid_argument&) {
    throw SchemaError(path, "expected a hex string");
  }
  if (raw.size() != 8) throw ValidationError(path, "privateId must be 8 bytes");
  return PrivateId::from_bytes(raw);
}

}  // namespace

std::string service_uuid_name(ServiceUuid uuid) {
  return uuid == ServiceUuid::kFeec ? "FEEC" : "FEED";
}

ServiceUuid service_uuid_from_name(const std::string& name) {
  if (name == "FEEC") return ServiceUuid::kFeec;
  if (name == "FEED") return ServiceUuid::kFeed;
  throw SchemaError("/service", "unknown service UUID '" + name + "'");
}

// ---- Advertisement ----

void Advertisement::validate() const {
  if (service == ServiceUuid::kFeed && !payload.has_value()) {
    throw ValidationError("/payload", "FEED advertisement must carry a privateId");
  }
  if (service == ServiceUuid::kFeec && payload.has_value()) {
    throw ValidationError("/payload", "FEEC advertisement must not carry a payload");
  }
}

Json Advertisement::encode() const {
  validate();
  Json j = Json::object();
  j["mac"] = mac_to_string(mac);
  j["service"] = service_uuid_name(service);
  if (payload) j["payload"] = payload->hex();
  j["emitted_at"] = emitted_at;
  return j;
}

Advertisement Advertisement::decode(const Json& j) {
  reject_unknown(j, {"mac", "service", "payload", "emitted_at"}, "");
  Advertisement adv;
  try {
    adv.mac = mac_from_string(req_string(j, "mac", ""));
  } catch (const std::invalid_argument& e) {
    throw ValidationError("/mac", e.what());
  }
  adv.service = service_uuid_from_name(req_string(j, "service", ""));
  if (j.contains("payload")) adv.payload = decode_private_id_text(j.at("payload"), "/payload");
  adv.emitted_at = req_int(j, "emitted_at", "");
  adv.validate();
  return adv;
}

bool Advertisement::operator==(const Advertisement& other) const {
  return mac == other.mac && service == other.service && payload == other.payload &&
         emitted_at == other.emitted_at;
}

// ---- TdiRecord ----

void TdiRecord::validate() const {
  // model "xxxx yy.yy": 4-char vendor id, space, numeric model number.
  if (model.size() != 10 || model[4] != ' ' ||
      !all_digits_with_dots(model.substr(5), {2}) ||
      !std::all_of(model.begin(), model.begin() + 4,
                   [](char c) { return std::isalnum(static_cast<unsigned char>(c)); })) {
    throw ValidationError("/model", "expected the form 'xxxx yy.yy'");
  }
  if (firmware.size() != 10 || !all_digits_with_dots(firmware, {2, 5, 8})) {
    throw ValidationError("/firmware", "expected the form 'xx.xx.xx.x'");
  }
  if (hardware_version.size() != 5 || !all_digits_with_dots(hardware_version, {2})) {
    throw ValidationError("/hardware_version", "expected the form 'xx.xx'");
  }
}

Json TdiRecord::encode() const {
  validate();
  Json j = Json::object();
  j["tile_id"] = tile_id.hex();
  j["model"] = model;
  j["firmware"] = firmware;
  j["hardware_version"] = hardware_version;
  return j;
}

TdiRecord TdiRecord::decode(const Json& j) {
  reject_unknown(j, {"tile_id", "model", "firmware", "hardware_version"}, "");
  TdiRecord tdi;
  tdi.tile_id = req_fixed<TileId>(j, "tile_id", "");
  tdi.model = req_string(j, "model", "");
  tdi.firmware = req_string(j, "firmware", "");
  tdi.hardware_version = req_string(j, "hardware_version", "");
  tdi.validate();
  return tdi;
}

// ---- Registration ----

void RegistrationRequest::validate() const {
  if (email.empty()) throw ValidationError("/email", "email must not be empty");
}

Json RegistrationRequest::encode() const {
  validate();
  Json j = Json::object();
  j["client_uuid"] = client_uuid.hex();
  j["email"] = email;
  j["password"] = password;
  return j;
}

RegistrationRequest RegistrationRequest::decode(const Json& j) {
  reject_unknown(j, {"client_uuid", "email", "password"}, "");
  RegistrationRequest req;
  req.client_uuid = req_fixed<ClientUuid>(j, "client_uuid", "");
  req.email = req_string(j, "email", "");
  req.password = req_string(j, "password", "");
  req.validate();
  return req;
}

void RegistrationResponse::validate() const {
  if (status != "ACTIVATED") throw ValidationError("/status", "status must be 'ACTIVATED'");
}

Json RegistrationResponse::encode() const {
  validate();
  Json j = Json::object();
  j["user_uuid"] = user_uuid.hex();
  j["status"] = status;
  return j;
}

RegistrationResponse RegistrationResponse::decode(const Json& j) {
  reject_unknown(j, {"user_uuid", "status"}, "");
  RegistrationResponse resp;
  resp.user_uuid = req_fixed<UserUuid>(j, "user_uuid", "");
  resp.status = req_string(j, "status", "");
  resp.validate();
  return resp;
}

// ---- generate_tileUUID ----

void GenerateTileUuidRequest::validate() const {
  if (tile_type != "PHONE") throw ValidationError("/tile_type", "tile_type must be 'PHONE'");
}

Json GenerateTileUuidRequest::encode() const {
  validate();
  Json j = Json::object();
  j["tile_uuid"] = tile_uuid;
  j["user_uuid"] = user_uuid.hex();
  j["tile_type"] = tile_type;
  return j;
}

GenerateTileUuidRequest GenerateTileUuidRequest::decode(const Json& j) {
  reject_unknown(j, {"tile_uuid", "user_uuid", "tile_type"}, "");
  GenerateTileUuidRequest req;
  req.tile_uuid = req_string(j, "tile_uuid", "");
  req.user_uuid = req_fixed<UserUuid>(j, "user_uuid", "");
  req.tile_type = req_string(j, "tile_type", "");
  req.validate();
  return req;
}

void GenerateTileUuidResponse::validate() const {
  if (tile_uuid.rfind("p!", 0) != 0) {
    throw ValidationError("/tile_uuid", "phone tile uuid must start with 'p!'");
  }
}

Json GenerateTileUuidResponse::encode() const {
  validate();
  Json j = Json::object();
  j["tile_uuid"] = tile_uuid;
  return j;
}

GenerateTileUuidResponse GenerateTileUuidResponse::decode(const Json& j) {
  reject_unknown(j, {"tile_uuid"}, "");
  GenerateTileUuidResponse resp;
  resp.tile_uuid = req_string(j, "tile_uuid", "");
  resp.validate();
  return resp;
}

// ---- Activation ----

void ActivationRequest::validate() const {
  TdiRecord tdi{tile_uuid, model, firmware_version, hw_version};
  tdi.validate();
}

Json ActivationRequest::encode() const {
  validate();
  Json j = Json::object();
  j["tile_uuid"] = tile_uuid.hex();
  j["name"] = name;
  j["rand_a"] = rand_a.hex();
  j["rand_t"] = rand_t.hex();
  j["sres_t"] = sres_t.hex();
  j["hw_version"] = hw_version;
  j["model"] = model;
  j["firmware_version"] = firmware_version;
  return j;
}

ActivationRequest ActivationRequest::decode(const Json& j) {
  reject_unknown(
      j, {"tile_uuid", "name", "rand_a", "rand_t", "sres_t", "hw_version", "model",
          "firmware_version"},
      "");
  ActivationRequest req;
  req.tile_uuid = req_fixed<TileId>(j, "tile_uuid", "");
  req.name = req_string(j, "name", "");
  req.rand_a = req_fixed<RandA>(j, "rand_a", "");
  req.rand_t = req_fixed<RandT>(j, "rand_t", "");
  req.sres_t = req_fixed<SresT>(j, "sres_t", "");
  req.hw_version = req_string(j, "hw_version", "");
  req.model = req_string(j, "model", "");
  req.firmware_version = req_string(j, "firmware_version", "");
  req.validate();
  return req;
}

void ActivationResponse::validate() const {}

Json ActivationResponse::encode() const {
  Json result = Json::object();
  result["tile_uuid"] = tile_uuid.hex();
  result["auth_key"] = auth_key.hex();
  Json j = Json::object();
  j["result_code"] = 0;
  j["result"] = result;
  return j;
}

ActivationResponse ActivationResponse::decode(const Json& j) {
  reject_unknown(j, {"result_code", "result"}, "");
  const Json& result = require(j, "result", "");
  reject_unknown(result, {"tile_uuid", "auth_key"}, "/result");
  ActivationResponse resp;
  resp.tile_uuid = req_fixed<TileId>(result, "tile_uuid", "/result");
  resp.auth_key = req_fixed<AuthKey>(result, "auth_key", "/result");
  return resp;
}

// ---- Location reports ----

void GeoLocation::validate(const std::string& path) const {
  if (!std::isfinite(latitude) || latitude < -90.0 || latitude > 90.0) {
    throw ValidationError(path + "/latitude", "latitude out of [-90, 90]");
  }
  if (!std::isfinite(longitude) || longitude < -180.0 || longitude > 180.0) {
    throw ValidationError(path + "/longitude", "longitude out of [-180, 180]");
  }
  if (!std::isfinite(altitude)) throw ValidationError(path + "/altitude", "altitude not finite");
}

Json GeoLocation::encode() const {
  validate("");
  Json j = Json::object();
  j["altitude"] = altitude;
  j["latitude"] = latitude;
  j["longitude"] = longitude;
  j["timestamp"] = timestamp;
  append_extensions(j, ext);
  return j;
}

GeoLocation GeoLocation::decode(const Json& j, const std::string& path) {
  GeoLocation loc;
  loc.altitude = req_number(j, "altitude", path);
  loc.latitude = req_number(j, "latitude", path);
  loc.longitude = req_number(j, "longitude", path);
  loc.timestamp = req_int(j, "timestamp", path);
  loc.ext = take_extensions(j, {"altitude", "latitude", "longitude", "timestamp"});
  loc.validate(path);
  return loc;
}

Json ConnectedAuthData::encode() const {
  Json j = Json::object();
  j["rand_a"] = rand_a.hex();
  j["rand_t"] = rand_t.hex();
  j["sres_t"] = sres_t.hex();
  j["tile_uuid"] = tile_uuid.hex();
  return j;
}

ConnectedAuthData ConnectedAuthData::decode(const Json& j, const std::string& path) {
  reject_unknown(j, {"rand_a", "rand_t", "sres_t", "tile_uuid"}, path);
  ConnectedAuthData data;
  data.rand_a = req_fixed<RandA>(j, "rand_a", path);
  data.rand_t = req_fixed<RandT>(j, "rand_t", path);
  data.sres_t = req_fixed<SresT>(j, "sres_t", path);
  data.tile_uuid = req_fixed<TileId>(j, "tile_uuid", path);
  return data;
}

void AdvertisedServiceData::validate(const std::string& path) const {
  try {
    mac_from_string(mac_address);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(path + "/mac_address", e.what());
  }
}

Json AdvertisedServiceData::encode() const {
  validate("");
  Json j = Json::object();
  j["mac_address"] = mac_address;
  j["payload_service_data"] = payload_service_data.hex();
  append_extensions(j, ext);
  return j;
}

AdvertisedServiceData AdvertisedServiceData::decode(const Json& j, const std::string& path) {
  AdvertisedServiceData data;
  data.mac_address = req_string(j, "mac_address", path);
  data.payload_service_data =
      decode_private_id_text(require(j, "payload_service_data", path),
                             path + "/payload_service_data");
  data.ext = take_extensions(j, {"mac_address", "payload_service_data"});
  data.validate(path);
  return data;
}

Json ClientData::encode() const {
  Json j = Json::object();
  j["tile_uuid"] = tile_uuid;
  return j;
}

ClientData ClientData::decode(const Json& j, const std::string& path) {
  reject_unknown(j, {"tile_uuid"}, path);
  ClientData data;
  data.tile_uuid = req_string(j, "tile_uuid", path);
  return data;
}

void TileEntry::validate(const std::string& path) const {
  int forms = (connected_auth_data ? 1 : 0) + (advertised_service_data ? 1 : 0) +
              (client_data ? 1 : 0);
  if (forms != 1) {
    throw ValidationError(path, "tile entry must carry exactly one payload form");
  }
  if (advertised_service_data) advertised_service_data->validate(path);
}

Json TileEntry::encode() const {
  validate("");
  Json j = Json::object();
  if (connected_auth_data) j["connected_auth_data"] = connected_auth_data->encode();
  if (advertised_service_data) j["advertised_service_data"] = advertised_service_data->encode();
  if (client_data) j["client_data"] = client_data->encode();
  j["discovery_timestamp"] = discovery_timestamp;
  j["record_id"] = record_id;
  return j;
}

TileEntry TileEntry::decode(const Json& j, const std::string& path) {
  reject_unknown(j,
                 {"connected_auth_data", "advertised_service_data", "client_data",
                  "discovery_timestamp", "record_id"},
                 path);
  TileEntry entry;
  if (j.contains("connected_auth_data")) {
    entry.connected_auth_data =
        ConnectedAuthData::decode(j.at("connected_auth_data"), path + "/connected_auth_data");
  }
  if (j.contains("advertised_service_data")) {
    entry.advertised_service_data = AdvertisedServiceData::decode(
        j.at("advertised_service_data"), path + "/advertised_service_data");
  }
  if (j.contains("client_data")) {
    entry.client_data = ClientData::decode(j.at("client_data"), path + "/client_data");
  }
  entry.discovery_timestamp = req_int(j, "discovery_timestamp", path);
  entry.record_id = req_int(j, "record_id", path);
  entry.validate(path);
  return entry;
}

void UpdateRecord::validate(const std::string& path) const {
  location.validate(path + "/location");
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    tiles[i].validate(path + "/tiles/" + std::to_string(i));
  }
}

Json UpdateRecord::encode() const {
  validate("");
  Json j = Json::object();
  j["record_id"] = record_id;
  j["location"] = location.encode();
  Json entries = Json::array();
  for (const auto& t : tiles) entries.push_back(t.encode());
  j["tiles"] = entries;
  return j;
}

UpdateRecord UpdateRecord::decode(const Json& j, const std::string& path) {
  reject_unknown(j, {"record_id", "location", "tiles"}, path);
  UpdateRecord rec;
  rec.record_id = req_int(j, "record_id", path);
  rec.location = GeoLocation::decode(require(j, "location", path), path + "/location");
  const Json& tiles = require(j, "tiles", path);
  if (!tiles.is_array()) throw SchemaError(path + "/tiles", "expected an array");
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    rec.tiles.push_back(TileEntry::decode(tiles[i], path + "/tiles/" + std::to_string(i)));
  }
  return rec;
}

void LocationUpdate::validate() const {
  for (std::size_t i = 0; i < updates.size(); ++i) {
    updates[i].validate("/updates/" + std::to_string(i));
  }
}

Json LocationUpdate::encode() const {
  validate();
  Json list = Json::array();
  for (const auto& u : updates) list.push_back(u.encode());
  Json j = Json::object();
  j["updates"] = list;
  return j;
}

LocationUpdate LocationUpdate::decode(const Json& j) {
  reject_unknown(j, {"updates"}, "");
  const Json& list = require(j, "updates", "");
  if (!list.is_array()) throw SchemaError("/updates", "expected an array");
  LocationUpdate update;
  for (std::size_t i = 0; i < list.size(); ++i) {
    update.updates.push_back(UpdateRecord::decode(list[i], "/updates/" + std::to_string(i)));
  }
  return update;
}

// ---- Scan and Secure ----

namespace {

Json encode_scan_lists(const std::array<std::vector<PrivateId>, kScanPasses>& scans) {
  Json j = Json::array();
  for (const auto& pass : scans) {
    Json ids = Json::array();
    for (const auto& id : pass) ids.push_back(id.hex());
    Json obj = Json::object();
    obj["privateIds"] = ids;
    j.push_back(obj);
  }
  return j;
}

std::array<std::vector<PrivateId>, kScanPasses> decode_scan_lists(const Json& j) {
  if (!j.is_array()) throw SchemaError("", "expected an array of scan passes");
  if (j.size() != kScanPasses) {
    throw SchemaError("", "expected exactly " + std::to_string(kScanPasses) + " scan lists, got " +
                              std::to_string(j.size()));
  }
  std::array<std::vector<PrivateId>, kScanPasses> scans;
  for (std::size_t i = 0; i < kScanPasses; ++i) {
    const std::string path = "/" + std::to_string(i);
    reject_unknown(j[i], {"privateIds"}, path);
    const Json& ids = require(j[i], "privateIds", path);
    if (!ids.is_array()) throw SchemaError(path + "/privateIds", "expected an array");
    for (std::size_t k = 0; k < ids.size(); ++k) {
      scans[i].push_back(
          decode_private_id_text(ids[k], path + "/privateIds/" + std::to_string(k)));
    }
  }
  return scans;
}

}  // namespace

void ScanSecureRequest::validate() const {}

Json ScanSecureRequest::encode() const { return encode_scan_lists(scans); }

ScanSecureRequest ScanSecureRequest::decode(const Json& j) {
  return ScanSecureRequest{decode_scan_lists(j)};
}

void ScanSecureResponse::validate() const {}

Json ScanSecureResponse::encode() const { return encode_scan_lists(scans); }

ScanSecureResponse ScanSecureResponse::decode(const Json& j) {
  return ScanSecureResponse{decode_scan_lists(j)};
}

// ---- Sharing ----

void SharingResponse::validate() const {
  if (tile_type != "TILE") throw ValidationError("/result/tileType", "tileType must be 'TILE'");
}

Json SharingResponse::encode() const {
  validate();
  Json result = Json::object();
  result["tileType"] = tile_type;
  result["tile_uuid"] = tile_uuid.hex();
  result["user_uuid"] = user_uuid.hex();
  result["other_user_uuid"] = other_user_uuid.hex();
  result["other_user_email"] = other_user_email;
  append_extensions(result, ext);
  Json j = Json::object();
  j["result"] = result;
  return j;
}

SharingResponse SharingResponse::decode(const Json& j) {
  reject_unknown(j, {"result"}, "");
  const Json& result = require(j, "result", "");
  SharingResponse resp;
  resp.tile_type = req_string(result, "tileType", "/result");
  resp.tile_uuid = req_fixed<TileId>(result, "tile_uuid", "/result");
  resp.user_uuid = req_fixed<UserUuid>(result, "user_uuid", "/result");
  resp.other_user_uuid = req_fixed<UserUuid>(result, "other_user_uuid", "/result");
  resp.other_user_email = req_string(result, "other_user_email", "/result");
  resp.ext = take_extensions(
      result, {"tileType", "tile_uuid", "user_uuid", "other_user_uuid", "other_user_email"});
  resp.validate();
  return resp;
}

// ---- Community stats ----

void CommunityStatsResponse::validate() const {
  if (center_radius != 5.0) {
    throw ValidationError("/result/center_radius", "center_radius is always 5.0");
  }
}

Json CommunityStatsResponse::encode() const {
  validate();
  Json result = Json::object();
  result["timestamp"] = timestamp;
  result["center_latitude"] = center_latitude;
  result["center_longitude"] = center_longitude;
  result["center_radius"] = center_radius;
  result["tilers_around"] = tilers_around;
  result["display_tilers_around"] = display_tilers_around;
  result["display_tiles_found"] = display_tiles_found;
  append_extensions(result, result_ext);
  Json j = Json::object();
  j["timestamp_ms"] = timestamp_ms;
  j["result_code"] = result_code;
  j["result"] = result;
  append_extensions(j, ext);
  return j;
}

CommunityStatsResponse CommunityStatsResponse::decode(const Json& j) {
  CommunityStatsResponse resp;
  resp.timestamp_ms = req_int(j, "timestamp_ms", "");
  const Json& code = require(j, "result_code", "");
  if (!code.is_number_integer()) throw SchemaError("/result_code", "expected an integer");
  resp.result_code = code.get<int>();
  const Json& result = require(j, "result", "");
  resp.timestamp = req_int(result, "timestamp", "/result");
  resp.center_latitude = req_number(result, "center_latitude", "/result");
  resp.center_longitude = req_number(result, "center_longitude", "/result");
  resp.center_radius = req_number(result, "center_radius", "/result");
  resp.tilers_around = req_int(result, "tilers_around", "/result");
  resp.display_tilers_around = req_bool(result, "display_tilers_around", "/result");
  resp.display_tiles_found = req_bool(result, "display_tiles_found", "/result");
  resp.result_ext = take_extensions(
      result, {"timestamp", "center_latitude", "center_longitude", "center_radius",
               "tilers_around", "display_tilers_around", "display_tiles_found"});
  resp.ext = take_extensions(j, {"timestamp_ms", "result_code", "result"});
  resp.validate();
  return resp;
}

// ---- Deletion ----

void DeletionResponse::validate() const {
  if (http_status != 202) throw ValidationError("/http_status", "deletion returns 202");
}

Json DeletionResponse::encode() const {
  validate();
  Json j = Json::object();
  j["http_status"] = http_status;
  return j;
}

DeletionResponse DeletionResponse::decode(const Json& j) {
  reject_unknown(j, {"http_status"}, "");
  DeletionResponse resp;
  resp.http_status = static_cast<int>(req_int(j, "http_status", ""));
  resp.validate();
  return resp;
}

// ---- History ----

void HistoryResponse::validate() const {
  for (std::size_t i = 0; i < locations.size(); ++i) {
    locations[i].validate("/result/locations/" + std::to_string(i));
  }
}

Json HistoryResponse::encode() const {
  validate();
  Json points = Json::array();
  for (const auto& loc : locations) points.push_back(loc.encode());
  Json result = Json::object();
  result["tile_uuid"] = tile_uuid.hex();
  result["locations"] = points;
  Json j = Json::object();
  j["result_code"] = 0;
  j["result"] = result;
  return j;
}

HistoryResponse HistoryResponse::decode(const Json& j) {
  reject_unknown(j, {"result_code", "result"}, "");
  const Json& result = require(j, "result", "");
  reject_unknown(result, {"tile_uuid", "locations"}, "/result");
  HistoryResponse resp;
  resp.tile_uuid = req_fixed<TileId>(result, "tile_uuid", "/result");
  const Json& points = require(result, "locations", "/result");
  if (!points.is_array()) throw SchemaError("/result/locations", "expected an array");
  for (std::size_t i = 0; i < points.size(); ++i) {
    resp.locations.push_back(
        GeoLocation::decode(points[i], "/result/locations/" + std::to_string(i)));
  }
  return resp;
}

// ---- Share / transfer / anti-theft / deletion requests ----

namespace {

template <typename T>
T decode_tile_email(const Json& j) {
  reject_unknown(j, {"tile_uuid", "email"}, "");
  T req;
  req.tile_uuid = req_fixed<TileId>(j, "tile_uuid", "");
  req.email = req_string(j, "email", "");
  req.validate();
  return req;
}

template <typename T>
Json encode_tile_email(const T& req) {
  req.validate();
  Json j = Json::object();
  j["tile_uuid"] = req.tile_uuid.hex();
  j["email"] = req.email;
  return j;
}

}  // namespace

void ShareRequest::validate() const {
  if (email.empty()) throw ValidationError("/email", "email must not be empty");
}
Json ShareRequest::encode() const { return encode_tile_email(*this); }
ShareRequest ShareRequest::decode(const Json& j) { return decode_tile_email<ShareRequest>(j); }

void TransferRequest::validate() const {
  if (email.empty()) throw ValidationError("/email", "email must not be empty");
}
Json TransferRequest::encode() const { return encode_tile_email(*this); }
TransferRequest TransferRequest::decode(const Json& j) {
  return decode_tile_email<TransferRequest>(j);
}

void AntiTheftEnrollRequest::validate() const {
  if (identity_document.empty()) {
    throw ValidationError("/identity_document", "identity document required");
  }
}

Json AntiTheftEnrollRequest::encode() const {
  validate();
  Json j = Json::object();
  j["identity_document"] = identity_document;
  return j;
}

AntiTheftEnrollRequest AntiTheftEnrollRequest::decode(const Json& j) {
  reject_unknown(j, {"identity_document"}, "");
  AntiTheftEnrollRequest req;
  req.identity_document = req_string(j, "identity_document", "");
  req.validate();
  return req;
}

void DeleteAccountRequest::validate() const {}

Json DeleteAccountRequest::encode() const {
  Json j = Json::object();
  j["password"] = password;
  return j;
}

DeleteAccountRequest DeleteAccountRequest::decode(const Json& j) {
  reject_unknown(j, {"password"}, "");
  DeleteAccountRequest req;
  req.password = req_string(j, "password", "");
  return req;
}

// ---- Tile list (owner sync) ----

Json TileListEntry::encode() const {
  Json j = Json::object();
  j["tile_uuid"] = tile_uuid.hex();
  j["auth_key"] = auth_key.hex();
  j["name"] = name;
  j["shared"] = shared;
  j["activation_timestamp"] = activation_timestamp;
  return j;
}

TileListEntry TileListEntry::decode(const Json& j, const std::string& path) {
  reject_unknown(j, {"tile_uuid", "auth_key", "name", "shared", "activation_timestamp"}, path);
  TileListEntry entry;
  entry.tile_uuid = req_fixed<TileId>(j, "tile_uuid", path);
  entry.auth_key = req_fixed<AuthKey>(j, "auth_key", path);
  entry.name = req_string(j, "name", path);
  entry.shared = req_bool(j, "shared", path);
  entry.activation_timestamp = req_int(j, "activation_timestamp", path);
  return entry;
}

void TileListResponse::validate() const {}

Json TileListResponse::encode() const {
  Json list = Json::array();
  for (const auto& t : tiles) list.push_back(t.encode());
  Json result = Json::object();
  result["tiles"] = list;
  Json j = Json::object();
  j["result_code"] = 0;
  j["result"] = result;
  return j;
}

TileListResponse TileListResponse::decode(const Json& j) {
  reject_unknown(j, {"result_code", "result"}, "");
  const Json& result = require(j, "result", "");
  reject_unknown(result, {"tiles"}, "/result");
  const Json& list = require(result, "tiles", "/result");
  if (!list.is_array()) throw SchemaError("/result/tiles", "expected an array");
  TileListResponse resp;
  for (std::size_t i = 0; i < list.size(); ++i) {
    resp.tiles.push_back(
        TileListEntry::decode(list[i], "/result/tiles/" + std::to_string(i)));
  }
  return resp;
}

}  // namespace tileof::wire
