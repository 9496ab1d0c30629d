#include "tileof/http_api.hpp"

namespace tileof::http {

namespace {

using server::ApiError;
using wire::Json;

HttpResponse json_response(int status, const Json& body) {
  return HttpResponse{status, body.dump()};
}

HttpResponse error_response(int status, const std::string& message) {
  Json j = Json::object();
  j["result_code"] = status;
  j["error"] = message;
  return json_response(status, j);
}

UserUuid caller_from_header(const HttpRequest& request) {
  auto it = request.headers.find(kUserUuidHeader);
  if (it == request.headers.end()) throw ApiError(401, "missing user_uuid header");
  try {
    return UserUuid::from_hex(it->second);
  } catch (const std::invalid_argument&) {
    throw ApiError(401, "malformed user_uuid header");
  }
}

// Splits "/api/v1/tiles/<hex>/share" style paths.
std::vector<std::string> path_segments(const std::string& path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < path.size()) {
    if (path[start] == '/') {
      ++start;
      continue;
    }
    std::size_t end = path.find('/', start);
    if (end == std::string::npos) end = path.size();
    out.push_back(path.substr(start, end - start));
    start = end;
  }
  return out;
}

double query_number(const HttpRequest& request, const char* name) {
  auto it = request.query.find(name);
  if (it == request.query.end()) throw ApiError(400, std::string("missing query param ") + name);
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ApiError(400, std::string("malformed query param ") + name);
  }
}

HttpResponse dispatch(server::ServerCore& core, const HttpRequest& request) {
  const auto seg = path_segments(request.path);
  // Everything lives under /api/v1.
  if (seg.size() < 3 || seg[0] != "api" || seg[1] != "v1") {
    return error_response(404, "no such endpoint");
  }

  if (request.method == "POST" && request.path == "/api/v1/users") {
    auto req = wire::decode_text<wire::RegistrationRequest>(request.body);
    return json_response(200, core.create_user(req).encode());
  }

  if (request.method == "POST" && request.path == "/api/v1/tiles/generate_tileUUID") {
    auto req = wire::decode_text<wire::GenerateTileUuidRequest>(request.body);
    return json_response(200, core.generate_tile_uuid(req, req.user_uuid).encode());
  }

  if (request.method == "POST" && request.path == "/api/v1/tiles/activate") {
    auto req = wire::decode_text<wire::ActivationRequest>(request.body);
    return json_response(200, core.establish_auth_key(req, caller_from_header(request)).encode());
  }

  if (request.method == "POST" && request.path == "/api/v1/locations/update") {
    auto update = wire::decode_text<wire::LocationUpdate>(request.body);
    core.ingest_location_update(update, caller_from_header(request));
    Json j = Json::object();
    j["result_code"] = 0;
    return json_response(200, j);
  }

  if (request.method == "GET" && seg.size() == 6 && seg[2] == "tiles" && seg[3] == "location" &&
      seg[4] == "history") {
    TileId tile_id;
    try {
      tile_id = TileId::from_hex(seg[5]);
    } catch (const std::invalid_argument&) {
      throw ApiError(400, "malformed tileId");
    }
    return json_response(200, core.history(tile_id, caller_from_header(request)).encode());
  }

  if (request.method == "POST" && request.path == "/api/v1/scan_and_secure") {
    core.require_user(caller_from_header(request));
    auto req = wire::decode_text<wire::ScanSecureRequest>(request.body);
    return json_response(200, core.filter_scan(req).encode());
  }

  if (request.method == "GET" && request.path == "/api/v1/community/stats") {
    core.require_user(caller_from_header(request));
    double latitude = query_number(request, "latitude");
    double longitude = query_number(request, "longitude");
    return json_response(200, core.community_stats(latitude, longitude).encode());
  }

  if (seg.size() == 5 && seg[2] == "tiles" && seg[4] == "share") {
    auto req = wire::decode_text<wire::ShareRequest>(request.body);
    if (req.tile_uuid.hex() != seg[3]) throw ApiError(400, "tileId mismatch with path");
    if (request.method == "POST") {
      return json_response(200, core.add_share(req, caller_from_header(request)).encode());
    }
    if (request.method == "DELETE") {
      auto outcome = core.revoke_share(req, caller_from_header(request));
      Json j = Json::object();
      j["result_code"] = 0;
      if (outcome.fresh_key) j["fresh_auth_key"] = outcome.fresh_key->hex();
      return json_response(200, j);
    }
  }

  if (request.method == "POST" && seg.size() == 5 && seg[2] == "tiles" && seg[4] == "transfer") {
    auto req = wire::decode_text<wire::TransferRequest>(request.body);
    if (req.tile_uuid.hex() != seg[3]) throw ApiError(400, "tileId mismatch with path");
    auto outcome = core.transfer(req, caller_from_header(request));
    Json j = Json::object();
    j["result_code"] = 0;
    if (outcome.fresh_key) j["fresh_auth_key"] = outcome.fresh_key->hex();
    return json_response(200, j);
  }

  if (request.method == "POST" && request.path == "/api/v1/anti_theft/enroll") {
    auto req = wire::decode_text<wire::AntiTheftEnrollRequest>(request.body);
    core.enroll_anti_theft(req, caller_from_header(request));
    Json j = Json::object();
    j["result_code"] = 0;
    return json_response(200, j);
  }

  if (request.method == "DELETE" && seg.size() == 4 && seg[2] == "users") {
    UserUuid target;
    try {
      target = UserUuid::from_hex(seg[3]);
    } catch (const std::invalid_argument&) {
      throw ApiError(400, "malformed user_uuid");
    }
    auto req = wire::decode_text<wire::DeleteAccountRequest>(request.body);
    auto resp = core.delete_user(target, req, caller_from_header(request));
    return json_response(resp.http_status, resp.encode());
  }

  if (request.method == "GET" && request.path == "/api/v1/tiles") {
    return json_response(200, core.list_tiles(caller_from_header(request)).encode());
  }

  return error_response(404, "no such endpoint");
}

}  // namespace

HttpResponse route_request(server::ServerCore& core, const HttpRequest& request) {
  try {
    return dispatch(core, request);
  } catch (const ApiError& e) {
    return error_response(e.status(), e.what());
  } catch (const wire::SchemaError& e) {
    return error_response(400, e.what());
  } catch (const wire::ValidationError& e) {
    return error_response(400, e.what());
  }
}

}  // namespace tileof::http
