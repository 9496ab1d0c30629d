#pragma once

// Seeded generator of random valid wire values, shared by the wire unit
// tests and the acceptance round-trip corpus.

#include <random>
#include <string>

#include "tileof/wire.hpp"

namespace tileof_test {

class WireFuzzer {
 public:
  explicit WireFuzzer(std::uint64_t seed) : eng_(seed) {}

  // Round-trips one randomly chosen wire type through text encode/decode and
  // returns false if the decoded value differs from the original.
  bool round_trip_one();

  std::uint64_t u64() { return eng_(); }

 private:
  template <typename T>
  bool check(const T& value) {
    const std::string text = tileof::wire::encode_text(value);
    const T back = tileof::wire::decode_text<T>(text);
    return back == value && tileof::wire::encode_text(back) == text;
  }

  std::uint64_t below(std::uint64_t n) { return eng_() % n; }
  double unit() { return static_cast<double>(eng_() >> 11) / 9007199254740992.0; }

  template <std::size_t N, typename Tag>
  tileof::FixedBytes<N, Tag> fixed() {
    std::array<std::uint8_t, N> a{};
    for (auto& b : a) b = static_cast<std::uint8_t>(eng_());
    return tileof::FixedBytes<N, Tag>(a);
  }

  tileof::PrivateId pid() {
    std::array<std::uint8_t, 8> a{};
    for (auto& b : a) b = static_cast<std::uint8_t>(eng_());
    return tileof::PrivateId(a);
  }

  std::string word(std::size_t min_len = 1, std::size_t max_len = 12) {
    static constexpr char kAlpha[] = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::size_t len = min_len + below(max_len - min_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(kAlpha[below(sizeof(kAlpha) - 1)]);
    return s;
  }

  std::string digits2() { return std::to_string(below(10)) + std::to_string(below(10)); }

  tileof::wire::Json ext() {
    tileof::wire::Json j = tileof::wire::Json::object();
    std::size_t n = below(3);
    for (std::size_t i = 0; i < n; ++i) {
      switch (below(3)) {
        case 0: j["x_" + word()] = static_cast<std::int64_t>(eng_() % 100000); break;
        case 1: j["x_" + word()] = word(); break;
        default: j["x_" + word()] = below(2) == 0; break;
      }
    }
    return j;
  }

  tileof::wire::GeoLocation geo();
  tileof::wire::TileEntry tile_entry();
  tileof::wire::LocationUpdate location_update();

  std::mt19937_64 eng_;
};

inline tileof::wire::GeoLocation WireFuzzer::geo() {
  tileof::wire::GeoLocation loc;
  loc.altitude = unit() * 1000.0 - 100.0;
  loc.latitude = unit() * 180.0 - 90.0;
  loc.longitude = unit() * 360.0 - 180.0;
  loc.timestamp = static_cast<tileof::Timestamp>(below(1u << 30));
  loc.ext = ext();
  return loc;
}

inline tileof::wire::TileEntry WireFuzzer::tile_entry() {
  using namespace tileof::wire;
  TileEntry entry;
  switch (below(3)) {
    case 0: {
      ConnectedAuthData data;
      data.rand_a = fixed<14, tileof::RandATag>();
      data.rand_t = fixed<10, tileof::RandTTag>();
      data.sres_t = fixed<4, tileof::SresTTag>();
      data.tile_uuid = fixed<8, tileof::TileIdTag>();
      entry.connected_auth_data = data;
      break;
    }
    case 1: {
      AdvertisedServiceData data;
      data.mac_address = tileof::mac_to_string(fixed<6, tileof::MacAddressTag>());
      data.payload_service_data = pid();
      data.ext = ext();
      entry.advertised_service_data = data;
      break;
    }
    default:
      entry.client_data = ClientData{"p!" + fixed<16, tileof::ClientUuidTag>().hex()};
      break;
  }
  entry.discovery_timestamp = static_cast<tileof::Timestamp>(below(1u << 30));
  entry.record_id = static_cast<std::int64_t>(below(1u << 20));
  return entry;
}

inline tileof::wire::LocationUpdate WireFuzzer::location_update() {
  tileof::wire::LocationUpdate update;
  std::size_t n = below(4);
  for (std::size_t i = 0; i < n; ++i) {
    tileof::wire::UpdateRecord rec;
    rec.record_id = static_cast<std::int64_t>(i + 1);
    rec.location = geo();
    std::size_t tiles = below(4);
    for (std::size_t k = 0; k < tiles; ++k) rec.tiles.push_back(tile_entry());
    update.updates.push_back(rec);
  }
  return update;
}

inline bool WireFuzzer::round_trip_one() {
  using namespace tileof::wire;
  switch (below(12)) {
    case 0: {
      Advertisement adv;
      adv.mac = fixed<6, tileof::MacAddressTag>();
      if (below(2) == 0) {
        adv.service = ServiceUuid::kFeed;
        adv.payload = pid();
      } else {
        adv.service = ServiceUuid::kFeec;
      }
      adv.emitted_at = static_cast<tileof::Timestamp>(below(1u << 30));
      return check(adv);
    }
    case 1: {
      TdiRecord tdi;
      tdi.tile_id = fixed<8, tileof::TileIdTag>();
      tdi.model = "TILE " + digits2() + "." + digits2();
      tdi.firmware = digits2() + "." + digits2() + "." + digits2() + "." +
                     std::to_string(below(10));
      tdi.hardware_version = digits2() + "." + digits2();
      return check(tdi);
    }
    case 2: {
      RegistrationRequest req;
      req.client_uuid = fixed<16, tileof::ClientUuidTag>();
      req.email = word() + "@example.com";
      req.password = word();
      return check(req);
    }
    case 3: {
      ActivationRequest req;
      req.tile_uuid = fixed<8, tileof::TileIdTag>();
      req.name = word();
      req.rand_a = fixed<14, tileof::RandATag>();
      req.rand_t = fixed<10, tileof::RandTTag>();
      req.sres_t = fixed<4, tileof::SresTTag>();
      req.hw_version = digits2() + "." + digits2();
      req.model = "TILE " + digits2() + "." + digits2();
      req.firmware_version =
          digits2() + "." + digits2() + "." + digits2() + "." + std::to_string(below(10));
      return check(req);
    }
    case 4:
      return check(location_update());
    case 5: {
      ScanSecureRequest req;
      for (auto& pass : req.scans) {
        std::size_t n = below(4);
        for (std::size_t i = 0; i < n; ++i) pass.push_back(pid());
      }
      return check(req);
    }
    case 6: {
      SharingResponse resp;
      resp.tile_type = "TILE";
      resp.tile_uuid = fixed<8, tileof::TileIdTag>();
      resp.user_uuid = fixed<16, tileof::UserUuidTag>();
      resp.other_user_uuid = fixed<16, tileof::UserUuidTag>();
      resp.other_user_email = word() + "@example.com";
      resp.ext = ext();
      return check(resp);
    }
    case 7: {
      CommunityStatsResponse resp;
      resp.timestamp_ms = static_cast<std::int64_t>(below(1u << 30)) * 1000;
      resp.timestamp = resp.timestamp_ms / 1000;
      resp.center_latitude = unit() * 180.0 - 90.0;
      resp.center_longitude = unit() * 360.0 - 180.0;
      resp.tilers_around = static_cast<std::int64_t>(below(5000));
      resp.result_ext = ext();
      resp.ext = ext();
      return check(resp);
    }
    case 8: {
      HistoryResponse resp;
      resp.tile_uuid = fixed<8, tileof::TileIdTag>();
      std::size_t n = below(5);
      for (std::size_t i = 0; i < n; ++i) resp.locations.push_back(geo());
      return check(resp);
    }
    case 9: {
      RegistrationResponse resp;
      resp.user_uuid = fixed<16, tileof::UserUuidTag>();
      resp.status = "ACTIVATED";
      return check(resp);
    }
    case 10: {
      TileListResponse resp;
      std::size_t n = below(4);
      for (std::size_t i = 0; i < n; ++i) {
        TileListEntry entry;
        entry.tile_uuid = fixed<8, tileof::TileIdTag>();
        entry.auth_key = fixed<16, tileof::AuthKeyTag>();
        entry.name = word();
        entry.shared = below(2) == 0;
        entry.activation_timestamp = static_cast<tileof::Timestamp>(below(1u << 30));
        resp.tiles.push_back(entry);
      }
      return check(resp);
    }
    default: {
      ScanSecureResponse resp;
      for (auto& pass : resp.scans) {
        std::size_t n = below(3);
        for (std::size_t i = 0; i < n; ++i) pass.push_back(pid());
      }
      return check(resp);
    }
  }
}

}  // namespace tileof_test
