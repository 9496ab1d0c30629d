#pragma once

// Shared fixture wiring a world, a server core, and per-actor in-process
// transports, with stable addresses for tags and clients.

#include <deque>
#include <string>

#include "tileof/client.hpp"
#include "tileof/http_api.hpp"
#include "tileof/server.hpp"
#include "tileof/sim.hpp"
#include "tileof/tag.hpp"

namespace tileof_test {

inline const tileof::InterimAuthKey kVendorKey =
    tileof::InterimAuthKey::from_hex("000102030405060708090a0b0c0d0e0f");

inline tileof::server::ServerOptions default_server_options(std::uint64_t seed) {
  tileof::server::ServerOptions options;
  options.vendors.push_back({"TILE", kVendorKey});
  options.seed = seed;
  return options;
}

struct Harness {
  explicit Harness(std::uint64_t seed,
                   tileof::server::ServerOptions options = {},
                   double range_m = 30.0)
      : world(seed, range_m),
        core(options.vendors.empty() ? default_server_options(seed) : std::move(options),
             [this] { return world.clock.now(); }) {}

  tileof::Client& add_client(const std::string& name, tileof::ClientOptions options = {}) {
    transports.emplace_back(core, [this] { return world.clock.now(); }, name, &tap);
    clients.emplace_back(world, name, transports.back(), options);
    return clients.back();
  }

  tileof::Tag& add_tag(const std::string& name, tileof::TagOptions options = {}) {
    std::array<std::uint8_t, 6> mac = {0xa4, 0xc1, 0x38, 0x00, 0x00,
                                       static_cast<std::uint8_t>(tags.size())};
    tags.emplace_back(world, name, tileof::MacAddress(mac), "TILE 24.00", "48.04.16.0", "24.00",
                      kVendorKey, options);
    world.medium.add_beacon(&tags.back());
    return tags.back();
  }

  tileof::sim::World world;
  tileof::http::WireTap tap;
  tileof::server::ServerCore core;
  std::deque<tileof::http::InProcessTransport> transports;
  std::deque<tileof::Client> clients;
  std::deque<tileof::Tag> tags;
};

}  // namespace tileof_test
