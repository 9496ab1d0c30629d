#include "tileof/sim.hpp"

#include "doctest.h"
#include "tileof/crypto.hpp"

using namespace tileof;
using namespace tileof::sim;

namespace {

// Minimal beacon for medium tests.
class FixedBeacon : public Beacon {
 public:
  FixedBeacon(std::string label, Position pos, wire::ServiceUuid service,
              std::optional<PrivateId> payload)
      : label_(std::move(label)), pos_(pos), service_(service), payload_(payload) {}

  std::string label() const override { return label_; }
  Position position() const override { return pos_; }
  std::optional<wire::Advertisement> advertise(Timestamp now) override {
    wire::Advertisement adv;
    adv.mac = MacAddress::filled(0x11);
    adv.service = service_;
    adv.payload = payload_;
    adv.emitted_at = now;
    return adv;
  }

 private:
  std::string label_;
  Position pos_;
  wire::ServiceUuid service_;
  std::optional<PrivateId> payload_;
};

}  // namespace

TEST_CASE("clock only moves forward, explicitly") {
  SimClock clock;
  CHECK(clock.now() == 0);
  clock.advance(0);
  CHECK(clock.now() == 0);
  clock.advance(450);
  clock.advance(450);
  CHECK(clock.now() == 900);
  CHECK_THROWS_AS(clock.advance(-1), std::invalid_argument);
}

TEST_CASE("rng streams are reproducible and independent") {
  Rng a(Rng::derive_seed(42, "tag:alpha"));
  Rng b(Rng::derive_seed(42, "tag:alpha"));
  Rng c(Rng::derive_seed(42, "tag:beta"));
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.bytes(16) == b.bytes(16));
  CHECK(a.next_u64() != c.next_u64());

  Rng d(7);
  for (int i = 0; i < 200; ++i) {
    auto v = d.below(10);
    CHECK(v < 10);
  }
}

TEST_CASE("geo projection round-trips") {
  for (const Position p : {Position{0, 0}, Position{1234.5, -987.6}, Position{-40000, 35000}}) {
    const GeoPoint g = to_geo(p);
    const Position back = from_geo(g.latitude, g.longitude);
    CHECK(std::abs(back.x - p.x) < 1e-6);
    CHECK(std::abs(back.y - p.y) < 1e-6);
  }
  CHECK(distance_m(Position{0, 0}, Position{3, 4}) == doctest::Approx(5.0));
}

TEST_CASE("medium returns exactly the in-range matching emitters") {
  BleMedium medium(30.0);
  FixedBeacon near_feed("near", Position{10, 0}, wire::ServiceUuid::kFeed,
                        PrivateId::from_hex("0102030405060708"));
  FixedBeacon far_feed("far", Position{50, 0}, wire::ServiceUuid::kFeed,
                       PrivateId::from_hex("1112131415161718"));
  FixedBeacon near_feec("fresh", Position{5, 5}, wire::ServiceUuid::kFeec, std::nullopt);
  medium.add_beacon(&near_feed);
  medium.add_beacon(&far_feed);
  medium.add_beacon(&near_feec);

  auto feed_hits = medium.scan(Position{0, 0}, 100, 1, wire::ServiceUuid::kFeed);
  REQUIRE(feed_hits.size() == 1);
  CHECK(feed_hits[0].emitter == "near");
  CHECK(feed_hits[0].adv.emitted_at == 100);

  auto all_hits = medium.scan(Position{0, 0}, 100, 1, std::nullopt);
  CHECK(all_hits.size() == 2);

  auto again = medium.scan(Position{0, 0}, 100, 1, wire::ServiceUuid::kFeed);
  CHECK(again.size() == feed_hits.size());
  CHECK(again[0].adv == feed_hits[0].adv);

  medium.remove_beacon(&near_feed);
  CHECK(medium.scan(Position{0, 0}, 100, 1, wire::ServiceUuid::kFeed).empty());

  CHECK_THROWS_AS(medium.scan(Position{0, 0}, 100, 0, std::nullopt), std::invalid_argument);
}

TEST_CASE("event log serializes one JSON object per line") {
  EventLog log;
  log.append(0, "alice", "registered", wire::Json{{"user_uuid", "00"}});
  log.append(10, "tag1", "tag_activated");
  const std::string jsonl = log.to_jsonl();
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 2);
  CHECK(jsonl.find("\"actor\":\"alice\"") != std::string::npos);

  EventLog same;
  same.append(0, "alice", "registered", wire::Json{{"user_uuid", "00"}});
  same.append(10, "tag1", "tag_activated");
  CHECK(tileof::crypto::sha256_hex(jsonl) == tileof::crypto::sha256_hex(same.to_jsonl()));
}

TEST_CASE("optional packet loss is seed-deterministic") {
  FixedBeacon beacon("b", Position{0, 0}, wire::ServiceUuid::kFeed,
                     PrivateId::from_hex("0102030405060708"));
  auto run = [&](std::uint64_t seed) {
    BleMedium medium(30.0, 0.5, seed);
    medium.add_beacon(&beacon);
    std::string pattern;
    for (int i = 0; i < 32; ++i) {
      pattern += medium.scan(Position{0, 0}, i, 1, std::nullopt).empty() ? '0' : '1';
    }
    return pattern;
  };
  CHECK(run(9) == run(9));
  CHECK(run(9) != std::string(32, '1'));
}
