#pragma once

// Deterministic discrete-event world: an explicit virtual clock, flat-plane
// positions with a fixed geographic anchor, a disk-range broadcast medium,
// seeded RNG streams, and a JSON-lines event log. Nothing here advances or
// emits on its own; every observable is caused by a scripted action or an
// explicit clock advance.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tileof/bytes.hpp"
#include "tileof/wire.hpp"

namespace tileof::sim {

class SimClock {
 public:
  Timestamp now() const { return now_; }

  void advance(Duration dt) {
    if (dt < 0) throw std::invalid_argument("clock cannot move backwards");
    now_ += dt;
  }

 private:
  Timestamp now_ = 0;
};

struct Position {
  double x = 0.0;  // meters east of the anchor
  double y = 0.0;  // meters north of the anchor

  bool operator==(const Position&) const = default;
};

double distance_m(const Position& a, const Position& b);

inline constexpr double kMileMeters = 1609.344;
inline constexpr double kCommunityRadiusMiles = 5.0;

// Linear projection onto lat/long around a fixed anchor; exact to invert,
// which is all the desk-scale geometry needs.
struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;
};

GeoPoint to_geo(const Position& p);
Position from_geo(double latitude, double longitude);

// Deterministic RNG stream. Streams are derived from one master seed plus a
// stream name so actors draw independent but reproducible randomness.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

  std::uint64_t next_u64();
  std::uint64_t below(std::uint64_t bound);
  double unit();  // [0, 1)

  Bytes bytes(std::size_t n);

  template <typename T>
  T fixed() {
    return T::from_bytes(bytes(T::kSize));
  }

 private:
  std::uint64_t state_;
};

struct Event {
  Timestamp t = 0;
  std::string actor;
  std::string event;
  wire::Json payload;
};

class EventLog {
 public:
  void append(Timestamp t, std::string actor, std::string event,
              wire::Json payload = wire::Json::object());

  const std::vector<Event>& events() const { return events_; }

  // One {"t","actor","event","payload"} object per line.
  std::string to_jsonl() const;
  void write_file(const std::string& path) const;

 private:
  std::vector<Event> events_;
};

// Anything that can answer a broadcast poll: tags, and attack broadcasters.
class Beacon {
 public:
  virtual ~Beacon() = default;
  virtual std::string label() const = 0;
  virtual Position position() const = 0;
  virtual std::optional<wire::Advertisement> advertise(Timestamp now) = 0;
};

// A scan result paired with the sim's ground-truth emitter label. Protocol
// actors must consume only the advertisement; the label exists for scenario
// scoring.
struct ScanHit {
  wire::Advertisement adv;
  std::string emitter;
};

class BleMedium {
 public:
  explicit BleMedium(double range_m = 30.0, double loss_probability = 0.0,
                     std::uint64_t loss_seed = 0);

  void add_beacon(Beacon* beacon);
  void remove_beacon(const Beacon* beacon);

  // Emitters are sampled once at the scan instant; only in-range beacons
  // matching the filter appear, in registration order.
  std::vector<ScanHit> scan(const Position& at, Timestamp now, Duration duration,
                            std::optional<wire::ServiceUuid> filter);

  double range_m() const { return range_m_; }

 private:
  std::vector<Beacon*> beacons_;
  double range_m_;
  double loss_probability_;
  Rng loss_rng_;
};

// Shared substrate handed to every actor in a scenario.
struct World {
  explicit World(std::uint64_t seed, double range_m = 30.0)
      : master_seed(seed), medium(range_m) {}

  Rng rng_for(std::string_view stream) const {
    return Rng(Rng::derive_seed(master_seed, stream));
  }

  std::uint64_t master_seed;
  SimClock clock;
  BleMedium medium;
  EventLog log;
};

}  // namespace tileof::sim
