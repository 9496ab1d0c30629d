#include "tileof/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace tileof::sim {

namespace {

constexpr double kMetersPerDegreeLat = 111320.0;
constexpr double kAnchorLat = 40.0;
constexpr double kAnchorLon = -75.0;

double meters_per_degree_lon() {
  static const double v = kMetersPerDegreeLat * std::cos(kAnchorLat * M_PI / 180.0);
  return v;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

double distance_m(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

GeoPoint to_geo(const Position& p) {
  return GeoPoint{kAnchorLat + p.y / kMetersPerDegreeLat, kAnchorLon + p.x / meters_per_degree_lon()};
}

Position from_geo(double latitude, double longitude) {
  return Position{(longitude - kAnchorLon) * meters_per_degree_lon(),
                  (latitude - kAnchorLat) * kMetersPerDegreeLat};
}

std::uint64_t Rng::derive_seed(std::uint64_t master, std::string_view stream) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : stream) h = (h ^ static_cast<std::uint8_t>(c)) * 1099511628211ull;
  std::uint64_t state = master ^ h;
  return splitmix64(state);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("bound must be positive");
  // Rejection sampling keeps the draw unbiased.
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                        std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

double Rng::unit() { return static_cast<double>(next_u64() >> 11) / 9007199254740992.0; }

Bytes Rng::bytes(std::size_t n) {
  Bytes out;
  out.reserve(n);
  while (out.size() < n) {
    std::uint64_t v = next_u64();
    for (int i = 0; i < 8 && out.size() < n; ++i) {
      out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  return out;
}

void EventLog::append(Timestamp t, std::string actor, std::string event, wire::Json payload) {
  events_.push_back(Event{t, std::move(actor), std::move(event), std::move(payload)});
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& e : events_) {
    wire::Json j = wire::Json::object();
    j["t"] = e.t;
    j["actor"] = e.actor;
    j["event"] = e.event;
    j["payload"] = e.payload;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void EventLog::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out.good()) throw std::runtime_error("cannot write event log to " + path);
  out << to_jsonl();
}

BleMedium::BleMedium(double range_m, double loss_probability, std::uint64_t loss_seed)
    : range_m_(range_m), loss_probability_(loss_probability), loss_rng_(loss_seed) {}

void BleMedium::add_beacon(Beacon* beacon) { beacons_.push_back(beacon); }

void BleMedium::remove_beacon(const Beacon* beacon) {
  beacons_.erase(std::remove(beacons_.begin(), beacons_.end(), beacon), beacons_.end());
}

std::vector<ScanHit> BleMedium::scan(const Position& at, Timestamp now, Duration duration,
                                     std::optional<wire::ServiceUuid> filter) {
  if (duration <= 0) throw std::invalid_argument("scan duration must be positive");
  std::vector<ScanHit> hits;
  for (Beacon* beacon : beacons_) {
    if (distance_m(beacon->position(), at) > range_m_) continue;
    auto adv = beacon->advertise(now);
    if (!adv) continue;
    if (filter && adv->service != *filter) continue;
    if (loss_probability_ > 0.0 && loss_rng_.unit() < loss_probability_) continue;
    hits.push_back(ScanHit{*adv, beacon->label()});
  }
  return hits;
}

}  // namespace tileof::sim
