#pragma once

// Executable adversaries, one per vulnerability class. Each attack function
// computes from the observables its threat model permits (RF captures,
// server snapshots, compromised keys); scenario ground truth enters only
// the scoring step that turns the attack's output into a verdict.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tileof/crypto.hpp"
#include "tileof/http_api.hpp"
#include "tileof/sim.hpp"
#include "tileof/wire.hpp"

namespace tileof::attacks {

// One sniffed advertisement: what a passive RF receiver sees and where.
struct CaptureEntry {
  Timestamp t = 0;
  std::string receiver;
  sim::Position receiver_position;
  wire::Advertisement adv;
};

struct CaptureLog {
  std::vector<CaptureEntry> entries;
};

// Ground-truth emitter label per capture entry, held by the scenario and
// used only for scoring.
using CaptureTruth = std::vector<std::string>;

struct AttackVerdict {
  std::string attack_id;
  bool success = false;
  wire::Json evidence = wire::Json::object();

  wire::Json to_json() const;
};

// Key material a malicious owner walks away with.
struct CompromisedKey {
  AuthKey auth_key;
  TileId tile_id;
  Timestamp activation_time = 0;
};

// ---- a1: the platform sees everything ----

struct TrajectoryPoint {
  Timestamp t = 0;
  double latitude = 0.0;
  double longitude = 0.0;
};

// Scripted upload positions per uploader uuid (hex), plus the static MACs
// finders observed, checked against what the snapshot's report store holds.
AttackVerdict a1_server_surveillance(
    const wire::Json& snapshot,
    const std::map<std::string, std::vector<TrajectoryPoint>>& truth_by_uploader,
    const std::set<std::string>& expected_macs);

// ---- a2: community-stats deanonymization ----

using CommunityOracle = std::function<std::int64_t(double latitude, double longitude)>;

struct A2Params {
  sim::Position area_min;
  sim::Position area_max;
  int query_budget = 200;
  double grid_step_miles = 2.0;
  double fine_step_miles = 0.25;
};

// Sweeps the stats endpoint over a coarse grid and intersects the 5-mile
// disks around positive/negative answers. true_position is scoring-only.
AttackVerdict a2_community_deanonymize(const CommunityOracle& oracle, const A2Params& params,
                                       const sim::Position& true_position);

// ---- a3: linking by static MAC ----

// The attack itself: partition of capture indices keyed by MAC string.
std::map<std::string, std::vector<std::size_t>> cluster_by_mac(const CaptureLog& capture);

AttackVerdict a3_link_by_static_mac(const CaptureLog& capture, const CaptureTruth& truth);

// ---- a4: fingerprinting by the 90-day cycle ----

AttackVerdict a4_fingerprint_by_cycle(const CaptureLog& capture, const CaptureTruth& truth);

// ---- a5: tracking with a compromised key ----

// Matches capture entries against the key's full identifier schedule.
std::vector<std::size_t> match_schedule(const CompromisedKey& key, const CaptureLog& capture);

AttackVerdict a5_track_with_compromised_key(const CompromisedKey& key, const CaptureLog& capture,
                                            const CaptureTruth& truth,
                                            const std::string& victim_tag_label,
                                            Timestamp revocation_time);

// ---- a6/a7: framing through Scan and Secure ----

// Active-RF beacon that emits whatever the installed generator produces.
class Broadcaster : public sim::Beacon {
 public:
  Broadcaster(std::string label, sim::Position position)
      : label_(std::move(label)), position_(position) {}

  std::string label() const override { return label_; }
  sim::Position position() const override { return position_; }
  std::optional<wire::Advertisement> advertise(Timestamp now) override {
    return generator_ ? generator_(now) : std::nullopt;
  }

  void move_to(const sim::Position& p) { position_ = p; }
  void set_generator(std::function<std::optional<wire::Advertisement>(Timestamp)> generator) {
    generator_ = std::move(generator);
  }
  void stop() { generator_ = nullptr; }

 private:
  std::string label_;
  sim::Position position_;
  std::function<std::optional<wire::Advertisement>(Timestamp)> generator_;
};

// What the victim's scan displayed, reduced to the fields scoring needs.
struct ScanDisplay {
  std::vector<std::pair<PrivateId, int>> displayed;
  std::array<std::vector<PrivateId>, wire::kScanPasses> posted;
  std::vector<sim::Position> scan_positions;
  Timestamp started_at = 0;
};

// success iff some displayed id belongs to the framed schedule although the
// real tag never came within radio range of any scan position.
AttackVerdict a6_derive_then_replay_frame(const CompromisedKey& key, const ScanDisplay& scan,
                                          const sim::Position& true_tag_position, double range_m);

// success iff the replayed id is displayed; staleness (replay older than one
// rotation period at scan start) is recorded either way.
AttackVerdict a7_replay_frame(const PrivateId& replayed_id, Timestamp captured_at,
                              const ScanDisplay& scan);

// ---- a8: anti-theft circumvention ----

AttackVerdict a8_antitheft_circumvention(const http::WireTap& tap,
                                         const std::vector<PrivateId>& hidden_schedule,
                                         const ScanDisplay& stock_scan,
                                         const ScanDisplay& modified_scan);

}  // namespace tileof::attacks
