#include "tileof/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace tileof::attacks {

namespace {

// Union-find over capture indices.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

std::unordered_set<PrivateId> schedule_set(const CompromisedKey& key) {
  auto schedule = crypto::private_id_schedule(key.auth_key, key.tile_id);
  return std::unordered_set<PrivateId>(schedule.begin(), schedule.end());
}

}  // namespace

wire::Json AttackVerdict::to_json() const {
  wire::Json j = wire::Json::object();
  j["attack"] = attack_id;
  j["success"] = success;
  j["evidence"] = evidence;
  return j;
}

AttackVerdict a1_server_surveillance(
    const wire::Json& snapshot,
    const std::map<std::string, std::vector<TrajectoryPoint>>& truth_by_uploader,
    const std::set<std::string>& expected_macs) {
  AttackVerdict verdict;
  verdict.attack_id = "a1";

  // Everything the store holds, keyed by uploader.
  std::map<std::string, std::set<std::tuple<Timestamp, double, double>>> stored;
  std::set<std::string> stored_macs;
  for (const auto& report : snapshot.at("reports")) {
    const std::string uploader = report.at("uploader").get<std::string>();
    for (const auto& rec : report.at("update").at("updates")) {
      const auto& loc = rec.at("location");
      stored[uploader].insert({loc.at("timestamp").get<Timestamp>(),
                               loc.at("latitude").get<double>(),
                               loc.at("longitude").get<double>()});
      for (const auto& tile : rec.at("tiles")) {
        if (tile.contains("advertised_service_data")) {
          stored_macs.insert(tile.at("advertised_service_data").at("mac_address")
                                 .get<std::string>());
        }
      }
    }
  }

  bool all_reconstructed = !truth_by_uploader.empty();
  wire::Json per_actor = wire::Json::object();
  std::size_t total_points = 0;
  for (const auto& [uploader, trajectory] : truth_by_uploader) {
    std::size_t matched = 0;
    for (const auto& point : trajectory) {
      auto it = stored.find(uploader);
      if (it != stored.end() &&
          it->second.contains({point.t, point.latitude, point.longitude})) {
        ++matched;
      }
    }
    per_actor[uploader] = wire::Json{{"scripted", trajectory.size()}, {"matched", matched}};
    total_points += trajectory.size();
    if (trajectory.empty() || matched != trajectory.size()) all_reconstructed = false;
  }

  std::vector<std::string> missing_macs;
  for (const auto& mac : expected_macs) {
    if (!stored_macs.contains(mac)) missing_macs.push_back(mac);
  }

  verdict.success = all_reconstructed && total_points > 0 && missing_macs.empty();
  verdict.evidence["trajectories"] = per_actor;
  verdict.evidence["scripted_points"] = total_points;
  verdict.evidence["stored_macs"] = stored_macs.size();
  verdict.evidence["missing_macs"] = missing_macs;
  return verdict;
}

AttackVerdict a2_community_deanonymize(const CommunityOracle& oracle, const A2Params& params,
                                       const sim::Position& true_position) {
  AttackVerdict verdict;
  verdict.attack_id = "a2";

  const double mile = sim::kMileMeters;
  const double radius = sim::kCommunityRadiusMiles * mile;
  const double step = params.grid_step_miles * mile;

  std::vector<std::pair<sim::Position, bool>> answers;
  int queries = 0;
  bool budget_exceeded = false;
  for (double x = params.area_min.x; x <= params.area_max.x + 1e-9; x += step) {
    for (double y = params.area_min.y; y <= params.area_max.y + 1e-9; y += step) {
      if (queries >= params.query_budget) {
        budget_exceeded = true;
        break;
      }
      const sim::GeoPoint geo = sim::to_geo(sim::Position{x, y});
      const bool positive = oracle(geo.latitude, geo.longitude) > 0;
      answers.push_back({sim::Position{x, y}, positive});
      ++queries;
    }
    if (budget_exceeded) break;
  }
  verdict.evidence["queries"] = queries;

  if (budget_exceeded) {
    verdict.evidence["outcome"] = "budget_exhausted";
    return verdict;
  }
  const std::size_t positives =
      static_cast<std::size_t>(std::count_if(answers.begin(), answers.end(),
                                             [](const auto& a) { return a.second; }));
  if (positives == 0) {
    verdict.evidence["outcome"] = "target_not_in_area";
    return verdict;
  }

  // Feasible region: points agreeing with every disk constraint.
  const double fine = params.fine_step_miles * mile;
  double sum_x = 0.0, sum_y = 0.0;
  std::size_t feasible = 0;
  for (double x = params.area_min.x; x <= params.area_max.x + 1e-9; x += fine) {
    for (double y = params.area_min.y; y <= params.area_max.y + 1e-9; y += fine) {
      const sim::Position q{x, y};
      bool ok = true;
      for (const auto& [p, positive] : answers) {
        const bool inside = sim::distance_m(q, p) <= radius;
        if (inside != positive) {
          ok = false;
          break;
        }
      }
      if (ok) {
        sum_x += x;
        sum_y += y;
        ++feasible;
      }
    }
  }
  verdict.evidence["feasible_points"] = feasible;
  verdict.evidence["feasible_area_sq_miles"] =
      feasible * params.fine_step_miles * params.fine_step_miles;

  if (feasible == 0) {
    // Constraints contradict the single-target model (dense population).
    verdict.evidence["outcome"] = "no_consistent_region";
    return verdict;
  }

  const sim::Position estimate{sum_x / feasible, sum_y / feasible};
  const double error_miles = sim::distance_m(estimate, true_position) / mile;
  verdict.evidence["estimate"] = wire::Json{{"x", estimate.x}, {"y", estimate.y}};
  verdict.evidence["error_miles"] = error_miles;
  verdict.success = error_miles < 1.0 && queries <= params.query_budget;
  verdict.evidence["outcome"] = verdict.success ? "localized" : "too_coarse";
  return verdict;
}

std::map<std::string, std::vector<std::size_t>> cluster_by_mac(const CaptureLog& capture) {
  std::map<std::string, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < capture.entries.size(); ++i) {
    clusters[mac_to_string(capture.entries[i].adv.mac)].push_back(i);
  }
  return clusters;
}

AttackVerdict a3_link_by_static_mac(const CaptureLog& capture, const CaptureTruth& truth) {
  AttackVerdict verdict;
  verdict.attack_id = "a3";

  const auto clusters = cluster_by_mac(capture);

  // Ground-truth partition of the same index set.
  std::map<std::string, std::set<std::size_t>> truth_partition;
  for (std::size_t i = 0; i < truth.size(); ++i) truth_partition[truth[i]].insert(i);

  std::size_t false_merges = 0, false_splits = 0;
  std::map<std::string, std::set<std::string>> macs_per_tag;
  for (const auto& [mac, indices] : clusters) {
    std::set<std::string> labels;
    for (std::size_t i : indices) labels.insert(truth[i]);
    if (labels.size() > 1) ++false_merges;
    for (const auto& label : labels) macs_per_tag[label].insert(mac);
  }
  for (const auto& [label, macs] : macs_per_tag) {
    if (macs.size() > 1) ++false_splits;
  }

  // Identifier rotation buys nothing: count distinct payloads per cluster.
  std::size_t max_ids_in_cluster = 0;
  for (const auto& [mac, indices] : clusters) {
    std::set<PrivateId> ids;
    for (std::size_t i : indices) {
      if (capture.entries[i].adv.payload) ids.insert(*capture.entries[i].adv.payload);
    }
    max_ids_in_cluster = std::max(max_ids_in_cluster, ids.size());
  }

  verdict.success = !capture.entries.empty() && false_merges == 0 && false_splits == 0 &&
                    clusters.size() == truth_partition.size();
  verdict.evidence["clusters"] = clusters.size();
  verdict.evidence["tags"] = truth_partition.size();
  verdict.evidence["false_merges"] = false_merges;
  verdict.evidence["false_splits"] = false_splits;
  verdict.evidence["max_private_ids_in_one_cluster"] = max_ids_in_cluster;
  return verdict;
}

AttackVerdict a4_fingerprint_by_cycle(const CaptureLog& capture, const CaptureTruth& truth) {
  AttackVerdict verdict;
  verdict.attack_id = "a4";

  Timestamp t_min = 0, t_max = 0;
  bool first = true;
  for (const auto& entry : capture.entries) {
    if (first) {
      t_min = t_max = entry.t;
      first = false;
    }
    t_min = std::min(t_min, entry.t);
    t_max = std::max(t_max, entry.t);
  }
  if (first || t_max - t_min < crypto::kCyclePeriodSec) {
    verdict.evidence["outcome"] = "inconclusive";
    verdict.evidence["capture_span_s"] = first ? 0 : t_max - t_min;
    return verdict;
  }

  // Index FEED payloads; link observations of the same id one cycle apart.
  std::map<PrivateId, std::vector<std::size_t>> by_id;
  for (std::size_t i = 0; i < capture.entries.size(); ++i) {
    if (capture.entries[i].adv.payload) by_id[*capture.entries[i].adv.payload].push_back(i);
  }

  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (const auto& [id, indices] : by_id) {
    for (std::size_t a = 0; a < indices.size(); ++a) {
      for (std::size_t b = a + 1; b < indices.size(); ++b) {
        const Duration lag =
            std::abs(capture.entries[indices[b]].t - capture.entries[indices[a]].t);
        if (std::abs(lag - crypto::kCyclePeriodSec) <= crypto::kRotationPeriodSec) {
          links.push_back({indices[a], indices[b]});
        }
      }
    }
  }

  // Score against truth: eligible tags are those observed across >= 1 cycle.
  std::map<std::string, std::pair<Timestamp, Timestamp>> spans;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    auto [it, inserted] = spans.try_emplace(truth[i], capture.entries[i].t, capture.entries[i].t);
    if (!inserted) {
      it->second.first = std::min(it->second.first, capture.entries[i].t);
      it->second.second = std::max(it->second.second, capture.entries[i].t);
    }
  }
  std::set<std::string> eligible;
  for (const auto& [label, span] : spans) {
    if (span.second - span.first >= crypto::kCyclePeriodSec) eligible.insert(label);
  }

  std::set<std::string> re_identified;
  std::size_t false_links = 0;
  for (const auto& [a, b] : links) {
    if (truth[a] == truth[b]) {
      re_identified.insert(truth[a]);
    } else {
      ++false_links;
    }
  }

  verdict.success = !eligible.empty() && false_links == 0 &&
                    std::includes(re_identified.begin(), re_identified.end(), eligible.begin(),
                                  eligible.end());
  verdict.evidence["outcome"] = verdict.success ? "re_identified" : "failed";
  verdict.evidence["capture_span_s"] = t_max - t_min;
  verdict.evidence["links"] = links.size();
  verdict.evidence["false_links"] = false_links;
  verdict.evidence["eligible_tags"] = eligible.size();
  verdict.evidence["re_identified_tags"] = re_identified.size();
  return verdict;
}

std::vector<std::size_t> match_schedule(const CompromisedKey& key, const CaptureLog& capture) {
  const auto ids = schedule_set(key);
  std::vector<std::size_t> matched;
  for (std::size_t i = 0; i < capture.entries.size(); ++i) {
    const auto& payload = capture.entries[i].adv.payload;
    if (payload && ids.contains(*payload)) matched.push_back(i);
  }
  return matched;
}

AttackVerdict a5_track_with_compromised_key(const CompromisedKey& key, const CaptureLog& capture,
                                            const CaptureTruth& truth,
                                            const std::string& victim_tag_label,
                                            Timestamp revocation_time) {
  AttackVerdict verdict;
  verdict.attack_id = "a5";

  const auto matched = match_schedule(key, capture);
  std::set<std::size_t> matched_set(matched.begin(), matched.end());

  std::size_t victim_post = 0, covered = 0, false_matches = 0;
  for (std::size_t i = 0; i < capture.entries.size(); ++i) {
    const bool is_victim = truth[i] == victim_tag_label;
    const bool post = capture.entries[i].t >= revocation_time;
    if (is_victim && post) {
      ++victim_post;
      if (matched_set.contains(i)) ++covered;
    }
  }
  for (std::size_t i : matched) {
    if (truth[i] != victim_tag_label) ++false_matches;
  }

  wire::Json track = wire::Json::array();
  for (std::size_t i : matched) {
    if (capture.entries[i].t < revocation_time) continue;
    track.push_back(wire::Json{{"t", capture.entries[i].t},
                               {"x", capture.entries[i].receiver_position.x},
                               {"y", capture.entries[i].receiver_position.y}});
  }

  verdict.success = victim_post > 0 && covered == victim_post && false_matches == 0;
  verdict.evidence["victim_observations_post_revocation"] = victim_post;
  verdict.evidence["matched_post_revocation"] = covered;
  verdict.evidence["false_matches"] = false_matches;
  verdict.evidence["reconstructed_track"] = track;
  return verdict;
}

namespace {

std::set<PrivateId> displayed_ids(const ScanDisplay& scan) {
  std::set<PrivateId> out;
  for (const auto& [id, count] : scan.displayed) {
    if (count >= 1) out.insert(id);
  }
  return out;
}

bool scan_happened(const ScanDisplay& scan) { return !scan.scan_positions.empty(); }

}  // namespace

AttackVerdict a6_derive_then_replay_frame(const CompromisedKey& key, const ScanDisplay& scan,
                                          const sim::Position& true_tag_position,
                                          double range_m) {
  AttackVerdict verdict;
  verdict.attack_id = "a6";

  if (!scan_happened(scan)) {
    verdict.evidence["outcome"] = "no_victim_scan";
    return verdict;
  }

  const auto ids = schedule_set(key);
  wire::Json framed = wire::Json::array();
  for (const auto& [id, count] : scan.displayed) {
    if (count >= 1 && ids.contains(id)) {
      framed.push_back(wire::Json{{"private_id", id.hex()}, {"count", count}});
    }
  }

  // The framing only counts if the real tag never entered radio range.
  double min_distance = std::numeric_limits<double>::infinity();
  for (const auto& p : scan.scan_positions) {
    min_distance = std::min(min_distance, sim::distance_m(p, true_tag_position));
  }

  verdict.success = !framed.empty() && min_distance > range_m;
  verdict.evidence["framed_ids_displayed"] = framed;
  verdict.evidence["true_tag_min_distance_m"] = min_distance;
  verdict.evidence["outcome"] = verdict.success ? "false_positive_displayed" : "not_framed";
  return verdict;
}

AttackVerdict a7_replay_frame(const PrivateId& replayed_id, Timestamp captured_at,
                              const ScanDisplay& scan) {
  AttackVerdict verdict;
  verdict.attack_id = "a7";

  if (!scan_happened(scan)) {
    verdict.evidence["outcome"] = "no_victim_scan";
    return verdict;
  }

  const auto shown = displayed_ids(scan);
  verdict.success = shown.contains(replayed_id);
  verdict.evidence["replayed_id"] = replayed_id.hex();
  verdict.evidence["replay_age_s"] = scan.started_at - captured_at;
  verdict.evidence["stale"] = (scan.started_at - captured_at) > crypto::kRotationPeriodSec;
  verdict.evidence["outcome"] = verdict.success ? "replayed_id_displayed" : "not_displayed";
  return verdict;
}

AttackVerdict a8_antitheft_circumvention(const http::WireTap& tap,
                                         const std::vector<PrivateId>& hidden_schedule,
                                         const ScanDisplay& stock_scan,
                                         const ScanDisplay& modified_scan) {
  AttackVerdict verdict;
  verdict.attack_id = "a8";

  const std::unordered_set<PrivateId> hidden(hidden_schedule.begin(), hidden_schedule.end());

  // (i) The scan POST bodies on the wire contain the anti-theft tag's ids.
  std::size_t posts_with_hidden_ids = 0, scan_posts = 0;
  for (const auto& exchange : tap.exchanges()) {
    if (exchange.request.method != "POST" ||
        exchange.request.path != "/api/v1/scan_and_secure") {
      continue;
    }
    ++scan_posts;
    try {
      auto req = wire::decode_text<wire::ScanSecureRequest>(exchange.request.body);
      for (const auto& pass : req.scans) {
        if (std::any_of(pass.begin(), pass.end(),
                        [&](const PrivateId& id) { return hidden.contains(id); })) {
          ++posts_with_hidden_ids;
          break;
        }
      }
    } catch (const wire::WireError&) {
    }
  }

  // (ii) The stock display excludes them; (iii) the modified display shows them.
  auto overlaps = [&](const ScanDisplay& scan) {
    const auto shown = displayed_ids(scan);
    return std::any_of(shown.begin(), shown.end(),
                       [&](const PrivateId& id) { return hidden.contains(id); });
  };
  const bool wire_contains = posts_with_hidden_ids > 0;
  const bool stock_hides = scan_happened(stock_scan) && !overlaps(stock_scan);
  const bool modified_shows = scan_happened(modified_scan) && overlaps(modified_scan);

  verdict.success = wire_contains && stock_hides && modified_shows;
  verdict.evidence["scan_posts"] = scan_posts;
  verdict.evidence["posts_containing_hidden_ids"] = posts_with_hidden_ids;
  verdict.evidence["stock_display_excludes"] = stock_hides;
  verdict.evidence["modified_display_includes"] = modified_shows;
  return verdict;
}

}  // namespace tileof::attacks
