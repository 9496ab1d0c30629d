#include "tileof/scenario.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>

#include "tileof/attacks.hpp"
#include "tileof/client.hpp"
#include "tileof/http_api.hpp"
#include "tileof/server.hpp"
#include "tileof/tag.hpp"

namespace tileof::scenario {

namespace {

using wire::Json;

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ScenarioError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

std::string req_string(const Json& j, const char* key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_string()) throw ScenarioError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string opt_string(const Json& j, const char* key, const std::string& fallback) {
  return j.contains(key) ? j.at(key).get<std::string>() : fallback;
}

sim::Position parse_position(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ScenarioError(where + ": position must be [x, y]");
  }
  return sim::Position{j[0].get<double>(), j[1].get<double>()};
}

std::vector<sim::Position> parse_path(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ScenarioError(where + ": path must be a point array");
  std::vector<sim::Position> path;
  for (std::size_t i = 0; i < j.size(); ++i) {
    path.push_back(parse_position(j[i], where + "/path/" + std::to_string(i)));
  }
  return path;
}

struct Occurrence {
  Timestamp t = 0;
  std::size_t order = 0;
  const Json* entry = nullptr;
};

// The valid "action" strings per actor kind; referenced during validation.
const std::set<std::string> kClientActions = {
    "register",       "activate",     "move",          "report_connected",
    "finder_cycle",   "sync_tiles",   "community_stats", "enable_anti_theft",
    "share",          "revoke_share", "transfer",      "query_history",
    "delete_account", "scan_and_secure", "steal_key"};
const std::set<std::string> kTagActions = {"move"};
const std::set<std::string> kReceiverActions = {"move", "capture"};
const std::set<std::string> kBroadcasterActions = {"move", "broadcast_derived",
                                                   "broadcast_replay", "broadcast_stop"};

struct ReceiverActor {
  sim::Position position;
  attacks::CaptureLog capture;
  attacks::CaptureTruth truth;
};

struct VerdictEntry {
  std::string label;
  attacks::AttackVerdict verdict;
};

class Runner {
 public:
  Runner(const Json& doc, std::uint64_t seed)
      : doc_(doc),
        seed_(seed),
        world_(seed, doc.contains("range_m") ? doc.at("range_m").get<double>() : 30.0) {
    parse_toggles();
    build_server();
    build_actors();
  }

  RunResult run() {
    execute_script();
    finish_clock();
    return build_result();
  }

 private:
  // ---- setup ----

  void parse_toggles() {
    if (!doc_.contains("toggles")) return;
    const Json& toggles = doc_.at("toggles");
    for (auto it = toggles.begin(); it != toggles.end(); ++it) {
      if (it.key() == "randomized_mac") {
        randomized_mac_ = it.value().get<bool>();
      } else if (it.key() == "fresh_key_on_transfer") {
        fresh_key_on_transfer_ = it.value().get<bool>();
      } else if (it.key() == "tag_ctr_check") {
        tag_ctr_check_ = it.value().get<bool>();
      } else {
        throw ScenarioError("unknown toggle '" + it.key() + "'");
      }
    }
  }

  void build_server() {
    server::ServerOptions options;
    if (doc_.contains("vendors")) {
      for (const auto& v : doc_.at("vendors")) {
        options.vendors.push_back(
            {req_string(v, "vendor_id", "vendors"),
             InterimAuthKey::from_hex(req_string(v, "interim_auth_key", "vendors"))});
      }
    } else {
      options.vendors.push_back(
          {"TILE", InterimAuthKey::from_hex("000102030405060708090a0b0c0d0e0f")});
    }
    options.fresh_key_on_transfer = fresh_key_on_transfer_;
    options.seed = seed_;
    core_.emplace(std::move(options), [this] { return world_.clock.now(); });
  }

  void build_actors() {
    if (!doc_.contains("actors") || !doc_.at("actors").is_array()) {
      throw ScenarioError("scenario needs an 'actors' array");
    }
    for (const auto& actor : doc_.at("actors")) {
      const std::string name = req_string(actor, "name", "actors");
      const std::string kind = req_string(actor, "kind", "actor '" + name + "'");
      if (kinds_.contains(name)) throw ScenarioError("duplicate actor '" + name + "'");
      const sim::Position position =
          actor.contains("position") ? parse_position(actor.at("position"), name)
                                     : sim::Position{};

      if (kind == "tag") {
        TagOptions options;
        options.randomized_mac = randomized_mac_;
        options.ctr_check = tag_ctr_check_;
        MacAddress mac =
            actor.contains("mac")
                ? mac_from_string(actor.at("mac").get<std::string>())
                : MacAddress(std::array<std::uint8_t, 6>{
                      0xa4, 0xc1, 0x38, 0x00, 0x00, static_cast<std::uint8_t>(tags_.size())});
        tags_.emplace_back(world_, name, mac, opt_string(actor, "model", "TILE 24.00"),
                           opt_string(actor, "firmware", "48.04.16.0"),
                           opt_string(actor, "hardware_version", "24.00"),
                           vendor_key_for(opt_string(actor, "model", "TILE 24.00")), options);
        tags_.back().move_to(position);
        world_.medium.add_beacon(&tags_.back());
        tag_index_[name] = &tags_.back();
      } else if (kind == "client") {
        ClientOptions options;
        options.modified_app = actor.contains("modified_app") &&
                               actor.at("modified_app").get<bool>();
        transports_.emplace_back(*core_, [this] { return world_.clock.now(); }, name, &tap_);
        clients_.emplace_back(world_, name, transports_.back(), options);
        clients_.back().move_to(position);
        client_index_[name] = &clients_.back();
        client_credentials_[name] = {opt_string(actor, "email", name + "@example.com"),
                                     opt_string(actor, "password", "pw")};
      } else if (kind == "receiver") {
        receivers_[name] = ReceiverActor{position, {}, {}};
      } else if (kind == "broadcaster") {
        broadcasters_.emplace_back(name, position);
        world_.medium.add_beacon(&broadcasters_.back());
        broadcaster_index_[name] = &broadcasters_.back();
      } else {
        throw ScenarioError("actor '" + name + "': unknown kind '" + kind + "'");
      }
      kinds_[name] = kind;
    }
  }

  InterimAuthKey vendor_key_for(const std::string& model) {
    if (model.size() < 4) throw ScenarioError("tag model too short for a vendor id");
    if (doc_.contains("vendors")) {
      for (const auto& v : doc_.at("vendors")) {
        if (v.at("vendor_id").get<std::string>() == model.substr(0, 4)) {
          return InterimAuthKey::from_hex(v.at("interim_auth_key").get<std::string>());
        }
      }
      throw ScenarioError("no vendor configured for model '" + model + "'");
    }
    return InterimAuthKey::from_hex("000102030405060708090a0b0c0d0e0f");
  }

  // ---- script execution ----

  void execute_script() {
    if (!doc_.contains("script")) return;
    const Json& script = doc_.at("script");
    if (!script.is_array()) throw ScenarioError("'script' must be an array");

    std::vector<Occurrence> occurrences;
    for (std::size_t i = 0; i < script.size(); ++i) {
      const Json& entry = script[i];
      validate_entry(entry, i);
      if (entry.contains("t")) {
        occurrences.push_back({entry.at("t").get<Timestamp>(), i, &entry});
      } else {
        const Timestamp every = entry.at("every").get<Timestamp>();
        if (every <= 0) throw ScenarioError("periodic 'every' must be positive");
        const Timestamp from = entry.contains("from") ? entry.at("from").get<Timestamp>() : 0;
        const Timestamp until = require(entry, "until", "periodic entry").get<Timestamp>();
        for (Timestamp t = from; t <= until; t += every) occurrences.push_back({t, i, &entry});
      }
    }
    std::stable_sort(occurrences.begin(), occurrences.end(), [](const auto& a, const auto& b) {
      return a.t != b.t ? a.t < b.t : a.order < b.order;
    });

    for (const auto& occ : occurrences) {
      if (occ.t > world_.clock.now()) world_.clock.advance(occ.t - world_.clock.now());
      dispatch(*occ.entry);
    }
  }

  void validate_entry(const Json& entry, std::size_t index) {
    const std::string where = "script[" + std::to_string(index) + "]";
    if (!entry.contains("t") && !entry.contains("every")) {
      throw ScenarioError(where + ": needs 't' or 'every'");
    }
    const std::string action = req_string(entry, "action", where);
    if (action == "attack") {
      const std::string id = req_string(entry, "id", where);
      if (id != "a1" && id != "a2" && id != "a3" && id != "a4" && id != "a5" && id != "a6" &&
          id != "a7" && id != "a8") {
        throw ScenarioError(where + ": unknown attack '" + id + "'");
      }
      return;
    }
    const std::string actor = req_string(entry, "actor", where);
    auto kind = kinds_.find(actor);
    if (kind == kinds_.end()) {
      throw ScenarioError(where + ": undefined actor '" + actor + "'");
    }
    const std::set<std::string>* allowed = nullptr;
    if (kind->second == "client") allowed = &kClientActions;
    if (kind->second == "tag") allowed = &kTagActions;
    if (kind->second == "receiver") allowed = &kReceiverActions;
    if (kind->second == "broadcaster") allowed = &kBroadcasterActions;
    if (allowed == nullptr || !allowed->contains(action)) {
      throw ScenarioError(where + ": action '" + action + "' not valid for a " + kind->second);
    }
  }

  Tag& tag_ref(const Json& entry, const char* key) {
    const std::string name = req_string(entry, key, "script entry");
    auto it = tag_index_.find(name);
    if (it == tag_index_.end()) throw ScenarioError("undefined tag '" + name + "'");
    return *it->second;
  }

  TileId tile_of(const Json& entry, const char* key = "tile_of") {
    return tag_ref(entry, key).tile_id();
  }

  void dispatch(const Json& entry) {
    const std::string action = entry.at("action").get<std::string>();
    if (action == "attack") {
      run_attack(entry);
      return;
    }
    const std::string actor = entry.at("actor").get<std::string>();
    const std::string kind = kinds_.at(actor);

    if (kind == "tag") {
      tag_index_.at(actor)->move_to(parse_position(require(entry, "to", actor), actor));
      return;
    }
    if (kind == "receiver") {
      ReceiverActor& receiver = receivers_.at(actor);
      if (action == "move") {
        receiver.position = parse_position(require(entry, "to", actor), actor);
        return;
      }
      auto hits = world_.medium.scan(receiver.position, world_.clock.now(), 1, std::nullopt);
      for (const auto& hit : hits) {
        receiver.capture.entries.push_back(
            {world_.clock.now(), actor, receiver.position, hit.adv});
        receiver.truth.push_back(hit.emitter);
      }
      return;
    }
    if (kind == "broadcaster") {
      attacks::Broadcaster& broadcaster = *broadcaster_index_.at(actor);
      if (action == "move") {
        broadcaster.move_to(parse_position(require(entry, "to", actor), actor));
      } else if (action == "broadcast_derived") {
        const attacks::CompromisedKey key = stolen_key(entry);
        const MacAddress mac =
            mac_from_string(opt_string(entry, "mac", "de:ad:be:ef:00:01"));
        broadcaster.set_generator([key, mac](Timestamp now) {
          wire::Advertisement adv;
          adv.mac = mac;
          adv.service = wire::ServiceUuid::kFeed;
          adv.payload = crypto::private_id_at(key.auth_key, key.tile_id, key.activation_time, now);
          adv.emitted_at = now;
          return std::optional<wire::Advertisement>(adv);
        });
        world_.log.append(world_.clock.now(), actor, "broadcast_derived_started",
                          Json{{"tile_id", key.tile_id.hex()}});
      } else if (action == "broadcast_replay") {
        const std::string from = req_string(entry, "capture_from", actor);
        auto it = receivers_.find(from);
        if (it == receivers_.end()) throw ScenarioError("undefined receiver '" + from + "'");
        const attacks::CaptureEntry* latest = nullptr;
        for (const auto& e : it->second.capture.entries) {
          if (e.adv.service == wire::ServiceUuid::kFeed && e.adv.payload) latest = &e;
        }
        if (latest == nullptr) {
          throw ScenarioError("replay requested but '" + from + "' captured no identifiers");
        }
        const wire::Advertisement replayed = latest->adv;
        replays_[actor] = {*replayed.payload, latest->t};
        broadcaster.set_generator([replayed](Timestamp now) {
          wire::Advertisement adv = replayed;  // same MAC, same payload
          adv.emitted_at = now;
          return std::optional<wire::Advertisement>(adv);
        });
        world_.log.append(world_.clock.now(), actor, "broadcast_replay_started",
                          Json{{"private_id", replayed.payload->hex()}});
      } else {
        broadcaster.stop();
        world_.log.append(world_.clock.now(), actor, "broadcast_stopped", Json::object());
      }
      return;
    }

    // Client actions.
    Client& client = *client_index_.at(actor);
    if (action == "register") {
      const auto& [email, password] = client_credentials_.at(actor);
      client.register_account(email, password);
      registered_uuids_[actor] = client.user_uuid().hex();
    } else if (action == "activate") {
      client.activate_tag(tag_ref(entry, "tag"), opt_string(entry, "tile_name", "Mate"));
    } else if (action == "move") {
      client.move_to(parse_position(require(entry, "to", actor), actor));
    } else if (action == "report_connected") {
      client.report_connected();
    } else if (action == "finder_cycle") {
      client.finder_cycle();
    } else if (action == "sync_tiles") {
      client.sync_tiles();
    } else if (action == "community_stats") {
      const auto count = client.community_stats();
      world_.log.append(world_.clock.now(), actor, "community_stats",
                        Json{{"tilers_around", count}});
    } else if (action == "enable_anti_theft") {
      client.enable_anti_theft();
    } else if (action == "share") {
      client.share(tile_of(entry), req_string(entry, "email", actor));
    } else if (action == "revoke_share") {
      client.revoke_share(tile_of(entry), req_string(entry, "email", actor));
      revocation_times_[tag_ref(entry, "tile_of").label()] = world_.clock.now();
    } else if (action == "transfer") {
      client.transfer(tile_of(entry), req_string(entry, "email", actor));
      revocation_times_[tag_ref(entry, "tile_of").label()] = world_.clock.now();
    } else if (action == "query_history") {
      const auto points = client.query_history(tile_of(entry));
      world_.log.append(world_.clock.now(), actor, "history_query",
                        Json{{"points", points.size()}});
    } else if (action == "delete_account") {
      client.delete_account(client_credentials_.at(actor).second,
                            opt_string(entry, "confirmation", "DELETE"));
    } else if (action == "scan_and_secure") {
      auto outcome = client.scan_and_secure(parse_path(require(entry, "path", actor), actor));
      const std::string save_as = opt_string(entry, "save_as", actor + "_scan");
      attacks::ScanDisplay display;
      display.displayed = outcome.displayed;
      display.posted = outcome.posted.scans;
      display.scan_positions = outcome.scan_positions;
      display.started_at = outcome.started_at;
      scans_[save_as] = display;
    } else if (action == "steal_key") {
      const TileId tile_id = tile_of(entry);
      auto it = client.tiles().find(tile_id);
      if (it == client.tiles().end()) {
        throw ScenarioError("'" + actor + "' holds no key for that tile yet");
      }
      stolen_keys_[req_string(entry, "save_as", actor)] =
          attacks::CompromisedKey{it->second.auth_key, tile_id, it->second.activation_time};
      world_.log.append(world_.clock.now(), actor, "key_compromised",
                        Json{{"tile_id", tile_id.hex()}});
    } else {
      throw ScenarioError("unhandled client action '" + action + "'");
    }
  }

  attacks::CompromisedKey stolen_key(const Json& entry) {
    const std::string name = req_string(entry, "key", "attack entry");
    auto it = stolen_keys_.find(name);
    if (it == stolen_keys_.end()) throw ScenarioError("no stolen key saved as '" + name + "'");
    return it->second;
  }

  const attacks::ScanDisplay& saved_scan(const Json& entry, const char* key) {
    const std::string name = req_string(entry, key, "attack entry");
    auto it = scans_.find(name);
    if (it == scans_.end()) throw ScenarioError("no scan saved as '" + name + "'");
    return it->second;
  }

  std::pair<attacks::CaptureLog, attacks::CaptureTruth> merged_capture(const Json& entry) {
    const Json& from = require(entry, "capture_from", "attack entry");
    attacks::CaptureLog capture;
    attacks::CaptureTruth truth;
    for (const auto& name : from) {
      auto it = receivers_.find(name.get<std::string>());
      if (it == receivers_.end()) {
        throw ScenarioError("undefined receiver '" + name.get<std::string>() + "'");
      }
      capture.entries.insert(capture.entries.end(), it->second.capture.entries.begin(),
                             it->second.capture.entries.end());
      truth.insert(truth.end(), it->second.truth.begin(), it->second.truth.end());
    }
    return {std::move(capture), std::move(truth)};
  }

  void run_attack(const Json& entry) {
    const std::string id = entry.at("id").get<std::string>();
    const std::string label = opt_string(entry, "label", id);
    attacks::AttackVerdict verdict;

    if (id == "a1") {
      std::map<std::string, std::vector<attacks::TrajectoryPoint>> truth;
      std::set<std::string> macs;
      for (const auto& event : world_.log.events()) {
        if (event.event != "owner_report" && event.event != "finder_report") continue;
        auto uuid = registered_uuids_.find(event.actor);
        if (uuid == registered_uuids_.end()) continue;
        truth[uuid->second].push_back({event.t, event.payload.at("latitude").get<double>(),
                                       event.payload.at("longitude").get<double>()});
        if (event.event == "finder_report") {
          for (const auto& obs : event.payload.at("observed")) {
            macs.insert(obs.at("mac").get<std::string>());
          }
        }
      }
      verdict = attacks::a1_server_surveillance(core_->snapshot(), truth, macs);
    } else if (id == "a2") {
      const std::string adversary = req_string(entry, "as", "a2");
      auto client = client_index_.find(adversary);
      if (client == client_index_.end()) throw ScenarioError("undefined client for a2");
      const std::string uuid = client->second->user_uuid().hex();
      attacks::CommunityOracle oracle = [this, uuid](double lat, double lon) {
        http::HttpRequest request{"GET", "/api/v1/community/stats", {}, {}, ""};
        request.headers[http::kUserUuidHeader] = uuid;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.10f", lat);
        request.query["latitude"] = buf;
        std::snprintf(buf, sizeof(buf), "%.10f", lon);
        request.query["longitude"] = buf;
        auto response = http::route_request(*core_, request);
        return wire::CommunityStatsResponse::decode(wire::Json::parse(response.body))
            .tilers_around;
      };
      attacks::A2Params params;
      const Json& area = require(entry, "area_miles", "a2");
      params.area_min = {area.at(0).at(0).get<double>() * sim::kMileMeters,
                         area.at(0).at(1).get<double>() * sim::kMileMeters};
      params.area_max = {area.at(1).at(0).get<double>() * sim::kMileMeters,
                         area.at(1).at(1).get<double>() * sim::kMileMeters};
      if (entry.contains("budget")) params.query_budget = entry.at("budget").get<int>();
      const std::string target = req_string(entry, "target", "a2");
      auto target_client = client_index_.find(target);
      if (target_client == client_index_.end()) throw ScenarioError("undefined a2 target");
      verdict = attacks::a2_community_deanonymize(oracle, params,
                                                  target_client->second->position());
    } else if (id == "a3") {
      auto [capture, truth] = merged_capture(entry);
      verdict = attacks::a3_link_by_static_mac(capture, truth);
    } else if (id == "a4") {
      auto [capture, truth] = merged_capture(entry);
      verdict = attacks::a4_fingerprint_by_cycle(capture, truth);
    } else if (id == "a5") {
      auto [capture, truth] = merged_capture(entry);
      const std::string victim_tag = req_string(entry, "victim_tag", "a5");
      Timestamp revoked_at = entry.contains("revoked_at")
                                 ? entry.at("revoked_at").get<Timestamp>()
                                 : revocation_times_.at(victim_tag);
      verdict = attacks::a5_track_with_compromised_key(stolen_key(entry), capture, truth,
                                                       victim_tag, revoked_at);
    } else if (id == "a6") {
      Tag& tag = tag_ref(entry, "true_tag");
      verdict = attacks::a6_derive_then_replay_frame(stolen_key(entry),
                                                     saved_scan(entry, "scan"), tag.position(),
                                                     world_.medium.range_m());
    } else if (id == "a7") {
      const std::string broadcaster = req_string(entry, "broadcaster", "a7");
      auto it = replays_.find(broadcaster);
      if (it == replays_.end()) {
        throw ScenarioError("broadcaster '" + broadcaster + "' has not replayed anything");
      }
      verdict = attacks::a7_replay_frame(it->second.first, it->second.second,
                                         saved_scan(entry, "scan"));
    } else {
      Tag& tag = tag_ref(entry, "hidden_tag");
      const auto& record = core_->tags().at(tag.tile_id());
      verdict = attacks::a8_antitheft_circumvention(
          tap_, crypto::private_id_schedule(record.auth_key, tag.tile_id()),
          saved_scan(entry, "stock_scan"), saved_scan(entry, "modified_scan"));
    }

    world_.log.append(world_.clock.now(), "attack:" + label, "verdict", verdict.to_json());
    verdicts_.push_back({label, verdict});
  }

  void finish_clock() {
    if (doc_.contains("duration_s")) {
      const Timestamp duration = doc_.at("duration_s").get<Timestamp>();
      if (duration > world_.clock.now()) {
        world_.clock.advance(duration - world_.clock.now());
      }
    }
  }

  // ---- reporting ----

  RunResult build_result() {
    Json verdicts = Json::array();
    for (const auto& [label, verdict] : verdicts_) {
      Json j = verdict.to_json();
      j["label"] = label;
      verdicts.push_back(j);
    }

    bool all_passed = true;
    Json assertions = Json::array();
    if (doc_.contains("assertions")) {
      for (const auto& assertion : doc_.at("assertions")) {
        auto [passed, detail] = evaluate_assertion(assertion);
        all_passed = all_passed && passed;
        Json j = Json::object();
        j["assertion"] = assertion;
        j["passed"] = passed;
        if (!detail.empty()) j["detail"] = detail;
        assertions.push_back(j);
      }
    }

    RunResult result;
    result.event_log_jsonl = world_.log.to_jsonl();
    Json report = Json::object();
    report["scenario"] = opt_string(spec_, "name", "unnamed");
    report["seed"] = seed_;
    report["toggles"] = Json{{"randomized_mac", randomized_mac_},
                             {"fresh_key_on_transfer", fresh_key_on_transfer_},
                             {"tag_ctr_check", tag_ctr_check_}};
    report["verdicts"] = verdicts;
    report["assertions"] = assertions;
    report["events"] = world_.log.events().size();
    report["event_log_sha256"] = crypto::sha256_hex(result.event_log_jsonl);

    result.report = report;
    result.report_hash = crypto::sha256_hex(report.dump());
    result.assertions_passed = all_passed;
    result.snapshot = core_->snapshot();
    return result;
  }

  std::pair<bool, std::string> evaluate_assertion(const Json& assertion) {
    const std::string label = req_string(assertion, "attack", "assertion");
    const VerdictEntry* found = nullptr;
    for (const auto& entry : verdicts_) {
      if (entry.label == label) found = &entry;
    }
    if (found == nullptr) return {false, "no verdict recorded for '" + label + "'"};

    if (assertion.contains("expect_success") &&
        found->verdict.success != assertion.at("expect_success").get<bool>()) {
      return {false, "success=" + std::string(found->verdict.success ? "true" : "false")};
    }
    if (assertion.contains("evidence")) {
      for (auto it = assertion.at("evidence").begin(); it != assertion.at("evidence").end();
           ++it) {
        if (!found->verdict.evidence.contains(it.key()) ||
            found->verdict.evidence.at(it.key()) != it.value()) {
          return {false, "evidence mismatch on '" + it.key() + "'"};
        }
      }
    }
    if (assertion.contains("evidence_min")) {
      for (auto it = assertion.at("evidence_min").begin();
           it != assertion.at("evidence_min").end(); ++it) {
        if (!found->verdict.evidence.contains(it.key()) ||
            found->verdict.evidence.at(it.key()).get<double>() < it.value().get<double>()) {
          return {false, "evidence '" + it.key() + "' below threshold"};
        }
      }
    }
    return {true, ""};
  }

  const Json& doc_;
  std::uint64_t seed_;
  sim::World world_;
  http::WireTap tap_;
  std::optional<server::ServerCore> core_;

  bool randomized_mac_ = false;
  bool fresh_key_on_transfer_ = false;
  bool tag_ctr_check_ = true;

  std::map<std::string, std::string> kinds_;
  std::deque<Tag> tags_;
  std::deque<http::InProcessTransport> transports_;
  std::deque<Client> clients_;
  std::deque<attacks::Broadcaster> broadcasters_;
  std::map<std::string, Tag*> tag_index_;
  std::map<std::string, Client*> client_index_;
  std::map<std::string, attacks::Broadcaster*> broadcaster_index_;
  std::map<std::string, ReceiverActor> receivers_;
  std::map<std::string, std::pair<std::string, std::string>> client_credentials_;
  std::map<std::string, std::string> registered_uuids_;
  std::map<std::string, attacks::CompromisedKey> stolen_keys_;
  std::map<std::string, attacks::ScanDisplay> scans_;
  std::map<std::string, std::pair<PrivateId, Timestamp>> replays_;
  std::map<std::string, Timestamp> revocation_times_;
  std::vector<VerdictEntry> verdicts_;
};

}  // namespace

Json load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw ScenarioError("cannot open scenario file " + path);
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ScenarioError("scenario file is not valid JSON: " + path);
  return j;
}

RunResult run_scenario(const Json& scenario, const RunOptions& options) {
  if (!scenario.is_object()) throw ScenarioError("scenario must be a JSON object");
  std::uint64_t seed = options.seed_override
                           ? *options.seed_override
                           : (scenario.contains("seed")
                                  ? scenario.at("seed").get<std::uint64_t>()
                                  : 1);
  try {
    Runner runner(scenario, seed);
    return runner.run();
  } catch (const wire::WireError& e) {
    throw ScenarioError(std::string("scenario schema problem: ") + e.what());
  } catch (const Json::exception& e) {
    throw ScenarioError(std::string("scenario schema problem: ") + e.what());
  }
}

}  // namespace tileof::scenario
