// Scenario runner and operator surface for the offline-finding testbed.
//
//   tileof run    --scenario <file> [--seed N] [--report-out F] [--snapshot-out F]
//   tileof attack <id> --scenario <file> [...]
//   tileof serve  [--port N] [--snapshot-out F]
//   tileof derive --auth-key HEX --tile-id HEX (--ctr N | --all | --time T [--activation T0])

#include <csignal>
#include <ctime>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "tileof/crypto.hpp"
#include "tileof/http_service.hpp"
#include "tileof/scenario.hpp"
#include "tileof/server.hpp"

namespace {

using tileof::wire::Json;

tileof::http::HttpService* g_service = nullptr;

void handle_signal(int) {
  if (g_service != nullptr) g_service->stop();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out.good()) throw std::runtime_error("cannot write " + path);
  out << content;
}

int run_command(const std::string& scenario_path, std::optional<std::uint64_t> seed,
                const std::string& report_out, const std::string& snapshot_out,
                std::optional<std::string> only_attack) {
  tileof::scenario::RunOptions options;
  options.seed_override = seed;
  auto spec = tileof::scenario::load_scenario_file(scenario_path);
  auto result = tileof::scenario::run_scenario(spec, options);

  if (!report_out.empty()) write_file(report_out, result.report.dump(2) + "\n");
  if (!snapshot_out.empty()) write_file(snapshot_out, result.snapshot.dump(2) + "\n");

  if (only_attack) {
    // Print just the requested attack's verdict(s); exit on its success.
    bool found = false, success = false;
    for (const auto& verdict : result.report.at("verdicts")) {
      if (verdict.at("attack").get<std::string>() == *only_attack) {
        std::cout << verdict.dump(2) << "\n";
        found = true;
        success = verdict.at("success").get<bool>();
      }
    }
    if (!found) {
      std::cerr << "scenario ran no '" << *only_attack << "' attack\n";
      return 2;
    }
    return success ? 0 : 1;
  }

  Json summary = result.report;
  summary["report_sha256"] = result.report_hash;
  std::cout << summary.dump(2) << "\n";
  return result.assertions_passed ? 0 : 1;
}

int serve_command(const std::string& host, int port, std::uint64_t seed,
                  const std::string& snapshot_in, const std::string& snapshot_out) {
  tileof::server::ServerOptions options;
  options.vendors.push_back(
      {"TILE", tileof::InterimAuthKey::from_hex("000102030405060708090a0b0c0d0e0f")});
  options.seed = seed;
  auto now = [] { return static_cast<tileof::Timestamp>(std::time(nullptr)); };

  std::optional<tileof::server::ServerCore> core;
  if (!snapshot_in.empty()) {
    std::ifstream in(snapshot_in);
    if (!in.good()) {
      std::cerr << "cannot read snapshot " << snapshot_in << "\n";
      return 2;
    }
    core.emplace(tileof::server::ServerCore::from_snapshot(Json::parse(in), options, now));
  } else {
    core.emplace(options, now);
  }

  tileof::http::HttpService service(*core);
  g_service = &service;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  std::cerr << "listening on " << host << ":" << port << "\n";
  if (!service.listen(host, port)) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  if (!snapshot_out.empty()) {
    write_file(snapshot_out, core->snapshot().dump(2) + "\n");
    std::cerr << "snapshot written to " << snapshot_out << "\n";
  }
  return 0;
}

int derive_command(const std::string& auth_key_hex, const std::string& tile_id_hex,
                   std::optional<std::uint32_t> ctr, bool all,
                   std::optional<tileof::Timestamp> at_time,
                   tileof::Timestamp activation_time) {
  const auto auth_key = tileof::AuthKey::from_hex(auth_key_hex);
  const auto tile_id = tileof::TileId::from_hex(tile_id_hex);

  if (all) {
    for (const auto& id : tileof::crypto::private_id_schedule(auth_key, tile_id)) {
      std::cout << id.hex() << "\n";
    }
    return 0;
  }
  if (at_time) {
    std::cout << tileof::crypto::private_id_at(auth_key, tile_id, activation_time, *at_time).hex()
              << "\n";
    return 0;
  }
  const auto seed = tileof::crypto::derive_private_id_seed(auth_key, tile_id);
  std::cout << tileof::crypto::private_id(seed, ctr.value_or(0)).hex() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offline-finding protocol testbed"};
  app.require_subcommand(1);

  // run
  std::string scenario_path, report_out, snapshot_out;
  std::uint64_t seed_value = 0;
  bool seed_set = false;
  auto* run = app.add_subcommand("run", "execute a scenario file");
  run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--seed", seed_value, "override the scenario seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--report-out", report_out, "write the run report here");
  run->add_option("--snapshot-out", snapshot_out, "write the final server snapshot here");

  // attack
  std::string attack_id;
  auto* attack = app.add_subcommand("attack", "run a scenario and print one attack's verdict");
  attack->add_option("id", attack_id, "attack id (a1..a8)")->required();
  attack->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  attack->add_option("--seed", seed_value, "override the scenario seed")
      ->each([&](const std::string&) { seed_set = true; });
  attack->add_option("--report-out", report_out, "write the run report here");
  attack->add_option("--snapshot-out", snapshot_out, "write the final server snapshot here");

  // serve
  std::string host = "127.0.0.1", snapshot_in;
  int port = 8080;
  std::uint64_t serve_seed = 1;
  auto* serve = app.add_subcommand("serve", "expose the provider emulator over HTTP");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "bind port");
  serve->add_option("--seed", serve_seed, "server RNG seed");
  serve->add_option("--snapshot-in", snapshot_in, "start from a snapshot file");
  serve->add_option("--snapshot-out", snapshot_out, "write a snapshot on shutdown");

  // derive
  std::string auth_key_hex, tile_id_hex;
  std::uint32_t ctr = 0;
  bool ctr_set = false, all = false;
  tileof::Timestamp at_time = 0, activation = 0;
  bool time_set = false;
  auto* derive = app.add_subcommand("derive", "print identifiers for a key");
  derive->add_option("--auth-key", auth_key_hex, "16-byte key, hex")->required();
  derive->add_option("--tile-id", tile_id_hex, "8-byte tag id, hex")->required();
  derive->add_option("--ctr", ctr, "schedule position 0..8639")
      ->each([&](const std::string&) { ctr_set = true; });
  derive->add_flag("--all", all, "print the full 8640-entry schedule");
  derive->add_option("--time", at_time, "derive the identifier current at this timestamp")
      ->each([&](const std::string&) { time_set = true; });
  derive->add_option("--activation", activation, "activation timestamp for --time");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(scenario_path,
                         seed_set ? std::optional<std::uint64_t>(seed_value) : std::nullopt,
                         report_out, snapshot_out, std::nullopt);
    }
    if (attack->parsed()) {
      return run_command(scenario_path,
                         seed_set ? std::optional<std::uint64_t>(seed_value) : std::nullopt,
                         report_out, snapshot_out, attack_id);
    }
    if (serve->parsed()) {
      return serve_command(host, port, serve_seed, snapshot_in, snapshot_out);
    }
    return derive_command(auth_key_hex, tile_id_hex,
                          ctr_set ? std::optional<std::uint32_t>(ctr) : std::nullopt, all,
                          time_set ? std::optional<tileof::Timestamp>(at_time) : std::nullopt,
                          activation);
  } catch (const tileof::scenario::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
