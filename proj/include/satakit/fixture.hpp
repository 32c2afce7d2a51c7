#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satakit/sim.hpp"

namespace satakit::sim {

/// Scenario description in JSON. Keys are declared first, by hex seed or by
/// a seed text hashed with SHA-256, each with an owner ("honest" or
/// "attacker"). Every other string may use ${onion:K}, ${onionhost:K} and
/// ${satahost:K:domain}; dates may be ISO or "now", "now-Nd", "now+Nd".
/// Throws Error{BadFixture}.
Scenario load_scenario(std::string_view json, SimTime now);
Scenario load_scenario_file(const std::filesystem::path& path, SimTime now);
/// All *.json files in the directory, in file name order.
std::vector<Scenario> load_scenario_dir(const std::filesystem::path& dir, SimTime now);

/// {"name","sata_aware","prioritize_onion","use_world_policy","policy"}
BrowserConfig parse_browser_config(std::string_view json);
/// "legacy", "sata-aware", "sata-aware+policy". Throws Error{BadFixture}.
BrowserConfig builtin_browser(std::string_view name);
std::vector<BrowserConfig> builtin_browsers();

std::string outcome_to_json(const Outcome& o);
/// Compact per-row summary: reached, attacker, alert, via_alt_svc, verdict
/// names, alt-svc decisions and trust per visit.
std::string matrix_summary_json(std::span<const MatrixRow> rows);
std::string tracking_report_to_json(const TrackingReport& report);
std::string rotation_attack_to_json(const RotationAttackResult& result);

}  // namespace satakit::sim
