#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "satakit/base32.hpp"
#include "satakit/credential.hpp"
#include "satakit/error.hpp"
#include "satakit/fixture.hpp"
#include "satakit/onion.hpp"
#include "satakit/sata.hpp"
#include "satakit/sim.hpp"
#include "satakit/trust.hpp"
#include "satakit/validation.hpp"

namespace satakit::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// Failures that are not library errors but still end a command with 65.
constexpr const char* kNotTrusted = "NotTrusted";
constexpr const char* kRotationInvalid = "RotationInvalid";

int exit_code_for(Errc code) { return code == Errc::IoError ? kExitIo : kExitData; }

struct Ctx {
  std::ostream& out;
  std::ostream& err;
  bool json = false;
  std::string now_text;

  Date now() const {
    if (!now_text.empty()) return Date::parse(now_text);
    const char* env = std::getenv(kDeterministicEnv);
    if (env != nullptr && std::string_view(env) == "1") {
      throw CLI::RequiredError("--now (required when " + std::string(kDeterministicEnv) + "=1)");
    }
    return Date::today();
  }
};

void print_human(std::ostream& out, const ojson& j, const std::string& indent = "") {
  if (!j.is_object()) {
    out << indent << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
    return;
  }
  for (const auto& [k, v] : j.items()) {
    if (v.is_string()) {
      out << indent << k << ": " << v.get<std::string>() << '\n';
    } else if (v.is_object() || (v.is_array() && !v.empty() && v.front().is_structured())) {
      out << indent << k << ":\n";
      if (v.is_object()) {
        print_human(out, v, indent + "  ");
      } else {
        for (const auto& e : v) print_human(out, e, indent + "  ");
      }
    } else if (v.is_array()) {
      std::string joined;
      for (const auto& e : v) {
        if (!joined.empty()) joined += ", ";
        joined += e.is_string() ? e.get<std::string>() : e.dump();
      }
      out << indent << k << ": " << joined << '\n';
    } else {
      out << indent << k << ": " << v.dump() << '\n';
    }
  }
}

int emit(const Ctx& c, ojson j, int code = kExitOk) {
  if (c.json) {
    c.out << j.dump() << '\n';
  } else {
    print_human(c.out, j);
  }
  return code;
}

/// Command-level failure: "ok":false plus the failure class.
int emit_failure(const Ctx& c, ojson j, std::string_view error, const std::string& detail) {
  ojson out = {{"ok", false}, {"error", error}, {"detail", detail}};
  for (auto& [k, v] : j.items()) out[k] = v;
  if (!c.json) c.err << "satakit: " << error << ": " << detail << '\n';
  return emit(c, out, kExitData);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(Errc::IoError, "write failed for " + path);
}

std::string trim(std::string s) {
  auto ws = [](unsigned char ch) { return std::isspace(ch) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

KeyPair load_key(const std::string& path) {
  std::string hex = trim(read_text(path));
  try {
    return keygen(seed_from_hex(hex));
  } catch (const Error& e) {
    throw Error(Errc::MalformedKey, path + ": " + e.detail());
  }
}

std::vector<Sattestation> load_creds(const std::string& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == kCredentialFileExtension) {
      files.push_back(entry.path());
    }
  }
  if (ec) throw Error(Errc::IoError, "cannot list " + dir);
  std::sort(files.begin(), files.end());
  std::vector<Sattestation> out;
  for (const auto& f : files) out.push_back(parse_sattestation(read_text(f.string())));
  return out;
}

ojson sata_json(const Sata& s) {
  return {{"domain", s.domain},
          {"onion", s.onion.label()},
          {"form", sata_form_name(s.form)},
          {"subdomain_form", to_subdomain_form(s)},
          {"query_form", to_query_form(s)},
          {"expected_sans", expected_sans(s)}};
}

ojson chain_json(const TrustChain& chain) {
  ojson links = ojson::array();
  for (const ChainLink& l : chain.links) {
    links.push_back({{"sattestor", l.credential.body.sattestor_domain},
                     {"sattestor_onion", l.credential.body.sattestor_onion.label()},
                     {"subject", l.binding().domain},
                     {"subject_onion", l.binding().onion.label()},
                     {"label", l.label},
                     {"credential", l.credential_index},
                     {"binding", l.binding_index}});
  }
  return {{"label", chain.label}, {"depth", chain.depth()}, {"links", links}};
}

sim::BrowserConfig load_browser(const std::string& spec) {
  if (spec == "legacy" || spec == "sata-aware" || spec == "sata-aware+policy") {
    return sim::builtin_browser(spec);
  }
  return sim::parse_browser_config(read_text(spec));
}

// ---- onion ----------------------------------------------------------------

int onion_parse(const Ctx& c, const std::string& text) {
  try {
    OnionAddress a = parse_onion(text);
    return emit(c, {{"ok", true},
                    {"label", a.label()},
                    {"host", a.host()},
                    {"pubkey_hex", to_hex(a.public_key())},
                    {"checksum_hex", to_hex(a.checksum())},
                    {"version", a.version()},
                    {"checksum_ok", true}});
  } catch (const Error& e) {
    if (e.code() != Errc::BadChecksum && e.code() != Errc::BadVersion) throw;
    std::string label = text;
    std::transform(label.begin(), label.end(), label.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (has_onion_suffix(label)) label.resize(label.size() - kOnionSuffix.size());
    Bytes raw = base32::decode(label);
    PublicKey pk{};
    std::copy_n(raw.begin(), pk.size(), pk.begin());
    OnionChecksum expect = onion_checksum(pk, raw[34]);
    const bool sum_ok = raw[32] == expect[0] && raw[33] == expect[1];
    return emit_failure(c,
                        {{"label", label},
                         {"pubkey_hex", to_hex(pk)},
                         {"checksum_hex", to_hex(ByteView(raw.data() + 32, 2))},
                         {"expected_checksum_hex", to_hex(expect)},
                         {"version", raw[34]},
                         {"checksum_ok", sum_ok}},
                        errc_name(e.code()), e.detail());
  }
}

int onion_encode(const Ctx& c, const std::string& pubkey_hex) {
  OnionAddress a = OnionAddress::from_public_key(public_key_from_hex(pubkey_hex));
  return emit(c, {{"label", a.label()}, {"host", a.host()}});
}

int onion_keygen(const Ctx& c, const std::string& seed_hex, const std::string& out_path) {
  KeyPair k = seed_hex.empty() ? keygen() : keygen(seed_from_hex(seed_hex));
  ojson j = {{"pubkey_hex", to_hex(k.public_key)}, {"onion", k.onion().label()}};
  if (!out_path.empty()) {
    write_text(out_path, to_hex(k.secret) + "\n");
    j["key_file"] = out_path;
  } else {
    j["seed_hex"] = to_hex(k.secret);
  }
  return emit(c, j);
}

// ---- satt -----------------------------------------------------------------

int satt_issue(const Ctx& c, const std::string& key_path, const std::string& body_path,
               const std::string& out_path) {
  KeyPair key = load_key(key_path);
  Sattestation s = issue(key, parse_body(read_text(body_path)));
  std::string transport = to_transport(s);
  if (!out_path.empty()) write_text(out_path, transport);
  if (!c.json && out_path.empty()) {
    c.out << transport << '\n';
    return kExitOk;
  }
  return emit(c, {{"ok", true}, {"size", transport.size()}, {"transport", transport}});
}

int satt_self(const Ctx& c, const std::string& key_path, const std::string& domain,
              const std::vector<std::string>& fps, const std::vector<std::string>& labels,
              const std::string& issued, const std::string& refreshed, double rate,
              const std::string& out_path) {
  KeyPair key = load_key(key_path);
  Date now = (issued.empty() || refreshed.empty()) ? c.now() : Date{};
  Date i = issued.empty() ? now : Date::parse(issued);
  Date r = refreshed.empty() ? now : Date::parse(refreshed);
  Sattestation s = make_self_sattestation(key, domain, fps, labels, i, r, rate);
  std::string transport = to_transport(s);
  if (!out_path.empty()) write_text(out_path, transport);
  if (!c.json && out_path.empty()) {
    c.out << transport << '\n';
    return kExitOk;
  }
  return emit(c, {{"ok", true}, {"size", transport.size()}, {"transport", transport}});
}

int satt_verify(const Ctx& c, const std::string& path) {
  Sattestation s = parse_sattestation(read_text(path));
  Status st = verify_credential(s);
  ojson j = {{"sattestor", to_query_form(s.body.sattestor())},
             {"self_sattestation", s.is_self_sattestation()},
             {"bindings", s.body.sattestees.size()}};
  if (!st) return emit_failure(c, j, errc_name(*st.code()), st.detail());
  j["ok"] = true;
  return emit(c, j);
}

int satt_fresh(const Ctx& c, const std::string& path, std::size_t index) {
  Sattestation s = parse_sattestation(read_text(path));
  Freshness f = check_freshness(s, index, c.now());
  ojson j = {{"fresh", f.fresh},
             {"reference", f.reference.to_string()},
             {"age_days", f.age_days},
             {"refresh_rate", format_refresh_rate(f.refresh_rate_days)},
             {"margin_days", f.margin_days()}};
  if (!f.fresh) return emit_failure(c, j, errc_name(Errc::Stale), f.status().detail());
  j["ok"] = true;
  return emit(c, j);
}

// ---- verify / trust / rotate ------------------------------------------------

int verify_cmd(const Ctx& c, const std::string& url, const std::string& cert_path,
               const std::string& header_path) {
  Sata s = parse_sata(url);
  CertDescriptor cert = load_certificate(cert_path);
  Sattestation header = parse_sattestation(read_text(header_path));
  Verdict v = validate_connection(s, cert, header, c.now());
  ojson j = {{"verdict", verdict_name(v.outcome)},
             {"detail", v.detail},
             {"cert_fingerprint", cert.fingerprint}};
  if (!v.accepted()) return emit_failure(c, j, verdict_name(v.outcome), v.detail);
  j["ok"] = true;
  return emit(c, j);
}

int trust_eval(const Ctx& c, const std::string& policy_path, const std::string& creds_dir,
               const std::string& subject, const std::string& label) {
  TrustPolicy policy = parse_trust_policy(read_text(policy_path));
  std::vector<Sattestation> creds = load_creds(creds_dir);
  Sata s = parse_sata(subject);
  auto chain = evaluate(policy, creds, s, label, c.now());
  ojson j = {{"subject", to_query_form(s)}, {"label", label}};
  if (!chain) {
    j["trusted"] = false;
    return emit_failure(c, j, kNotTrusted, "no chain from a policy root");
  }
  j["ok"] = true;
  j["trusted"] = true;
  j["chain"] = chain_json(*chain);
  return emit(c, j);
}

int rotate_check(const Ctx& c, const std::string& old_s, const std::string& new_s,
                 const std::string& creds_dir) {
  Sata o = parse_sata(old_s);
  Sata n = parse_sata(new_s);
  RotationResult r = rotation_check(o, n, load_creds(creds_dir), c.now());
  ojson j = {{"old", to_query_form(o)}, {"new", to_query_form(n)}, {"rotation_ok", r.ok}};
  if (!r.ok) return emit_failure(c, j, kRotationInvalid, r.detail);
  j["ok"] = true;
  j["detail"] = r.detail;
  return emit(c, j);
}

int rotate_pointer(const Ctx& c, const std::string& old_s, const std::string& new_s,
                   const std::string& key_path, const std::string& issued, double rate,
                   const std::string& out_path) {
  Sata o = parse_sata(old_s);
  Sata n = parse_sata(new_s);
  Date i = issued.empty() ? c.now() : Date::parse(issued);
  Sattestation s = expired_rotation_form(o, n, load_key(key_path), i, rate);
  std::string transport = to_transport(s);
  if (!out_path.empty()) write_text(out_path, transport);
  if (!c.json && out_path.empty()) {
    c.out << transport << '\n';
    return kExitOk;
  }
  return emit(c, {{"ok", true},
                  {"label", rotation_pointer_label(n)},
                  {"size", transport.size()},
                  {"transport", transport}});
}

// ---- sim ------------------------------------------------------------------

int sim_run(const Ctx& c, const std::string& fixture, const std::string& browser) {
  const sim::SimTime now = sim::start_of(c.now());
  sim::Scenario sc = sim::load_scenario_file(fixture, now);
  sim::World w = sc.world;
  if (!browser.empty()) w.browser = load_browser(browser);
  ojson visits = ojson::array();
  bool silent = false;
  for (const sim::Visit& v : sc.visits) {
    sim::VisitResult r = sim::run_visit(std::move(w), v, now + v.offset_s);
    silent = silent || r.outcome.silent_attacker_success();
    visits.push_back(ojson::parse(sim::outcome_to_json(r.outcome)));
    w = std::move(r.world);
  }
  return emit(c, {{"scenario", sc.name},
                  {"browser", w.browser.name},
                  {"visits", visits},
                  {"silent_attacker_success", silent}});
}

int sim_matrix(const Ctx& c, const std::string& dir, const std::string& out_path,
               const std::vector<std::string>& browser_specs) {
  const sim::SimTime now = sim::start_of(c.now());
  std::vector<sim::Scenario> scenarios = sim::load_scenario_dir(dir, now);
  std::vector<sim::BrowserConfig> browsers;
  for (const auto& b : browser_specs) browsers.push_back(load_browser(b));
  if (browsers.empty()) browsers = sim::builtin_browsers();
  auto rows = sim::run_matrix(scenarios, browsers, now);
  std::string table = sim::matrix_summary_json(rows);
  if (!out_path.empty()) write_text(out_path, table + "\n");
  if (c.json || out_path.empty()) {
    c.out << table << '\n';
    return kExitOk;
  }
  std::size_t silent = 0;
  for (const auto& r : rows) silent += r.silent_attacker_success() ? 1 : 0;
  return emit(c, {{"rows", rows.size()}, {"silent_attacker_successes", silent}, {"out", out_path}});
}

int sim_track(const Ctx& c, const std::string& fixture, const std::string& browser) {
  const sim::SimTime now = sim::start_of(c.now());
  sim::Scenario sc = sim::load_scenario_file(fixture, now);
  if (!browser.empty()) sc.world.browser = load_browser(browser);
  sim::TrackingReport rep = sim::track_alt_svc_exposure(sc.world, sc.visits, now);
  return emit(c, ojson::parse(sim::tracking_report_to_json(rep)));
}

int errors_table(const Ctx& c) {
  ojson rows = ojson::array();
  for (int i = 0; i <= static_cast<int>(Errc::IoError); ++i) {
    auto code = static_cast<Errc>(i);
    rows.push_back({{"error", errc_name(code)}, {"exit", exit_code_for(code)}});
  }
  for (const char* extra : {kNotTrusted, kRotationInvalid}) {
    rows.push_back({{"error", extra}, {"exit", kExitData}});
  }
  for (int v = 1; v <= static_cast<int>(VerdictCode::RejectTargetMismatch); ++v) {
    rows.push_back({{"error", verdict_name(static_cast<VerdictCode>(v))}, {"exit", kExitData}});
  }
  rows.push_back({{"error", "Usage"}, {"exit", kExitUsage}});
  rows.push_back({{"error", "Internal"}, {"exit", kExitInternal}});
  if (c.json) return emit(c, rows);
  for (const auto& r : rows) {
    c.out << r["exit"].get<int>() << "  " << r["error"].get<std::string>() << '\n';
  }
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Ctx ctx{out, err, false, {}};
  std::function<int()> action;

  CLI::App app{"Self-authenticating traditional address toolkit", "satakit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", ctx.json, "Machine-readable output");
  app.add_option("--now", ctx.now_text, "Evaluation date (YYYY-MM-DD)");

  // onion
  auto* onion = app.add_subcommand("onion", "v3 onion addresses");
  onion->require_subcommand(1);
  std::string onion_text, pubkey_hex, seed_hex, key_out;
  auto* o_parse = onion->add_subcommand("parse", "Decode and check an address");
  o_parse->add_option("address", onion_text)->required();
  o_parse->callback([&] { action = [&] { return onion_parse(ctx, onion_text); }; });
  auto* o_encode = onion->add_subcommand("encode", "Address for a public key");
  o_encode->add_option("--pubkey", pubkey_hex, "32-byte key, hex")->required();
  o_encode->callback([&] { action = [&] { return onion_encode(ctx, pubkey_hex); }; });
  auto* o_keygen = onion->add_subcommand("keygen", "New Ed25519 identity");
  o_keygen->add_option("--seed", seed_hex, "Deterministic 32-byte seed, hex");
  o_keygen->add_option("--out", key_out, "Write the seed to this key file");
  o_keygen->callback([&] { action = [&] { return onion_keygen(ctx, seed_hex, key_out); }; });

  // sata
  auto* sata = app.add_subcommand("sata", "SATA URLs");
  sata->require_subcommand(1);
  std::string sata_text, domain, onion_label, form = "query";
  auto* s_parse = sata->add_subcommand("parse", "Parse a SATA URL or host");
  s_parse->add_option("url", sata_text)->required();
  s_parse->callback([&] { action = [&] { return emit(ctx, sata_json(parse_sata(sata_text))); }; });
  auto* s_render = sata->add_subcommand("render", "Render a SATA");
  s_render->add_option("--domain", domain)->required();
  s_render->add_option("--onion", onion_label)->required();
  s_render->add_option("--form", form)->check(CLI::IsMember({"subdomain", "query"}));
  s_render->callback([&] {
    action = [&] {
      Sata s = make_sata(domain, parse_onion(onion_label),
                         form == "subdomain" ? SataForm::Subdomain : SataForm::QueryString);
      ojson j = sata_json(s);
      j["url"] = to_url(s);
      if (!ctx.json) {
        out << to_url(s) << '\n';
        return kExitOk;
      }
      return emit(ctx, j);
    };
  });

  // satt
  auto* satt = app.add_subcommand("satt", "Sattestation credentials");
  satt->require_subcommand(1);
  std::string key_path, body_path, file_path, out_path, issued, refreshed;
  std::vector<std::string> fps, labels;
  double rate = 7.0;
  std::size_t binding_index = 0;
  auto* t_issue = satt->add_subcommand("issue", "Sign a sattestation body");
  t_issue->add_option("--key", key_path, "Key file (hex seed)")->required();
  t_issue->add_option("--body", body_path, "Unsigned body JSON")->required();
  t_issue->add_option("--out", out_path);
  t_issue->callback([&] { action = [&] { return satt_issue(ctx, key_path, body_path, out_path); }; });
  auto* t_self = satt->add_subcommand("self", "Build a self-sattestation");
  t_self->add_option("--key", key_path)->required();
  t_self->add_option("--domain", domain)->required();
  t_self->add_option("--fp", fps, "Certificate fingerprint (repeatable)");
  t_self->add_option("--label", labels, "Label (repeatable)");
  t_self->add_option("--issued", issued);
  t_self->add_option("--refreshed", refreshed);
  t_self->add_option("--rate", rate, "Refresh rate in days");
  t_self->add_option("--out", out_path);
  t_self->callback([&] {
    action = [&] {
      return satt_self(ctx, key_path, domain, fps, labels, issued, refreshed, rate, out_path);
    };
  });
  auto* t_verify = satt->add_subcommand("verify", "Check structure and signature");
  t_verify->add_option("--file", file_path)->required();
  t_verify->callback([&] { action = [&] { return satt_verify(ctx, file_path); }; });
  auto* t_fresh = satt->add_subcommand("fresh", "Check binding freshness");
  t_fresh->add_option("--file", file_path)->required();
  t_fresh->add_option("--binding", binding_index);
  t_fresh->callback([&] { action = [&] { return satt_fresh(ctx, file_path, binding_index); }; });

  // verify
  std::string url, cert_path, header_path;
  auto* verify = app.add_subcommand("verify", "Validate a SATA connection");
  verify->add_option("--url", url)->required();
  verify->add_option("--cert", cert_path, "PEM or DER certificate")->required();
  verify->add_option("--header", header_path, "Served x-sata credential")->required();
  verify->callback([&] { action = [&] { return verify_cmd(ctx, url, cert_path, header_path); }; });

  // trust
  auto* trust = app.add_subcommand("trust", "Contextual trust");
  trust->require_subcommand(1);
  std::string policy_path, creds_dir, subject, label;
  auto* t_eval = trust->add_subcommand("eval", "Evaluate a policy for a subject");
  t_eval->add_option("--policy", policy_path)->required();
  t_eval->add_option("--creds", creds_dir, "Directory of .satt files")->required();
  t_eval->add_option("--subject", subject)->required();
  t_eval->add_option("--label", label)->required();
  t_eval->callback([&] {
    action = [&] { return trust_eval(ctx, policy_path, creds_dir, subject, label); };
  });

  // rotate
  auto* rotate = app.add_subcommand("rotate", "Key rotation");
  rotate->require_subcommand(1);
  std::string old_s, new_s;
  double pointer_rate = 3.5;
  auto* r_check = rotate->add_subcommand("check", "Check mutual rotation credentials");
  r_check->add_option("--old", old_s)->required();
  r_check->add_option("--new", new_s)->required();
  r_check->add_option("--creds", creds_dir)->required();
  r_check->callback([&] { action = [&] { return rotate_check(ctx, old_s, new_s, creds_dir); }; });
  auto* r_pointer = rotate->add_subcommand("pointer", "Self-sattestation pointing at the new key");
  r_pointer->add_option("--old", old_s)->required();
  r_pointer->add_option("--new", new_s)->required();
  r_pointer->add_option("--key", key_path, "Old key file")->required();
  r_pointer->add_option("--issued", issued);
  r_pointer->add_option("--rate", pointer_rate);
  r_pointer->add_option("--out", out_path);
  r_pointer->callback([&] {
    action = [&] {
      return rotate_pointer(ctx, old_s, new_s, key_path, issued, pointer_rate, out_path);
    };
  });

  // sim
  auto* simc = app.add_subcommand("sim", "Attack scenario simulator");
  simc->require_subcommand(1);
  std::string fixture, fixtures_dir, browser;
  std::vector<std::string> browsers;
  auto* m_run = simc->add_subcommand("run", "Run one fixture");
  m_run->add_option("--fixture", fixture)->required();
  m_run->add_option("--browser", browser, "legacy | sata-aware | sata-aware+policy | file");
  m_run->callback([&] { action = [&] { return sim_run(ctx, fixture, browser); }; });
  auto* m_matrix = simc->add_subcommand("matrix", "Fixtures x browsers summary table");
  m_matrix->add_option("--fixtures", fixtures_dir)->required();
  m_matrix->add_option("--out", out_path);
  m_matrix->add_option("--browser", browsers, "Repeatable; default: the three built-ins");
  m_matrix->callback([&] {
    action = [&] { return sim_matrix(ctx, fixtures_dir, out_path, browsers); };
  });
  auto* m_track = simc->add_subcommand("track", "Alt-Svc tracking exposure report");
  m_track->add_option("--fixture", fixture)->required();
  m_track->add_option("--browser", browser);
  m_track->callback([&] { action = [&] { return sim_track(ctx, fixture, browser); }; });

  auto* errs = app.add_subcommand("errors", "Exit-code table");
  errs->callback([&] { action = [&] { return errors_table(ctx); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (!action) return kExitUsage;

  try {
    return action();
  } catch (const CLI::ParseError& e) {
    err << "satakit: " << e.what() << '\n';
    if (ctx.json) out << ojson{{"ok", false}, {"error", "Usage"}, {"detail", e.what()}}.dump() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "satakit: " << errc_name(e.code()) << ": " << e.detail() << '\n';
    if (ctx.json) {
      ojson j = {{"ok", false}, {"error", errc_name(e.code())}, {"detail", e.detail()}};
      if (e.position()) j["position"] = *e.position();
      out << j.dump() << '\n';
    }
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "satakit: internal error: " << e.what() << '\n';
    if (ctx.json) out << ojson{{"ok", false}, {"error", "Internal"}, {"detail", e.what()}}.dump() << '\n';
    return kExitInternal;
  }
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace satakit::cli
