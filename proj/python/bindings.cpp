#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "satakit/credential.hpp"
#include "satakit/error.hpp"
#include "satakit/fixture.hpp"
#include "satakit/onion.hpp"
#include "satakit/sata.hpp"
#include "satakit/sim.hpp"
#include "satakit/trust.hpp"
#include "satakit/validation.hpp"

namespace py = pybind11;
using namespace satakit;

namespace {

py::dict sata_dict(const Sata& s) {
  py::dict d;
  d["domain"] = s.domain;
  d["onion"] = s.onion.label();
  d["form"] = std::string(sata_form_name(s.form));
  d["subdomain_form"] = to_subdomain_form(s);
  d["query_form"] = to_query_form(s);
  d["expected_sans"] = expected_sans(s);
  return d;
}

std::vector<Sattestation> parse_all(const std::vector<std::string>& transports) {
  std::vector<Sattestation> out;
  out.reserve(transports.size());
  for (const auto& t : transports) out.push_back(parse_sattestation(t));
  return out;
}

sim::BrowserConfig browser_from(const std::string& spec) {
  if (!spec.empty() && spec.front() == '{') return sim::parse_browser_config(spec);
  return sim::builtin_browser(spec);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SATA toolkit core";

  static py::exception<Error> error_type(m, "SatakitError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(errc_name(e.code()));
      exc.attr("detail") = e.detail();
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("parse_onion", [](const std::string& text) {
    OnionAddress a = parse_onion(text);
    py::dict d;
    d["label"] = a.label();
    d["host"] = a.host();
    d["pubkey_hex"] = to_hex(a.public_key());
    d["checksum_hex"] = to_hex(a.checksum());
    d["version"] = a.version();
    return d;
  });
  m.def("encode_onion", [](const std::string& pubkey_hex) {
    return encode_onion(public_key_from_hex(pubkey_hex));
  });
  m.def(
      "keygen",
      [](std::optional<std::string> seed_hex) {
        KeyPair k = seed_hex ? keygen(seed_from_hex(*seed_hex)) : keygen();
        py::dict d;
        d["seed_hex"] = to_hex(k.secret);
        d["pubkey_hex"] = to_hex(k.public_key);
        d["onion"] = k.onion().label();
        return d;
      },
      py::arg("seed_hex") = py::none());

  m.def("parse_sata", [](const std::string& url) { return sata_dict(parse_sata(url)); });
  m.def(
      "render_sata",
      [](const std::string& domain, const std::string& onion, const std::string& form) {
        if (form != "subdomain" && form != "query") {
          throw Error(Errc::ParseError, "form must be subdomain or query");
        }
        return to_url(make_sata(domain, parse_onion(onion),
                                form == "subdomain" ? SataForm::Subdomain : SataForm::QueryString));
      },
      py::arg("domain"), py::arg("onion"), py::arg("form") = "query");

  m.def(
      "make_self_sattestation",
      [](const std::string& seed_hex, const std::string& domain, std::vector<std::string> fps,
         std::vector<std::string> labels, const std::string& issued,
         const std::string& refreshed_on, double rate) {
        return to_transport(make_self_sattestation(keygen(seed_from_hex(seed_hex)), domain,
                                                   std::move(fps), std::move(labels),
                                                   Date::parse(issued), Date::parse(refreshed_on),
                                                   rate));
      },
      py::arg("seed_hex"), py::arg("domain"), py::arg("fingerprints"), py::arg("labels"),
      py::arg("issued"), py::arg("refreshed_on"), py::arg("refresh_rate_days") = 7.0);
  m.def("issue", [](const std::string& seed_hex, const std::string& body_json) {
    return to_transport(issue(keygen(seed_from_hex(seed_hex)), parse_body(body_json)));
  });
  m.def("canonical_body", [](const std::string& transport) {
    Bytes b = canonical_bytes(parse_sattestation(transport).body);
    return std::string(b.begin(), b.end());
  });
  m.def("verify_credential", [](const std::string& transport) {
    Status st = verify_credential(parse_sattestation(transport));
    py::dict d;
    d["ok"] = st.is_ok();
    d["error"] = st ? py::object(py::none()) : py::object(py::str(std::string(errc_name(*st.code()))));
    d["detail"] = st.detail();
    return d;
  });
  m.def(
      "check_freshness",
      [](const std::string& transport, const std::string& now, std::size_t index) {
        Freshness f = check_freshness(parse_sattestation(transport), index, Date::parse(now));
        py::dict d;
        d["fresh"] = f.fresh;
        d["age_days"] = f.age_days;
        d["refresh_rate_days"] = f.refresh_rate_days;
        d["margin_days"] = f.margin_days();
        return d;
      },
      py::arg("transport"), py::arg("now"), py::arg("binding_index") = 0);

  m.def(
      "validate_connection",
      [](const std::string& url, const py::bytes& cert, const std::string& header,
         const std::string& now) {
        std::string raw = cert;
        Verdict v = validate_connection(parse_sata(url),
                                        parse_x509(ByteView(reinterpret_cast<const std::uint8_t*>(
                                                                raw.data()),
                                                            raw.size())),
                                        parse_sattestation(header), Date::parse(now));
        py::dict d;
        d["verdict"] = std::string(verdict_name(v.outcome));
        d["detail"] = v.detail;
        return d;
      },
      py::arg("url"), py::arg("cert"), py::arg("header"), py::arg("now"));

  m.def(
      "evaluate_trust",
      [](const std::string& policy_json, const std::vector<std::string>& creds,
         const std::string& subject, const std::string& label, const std::string& now)
          -> py::object {
        auto chain = evaluate(parse_trust_policy(policy_json), parse_all(creds),
                              parse_sata(subject), label, Date::parse(now));
        if (!chain) return py::none();
        py::list links;
        for (const ChainLink& l : chain->links) {
          py::dict d;
          d["sattestor"] = l.credential.body.sattestor_domain;
          d["subject"] = l.binding().domain;
          d["label"] = l.label;
          links.append(d);
        }
        return links;
      },
      py::arg("policy_json"), py::arg("credentials"), py::arg("subject"), py::arg("label"),
      py::arg("now"));
  m.def("rotation_check", [](const std::string& old_sata, const std::string& new_sata,
                             const std::vector<std::string>& creds, const std::string& now) {
    RotationResult r =
        rotation_check(parse_sata(old_sata), parse_sata(new_sata), parse_all(creds), Date::parse(now));
    py::dict d;
    d["ok"] = r.ok;
    d["detail"] = r.detail;
    return d;
  });

  m.def(
      "run_matrix_json",
      [](const std::string& fixtures_dir, const std::string& now,
         const std::vector<std::string>& browsers) {
        const sim::SimTime t = sim::start_of(Date::parse(now));
        std::vector<sim::BrowserConfig> configs;
        for (const auto& b : browsers) configs.push_back(browser_from(b));
        if (configs.empty()) configs = sim::builtin_browsers();
        auto scenarios = sim::load_scenario_dir(fixtures_dir, t);
        return sim::matrix_summary_json(sim::run_matrix(scenarios, configs, t));
      },
      py::arg("fixtures_dir"), py::arg("now"), py::arg("browsers") = std::vector<std::string>{});
  m.def(
      "run_scenario_json",
      [](const std::string& fixture, const std::string& browser, const std::string& now) {
        const sim::SimTime t = sim::start_of(Date::parse(now));
        sim::Scenario sc = sim::load_scenario_file(fixture, t);
        sim::World w = sc.world;
        w.browser = browser_from(browser);
        std::vector<std::string> out;
        for (const sim::Visit& v : sc.visits) {
          sim::VisitResult r = sim::run_visit(std::move(w), v, t + v.offset_s);
          out.push_back(sim::outcome_to_json(r.outcome));
          w = std::move(r.world);
        }
        return out;
      },
      py::arg("fixture"), py::arg("browser"), py::arg("now"));
  m.def(
      "track_alt_svc_json",
      [](const std::string& fixture, const std::string& now, const std::string& browser) {
        const sim::SimTime t = sim::start_of(Date::parse(now));
        sim::Scenario sc = sim::load_scenario_file(fixture, t);
        if (!browser.empty()) sc.world.browser = browser_from(browser);
        return sim::tracking_report_to_json(sim::track_alt_svc_exposure(sc.world, sc.visits, t));
      },
      py::arg("fixture"), py::arg("now"), py::arg("browser") = "");
}
