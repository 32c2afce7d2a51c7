import json
import os
import pathlib

import pytest

import satakit

ROOT = pathlib.Path(__file__).resolve().parents[2]
FIXTURES = pathlib.Path(os.environ.get("SATAKIT_FIXTURES", ROOT / "fixtures"))
DATA = pathlib.Path(os.environ.get("SATAKIT_TEST_DATA", ROOT / "tests" / "data"))

FACEBOOK = "facebookwkhpilnemxj7asaniu7vnjjbiltxjqhye3mhbshg7kx5tfyd"
SEED = "ab" * 32


def test_onion_roundtrip():
    a = satakit.parse_onion(FACEBOOK + ".onion")
    assert a["label"] == FACEBOOK
    assert a["checksum_hex"] == "d997"
    assert satakit.encode_onion(a["pubkey_hex"]) == FACEBOOK


def test_errors_carry_their_class():
    with pytest.raises(satakit.SatakitError) as info:
        satakit.parse_onion(FACEBOOK[:-1])
    assert info.value.code == "BadLength"
    assert isinstance(info.value, ValueError)


def test_sata_forms():
    k = satakit.keygen(SEED)
    assert satakit.keygen(SEED) == k
    url = satakit.render_sata("news.example", k["onion"], "subdomain")
    s = satakit.parse_sata(url)
    assert s["domain"] == "news.example"
    assert s["expected_sans"][1] == "news.example"
    assert satakit.parse_sata(s["query_form"])["onion"] == k["onion"]


def test_self_sattestation_and_validation():
    fp = (DATA / "sata_cert.fingerprint").read_text().strip()
    import hashlib

    seed = hashlib.sha256(b"sattestora.info").hexdigest()
    header = satakit.make_self_sattestation(
        seed, "sattestora.info", [fp], ["news"], "2020-06-01", "2020-08-25")
    assert len(header) < 800
    assert satakit.verify_credential(header)["ok"]
    assert satakit.check_freshness(header, "2020-09-01")["fresh"] is False

    url = "https://sattestora.info/?onion=" + json.loads(header)["sattestation"]["sattestor_onion"]
    cert = (DATA / "sata_cert.der").read_bytes()
    assert satakit.validate_connection(url, cert, header, "2020-08-26")["verdict"] == "Accept"
    assert satakit.validate_connection(url, cert, header, "2020-09-26")["verdict"] == "RejectStale"

    tampered = header.replace('"news"', '"nevs"')
    assert satakit.verify_credential(tampered)["error"] == "BadSignature"


def test_canonical_body_is_stable():
    two_binding = (DATA / "two_binding.satt").read_text()
    assert satakit.canonical_body(two_binding) == (DATA / "two_binding_body.golden").read_text()


def test_attack_matrix_matches_golden():
    rows = satakit.run_matrix(FIXTURES / "attacks", "2022-03-01")
    golden = json.loads((DATA / "attack_matrix.golden.json").read_text())
    assert rows == golden
    assert all(r["silent_attacker_success"] == (r["browser"] == "legacy") for r in rows)


def test_tracking_report():
    fixture = FIXTURES / "tracking" / "per-user-alt-svc.json"
    legacy = satakit.track_alt_svc(fixture, "2022-03-01", "legacy")
    assert legacy["origins"][0]["distinguishable"] is True
    assert satakit.track_alt_svc(fixture, "2022-03-01", "sata-aware") == {"origins": []}


def test_run_scenario():
    out = satakit.run_scenario(FIXTURES / "attacks" / "attack2-onion-location.json", "legacy",
                               "2022-03-01")
    assert out and out[-1]["attacker_controlled"] is True
