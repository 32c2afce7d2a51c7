"""Self-authenticating traditional addresses: onion math, SATA parsing,
sattestation credentials, connection validation, trust and the attack
simulator."""

import json as _json

from ._core import (  # noqa: F401
    SatakitError,
    canonical_body,
    check_freshness,
    encode_onion,
    evaluate_trust,
    issue,
    keygen,
    make_self_sattestation,
    parse_onion,
    parse_sata,
    render_sata,
    rotation_check,
    validate_connection,
    verify_credential,
)
from . import _core

__all__ = [
    "SatakitError",
    "canonical_body",
    "check_freshness",
    "encode_onion",
    "evaluate_trust",
    "issue",
    "keygen",
    "make_self_sattestation",
    "parse_onion",
    "parse_sata",
    "render_sata",
    "rotation_check",
    "run_matrix",
    "run_scenario",
    "track_alt_svc",
    "validate_connection",
    "verify_credential",
]


def run_matrix(fixtures_dir, now, browsers=()):
    """Summary rows for every fixture in the directory against each browser."""
    return _json.loads(_core.run_matrix_json(str(fixtures_dir), now, list(browsers)))


def run_scenario(fixture, browser, now):
    """Full outcome of each visit in the fixture, in order."""
    return [_json.loads(o) for o in _core.run_scenario_json(str(fixture), browser, now)]


def track_alt_svc(fixture, now, browser=""):
    return _json.loads(_core.track_alt_svc_json(str(fixture), now, browser))
