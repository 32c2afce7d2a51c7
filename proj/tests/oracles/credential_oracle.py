"""Independent oracle for canonical sattestation bytes and transport size.

Builds the compact fixed-key-order JSON with the stdlib json module and signs
with the `cryptography` package. Writes golden files under tests/data/.
"""
import hashlib
import json
import os
import sys

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey

from onion_oracle import encode, raw_pub

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")


def seed_for(name: str) -> bytes:
    return hashlib.sha256(name.encode()).digest()


def onion_for(name: str) -> str:
    return encode(raw_pub(seed_for(name)))


def rate(days: float) -> str:
    return (str(int(days)) if float(days).is_integer() else repr(days)) + " days"


def binding(domain, onion, labels=(), fps=(), issued="", refreshed=""):
    b = {"domain": domain, "onion": onion}
    if labels:
        b["labels"] = ",".join(labels)
    if fps:
        b["cert_fingerprint"] = list(fps)
    b["issued"] = issued
    b["refreshed_on"] = refreshed
    return b


def body(sattestor, rate_days, sattestees):
    return {"sattestation": {
        "sattestation_version": 1,
        "sattestor_domain": sattestor,
        "sattestor_onion": onion_for(sattestor),
        "sattestor_refresh_rate": rate(rate_days),
        "sattestees": sattestees,
    }}


def canonical(b) -> bytes:
    return json.dumps(b, separators=(",", ":"), ensure_ascii=False).encode()


def transport(b, signer) -> bytes:
    sig = Ed25519PrivateKey.from_private_bytes(seed_for(signer)).sign(canonical(b))
    t = dict(b)
    t["signature"] = sig.hex()
    return canonical(t)


FP1 = "632B119944" + hashlib.sha256(b"fp1").hexdigest().upper()[:54]
FP2 = "23964A1368" + hashlib.sha256(b"fp2").hexdigest().upper()[:54]

if __name__ == "__main__":
    two_binding = body("sattestora.info", 7, [
        binding("domain1.info", onion_for("domain1.info"), ["news"], (), "2020-06-01", "2020-08-25"),
        binding("domain2.info", onion_for("domain2.info"), ["union"], (), "2020-06-01", "2020-08-25"),
    ])
    selfs = body("sattestora.info", 7, [
        binding("sattestora.info", onion_for("sattestora.info"), ["news"], (FP1, FP2),
                "2020-06-01", "2020-08-25"),
    ])
    outputs = {
        "two_binding_body.golden": canonical(two_binding),
        "two_binding.satt": transport(two_binding, "sattestora.info"),
        "self_sattestation.satt": transport(selfs, "sattestora.info"),
    }
    for name, data in outputs.items():
        with open(os.path.join(DATA, name), "wb") as f:
            f.write(data)
        print(name, len(data))
    print("FP1", FP1)
    print("FP2", FP2)
    for n in ("sattestora.info", "domain1.info", "domain2.info"):
        print(n, seed_for(n).hex(), onion_for(n))
    sys.stdout.write(outputs["self_sattestation.satt"].decode() + "\n")
