"""Generates an X.509 certificate for the sattestora.info SATA and records
its DER SHA-256 fingerprint, using the `cryptography` package only."""
import datetime
import hashlib
import os

from cryptography import x509
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey
from cryptography.x509.oid import NameOID

from credential_oracle import onion_for, seed_for

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")


def make(domain, sans, not_before, not_after, name):
    key = Ed25519PrivateKey.from_private_bytes(hashlib.sha256(b"cert key " + name.encode()).digest())
    subject = x509.Name([x509.NameAttribute(NameOID.COMMON_NAME, domain)])
    cert = (
        x509.CertificateBuilder()
        .subject_name(subject)
        .issuer_name(subject)
        .public_key(key.public_key())
        .serial_number(int.from_bytes(hashlib.sha256(name.encode()).digest()[:8], "big"))
        .not_valid_before(not_before)
        .not_valid_after(not_after)
        .add_extension(x509.SubjectAlternativeName([x509.DNSName(s) for s in sans]), False)
        .sign(key, None)
    )
    der = cert.public_bytes(serialization.Encoding.DER)
    with open(os.path.join(DATA, name + ".pem"), "wb") as f:
        f.write(cert.public_bytes(serialization.Encoding.PEM))
    with open(os.path.join(DATA, name + ".der"), "wb") as f:
        f.write(der)
    fp = hashlib.sha256(der).hexdigest().upper()
    with open(os.path.join(DATA, name + ".fingerprint"), "w") as f:
        f.write(fp + "\n")
    print(name, fp, len(der))


if __name__ == "__main__":
    d = "sattestora.info"
    o = onion_for(d)
    start = datetime.datetime(2020, 1, 1)
    end = datetime.datetime(2030, 1, 1)
    make(d, [o + "onion." + d, d, o + ".onion"], start, end, "sata_cert")
    make(d, [d], start, end, "plain_cert")
