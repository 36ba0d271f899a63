"""Abstract input alphabets and canonical output tokens.

Input names follow the link-layer / security-manager requests a central
can send; responses from the central (feature_rsp, length_rsp,
start_encryption_rsp) count as inputs too, because the peripheral may
initiate those exchanges itself.
"""

from __future__ import annotations

# Connection-procedure learning alphabet.
CONNECTION_ALPHABET = (
    "scan_req",
    "connection_req",
    "length_req",
    "length_rsp",
    "feature_req",
    "feature_rsp",
    "version_req",
    "mtu_req",
    "legacy_pairing_req",
)

# Pairing-procedure learning alphabet.
PAIRING_ALPHABET = (
    "legacy_pairing_req",
    "confirm",
    "random",
    "encryption_req",
    "start_encryption_rsp",
)

# Out-of-alphabet control inputs used by the reset machinery.
TERMINATE = "terminate_ind"
PAUSE_ENC = "pause_encryption_req"

RESET_INPUT = "scan_req"

# Canonical output tokens (merged-layer strings use these, comma-joined
# in alphabetical order).
EMPTY = "EMPTY"
ADV = "ADV"
DECRYPT_ERROR = "DECRYPT_ERROR"

# The two valid scan-response packet layers; both map to ADV.
SCAN_RESPONSE_LAYERS = frozenset({"ADV_IND", "SCAN_RSP"})


def procedure_alphabet(procedure: str) -> tuple:
    if procedure == "connection":
        return CONNECTION_ALPHABET
    if procedure == "pairing":
        return PAIRING_ALPHABET
    raise ValueError(f"unknown procedure: {procedure!r}")
