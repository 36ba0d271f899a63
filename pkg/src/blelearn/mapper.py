"""Bidirectional abstraction between learning symbols and concrete packets.

Downstream: an abstract input becomes one concrete packet with preset
field values from the constants table. Upstream: a multiset of response
packets is merged into one abstract output string by flattening all
layer tags, deduplicating, sorting alphabetically and comma-joining.
Merging this way keeps the observed output deterministic even when the
packets arrive in a different order.

The mapper is stateful across a pairing handshake: it stores the random
and confirm values plus both halves of the session-key material, marks
when encryption is live, and then seals/unseals packets with the toy
session key.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .mixing import mix
from .packets import ConcretePacket, preset, CONSTANTS_VERSION
from .symbols import (ADV, DECRYPT_ERROR, EMPTY, PAUSE_ENC,
                      SCAN_RESPONSE_LAYERS, TERMINATE)


class MapperError(Exception):
    pass


class UnknownSymbolError(MapperError):
    def __init__(self, symbol):
        super().__init__(f"no concretization for symbol {symbol!r}")
        self.symbol = symbol


_PARAMS_KEY = mix(preset("pairing_seed"), preset("auth_req"), preset("max_key_size"))

# domain separator folded into the local random when a new handshake starts
_HANDSHAKE_TAG = 0x50414952


def confirm_value(own_random: int) -> int:
    """Toy confirm: mixes the sender's own random value with the preset
    connection parameters, so the peer can check the later-revealed
    random against it."""
    return mix(own_random, _PARAMS_KEY)


def session_key(skd_a: int, skd_b: int) -> int:
    return mix(skd_a, skd_b)


@dataclass
class MapperState:
    local_random: int = field(default_factory=lambda: mix(
        preset("local_random_seed"), preset("pairing_seed")))
    local_skd: int = field(default_factory=lambda: mix(
        preset("skd_seed"), preset("pairing_seed")))
    iv: int = field(default_factory=lambda: mix(preset("iv_seed")))
    remote_random: int = 0
    remote_confirm: int = 0
    remote_skd: int = 0
    encryption_enabled: bool = False
    key: Optional[int] = None

    def reset(self):
        fresh = MapperState()
        self.local_random = fresh.local_random
        self.local_skd = fresh.local_skd
        self.iv = fresh.iv
        self.remote_random = 0
        self.remote_confirm = 0
        self.remote_skd = 0
        self.encryption_enabled = False
        self.key = None


def reset_mapper(ms: MapperState) -> None:
    ms.reset()


# symbol -> (layer stack, field presets); the BTLE base layer heads every
# request the central crafts
_REQUESTS = {
    "scan_req": (("BTLE", "SCAN_REQ"), ("scan_addr",)),
    "connection_req": (("BTLE", "CONNECT_REQ"),
                       ("access_addr", "interval", "timeout")),
    "length_req": (("BTLE", "BTLE_DATA", "BTLE_CTRL", "LL_LENGTH_REQ"),
                   ("max_tx_bytes", "max_rx_bytes", "max_tx_time", "max_rx_time")),
    "length_rsp": (("BTLE", "BTLE_DATA", "BTLE_CTRL", "LL_LENGTH_RSP"),
                   ("max_tx_bytes", "max_rx_bytes", "max_tx_time", "max_rx_time")),
    "feature_req": (("BTLE", "BTLE_DATA", "BTLE_CTRL", "LL_FEATURE_REQ"),
                    ("feature_set",)),
    "feature_rsp": (("BTLE", "BTLE_DATA", "BTLE_CTRL", "LL_FEATURE_RSP"),
                    ("feature_set",)),
    "version_req": (("BTLE", "BTLE_DATA", "BTLE_CTRL", "LL_VERSION_IND"),
                    ("version", "company")),
    "mtu_req": (("BTLE", "BTLE_DATA", "L2CAP_Hdr", "ATT_Hdr",
                 "ATT_Exchange_MTU_Request"), ("mtu",)),
    "legacy_pairing_req": (("BTLE", "BTLE_DATA", "L2CAP_Hdr", "SM_Hdr",
                            "SM_Pairing_Request"),
                           ("io_cap", "oob", "auth_req", "max_key_size",
                            "initiator_key_distribution",
                            "responder_key_distribution")),
    "confirm": (("BTLE", "BTLE_DATA", "L2CAP_Hdr", "SM_Hdr", "SM_Confirm"), ()),
    "random": (("BTLE", "BTLE_DATA", "L2CAP_Hdr", "SM_Hdr", "SM_Random"), ()),
    "encryption_req": (("BTLE", "BTLE_DATA", "BTLE_CTRL", "LL_ENC_REQ"),
                       ("rand", "ediv")),
    "start_encryption_rsp": (("BTLE", "BTLE_DATA", "BTLE_CTRL",
                              "LL_START_ENC_RSP"), ()),
    TERMINATE: (("BTLE", "BTLE_DATA", "BTLE_CTRL", "LL_TERMINATE_IND"),
                ("error_code",)),
    PAUSE_ENC: (("BTLE", "BTLE_DATA", "BTLE_CTRL", "LL_PAUSE_ENC_REQ"), ()),
}

# radio-level exchanges stay outside the encrypted data channel
_NEVER_ENCRYPTED = {"scan_req", "connection_req"}

# the device's packet parser keys off the most specific request layer
REQUEST_LAYER_TO_SYMBOL = {layers[-1]: sym for sym, (layers, _f) in _REQUESTS.items()}


_PLAIN_CACHE: dict = {}


def concretize(ms: MapperState, symbol: str) -> ConcretePacket:
    if symbol not in _REQUESTS:
        raise UnknownSymbolError(symbol)
    stateful = symbol in ("confirm", "random", "encryption_req")
    if not stateful and not ms.encryption_enabled:
        pkt = _PLAIN_CACHE.get(symbol)
        if pkt is None:
            layers, field_names = _REQUESTS[symbol]
            pkt = ConcretePacket(layers, {n: preset(n) for n in field_names})
            _PLAIN_CACHE[symbol] = pkt
        return pkt
    layers, field_names = _REQUESTS[symbol]
    fields = {name: preset(name) for name in field_names}
    if symbol == "confirm":
        fields["confirm"] = confirm_value(ms.local_random)
    elif symbol == "random":
        fields["random"] = ms.local_random
    elif symbol == "encryption_req":
        fields["skd"] = ms.local_skd
        fields["iv"] = ms.iv
    pkt = ConcretePacket(layers, fields)
    if ms.encryption_enabled and symbol not in _NEVER_ENCRYPTED:
        pkt = pkt.encrypted_with(ms.key)
    return pkt


def abstract(ms: MapperState, response: Iterable[ConcretePacket]) -> str:
    """Merge a response multiset into one abstract output symbol and fold
    any key material it carries into the mapper state."""
    packets = list(response)
    if not packets:
        return EMPTY
    tags = set()
    for pkt in packets:
        if pkt.enc_key is not None:
            if not ms.encryption_enabled or pkt.enc_key != ms.key:
                return DECRYPT_ERROR
        tags.update(pkt.layers)
        _observe(ms, pkt)
    if tags <= SCAN_RESPONSE_LAYERS:
        return ADV
    return ",".join(sorted(tags))


def _observe(ms: MapperState, pkt: ConcretePacket) -> None:
    if pkt.has_layer("SM_PAIRING_RSP"):
        # a new handshake begins: fresh random, stale peer values dropped
        ms.local_random = mix(ms.local_random, _HANDSHAKE_TAG)
        ms.remote_confirm = 0
        ms.remote_random = 0
    if pkt.has_layer("SM_CONFIRM"):
        ms.remote_confirm = pkt.fields.get("confirm", 0)
    if pkt.has_layer("SM_RANDOM"):
        ms.remote_random = pkt.fields.get("random", 0)
    if pkt.has_layer("LL_ENC_RSP"):
        ms.remote_skd = pkt.fields.get("skd", 0)
    if pkt.has_layer("LL_START_ENC_REQ") and ms.remote_skd:
        ms.key = session_key(ms.local_skd, ms.remote_skd)
        ms.encryption_enabled = True
    if pkt.has_layer("LL_PAUSE_ENC_RSP"):
        # the key-change is acknowledged: the link is back in the clear
        ms.encryption_enabled = False
        ms.key = None


def constants_version() -> str:
    return CONSTANTS_VERSION
