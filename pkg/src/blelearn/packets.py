"""Concrete packet representation and the preset-value constants table.

A packet is an ordered stack of layer tags plus a flat field map, close
to how a parsed BLE frame prints. Requests built by the mapper always
carry the BTLE base layer first; simulated peripherals answer with
already-parsed response packets whose tag lists carry exactly the layers
the abstraction will merge.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional


@dataclass(frozen=True)
class ConcretePacket:
    layers: tuple
    fields: dict = field(default_factory=dict, hash=False)
    # toy-encryption marker: the 64-bit session key the packet is sealed
    # with, or None for plaintext
    enc_key: Optional[int] = None

    def __post_init__(self):
        if not self.layers:
            raise ValueError("packet needs at least one layer")

    @property
    def top(self) -> str:
        return self.layers[-1]

    def has_layer(self, tag: str) -> bool:
        return tag in self.layers

    def encrypted_with(self, key: int) -> "ConcretePacket":
        return ConcretePacket(self.layers, dict(self.fields), key)

    def __repr__(self):
        label = "/".join(self.layers)
        enc = f" enc={self.enc_key:#x}" if self.enc_key is not None else ""
        return f"<pkt {label}{enc}>"


def _load_constants():
    with resources.files("blelearn.data").joinpath("constants.json").open() as fh:
        return json.load(fh)


_CONSTANTS = _load_constants()

CONSTANTS_VERSION: str = _CONSTANTS["version"]
PRESETS: dict = _CONSTANTS["fields"]


def preset(name: str):
    return PRESETS[name]
