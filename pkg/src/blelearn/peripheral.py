"""Simulated BLE peripheral: the concrete-packet face of a catalog entry.

The device advances an internal behavior machine, but it talks packets:
requests are parsed by their most specific layer, pairing values are
checked for real (a confirm that does not match the following random is
rejected), responses come back as multisets of parsed packets, and the
encrypted region seals responses with the device's session key.

Quirks:
  - crash_on_bad_enc (CC2650): any encrypted packet other than the
    expected start-encryption response, received while the encryption
    start is pending, kills the device until a hard reset;
  - pairing_fatigue (CC2640R2): after FATIGUE_THRESHOLD pairing requests
    the affected response degrades, with relapses every FATIGUE_WINDOW
    further pairing requests; hard reset clears the count;
  - slow_responder (nRF52832): response packets arrive on every second
    listen attempt (see the response-collection loop in session.py).
"""

from __future__ import annotations

from typing import Optional

from .catalog import CatalogEntry, FATIGUE_THRESHOLD, FATIGUE_WINDOW, entry
from .mapper import REQUEST_LAYER_TO_SYMBOL, confirm_value, session_key
from .mixing import mix
from .packets import ConcretePacket, preset
from .symbols import EMPTY, PAUSE_ENC, TERMINATE

_RADIO_LEVEL = {"scan_req", "connection_req"}

# response tokens that carry key material in their fields
_KEYED_FIELDS = ("SM_CONFIRM", "SM_RANDOM", "LL_ENC_RSP")


class PeripheralDevice:
    """One simulated SoC running one procedure."""

    def __init__(self, soc_id: str, procedure: str, quirks_on: bool = False):
        self.entry: CatalogEntry = entry(soc_id, procedure)
        self.quirks_on = quirks_on
        self.soc_seed = mix(sum(soc_id.encode()), len(soc_id))
        self.state = self.entry.machine.initial
        self.crashed = False
        self.enc_active = False
        self.session_key: Optional[int] = None
        self.stored_confirm: Optional[int] = None
        self.pairing_seen = 0
        # the device's own halves of the toy key schedule
        self.dev_random = mix(self.soc_seed, 0x52414E44)
        self.dev_skd = mix(self.soc_seed, preset("skd_seed"))
        self._response_cache: dict = {}

    @property
    def soc_id(self) -> str:
        return self.entry.soc_id

    def hard_reset(self) -> None:
        self.crashed = False
        self.state = self.entry.machine.initial
        self.enc_active = False
        self.session_key = None
        self.stored_confirm = None
        self.pairing_seen = 0

    # -- quirk predicates ---------------------------------------------------

    def _fatigued(self) -> bool:
        if not (self.quirks_on and "pairing_fatigue" in self.entry.quirks):
            return False
        n = self.pairing_seen
        if n < FATIGUE_THRESHOLD:
            return False
        return ((n - FATIGUE_THRESHOLD) // FATIGUE_WINDOW) % 2 == 0

    def _crash_armed(self) -> bool:
        return (self.quirks_on and "crash_on_bad_enc" in self.entry.quirks
                and self.state == self.entry.crash_state)

    # -- the wire -----------------------------------------------------------

    def transmit(self, pkt: ConcretePacket) -> list:
        """Process one incoming packet, return the response multiset."""
        if self.crashed:
            return []
        symbol = REQUEST_LAYER_TO_SYMBOL.get(pkt.top)
        if symbol is None or symbol not in self.entry.machine.edges_index:
            return []
        if pkt.enc_key is not None:
            if self._crash_armed() and symbol == PAUSE_ENC:
                # a key change is the one encrypted message the pending
                # encryption start cannot stomach
                self.crashed = True
                return []
            if not self.enc_active or pkt.enc_key != self.session_key:
                return []  # cannot decrypt; ignore
        elif self.enc_active and symbol not in _RADIO_LEVEL \
                and symbol != TERMINATE:
            return []  # plaintext on an encrypted link; ignore
        seal = self.enc_active

        if symbol in _RADIO_LEVEL or symbol == TERMINATE:
            self.enc_active = False
            self.session_key = None
            self.stored_confirm = None
            seal = False

        nxt, out = self.entry.machine.edges[(self.state, symbol)]

        if symbol == "legacy_pairing_req":
            self.pairing_seen += 1
            if out == "SM_PAIRING_RSP" and self._fatigued() \
                    and self.entry.fatigue_rejects_pairing:
                return self._respond("SM_FAILED", symbol, seal)
        if self.entry.fatigue_cell and self._fatigued():
            cell_state, cell_input, degraded = self.entry.fatigue_cell
            if self.state == cell_state and symbol == cell_input:
                self.state = nxt
                return self._respond(degraded, symbol, seal)
        if symbol == "confirm" and out == "SM_CONFIRM":
            self.stored_confirm = pkt.fields.get("confirm")
        if symbol == "random" and out == "SM_RANDOM":
            claimed = pkt.fields.get("random", 0)
            if self.stored_confirm != confirm_value(claimed):
                self.state = self.entry.pairing_restart_state
                self.stored_confirm = None
                return self._respond("SM_FAILED", symbol, seal)
        if symbol == "encryption_req" and "LL_START_ENC_REQ" in out:
            self.session_key = session_key(pkt.fields.get("skd", 0),
                                           self.dev_skd)
            self.enc_active = True
        if symbol == PAUSE_ENC and out == "LL_PAUSE_ENC_RSP":
            self.enc_active = False
            self.session_key = None

        self.state = nxt
        return self._respond(out, symbol, seal)

    # -- response expansion ---------------------------------------------------

    def _respond(self, out: str, symbol: str, seal: bool) -> list:
        key = (out, symbol, self.state, seal, self.session_key)
        cached = self._response_cache.get(key)
        if cached is None:
            cached = self._expand(out, symbol, seal)
            self._response_cache[key] = cached
        return cached

    def _expand(self, out: str, symbol: str, seal: bool) -> list:
        if out == EMPTY:
            return []
        if out == "ADV":
            # both valid scan-response forms occur, chosen per state
            form = "ADV_IND" if mix(self.soc_seed, hash_state(self.state)) % 2 \
                else "SCAN_RSP"
            return [ConcretePacket((form,), {"addr": preset("scan_addr")})]
        tokens = out.split(",")
        packets = [ConcretePacket((tok,), self._fields_for(tok))
                   for tok in tokens]
        if "BTLE_DATA" in tokens:
            extra = mix(self.soc_seed, hash_state(self.state),
                        sum(symbol.encode())) % 3
            packets.extend(ConcretePacket(("BTLE_DATA",), {})
                           for _ in range(extra))
        packets = packets[:7]
        if seal and self.session_key is not None:
            packets = [p.encrypted_with(self.session_key) for p in packets]
        return packets

    def _fields_for(self, token: str) -> dict:
        if token == "SM_CONFIRM":
            return {"confirm": confirm_value(self.dev_random)}
        if token == "SM_RANDOM":
            return {"random": self.dev_random}
        if token == "LL_ENC_RSP":
            return {"skd": self.dev_skd}
        if token == "LL_VERSION_IND":
            return {"version": preset("version"), "company": preset("company")}
        return {}


def hash_state(state) -> int:
    if isinstance(state, int):
        return state
    return sum(str(state).encode())
