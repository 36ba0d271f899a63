"""Ground-truth behavior machines for the six simulated SoCs.

Each catalog entry carries the full device machine (over the learning
alphabet plus the reset inputs), the learning view (which alphabet the
learner drives and from which state), and the quirk hooks the engine
honors. Two connection machines (CYW43455, CC2640R2) have no published
full structure; they are synthesized under the documented constraints
and flagged `synthetic` in the manifest.

Output tokens are the abbreviated layer names the evaluation tables use
(BTLE_DATA, LL_VERSION_IND, ...). Multi-packet responses appear as
comma-joined, alphabetically sorted token strings, which is exactly what
the mapper produces after merging.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import mealy
from .symbols import (CONNECTION_ALPHABET, PAIRING_ALPHABET, PAUSE_ENC,
                      TERMINATE)

SOC_IDS = ("CC2640R2", "CC2650", "CC2652R1", "CYBLE-416045-02",
           "CYW43455", "nRF52832")

CONNECTION_DEVICE_INPUTS = CONNECTION_ALPHABET + (TERMINATE, PAUSE_ENC)
PAIRING_DEVICE_INPUTS = PAIRING_ALPHABET + (
    "scan_req", "connection_req", "feature_req", TERMINATE, PAUSE_ENC)

# pairing-fatigue quirk (CC2640R2): after FATIGUE_THRESHOLD observed
# pairing requests the affected behavior degrades, recovering and
# relapsing every FATIGUE_WINDOW further requests; a hard reset clears
# the count
FATIGUE_THRESHOLD = 30
FATIGUE_WINDOW = 20


@dataclass(frozen=True)
class CatalogEntry:
    soc_id: str
    procedure: str
    machine: mealy.MealyMachine = field(hash=False)
    learn_alphabet: tuple
    learn_initial: str
    reset_profile: str           # advertising | connected | pairing_ready
    state_count: int             # states of the learning view
    synthetic: bool
    quirks: tuple
    # engine hooks
    crash_state: Optional[str] = None          # crash-on-bad-enc trigger state
    fatigue_cell: Optional[tuple] = None       # (state, input, degraded output)
    fatigue_rejects_pairing: bool = False
    pairing_restart_state: Optional[str] = None
    enc_pending_state: Optional[str] = None    # state entered by encryption_req
    response_stride: int = 1                   # listen attempts between packets

    def reference_machine(self) -> mealy.MealyMachine:
        view = mealy.restrict(self.machine, self.learn_alphabet,
                              initial=self.learn_initial)
        return mealy.relabel(view)


def _rows(states, inputs, explicit, defaults):
    """Fill every (state, input) cell: explicit edges win, the rest are
    self-loops with the state's default output."""
    table = {}
    for s in states:
        table[s] = {}
        for i in inputs:
            if (s, i) in explicit:
                table[s][i] = explicit[(s, i)]
            else:
                table[s][i] = (s, defaults[s])
    return table


def _connection_machine(states, explicit, defaults, entry_state,
                        connect_out="BTLE_DATA", adv="adv"):
    """Shared shape of a connection-procedure device: every state answers
    scan_req with ADV and homes to advertising, terminate_ind homes
    silently, and pause encryption is never meaningful."""
    ex = dict(explicit)
    for s in states:
        ex.setdefault((s, "scan_req"), (adv, "ADV"))
        ex.setdefault((s, TERMINATE), (adv, "EMPTY"))
        if s == adv:
            ex.setdefault((s, "connection_req"), (entry_state, connect_out))
            ex.setdefault((s, PAUSE_ENC), (s, "EMPTY"))
        else:
            ex.setdefault((s, "connection_req"), (entry_state, "BTLE_DATA"))
            ex.setdefault((s, PAUSE_ENC), (s, "LL_UNKNOWN_RSP"))
    table = _rows(states, CONNECTION_DEVICE_INPUTS, ex, defaults)
    return mealy.build(adv, CONNECTION_DEVICE_INPUTS, table)


def _cc2650_connection():
    # Five states: advertising, connected, paired, version-answered, both.
    # An unsolicited length response is answered LL_UNKNOWN_RSP and the
    # state is kept; a second pairing request fails and drops the pairing;
    # the version indication is answered exactly once.
    states = ("adv", "c", "p", "v", "pv")
    defaults = {"adv": "EMPTY", "c": "BTLE_DATA", "p": "BTLE_DATA",
                "v": "BTLE_DATA", "pv": "BTLE_DATA"}
    ex = {}
    for s in ("c", "p", "v", "pv"):
        ex[(s, "length_req")] = (s, "LL_UNKNOWN_RSP")
        ex[(s, "length_rsp")] = (s, "LL_UNKNOWN_RSP")
    ex[("c", "legacy_pairing_req")] = ("p", "SM_PAIRING_RSP")
    ex[("c", "version_req")] = ("v", "LL_VERSION_IND")
    ex[("p", "legacy_pairing_req")] = ("c", "SM_FAILED")
    ex[("p", "version_req")] = ("pv", "LL_VERSION_IND")
    ex[("v", "legacy_pairing_req")] = ("pv", "SM_PAIRING_RSP")
    ex[("pv", "legacy_pairing_req")] = ("v", "SM_FAILED")
    return _connection_machine(states, ex, defaults, "c")


def _nrf52832_connection():
    # Device truth: a pristine power-on advertising state (a
    # security-manager header rides on the very first connection only)
    # in front of the learned five-state structure: re-advertising,
    # connected, and the mtu/version exchange lattice. An unsolicited
    # length response resets the whole connection procedure. Soft resets
    # land on re-advertising, so the learning view is rooted there and
    # never sees the pristine state.
    states = ("adv", "readv", "c", "m", "v", "mv")
    defaults = {"adv": "EMPTY", "readv": "EMPTY", "c": "BTLE_DATA",
                "m": "BTLE_DATA", "v": "BTLE_DATA", "mv": "BTLE_DATA"}
    ex = {
        ("adv", "scan_req"): ("adv", "ADV"),
        ("adv", "connection_req"): ("c", "SM_HDR"),
        ("adv", TERMINATE): ("adv", "EMPTY"),
        ("readv", "scan_req"): ("readv", "ADV"),
        ("readv", "connection_req"): ("c", "BTLE_DATA"),
        ("readv", TERMINATE): ("readv", "EMPTY"),
    }
    for s in ("c", "m", "v", "mv"):
        ex[(s, "scan_req")] = ("readv", "ADV")
        ex[(s, TERMINATE)] = ("readv", "EMPTY")
        ex[(s, "length_rsp")] = ("readv", "BTLE_DATA")
        ex[(s, "length_req")] = (s, "LL_LENGTH_RSP")
        ex[(s, "feature_rsp")] = (s, "LL_UNKNOWN_RSP")
        ex[(s, "connection_req")] = ("c", "BTLE_DATA")
    ex[("c", "version_req")] = ("v", "LL_VERSION_IND")
    ex[("c", "mtu_req")] = ("m", "ATT_MTU_RSP")
    ex[("m", "version_req")] = ("mv", "LL_VERSION_IND")
    ex[("m", "mtu_req")] = ("m", "ATT_MTU_ERR")
    ex[("v", "version_req")] = ("v", "BTLE_DATA")
    ex[("v", "mtu_req")] = ("mv", "ATT_MTU_RSP")
    ex[("mv", "version_req")] = ("mv", "BTLE_DATA")
    ex[("mv", "mtu_req")] = ("mv", "ATT_MTU_ERR")
    return _connection_machine(states, ex, defaults, "c", adv="adv")


def _cyble_connection():
    # Three states; unsolicited feature responses are rejected outright.
    states = ("adv", "c", "v")
    defaults = {"adv": "EMPTY", "c": "BTLE_DATA", "v": "BTLE_DATA"}
    ex = {}
    for s in ("c", "v"):
        ex[(s, "feature_rsp")] = (s, "LL_REJECT_IND")
        ex[(s, "length_req")] = (s, "LL_UNKNOWN_RSP")
        ex[(s, "length_rsp")] = (s, "LL_UNKNOWN_RSP")
    ex[("c", "version_req")] = ("v", "LL_VERSION_IND")
    return _connection_machine(states, ex, defaults, "c")


def _cc2652r1_connection():
    # Post-connection lattice of two independent facts: paired or not,
    # and whether the device's own length request (triggered by an
    # incoming feature response) is outstanding. The version indication
    # is answered in every state.
    states = ["adv", "s00", "s10", "s01", "s11"]
    defaults = {s: ("EMPTY" if s == "adv" else "BTLE_DATA") for s in states}
    ex = {}
    for s in ("s00", "s10", "s01", "s11"):
        ex[(s, "version_req")] = (s, "LL_VERSION_IND")
        ex[(s, "length_req")] = (s, "LL_LENGTH_RSP")
    ex[("s00", "legacy_pairing_req")] = ("s10", "SM_PAIRING_RSP")
    ex[("s10", "legacy_pairing_req")] = ("s00", "SM_FAILED")
    ex[("s01", "legacy_pairing_req")] = ("s11", "SM_PAIRING_RSP")
    ex[("s11", "legacy_pairing_req")] = ("s01", "SM_FAILED")
    ex[("s00", "feature_rsp")] = ("s01", "LL_LENGTH_REQ")
    ex[("s10", "feature_rsp")] = ("s11", "LL_LENGTH_REQ")
    ex[("s01", "length_rsp")] = ("s00", "BTLE_DATA")
    ex[("s11", "length_rsp")] = ("s10", "BTLE_DATA")
    return _connection_machine(states, ex, defaults, "s00")


def _cyw43455_connection():
    # Synthesized: sixteen post-connection states from four independent
    # once-only exchanges (pairing, version, mtu, feature response), each
    # observable through its own input. Constrained by the published
    # state count and the post-connection output row.
    bits = [(p, v, m, f) for p in (0, 1) for v in (0, 1)
            for m in (0, 1) for f in (0, 1)]

    def name(b):
        return "s" + "".join(str(x) for x in b)

    states = ["adv"] + [name(b) for b in bits]
    defaults = {s: ("EMPTY" if s == "adv" else "BTLE_DATA") for s in states}
    ex = {}
    for b in bits:
        p, v, m, f = b
        s = name(b)
        ex[(s, "length_req")] = (s, "LL_LENGTH_RSP")
        ex[(s, "length_rsp")] = (s, "LL_REJECT_IND")
        ex[(s, "feature_req")] = (s, "LL_FEATURE_RSP")
        if p == 0:
            ex[(s, "legacy_pairing_req")] = (name((1, v, m, f)), "SM_PAIRING_RSP")
        else:
            ex[(s, "legacy_pairing_req")] = (s, "SM_FAILED")
        if v == 0:
            ex[(s, "version_req")] = (name((p, 1, m, f)), "LL_VERSION_IND")
        if m == 0:
            ex[(s, "mtu_req")] = (name((p, v, 1, f)), "ATT_MTU_RSP")
        else:
            ex[(s, "mtu_req")] = (s, "ATT_MTU_ERR")
        if f == 0:
            ex[(s, "feature_rsp")] = (name((p, v, m, 1)), "ATT_MTU_REQ")
    return _connection_machine(states, ex, defaults, "s0000")


def _cc2640r2_connection():
    # Synthesized around three published fixed points: the device asks
    # for a length exchange at connection time (LL_LENGTH_REQ), the
    # post-connection output row is all BTLE_DATA except length_req, and
    # the five-input query connection_req pairing_req length_rsp
    # length_req feature_req answers LL_FEATURE_RSP at the end. States:
    # c/p for unpaired/paired crossed with 1/0 for device-length-request
    # outstanding/settled, plus cl/pl once the central ran its own length
    # request. The reduced-alphabet views minimize to 3 / 5 / 4 states
    # when pairing_req / length_req / feature_req is dropped.
    states = ("adv", "c1", "c0", "cl", "p1", "p0", "pl")
    defaults = {s: ("EMPTY" if s == "adv" else "BTLE_DATA") for s in states}
    ex = {}
    for s in states[1:]:
        ex[(s, "mtu_req")] = (s, "ATT_MTU_RSP")
    # device-initiated length exchange: outstanding in c1/p1
    ex[("c1", "length_rsp")] = ("c0", "BTLE_DATA")
    ex[("p1", "length_rsp")] = ("p0", "BTLE_DATA")
    for s in ("c0", "cl", "p0", "pl"):
        ex[(s, "length_rsp")] = (s, "LL_UNKNOWN_RSP")
    # central-initiated length exchange
    ex[("c1", "length_req")] = ("c1", "LL_LENGTH_RSP")
    ex[("p1", "length_req")] = ("p1", "LL_LENGTH_RSP")
    ex[("c0", "length_req")] = ("cl", "LL_LENGTH_RSP")
    ex[("p0", "length_req")] = ("pl", "LL_LENGTH_RSP")
    ex[("cl", "length_req")] = ("cl", "LL_LENGTH_RSP")
    ex[("pl", "length_req")] = ("pl", "LL_LENGTH_RSP")
    # feature requests: answered while the exchange is fresh, data-padded
    # otherwise; the pl cell is the fatigue-degraded one
    ex[("c1", "feature_req")] = ("c1", "LL_FEATURE_RSP")
    ex[("p0", "feature_req")] = ("p0", "LL_FEATURE_RSP")
    ex[("pl", "feature_req")] = ("pl", "LL_FEATURE_RSP")
    # pairing: accepted except after a central length exchange
    ex[("c1", "legacy_pairing_req")] = ("p1", "SM_PAIRING_RSP")
    ex[("p1", "legacy_pairing_req")] = ("p1", "SM_PAIRING_RSP")
    ex[("c0", "legacy_pairing_req")] = ("p0", "SM_PAIRING_RSP")
    ex[("p0", "legacy_pairing_req")] = ("p0", "SM_PAIRING_RSP")
    ex[("cl", "legacy_pairing_req")] = ("pl", "SM_FAILED")
    ex[("pl", "legacy_pairing_req")] = ("pl", "SM_FAILED")
    return _connection_machine(states, ex, defaults, "c1",
                               connect_out="LL_LENGTH_REQ")


# ---------------------------------------------------------------------------
# pairing machines
# ---------------------------------------------------------------------------

_KEYS3 = "ENC_INFO,MASTER_ID,SIGNING_INFO"
_KEYS5 = "ENC_INFO,ID_ADDR_INFO,ID_INFO,MASTER_ID,SIGNING_INFO"
_ENC_START = "LL_ENC_RSP,LL_START_ENC_REQ"


def _pairing_machine(states, explicit, defaults, start, pause_anchor,
                     encrypted_states):
    """Shared shape of a pairing-procedure device: resets home to
    advertising, a connection lands in the negotiated start state, and
    feature requests answer as long as the link is not encrypted."""
    adv = "adv"
    ex = dict(explicit)
    for s in states:
        ex.setdefault((s, "scan_req"), (adv, "ADV"))
        ex.setdefault((s, TERMINATE), (adv, "EMPTY"))
        ex.setdefault((s, "connection_req"), (start, "BTLE_DATA"))
        if s == adv:
            ex.setdefault((s, "feature_req"), (s, "EMPTY"))
            ex.setdefault((s, PAUSE_ENC), (s, "EMPTY"))
        elif s in encrypted_states:
            ex.setdefault((s, "feature_req"), (s, "EMPTY"))
            ex.setdefault((s, PAUSE_ENC), (pause_anchor, "LL_PAUSE_ENC_RSP"))
        else:
            ex.setdefault((s, "feature_req"), (s, "LL_FEATURE_RSP"))
            ex.setdefault((s, PAUSE_ENC), (s, "LL_UNKNOWN_RSP"))
    table = _rows(states, PAIRING_DEVICE_INPUTS, ex, defaults)
    return mealy.build(adv, PAIRING_DEVICE_INPUTS, table)


def _cyw43455_pairing():
    states = ("adv", "q0", "q1", "q2", "q3", "q4", "q5")
    defaults = {"adv": "EMPTY", "q0": "BTLE_DATA", "q1": "BTLE_DATA",
                "q2": "BTLE_DATA", "q3": "BTLE_DATA", "q4": "EMPTY",
                "q5": "EMPTY"}
    ex = {
        ("q0", "legacy_pairing_req"): ("q1", "SM_PAIRING_RSP"),
        ("q1", "confirm"): ("q2", "SM_CONFIRM"),
        ("q2", "random"): ("q3", "SM_RANDOM"),
        ("q3", "encryption_req"): ("q4", _ENC_START),
        ("q4", "start_encryption_rsp"): ("q5", _KEYS3),
    }
    for s in ("q0", "q1", "q2"):
        ex[(s, "encryption_req")] = (s, "LL_REJECT_IND")
    return _pairing_machine(states, ex, defaults, "q0", "q3",
                            encrypted_states=("q4", "q5"))


def _cc2650_pairing():
    # Ten states, structure unpublished: the straight legacy handshake,
    # then an encrypted region where re-pairing flip-flops and a second
    # encryption request kills the link. The state entered by
    # encryption_req is where the crash quirk bites.
    states = ("adv", "r0", "r1", "r2", "r3", "r4",
              "r5", "r6", "r7", "r8", "r9")
    defaults = {s: "BTLE_DATA" for s in states}
    defaults["adv"] = "EMPTY"
    for s in ("r4", "r5", "r6", "r7", "r8", "r9"):
        defaults[s] = "EMPTY"
    ex = {
        ("r0", "legacy_pairing_req"): ("r1", "SM_PAIRING_RSP"),
        ("r0", "encryption_req"): ("r0", "LL_REJECT_IND"),
        ("r1", "confirm"): ("r2", "SM_CONFIRM"),
        ("r1", "legacy_pairing_req"): ("r0", "SM_FAILED"),
        ("r1", "encryption_req"): ("r1", "LL_REJECT_IND"),
        ("r2", "random"): ("r3", "SM_RANDOM"),
        ("r2", "confirm"): ("r2", "SM_CONFIRM"),
        ("r2", "legacy_pairing_req"): ("r0", "SM_FAILED"),
        ("r2", "encryption_req"): ("r2", "LL_REJECT_IND"),
        ("r3", "encryption_req"): ("r4", _ENC_START),
        ("r3", "legacy_pairing_req"): ("r0", "SM_FAILED"),
        ("r4", "start_encryption_rsp"): ("r5", _KEYS3),
        ("r5", "legacy_pairing_req"): ("r6", "SM_FAILED"),
        ("r5", "encryption_req"): ("r8", "BTLE_CTRL"),
        ("r6", "legacy_pairing_req"): ("r7", "SM_PAIRING_RSP"),
        ("r6", "encryption_req"): ("r8", "BTLE_CTRL"),
        ("r7", "legacy_pairing_req"): ("r6", "SM_FAILED"),
        ("r7", "confirm"): ("r9", "SM_CONFIRM"),
        ("r7", "encryption_req"): ("r8", "BTLE_CTRL"),
        ("r9", "random"): ("r3", "SM_RANDOM"),
        ("r9", "confirm"): ("r9", "SM_CONFIRM"),
        ("r9", "legacy_pairing_req"): ("r6", "SM_FAILED"),
        ("r9", "encryption_req"): ("r8", "BTLE_CTRL"),
    }
    return _pairing_machine(states, ex, defaults, "r0", "r3",
                            encrypted_states=("r4", "r5", "r6", "r7",
                                              "r8", "r9"))


def _cc2640r2_pairing():
    # Eleven states: pairing toggles back and forth, a confirm/random
    # exchange that can be rewound, two ways through the encryption
    # start, and a post-encryption re-pairing loop ending in a dead state.
    states = ("adv", "q0", "q1", "q2", "q3", "q4", "q5",
              "q6", "q7", "q8", "q9", "q10")
    defaults = {s: "BTLE_DATA" for s in states}
    defaults["adv"] = "EMPTY"
    for s in ("q4", "q6", "q7", "q8", "q10"):
        defaults[s] = "EMPTY"
    ex = {
        ("q0", "legacy_pairing_req"): ("q1", "SM_PAIRING_RSP"),
        ("q1", "legacy_pairing_req"): ("q0", "SM_PAIRING_RSP"),
        ("q1", "confirm"): ("q2", "SM_CONFIRM"),
        ("q2", "legacy_pairing_req"): ("q0", "SM_PAIRING_RSP"),
        ("q2", "random"): ("q3", "SM_RANDOM"),
        ("q3", "legacy_pairing_req"): ("q0", "SM_PAIRING_RSP"),
        ("q3", "confirm"): ("q2", "SM_CONFIRM"),
        ("q3", "encryption_req"): ("q4", _ENC_START),
        ("q4", "start_encryption_rsp"): ("q5", _KEYS5),
        ("q4", "encryption_req"): ("q6", "EMPTY"),
        ("q4", "legacy_pairing_req"): ("q7", "EMPTY"),
        ("q4", "confirm"): ("q7", "EMPTY"),
        ("q4", "random"): ("q7", "EMPTY"),
        ("q5", "legacy_pairing_req"): ("q9", "SM_FAILED"),
        ("q5", "encryption_req"): ("q7", "BTLE_CTRL"),
        ("q5", "confirm"): ("q5", "BTLE_DATA"),
        ("q5", "random"): ("q5", "BTLE_DATA"),
        ("q5", "start_encryption_rsp"): ("q5", "BTLE_DATA"),
        ("q6", "start_encryption_rsp"): ("q8", _KEYS5),
        ("q6", "encryption_req"): ("q7", "BTLE_CTRL"),
        ("q6", "legacy_pairing_req"): ("q7", "EMPTY"),
        ("q6", "confirm"): ("q7", "EMPTY"),
        ("q6", "random"): ("q7", "EMPTY"),
        ("q8", "encryption_req"): ("q7", "BTLE_CTRL"),
        ("q8", "start_encryption_rsp"): ("q7", "BTLE_CTRL"),
        ("q8", "legacy_pairing_req"): ("q7", "EMPTY"),
        ("q8", "confirm"): ("q7", "EMPTY"),
        ("q8", "random"): ("q7", "EMPTY"),
        ("q9", "legacy_pairing_req"): ("q10", "SM_PAIRING_RSP"),
        ("q9", "encryption_req"): ("q7", "BTLE_CTRL"),
        ("q9", "confirm"): ("q9", "BTLE_DATA"),
        ("q9", "random"): ("q9", "BTLE_DATA"),
        ("q9", "start_encryption_rsp"): ("q9", "BTLE_DATA"),
        ("q10", "legacy_pairing_req"): ("q9", "SM_FAILED"),
        ("q10", "encryption_req"): ("q7", "BTLE_CTRL"),
    }
    return _pairing_machine(
        states, ex, defaults, "q0", "q3",
        encrypted_states=("q4", "q5", "q6", "q7", "q8", "q9", "q10"))


def _connection_entry(soc_id, builder, state_count, synthetic=False,
                      quirks=(), reduced=False, stride=1, reset_state=None,
                      profile=None, **hooks):
    machine = builder()
    if reduced:
        alphabet = tuple(a for a in CONNECTION_ALPHABET
                         if a not in ("scan_req", "connection_req"))
        initial = machine.successor(machine.initial, "connection_req")
        profile = "connected"
    else:
        alphabet = CONNECTION_ALPHABET
        initial = reset_state if reset_state is not None else machine.initial
        profile = profile or "advertising"
    return CatalogEntry(
        soc_id=soc_id, procedure="connection", machine=machine,
        learn_alphabet=alphabet, learn_initial=initial,
        reset_profile=profile, state_count=state_count,
        synthetic=synthetic, quirks=tuple(quirks),
        response_stride=stride, **hooks)


def _pairing_entry(soc_id, builder, state_count, quirks=(), **hooks):
    machine = builder()
    start = machine.successor(machine.initial, "connection_req")
    return CatalogEntry(
        soc_id=soc_id, procedure="pairing", machine=machine,
        learn_alphabet=PAIRING_ALPHABET, learn_initial=start,
        reset_profile="pairing_ready", state_count=state_count,
        synthetic=False, quirks=tuple(quirks),
        pairing_restart_state=start, **hooks)


def _build_catalog():
    entries = [
        _connection_entry("CC2650", _cc2650_connection, 5),
        _connection_entry("CC2652R1", _cc2652r1_connection, 4, reduced=True,
                          quirks=("version_ind_always",)),
        _connection_entry("CYBLE-416045-02", _cyble_connection, 3),
        _connection_entry("CYW43455", _cyw43455_connection, 16,
                          synthetic=True, reduced=True),
        _connection_entry("nRF52832", _nrf52832_connection, 5,
                          quirks=("slow_responder",), stride=2,
                          reset_state="readv", profile="normalize"),
        _connection_entry("CC2640R2", _cc2640r2_connection, 7,
                          synthetic=True, quirks=("pairing_fatigue",),
                          fatigue_cell=("pl", "feature_req", "BTLE_DATA")),
        _pairing_entry("CC2640R2", _cc2640r2_pairing, 11,
                       quirks=("pairing_fatigue",),
                       fatigue_rejects_pairing=True,
                       enc_pending_state="q4"),
        _pairing_entry("CC2650", _cc2650_pairing, 10,
                       quirks=("crash_on_bad_enc",),
                       crash_state="r4", enc_pending_state="r4"),
        _pairing_entry("CYW43455", _cyw43455_pairing, 6,
                       enc_pending_state="q4"),
    ]
    return {(e.soc_id.lower(), e.procedure): e for e in entries}


_CATALOG = _build_catalog()


class UnknownTargetError(Exception):
    pass


def entry(soc_id: str, procedure: str) -> CatalogEntry:
    key = (soc_id.lower(), procedure)
    if key not in _CATALOG:
        raise UnknownTargetError(
            f"uncatalogued target: ({soc_id!r}, {procedure!r})")
    return _CATALOG[key]


def entries():
    return list(_CATALOG.values())


def reference_machine(soc_id: str, procedure: str) -> mealy.MealyMachine:
    """The abstract ground-truth machine a learning run should recover."""
    return entry(soc_id, procedure).reference_machine()


def device_machine(soc_id: str, procedure: str) -> mealy.MealyMachine:
    """The behavior machine over the procedure's public alphabet. For the
    connection procedure this starts from the advertising state and keeps
    scan_req/connection_req, which is the view the fingerprinting engine
    works on; for pairing it coincides with the learning view."""
    e = entry(soc_id, procedure)
    if procedure == "connection":
        return mealy.relabel(mealy.restrict(e.machine, CONNECTION_ALPHABET))
    return mealy.relabel(
        mealy.restrict(e.machine, PAIRING_ALPHABET, initial=e.learn_initial))


def manifest() -> list:
    """Catalog manifest rows: soc, procedure, state count, provenance."""
    rows = []
    for e in sorted(_CATALOG.values(), key=lambda e: (e.soc_id, e.procedure)):
        rows.append({
            "soc_id": e.soc_id,
            "procedure": e.procedure,
            "state_count": e.state_count,
            "synthetic": e.synthetic,
            "quirks": list(e.quirks),
        })
    return rows
