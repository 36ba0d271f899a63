import random

import pytest

from blelearn import catalog, mealy
from blelearn.robust import CONNECTION_DEFAULTS, PAIRING_DEFAULTS, RobustInterface
from blelearn.session import make_session
from blelearn.stats import RunStats
from blelearn.symbols import CONNECTION_ALPHABET, PAIRING_ALPHABET

from helpers import single_input_distinct

# states of the learning views, per the evaluation campaign
EXPECTED_STATES = {
    ("CC2650", "connection"): 5,
    ("CC2652R1", "connection"): 4,
    ("CYBLE-416045-02", "connection"): 3,
    ("CYW43455", "connection"): 16,
    ("nRF52832", "connection"): 5,
    ("CC2640R2", "pairing"): 11,
    ("CC2650", "pairing"): 10,
    ("CYW43455", "pairing"): 6,
}

POST_CONNECTION_GRID = {
    "CC2640R2": ("BTLE_DATA", "BTLE_DATA", "LL_LENGTH_RSP", "BTLE_DATA"),
    "CC2650": ("BTLE_DATA", "LL_VERSION_IND", "LL_UNKNOWN_RSP",
               "LL_UNKNOWN_RSP"),
    "CC2652R1": ("LL_LENGTH_REQ", "LL_VERSION_IND", "LL_LENGTH_RSP",
                 "BTLE_DATA"),
    "CYBLE-416045-02": ("LL_REJECT_IND", "LL_VERSION_IND", "LL_UNKNOWN_RSP",
                        "LL_UNKNOWN_RSP"),
    "CYW43455": ("ATT_MTU_REQ", "LL_VERSION_IND", "LL_LENGTH_RSP",
                 "LL_REJECT_IND"),
    "nRF52832": ("LL_UNKNOWN_RSP", "LL_VERSION_IND", "LL_LENGTH_RSP",
                 "BTLE_DATA"),
}


def test_catalogued_state_counts():
    for (soc, proc), want in EXPECTED_STATES.items():
        ref = catalog.reference_machine(soc, proc)
        assert len(ref.states) == want, (soc, proc)
        assert len(mealy.minimize(ref).states) == want, (soc, proc)


def test_references_single_input_distinguishable():
    # necessary for one-round convergence of the learner
    for e in catalog.entries():
        assert single_input_distinct(e.reference_machine()), \
            (e.soc_id, e.procedure)


def test_uncatalogued_pair_rejected():
    with pytest.raises(catalog.UnknownTargetError):
        catalog.entry("nrf52832", "pairing")
    with pytest.raises(catalog.UnknownTargetError):
        catalog.entry("esp32", "connection")


def test_target_lookup_case_insensitive():
    assert catalog.entry("CYBLE-416045-02", "connection") is \
        catalog.entry("cyble-416045-02", "connection")


def test_post_connection_output_grid():
    for soc, cells in POST_CONNECTION_GRID.items():
        m = catalog.device_machine(soc, "connection")
        post = m.state_after(("connection_req",))
        got = tuple(m.output_of(post, i) for i in
                    ("feature_rsp", "version_req", "length_req", "length_rsp"))
        assert got == cells, soc


def test_cc2640r2_reduced_alphabet_state_counts():
    e = catalog.entry("cc2640r2", "connection")
    for drop, want in (("legacy_pairing_req", 3), ("length_req", 5),
                       ("feature_req", 4)):
        alphabet = tuple(a for a in CONNECTION_ALPHABET if a != drop)
        view = mealy.restrict(e.machine, alphabet, initial=e.learn_initial)
        assert len(mealy.minimize(view).states) == want, drop


def test_cc2640r2_published_query_outputs():
    m = catalog.device_machine("CC2640R2", "connection")
    outs = mealy.run(m, ["connection_req", "legacy_pairing_req", "length_rsp",
                         "length_req", "feature_req"])
    assert outs == ["LL_LENGTH_REQ", "SM_PAIRING_RSP", "BTLE_DATA",
                    "LL_LENGTH_RSP", "LL_FEATURE_RSP"]


def test_manifest_shape():
    rows = catalog.manifest()
    assert len(rows) == 9
    for row in rows:
        assert set(row) == {"soc_id", "procedure", "state_count",
                            "synthetic", "quirks"}
    synthetic = {(r["soc_id"], r["procedure"]) for r in rows if r["synthetic"]}
    assert synthetic == {("CYW43455", "connection"),
                         ("CC2640R2", "connection")}


def test_abstract_fidelity_random_walks():
    # driving the simulator through the mapper reproduces the reference
    # machine on random input sequences over the learning alphabet
    rng = random.Random(1234)
    for e in catalog.entries():
        sess_cfg = (PAIRING_DEFAULTS if e.procedure == "pairing"
                    else CONNECTION_DEFAULTS)
        ref = e.reference_machine()
        for _ in range(25):
            sess = make_session(e.soc_id, e.procedure)
            robust = RobustInterface(sess, sess_cfg,
                                     reset_profile=e.reset_profile,
                                     stats=RunStats())
            seq = tuple(rng.choice(ref.inputs)
                        for _ in range(rng.randint(1, 14)))
            assert list(robust.query(seq, conformance=True)) == \
                mealy.run(ref, list(seq)), (e.soc_id, e.procedure, seq)


def test_pairing_views_cover_expected_alphabet():
    for e in catalog.entries():
        want = PAIRING_ALPHABET if e.procedure == "pairing" else None
        if want:
            assert e.learn_alphabet == want


def test_connection_alphabets():
    full = set(CONNECTION_ALPHABET)
    for e in catalog.entries():
        if e.procedure != "connection":
            continue
        if e.reset_profile == "connected":
            assert set(e.learn_alphabet) == full - {"scan_req",
                                                    "connection_req"}
        else:
            assert set(e.learn_alphabet) == full
