import pytest

from blelearn import catalog, fingerprint, mealy
from blelearn.fingerprint import (FingerprintError, FingerprintReport,
                                  apply_fingerprint, classify,
                                  derive_fingerprint)
from blelearn.learner import MachineQuerier, learn
from blelearn.oracle import OracleConfig, StatePrefixOracle

PAPER_SEQUENCE = ("scan_req", "connection_req", "feature_rsp",
                  "scan_req", "connection_req", "version_req")


def six_models():
    return [(soc, catalog.device_machine(soc, "connection"))
            for soc in catalog.SOC_IDS]


def test_derive_six_references_distinct():
    report = derive_fingerprint(six_models())
    assert report.distinct
    outs = list(map(tuple, report.outputs.values()))
    assert len(set(outs)) == len(outs)
    # validity: replaying the sequence on the references reproduces the
    # report exactly
    for soc, m in six_models():
        assert mealy.run(m, report.sequence) == report.outputs[soc]


def test_paper_sequence_separates_and_matches_published_rows():
    outs = {soc: apply_fingerprint(PAPER_SEQUENCE, m)
            for soc, m in six_models()}
    assert len({tuple(o) for o in outs.values()}) == 6
    assert outs["nRF52832"] == ["ADV", "SM_HDR", "LL_UNKNOWN_RSP",
                                "ADV", "BTLE_DATA", "LL_VERSION_IND"]
    assert outs["CC2650"] == ["ADV", "BTLE_DATA", "BTLE_DATA",
                              "ADV", "BTLE_DATA", "LL_VERSION_IND"]


def test_singleton_set_trivial_report():
    report = derive_fingerprint(six_models()[:1])
    assert report.distinct
    assert report.sequence == ()


def test_duplicate_model_reported_as_indistinguishable():
    m = catalog.device_machine("CC2650", "connection")
    report = derive_fingerprint([("alpha", m), ("beta", mealy.relabel(m))])
    assert not report.distinct
    assert report.indistinguishable_pair == ("alpha", "beta")


def test_classify_round_trip_and_unknown():
    report = derive_fingerprint(six_models())
    for soc, m in six_models():
        assert classify(report, apply_fingerprint(report.sequence, m)) == soc
    assert classify(report, ["EMPTY"] * len(report.sequence)) == "unknown"


def test_classify_rejects_single_symbol_perturbations():
    models = dict(six_models())
    report = derive_fingerprint(six_models())
    base = list(report.outputs["CC2650"])
    for k in range(len(base)):
        mutated = base[:]
        mutated[k] = "PERTURBED"
        assert classify(report, mutated) == "unknown"


def test_classify_requires_distinct_report():
    m = catalog.device_machine("CC2650", "connection")
    report = derive_fingerprint([("a", m), ("b", mealy.relabel(m))])
    with pytest.raises(FingerprintError):
        classify(report, [])


def test_reset_input_required():
    toy = mealy.build(0, ("a",), {0: {"a": (0, "x")}})
    with pytest.raises(FingerprintError, match="reset input"):
        derive_fingerprint([("toy", toy)])


def test_non_stabilizing_reset_fails_loudly():
    flappy = mealy.build(0, ("scan_req", "a"), {
        0: {"scan_req": (1, "ADV"), "a": (0, "x")},
        1: {"scan_req": (0, "ADV"), "a": (1, "y")},
    })
    with pytest.raises(FingerprintError, match="stabilize"):
        derive_fingerprint([("flappy", flappy)])


def test_report_json_round_trip():
    report = derive_fingerprint(six_models())
    again = FingerprintReport.load(report.dump())
    assert again.sequence == report.sequence
    assert again.outputs == {k: list(v) for k, v in report.outputs.items()}
    assert again.distinct == report.distinct


def test_apply_fingerprint_on_session():
    from blelearn.robust import CONNECTION_DEFAULTS, RobustInterface
    from blelearn.session import make_session
    from blelearn.stats import RunStats
    sess = make_session("cc2650", "connection")
    robust = RobustInterface(sess, CONNECTION_DEFAULTS,
                             reset_profile="advertising", stats=RunStats())
    outs = apply_fingerprint(PAPER_SEQUENCE, robust)
    assert outs == ["ADV", "BTLE_DATA", "BTLE_DATA",
                    "ADV", "BTLE_DATA", "LL_VERSION_IND"]


def test_apply_fingerprint_type_error():
    with pytest.raises(TypeError):
        apply_fingerprint(PAPER_SEQUENCE, object())


def test_fingerprints_stable_under_relearning():
    # relearn the four full-alphabet connection targets from their own
    # references and derive again: equivalent inputs, identical report
    full = [(soc, m) for soc, m in six_models()
            if "scan_req" in catalog.entry(soc, "connection").learn_alphabet
            and catalog.entry(soc, "connection").reset_profile != "connected"]
    assert len(full) == 4
    relearned = []
    for soc, m in full:
        ref = catalog.device_machine(soc, "connection")
        sul = MachineQuerier(ref)
        hyp, _ = learn(sul, ref.inputs, StatePrefixOracle(OracleConfig(seed=5)))
        assert mealy.equivalent(hyp, ref) is None
        relearned.append((soc, hyp))
    a = derive_fingerprint(full)
    b = derive_fingerprint(relearned)
    assert a.sequence == b.sequence
    assert a.outputs == b.outputs
    assert a.distinct and b.distinct
