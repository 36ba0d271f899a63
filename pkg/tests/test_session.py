import pytest
from hypothesis import given, settings, strategies as st

from blelearn.mapper import UnknownSymbolError
from blelearn.session import (ChannelNoiseConfig, execute_query, make_session,
                              wrap_noisy)


def test_execute_query_scan_on_cc2650():
    sess = make_session("cc2650", "connection")
    assert execute_query(sess, ["scan_req"]) == ["ADV"]


def test_execute_query_empty_still_counts_query():
    sess = make_session("cc2650", "connection")
    before = sess.counters.queries
    assert execute_query(sess, []) == []
    assert sess.counters.queries == before + 1


def test_execute_query_rejects_unknown_symbol():
    sess = make_session("cc2650", "connection")
    with pytest.raises(UnknownSymbolError):
        execute_query(sess, ["scan_req", "flood_req"])


def test_total_loss_forces_all_empty():
    sess = make_session("cc2650", "connection",
                        noise=ChannelNoiseConfig(1.0, 0.0, 3))
    outs = execute_query(sess, ["scan_req", "connection_req", "version_req"])
    assert outs == ["EMPTY", "EMPTY", "EMPTY"]


def test_zero_noise_wrapper_is_transparent():
    import random
    rng = random.Random(4)
    plain = make_session("cc2650", "connection")
    noisy = wrap_noisy(make_session("cc2650", "connection"),
                       ChannelNoiseConfig(0.0, 0.0, 9))
    alphabet = plain.alphabet
    for _ in range(30):
        seq = [rng.choice(alphabet) for _ in range(rng.randint(0, 10))]
        assert execute_query(plain, seq) == execute_query(noisy, seq)


def test_seed_determinism():
    seq = ["scan_req", "connection_req", "version_req", "legacy_pairing_req",
           "length_rsp", "feature_rsp"]
    runs = []
    for _ in range(2):
        sess = make_session("cc2650", "connection",
                            noise=ChannelNoiseConfig(0.3, 0.3, 42))
        runs.append([execute_query(sess, seq) for _ in range(5)])
    assert runs[0] == runs[1]


def test_different_seeds_differ_somewhere():
    seq = ["scan_req", "connection_req", "version_req"] * 4
    outs = set()
    for seed in range(6):
        sess = make_session("cc2650", "connection",
                            noise=ChannelNoiseConfig(0.4, 0.4, seed))
        outs.add(tuple(execute_query(sess, seq)))
    assert len(outs) > 1


def test_delay_shifts_response_one_step_late():
    # delay_prob=1: every produced response is delayed; a delayed response
    # surfaces at the next step and displaces that step's own response,
    # which is dropped (so only every other response is observed, one
    # step late)
    sess = make_session("cc2650", "connection",
                        noise=ChannelNoiseConfig(0.0, 1.0, 7))
    sess.begin_query()
    outs = [sess.step(s) for s in
            ("scan_req", "connection_req", "version_req", "length_req")]
    assert outs == ["EMPTY", "ADV", "EMPTY", "LL_VERSION_IND"]


def test_counter_conservation():
    sess = make_session("cc2650", "connection",
                        noise=ChannelNoiseConfig(0.1, 0.1, 5))
    total = 0
    for n in (0, 3, 5, 2):
        execute_query(sess, ["scan_req"] * n)
        total += n
    assert sess.counters.steps == total
    assert sess.counters.queries == 4


def test_noisy_pairing_query_occasionally_deviates():
    clean = make_session("cc2650", "connection")
    seq = ["scan_req", "connection_req", "feature_rsp", "legacy_pairing_req"]
    expected = execute_query(clean, seq)
    assert expected[-1] == "SM_PAIRING_RSP"
    deviations = 0
    for seed in range(20):
        sess = make_session("cc2650", "connection",
                            noise=ChannelNoiseConfig(0.5, 0.0, seed))
        outs = execute_query(sess, seq)
        if outs[-1] != "SM_PAIRING_RSP":
            deviations += 1
    assert 0 < deviations < 20


def test_noise_config_validation():
    with pytest.raises(ValueError):
        ChannelNoiseConfig(1.5, 0.0, 0)
    with pytest.raises(ValueError):
        ChannelNoiseConfig(0.0, -0.1, 0)
