import random

import pytest

from blelearn import catalog, mealy
from blelearn.robust import (CacheTree, LearningAborted,
                             NonDeterminismExceeded, ResetFailure,
                             RobustConfig, RobustInterface,
                             CONNECTION_DEFAULTS, PAIRING_DEFAULTS)
from blelearn.session import ChannelNoiseConfig, make_session
from blelearn.stats import RunStats


def build(target="cc2650", procedure="connection", cfg=None, noise=None,
          quirks_on=False, callback=None):
    sess = make_session(target, procedure, quirks_on=quirks_on, noise=noise)
    entry = catalog.entry(target, procedure)
    cfg = cfg or (PAIRING_DEFAULTS if procedure == "pairing"
                  else CONNECTION_DEFAULTS)
    cb = callback
    if callback == "auto":
        cb = sess.hard_reset
    return RobustInterface(sess, cfg, reset_profile=entry.reset_profile,
                           hard_reset_callback=cb, stats=RunStats())


def test_deterministic_target_never_counts_nondet():
    robust = build()
    first = robust.query(("connection_req", "version_req"))
    oq = robust.stats.output_queries
    again = robust.query(("connection_req", "version_req"))
    assert first == again == ["BTLE_DATA", "LL_VERSION_IND"]
    # second identical query is served from the cache: no execution
    assert robust.stats.output_queries == oq
    assert robust.sess.counters.nondet_outputs == 0


def test_majority_vote_most_frequent_output():
    tree = CacheTree()
    robust = build(cfg=RobustConfig(n_error=3, n_cache=3, n_nondet=3))
    node = tree.node_at(("x",))
    node.expected = "A"
    from collections import Counter
    node.samples = Counter({"A": 2, "B": 1})
    best = min(node.samples, key=lambda o: (-node.samples[o], o))
    assert best == "A"


def test_majority_tie_breaks_lexicographically():
    from collections import Counter
    samples = Counter({"B": 2, "A": 2})
    assert min(samples, key=lambda o: (-samples[o], o)) == "A"


def test_single_update_rule_and_majority_repair():
    # plant a wrong expectation, then let the repair machinery fix it
    # exactly once
    robust = build(cfg=RobustConfig(n_error=5, n_cache=5, n_nondet=5))
    seq = ("connection_req", "version_req")
    robust.query(seq)
    node = robust.cache.node_at(seq)
    node.expected = "WRONG"
    out = robust._query_with_repair(seq, conformance=False)
    assert out == ["BTLE_DATA", "LL_VERSION_IND"]
    assert node.expected == "LL_VERSION_IND"
    assert node.majority_finalized
    assert robust.sess.counters.cache_updates == 1
    updates_before = robust.sess.counters.cache_updates
    robust.query(seq)
    assert robust.sess.counters.cache_updates == updates_before


def test_pre_reset_fails_after_exactly_n_error_attempts():
    robust = build(noise=ChannelNoiseConfig(1.0, 0.0, 1),
                   cfg=RobustConfig(n_error=4, n_cache=3, n_nondet=3))
    with pytest.raises(ResetFailure):
        robust.pre_reset()
    assert robust.sess.counters.connection_errors == 4


def test_pre_reset_pairing_lands_in_negotiated_state():
    robust = build("cyw43455", "pairing")
    robust.pre_reset()
    assert robust.sess.device.state == \
        catalog.entry("cyw43455", "pairing").learn_initial


def test_post_reset_sends_pause_when_encrypted():
    robust = build("cyw43455", "pairing")
    robust.pre_reset()
    for sym in ("legacy_pairing_req", "confirm", "random", "encryption_req"):
        robust.sess.step(sym)
    assert robust.sess.mapper_state.encryption_enabled
    robust.post_reset()
    assert not robust.sess.mapper_state.encryption_enabled
    assert robust.sess.device.state == "adv"
    assert robust.sess.counters.connection_errors == 0


def test_post_reset_on_crashed_device_counts_error():
    robust = build("cc2650", "pairing", quirks_on=True, callback="auto")
    robust.sess.begin_query()
    robust.pre_reset()
    for sym in ("legacy_pairing_req", "confirm", "random", "encryption_req"):
        robust.sess.step(sym)
    errors = robust.sess.counters.connection_errors
    robust.post_reset()  # the pause crashes the device; absorbed
    assert robust.sess.device.crashed
    assert robust.sess.counters.connection_errors == errors + 1


def test_reset_failure_escalates_to_hard_reset_then_continues():
    robust = build("cc2650", "pairing", quirks_on=True, callback="auto")
    crash = ("legacy_pairing_req", "confirm", "random", "encryption_req")
    out = robust.query(crash)
    assert out[-1] == "LL_ENC_RSP,LL_START_ENC_REQ"
    assert robust.sess.device.crashed  # post killed it
    # next query recovers through the hard-reset escalation
    out = robust.query(("legacy_pairing_req",))
    assert out == ["SM_PAIRING_RSP"]
    assert robust.sess.counters.hard_resets >= 1


def test_reset_failure_without_callback_aborts():
    robust = build(noise=ChannelNoiseConfig(1.0, 0.0, 2),
                   cfg=RobustConfig(n_error=3, n_cache=3, n_nondet=3))
    with pytest.raises(LearningAborted):
        robust.query(("scan_req",))


def test_nondet_exceeded_without_callback():
    robust = build(cfg=RobustConfig(n_error=3, n_cache=3, n_nondet=3))
    seq = ("connection_req",)
    robust.query(seq)
    node = robust.cache.node_at(seq)
    node.expected = "NEVER_HAPPENS"
    node.majority_finalized = True  # burn the one majority update
    with pytest.raises(NonDeterminismExceeded):
        robust._query_with_repair(seq, conformance=False)


def test_cache_soundness_on_noise_free_target():
    robust = build()
    ref = catalog.reference_machine("CC2650", "connection")
    rng = random.Random(8)
    for _ in range(40):
        seq = tuple(rng.choice(ref.inputs) for _ in range(rng.randint(1, 8)))
        robust.query(seq)
    for seq, outs in robust.cache.walk():
        assert list(outs) == mealy.run(ref, list(seq)), seq


def test_escalation_bound_on_executions():
    cfg = RobustConfig(n_error=3, n_cache=6, n_nondet=4)
    robust = build(cfg=cfg, callback="auto")
    seq = ("connection_req", "version_req")
    robust.query(seq)
    executed = []
    orig = robust._execute_once

    def counting(s, conformance):
        executed.append(s)
        return orig(s, conformance)

    robust._execute_once = counting
    node = robust.cache.node_at(seq)
    node.expected = "WRONG"
    node.majority_finalized = True
    with pytest.raises(NonDeterminismExceeded):
        robust._query_with_repair(seq, conformance=False)
    # n_nondet retries plus the single post-escalation attempt
    assert len(executed) <= cfg.n_nondet + 1


def test_majority_statistics_under_known_noise():
    # a node sampled under heavy loss still finalizes on the true output
    # for n_cache=20, and usually for n_cache=3
    for n_cache, min_ok in ((20, 19), (3, 14)):
        ok = 0
        for seed in range(20):
            robust = build(
                noise=ChannelNoiseConfig(0.3, 0.0, seed),
                cfg=RobustConfig(n_error=200, n_cache=n_cache, n_nondet=200))
            seq = ("scan_req",)
            robust.query(seq)
            node = robust.cache.node_at(seq)
            node.expected = "PLANTED"
            node.majority_finalized = False
            robust._query_with_repair(seq, conformance=False)
            ok += node.expected == "ADV"
        assert ok >= min_ok, (n_cache, ok)
