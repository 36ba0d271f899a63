"""Reliability layer between learner and target.

Everything the learner asks for goes through robust_query: queries are
served from the cache tree when possible, re-executed and majority-voted
when the target contradicts the cache, and escalated to a hard reset
when retries run out. Resets (the pre and post hooks around each query)
are verified and retried up to n_error times.

Cache discipline: the first observation of a node fixes its expected
output. On the first contradiction the node enters sampling mode; once
n_cache samples exist, the majority output is finalized (ties go to the
lexicographically smallest). A node's expected value changes at most
once; afterwards contradictions only trigger plain re-execution, at most
n_nondet times, then the hard-reset escalation. The majority update may
leave descendants stale; counterexample processing repairs that later.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional

from .session import SulSession
from .symbols import ADV, PAUSE_ENC, RESET_INPUT, TERMINATE


class ResetFailure(Exception):
    pass


class LearningAborted(Exception):
    def __init__(self, reason: str, stats=None):
        super().__init__(reason)
        self.reason = reason
        self.stats = stats


class NonDeterminismExceeded(LearningAborted):
    pass


@dataclass(frozen=True)
class RobustConfig:
    n_error: int = 20
    n_cache: int = 20
    n_nondet: int = 20

    def __post_init__(self):
        for name in ("n_error", "n_cache", "n_nondet"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


CONNECTION_DEFAULTS = RobustConfig(n_error=20, n_cache=20, n_nondet=20)
PAIRING_DEFAULTS = RobustConfig(n_error=5, n_cache=3, n_nondet=3)


class CacheNode:
    __slots__ = ("children", "expected", "samples", "majority_finalized")

    def __init__(self):
        self.children: dict = {}
        self.expected: Optional[str] = None
        self.samples: Optional[Counter] = None
        self.majority_finalized = False

    def child(self, symbol: str) -> "CacheNode":
        node = self.children.get(symbol)
        if node is None:
            node = CacheNode()
            self.children[symbol] = node
        return node


class CacheTree:
    """Input-indexed tree of observed outputs with per-node frequency
    counters for the majority vote."""

    def __init__(self):
        self.root = CacheNode()

    def lookup(self, seq) -> Optional[list]:
        node = self.root
        outs = []
        for sym in seq:
            node = node.children.get(sym)
            if node is None or node.expected is None:
                return None
            outs.append(node.expected)
        return outs

    def first_mismatch(self, seq, outputs):
        """Index of the first position whose stored expectation differs,
        or None. Nodes without an expectation are filled on the way."""
        node = self.root
        for k, (sym, out) in enumerate(zip(seq, outputs)):
            node = node.child(sym)
            if node.expected is None:
                node.expected = out
            elif node.expected != out:
                return k
        return None

    def node_at(self, seq) -> CacheNode:
        node = self.root
        for sym in seq:
            node = node.child(sym)
        return node

    def walk(self):
        """Yield (input sequence, expected outputs) for every stored path."""
        def rec(node, ins, outs):
            for sym, child in node.children.items():
                if child.expected is None:
                    continue
                seq = ins + (sym,)
                exp = outs + (child.expected,)
                yield seq, exp
                yield from rec(child, seq, exp)
        yield from rec(self.root, (), ())


class RobustInterface:
    """Reset orchestration plus the non-determinism cache, bound to one
    session for the duration of a run."""

    def __init__(self, sess: SulSession, cfg: RobustConfig,
                 reset_profile: str = "advertising",
                 hard_reset_callback: Optional[Callable[[], None]] = None,
                 stats=None):
        self.sess = sess
        self.cfg = cfg
        self.reset_profile = reset_profile
        self.hard_reset_callback = hard_reset_callback
        self.cache = CacheTree()
        self.stats = stats

    # -- resets ---------------------------------------------------------------

    def pre_reset(self) -> None:
        """Verify the peripheral is reachable and bring it to the run's
        initial state, retrying up to n_error times."""
        for _attempt in range(self.cfg.n_error):
            if self._try_prepare():
                return
            self.sess.counters.connection_errors += 1
        raise ResetFailure(
            f"no usable reset after {self.cfg.n_error} attempts")

    def _try_prepare(self) -> bool:
        out = self.sess.step(RESET_INPUT, count=False)
        if out != ADV:
            return False
        if self.reset_profile == "advertising":
            return True
        if self.reset_profile == "normalize":
            # establish and tear down one throwaway connection before the
            # query; washes out any power-on-only behavior and keeps the
            # peripheral from idling into a timeout
            out = self.sess.step("connection_req", count=False)
            if out == "EMPTY":
                return False
            self.sess.step(TERMINATE, count=False)
            return self.sess.step(RESET_INPUT, count=False) == ADV
        out = self.sess.step("connection_req", count=False)
        if out == "EMPTY":
            return False
        if self.reset_profile == "pairing_ready":
            # negotiate link parameters so pairing can start
            self.sess.step("feature_req", count=False)
        return True

    def post_reset(self) -> None:
        """Tear the connection down; change the key first if encryption
        is live. Best effort: failures only count."""
        if self.sess.mapper_state.encryption_enabled:
            ack = self.sess.step(PAUSE_ENC, count=False)
            if ack == "EMPTY":
                self.sess.counters.connection_errors += 1
        self.sess.step(TERMINATE, count=False)
        self.sess.mapper_state.reset()

    def _escalate_hard_reset(self, reason: str, exc=LearningAborted) -> None:
        if self.hard_reset_callback is None:
            raise exc(reason)
        self.sess.counters.hard_resets += 1
        self.hard_reset_callback()
        self.sess.mapper_state.reset()

    def _execute_once(self, seq, conformance: bool) -> list:
        self.sess.begin_query()
        try:
            self.pre_reset()
        except ResetFailure:
            self._escalate_hard_reset("reset failure")
            self.sess.begin_query()
            self.pre_reset()  # aborts the run if it still fails
        outputs = [self.sess.step(sym) for sym in seq]
        self.post_reset()
        if self.stats is not None:
            self.stats.record_execution(len(seq), conformance)
        return outputs

    # -- the query path -------------------------------------------------------

    def query(self, seq, conformance: bool = False) -> list:
        """Return an output sequence consistent with the cache, executing
        the target as often as that takes.

        Conformance traces bypass the cache entirely: they are one-shot
        random walks whose noise the oracle filters by confirmation, and
        letting them contest the cache would trade one bad observation
        for an n_cache-deep sampling storm per trace.
        """
        seq = tuple(seq)
        if not seq:
            return []
        try:
            if conformance:
                return self._execute_once(seq, conformance=True)
            cached = self.cache.lookup(seq)
            if cached is not None:
                return cached
            return self._query_with_repair(seq, conformance=False)
        except ResetFailure as exc:
            raise LearningAborted(f"reset failure: {exc}")

    def _query_with_repair(self, seq, conformance: bool) -> list:
        """Execute until two consecutive runs agree with the cache. The
        second run cross-checks the nodes the first one freshly created,
        so a single channel glitch cannot plant a wrong expectation."""
        retries = 0
        clean = 0
        while True:
            outputs = self._execute_once(seq, conformance)
            k = self.cache.first_mismatch(seq, outputs)
            if k is None:
                clean += 1
                if clean >= 2:
                    return outputs
                continue
            clean = 0
            self.sess.counters.nondet_outputs += 1
            node = self.cache.node_at(seq[:k + 1])
            if not node.majority_finalized:
                self._majority_vote(seq, k, node, outputs[k], conformance)
                continue
            retries += 1
            if retries >= self.cfg.n_nondet:
                self._escalate_hard_reset(
                    f"non-determinism exceeded n_nondet={self.cfg.n_nondet} "
                    f"at {seq[:k + 1]}", exc=NonDeterminismExceeded)
                outputs = self._execute_once(seq, conformance)
                if self.cache.first_mismatch(seq, outputs) is None:
                    return outputs
                raise NonDeterminismExceeded(
                    f"non-determinism persists after hard reset at "
                    f"{seq[:k + 1]}")

    def _majority_vote(self, seq, k, node: CacheNode, observed: str,
                       conformance: bool) -> None:
        """Collect n_cache samples for the contested node, then finalize
        the most frequent output (ties: lexicographically smallest)."""
        node.samples = Counter({node.expected: 1, observed: 1})
        while sum(node.samples.values()) < self.cfg.n_cache:
            outputs = self._execute_once(seq, conformance)
            node.samples[outputs[k]] += 1
            if outputs[k] != node.expected:
                self.sess.counters.nondet_outputs += 1
        best = min(node.samples, key=lambda o: (-node.samples[o], o))
        if best != node.expected:
            node.expected = best
            self.sess.counters.cache_updates += 1
        node.majority_finalized = True
