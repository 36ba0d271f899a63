"""L* for Mealy machines with Rivest-Schapire counterexample processing.

The observation table keeps a prefix-closed set S of access sequences
and a suffix set E that starts as the single-input columns. Cells store
only the suffix-portion outputs. Closedness is the only table condition
maintained: the binary-search suffix extraction keeps E distinguishing,
so the classic consistency check is unnecessary.

The classic add-all-prefixes processing is kept alongside for the
query-cost comparison.
"""

from __future__ import annotations

import time
from typing import Callable, Optional

from . import mealy
from .stats import RunStats


class NotACounterexample(Exception):
    pass


class MachineQuerier:
    """Query provider over a plain machine: lets the learner and oracle
    run against an already-built model (offline relearning, learner
    benchmarks). Deduplicates through a cache tree like the live robust
    interface and counts what a real target would have executed."""

    def __init__(self, machine):
        from .robust import CacheTree
        self.machine = machine
        self.cache = CacheTree()
        self.queries = 0
        self.symbols = 0

    def query(self, seq, conformance: bool = False):
        seq = tuple(seq)
        if not conformance:
            cached = self.cache.lookup(seq)
            if cached is not None:
                return cached
        outs = mealy.run(self.machine, list(seq))
        self.queries += 1
        self.symbols += len(seq)
        if not conformance:
            self.cache.first_mismatch(seq, outs)
        return outs


class ObservationTable:
    def __init__(self, alphabet, query: Callable[[tuple], list]):
        self.alphabet = tuple(alphabet)
        self.query = query
        self.S: list = [()]
        self.E: list = [(a,) for a in self.alphabet]

    # -- cells ----------------------------------------------------------------

    def cell(self, prefix: tuple, suffix: tuple) -> tuple:
        # no table-side memoization: the robust cache is the single source
        # of truth, so a majority-vote repair is visible on the next read
        outs = self.query(prefix + suffix)
        return tuple(outs[len(prefix):])

    def row(self, prefix: tuple) -> tuple:
        return tuple(self.cell(prefix, e) for e in self.E)

    def fill(self) -> None:
        for s in self.S:
            for e in self.E:
                self.cell(s, e)
            for a in self.alphabet:
                for e in self.E:
                    self.cell(s + (a,), e)

    # -- closedness -----------------------------------------------------------

    def close(self) -> None:
        """Promote successor prefixes into S until every successor row has
        a representative. Preserves prefix-closedness of S because only
        one-step extensions of S members are promoted."""
        while True:
            rows = {self.row(s) for s in self.S}
            promoted = None
            for s in self.S:
                for a in self.alphabet:
                    sa = s + (a,)
                    if self.row(sa) not in rows:
                        promoted = sa
                        break
                if promoted:
                    break
            if promoted is None:
                return
            self.S.append(promoted)
            self.fill()

    def make_consistent(self) -> bool:
        """Classic consistency: equal S-rows must have equal successor
        rows; a violation contributes one extending suffix to E. Only the
        all-prefixes counterexample strategy needs this; the binary-search
        suffixes keep E distinguishing by construction."""
        for i, s1 in enumerate(self.S):
            for s2 in self.S[i + 1:]:
                if self.row(s1) != self.row(s2):
                    continue
                for a in self.alphabet:
                    r1, r2 = self.row(s1 + (a,)), self.row(s2 + (a,))
                    if r1 == r2:
                        continue
                    for e, c1, c2 in zip(self.E, r1, r2):
                        if c1 != c2:
                            self.E.append((a,) + e)
                            self.fill()
                            return False
        return True

    # -- hypothesis -----------------------------------------------------------

    def hypothesis(self) -> tuple:
        """(machine, access map: state id -> access sequence).

        Built from the reachable closure of the initial row only: a
        majority update in the cache can orphan stale rows, and the
        machine representation rejects unreachable states. Conformance
        testing repairs whatever inconsistency remains.
        """
        reps: dict = {}
        access: dict = {}
        for s in self.S:
            r = self.row(s)
            if r not in reps:
                reps[r] = len(reps)
                access[reps[r]] = s
        raw_edges = {}
        for s in self.S:
            state = reps[self.row(s)]
            for a in self.alphabet:
                out = self.cell(s, (a,))[0]
                nxt = reps[self.row(s + (a,))]
                raw_edges[(state, a)] = (nxt, out)
        initial = reps[self.row(())]
        keep = {initial}
        frontier = [initial]
        while frontier:
            state = frontier.pop()
            for a in self.alphabet:
                nxt = raw_edges[(state, a)][0]
                if nxt not in keep:
                    keep.add(nxt)
                    frontier.append(nxt)
        edges = {(s, a): v for (s, a), v in raw_edges.items() if s in keep}
        machine = mealy.MealyMachine(
            inputs=self.alphabet, initial=initial, edges=edges)
        access = {s: seq for s, seq in access.items() if s in keep}
        return machine, access


def _suffix_outputs(query, word: tuple, cut: int) -> tuple:
    return tuple(query(word)[cut:])


def process_counterexample_rs(table: ObservationTable, hyp, access,
                              cex: tuple) -> None:
    """Backward binary search over the counterexample for one suffix that
    separates two rows the hypothesis currently merges; E grows by
    exactly that suffix. Costs O(log |cex|) probe queries."""
    query = table.query

    def agrees(i: int) -> bool:
        state = hyp.state_after(cex[:i])
        alpha = access[state]
        word = alpha + cex[i:]
        sul_tail = _suffix_outputs(query, word, len(alpha))
        hyp_tail = tuple(mealy.run(hyp, word)[len(alpha):])
        return sul_tail == hyp_tail

    if agrees(0):
        raise NotACounterexample(f"{cex} does not separate hypothesis and SUL")
    lo, hi = 0, len(cex)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if agrees(mid):
            hi = mid
        else:
            lo = mid
    suffix = cex[lo + 1:]
    if suffix and suffix not in table.E:
        table.E.append(suffix)
        return
    # fallback when noise residue yields no usable suffix: classic prefixes
    process_counterexample_prefixes(table, hyp, access, cex, check=False)


def process_counterexample_prefixes(table: ObservationTable, hyp, access,
                                    cex: tuple, check: bool = True) -> None:
    """Classic processing: add every prefix of the counterexample to S."""
    if check:
        sul = tuple(table.query(cex))
        if sul == tuple(mealy.run(hyp, cex)):
            raise NotACounterexample(
                f"{cex} does not separate hypothesis and SUL")
    for k in range(1, len(cex) + 1):
        p = cex[:k]
        if p not in table.S:
            table.S.append(p)
    table.fill()


def learn(robust, alphabet, oracle, stats: Optional[RunStats] = None,
          cex_processing: str = "rs"):
    """Drive L* against a robust session until the oracle passes.

    Returns (machine, stats). Aborts from the robust layer propagate with
    the partial stats attached.
    """
    stats = stats if stats is not None else RunStats()

    def query(word):
        return robust.query(word)

    table = ObservationTable(alphabet, query)
    t0 = time.monotonic()
    spurious_budget = 25
    try:
        table.fill()
        while True:
            table.close()
            if cex_processing != "rs":
                while not table.make_consistent():
                    table.close()
            hyp, access = table.hypothesis()
            stats.learning_rounds += 1
            stats.learning_time_ms += (time.monotonic() - t0) * 1000.0
            t0 = time.monotonic()
            refined = False
            while not refined:
                cex = oracle.find_counterexample(hyp, robust)
                stats.conformance_time_ms += (time.monotonic() - t0) * 1000.0
                t0 = time.monotonic()
                if cex is None:
                    stats.states = len(hyp.states)
                    stats.finish()
                    return hyp, stats
                try:
                    if cex_processing == "rs":
                        process_counterexample_rs(table, hyp, access,
                                                  tuple(cex))
                    else:
                        process_counterexample_prefixes(table, hyp, access,
                                                        tuple(cex))
                    refined = True
                except NotACounterexample:
                    # residual channel noise slipped past the oracle's
                    # confirmation; drop the candidate and keep testing
                    spurious_budget -= 1
                    if spurious_budget <= 0:
                        raise
            table.fill()
    except Exception as exc:
        stats.finish()
        if hasattr(exc, "stats"):
            exc.stats = stats
        raise
