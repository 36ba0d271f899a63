"""Derive and verify device-identifying input sequences.

A fingerprinting sequence is one input sequence whose output sequences
are pairwise distinct across a set of device models. Segments are joined
by the scan request, which all models must honor as a stable reset: it
answers ADV from every state and lands on a state that further scans do
not move. Derivation replays the partial sequence on every model, so the
distinguishing probes are always computed from the true current states.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import mealy
from .symbols import RESET_INPUT


class FingerprintError(Exception):
    pass


@dataclass
class FingerprintReport:
    sequence: tuple
    outputs: dict
    distinct: bool
    indistinguishable_pair: Optional[tuple] = None

    def as_dict(self) -> dict:
        doc = {
            "sequence": list(self.sequence),
            "outputs": {soc: list(outs) for soc, outs in self.outputs.items()},
            "distinct": self.distinct,
        }
        if self.indistinguishable_pair:
            doc["indistinguishable_pair"] = list(self.indistinguishable_pair)
        return doc

    def dump(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    @classmethod
    def load(cls, text: str) -> "FingerprintReport":
        doc = json.loads(text)
        return cls(
            sequence=tuple(doc["sequence"]),
            outputs={soc: list(outs) for soc, outs in doc["outputs"].items()},
            distinct=bool(doc["distinct"]),
            indistinguishable_pair=tuple(doc["indistinguishable_pair"])
            if doc.get("indistinguishable_pair") else None)


def _verify_reset(soc_id: str, machine: mealy.MealyMachine) -> None:
    if RESET_INPUT not in machine.edges_index:
        raise FingerprintError(
            f"{soc_id}: models must include the reset input {RESET_INPUT!r}")
    for q in machine.states:
        landing, out = machine.edges[(q, RESET_INPUT)]
        if out != "ADV":
            raise FingerprintError(
                f"{soc_id}: scan request answers {out!r} from state {q!r}, "
                "not ADV; it is not a usable reset")
        if machine.edges[(landing, RESET_INPUT)][0] != landing:
            raise FingerprintError(
                f"{soc_id}: scan request does not stabilize from state {q!r}")


def derive_fingerprint(models: Sequence) -> FingerprintReport:
    """Greedy construction over (soc_id, machine) pairs: repeatedly split
    the largest still-confounded group with a pairwise distinguishing
    sequence computed from the models' current post-reset states, joining
    segments with the reset input."""
    models = sorted(models, key=lambda kv: kv[0])
    if not models:
        raise FingerprintError("no models given")
    ids = [soc for soc, _m in models]
    if len(set(ids)) != len(ids):
        raise FingerprintError(f"duplicate model ids: {ids}")
    alphabet = set(models[0][1].inputs)
    for soc, m in models:
        if set(m.inputs) != alphabet:
            raise mealy.AlphabetMismatchError(
                f"{soc} uses a different input alphabet")
        _verify_reset(soc, m)

    machines = dict(models)
    current = {soc: m.initial for soc, m in models}
    history = {soc: () for soc in ids}
    sequence: tuple = ()

    def groups():
        buckets: dict = {}
        for soc in ids:
            buckets.setdefault(history[soc], []).append(soc)
        return [g for g in buckets.values() if len(g) > 1]

    def replay(seg):
        nonlocal sequence
        sequence += seg
        for soc in ids:
            m = machines[soc]
            outs = []
            s = current[soc]
            for sym in seg:
                s, o = m.edges[(s, sym)]
                outs.append(o)
            current[soc] = s
            history[soc] = history[soc] + tuple(outs)

    while True:
        confounded = groups()
        if not confounded:
            break
        group = max(confounded, key=lambda g: (len(g), [ids.index(s) for s in g]))
        group = sorted(group, key=ids.index)
        probe = None
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                a, b = group[i], group[j]
                ra = _rerooted_after_reset(machines[a], current[a])
                rb = _rerooted_after_reset(machines[b], current[b])
                d = mealy.distinguishing_sequence(ra, rb)
                if d is not None:
                    probe = d
                    break
            if probe is not None:
                break
        if probe is None:
            replay(())
            return FingerprintReport(
                sequence=sequence,
                outputs={soc: list(history[soc]) for soc in ids},
                distinct=False,
                indistinguishable_pair=(group[0], group[1]))
        replay((RESET_INPUT,) + tuple(probe))

    report = FingerprintReport(
        sequence=sequence,
        outputs={soc: list(history[soc]) for soc in ids},
        distinct=True)
    _validate(report, machines)
    return report


def _rerooted_after_reset(machine: mealy.MealyMachine, state):
    landing = machine.edges[(state, RESET_INPUT)][0]
    return mealy.restrict(machine, machine.inputs, initial=landing)


def _validate(report: FingerprintReport, machines: dict) -> None:
    outs = list(report.outputs.values())
    for i in range(len(outs)):
        for j in range(i + 1, len(outs)):
            if outs[i] == outs[j]:
                raise FingerprintError("derived report is not distinct")
    for soc, m in machines.items():
        if mealy.run(m, report.sequence) != report.outputs[soc]:
            raise FingerprintError(f"replay mismatch for {soc}")


def apply_fingerprint(seq: Sequence, target) -> list:
    """Execute the sequence on a model (pure run) or a live robust
    session (robust query)."""
    if isinstance(target, mealy.MealyMachine):
        return mealy.run(target, list(seq))
    if hasattr(target, "query"):
        return list(target.query(tuple(seq)))
    raise TypeError(f"cannot apply fingerprint to {type(target).__name__}")


def classify(report: FingerprintReport, observed: Sequence) -> str:
    if not report.distinct:
        raise FingerprintError("report is not distinct; cannot classify")
    observed = list(observed)
    for soc, outs in report.outputs.items():
        if list(outs) == observed:
            return soc
    return "unknown"
