"""Run statistics matching the evaluation tables' row names.

Every run emits the full key set, zero-filled where not applicable, so
regression tooling can diff stats files across targets.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .mapper import constants_version

STATS_KEYS = (
    "states",
    "total_time_ms",
    "learning_time_ms",
    "conformance_time_ms",
    "learning_rounds",
    "output_queries",
    "output_query_steps",
    "conformance_tests",
    "conformance_test_steps",
    "connection_errors",
    "nondet_outputs",
    "cache_updates",
    "hard_resets",
)


@dataclass
class RunStats:
    states: int = 0
    learning_rounds: int = 0
    output_queries: int = 0
    output_query_steps: int = 0
    conformance_tests: int = 0
    conformance_test_steps: int = 0
    started: float = field(default_factory=time.monotonic)
    total_time_ms: float = 0.0
    learning_time_ms: float = 0.0
    conformance_time_ms: float = 0.0
    extra: dict = field(default_factory=dict)

    def record_execution(self, steps: int, conformance: bool) -> None:
        if conformance:
            self.conformance_tests += 1
            self.conformance_test_steps += steps
        else:
            self.output_queries += 1
            self.output_query_steps += steps

    def finish(self) -> None:
        self.total_time_ms = (time.monotonic() - self.started) * 1000.0

    def as_dict(self, counters=None) -> dict:
        doc = {k: getattr(self, k) for k in STATS_KEYS
               if hasattr(self, k)}
        counters = counters.as_dict() if counters is not None else {}
        for key in ("connection_errors", "nondet_outputs",
                    "cache_updates", "hard_resets"):
            doc[key] = counters.get(key, 0)
        doc["constants_version"] = constants_version()
        doc.update(self.extra)
        return {k: doc.get(k, 0) for k in STATS_KEYS} | {
            k: v for k, v in doc.items() if k not in STATS_KEYS}

    def dump(self, counters=None) -> str:
        return json.dumps(self.as_dict(counters), indent=2, sort_keys=True)
