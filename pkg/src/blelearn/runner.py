"""Wires a complete learning run together: peripheral, mapper, channel,
robust interface, learner, oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import catalog, learner, mealy
from .oracle import OracleConfig, StatePrefixOracle
from .robust import (CONNECTION_DEFAULTS, PAIRING_DEFAULTS, RobustConfig,
                     RobustInterface)
from .session import ChannelNoiseConfig, make_session
from .stats import RunStats


@dataclass
class RunConfig:
    target: str
    procedure: str
    noise: ChannelNoiseConfig = ChannelNoiseConfig()
    robust: Optional[RobustConfig] = None
    oracle: OracleConfig = OracleConfig()
    quirks_on: bool = False
    drop_inputs: tuple = ()
    cex_processing: str = "rs"

    def resolved_robust(self) -> RobustConfig:
        if self.robust is not None:
            return self.robust
        return (PAIRING_DEFAULTS if self.procedure == "pairing"
                else CONNECTION_DEFAULTS)


@dataclass
class RunResult:
    machine: Optional[mealy.MealyMachine]
    stats: RunStats
    counters: dict
    aborted: Optional[str] = None
    suite: list = field(default_factory=list)


def build_interface(cfg: RunConfig, stats: RunStats) -> RobustInterface:
    entry = catalog.entry(cfg.target, cfg.procedure)
    sess = make_session(cfg.target, cfg.procedure,
                        quirks_on=cfg.quirks_on, noise=cfg.noise)
    # hard-reset escalation is automatic for simulated pairing runs; the
    # connection setup aborts instead, as the field campaign did
    callback = sess.hard_reset if cfg.procedure == "pairing" else None
    return RobustInterface(sess, cfg.resolved_robust(),
                           reset_profile=entry.reset_profile,
                           hard_reset_callback=callback,
                           stats=stats)


def learning_alphabet(cfg: RunConfig) -> tuple:
    entry = catalog.entry(cfg.target, cfg.procedure)
    alphabet = tuple(a for a in entry.learn_alphabet
                     if a not in cfg.drop_inputs)
    if not alphabet:
        raise ValueError("empty learning alphabet after drops")
    return alphabet


def expected_machine(cfg: RunConfig) -> mealy.MealyMachine:
    """Minimal ground truth for this run's alphabet (reference machine,
    restricted further if inputs were dropped)."""
    entry = catalog.entry(cfg.target, cfg.procedure)
    view = mealy.restrict(entry.machine, learning_alphabet(cfg),
                          initial=entry.learn_initial)
    return mealy.relabel(mealy.minimize(view))


def run_learning(cfg: RunConfig) -> RunResult:
    stats = RunStats()
    robust = build_interface(cfg, stats)
    oracle = StatePrefixOracle(cfg.oracle)
    try:
        machine, stats = learner.learn(
            robust, learning_alphabet(cfg), oracle, stats,
            cex_processing=cfg.cex_processing)
    except learner.NotACounterexample as exc:
        stats.finish()
        return RunResult(None, stats, robust.sess.counters.as_dict(),
                         aborted=f"counterexample rejected: {exc}")
    except Exception as exc:
        if not hasattr(exc, "reason"):
            raise
        stats.finish()
        return RunResult(None, stats, robust.sess.counters.as_dict(),
                         aborted=exc.reason, suite=oracle.last_suite)
    return RunResult(machine, stats, robust.sess.counters.as_dict(),
                     suite=oracle.last_suite)
