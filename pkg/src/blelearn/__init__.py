"""Active automata learning and fingerprinting for simulated BLE
peripherals: an L*-based Mealy learner hardened against lossy channels,
a six-SoC peripheral farm, and a fingerprinting engine."""

from .mealy import (MealyMachine, run, equivalent, distinguishing_sequence,
                    to_dot, from_dot)
from .catalog import reference_machine, device_machine
from .fingerprint import derive_fingerprint, apply_fingerprint, classify

__all__ = [
    "MealyMachine", "run", "equivalent", "distinguishing_sequence",
    "to_dot", "from_dot", "reference_machine", "device_machine",
    "derive_fingerprint", "apply_fingerprint", "classify",
]
