"""Shared test utilities: seeded machine generators and brute-force
equivalence oracles kept independent of the search code they check."""

from __future__ import annotations

import random
from itertools import product

from blelearn import mealy


def random_machine(rng: random.Random, n_states: int, n_inputs: int = 3,
                   n_outputs: int = 2) -> mealy.MealyMachine:
    """Random total machine, reachable by construction (each new state is
    attached under a fresh (predecessor, input) slot)."""
    inputs = tuple(f"i{k}" for k in range(n_inputs))
    outs = [f"o{k}" for k in range(n_outputs)]
    edges = {}
    for s in range(1, n_states):
        while True:
            p, a = rng.randrange(s), rng.choice(inputs)
            if (p, a) not in edges:
                break
        edges[(p, a)] = (s, rng.choice(outs))
    for s in range(n_states):
        for a in inputs:
            if (s, a) not in edges:
                edges[(s, a)] = (rng.randrange(n_states), rng.choice(outs))
    return mealy.MealyMachine(inputs=inputs, initial=0, edges=edges)


def brute_equivalence_verdict(a: mealy.MealyMachine,
                              b: mealy.MealyMachine) -> bool:
    """Depth-first product exploration with a visited set. Decides the
    same question as the BFS counterexample search without sharing its
    code path."""
    seen = set()
    stack = [(a.initial, b.initial)]
    while stack:
        sa, sb = stack.pop()
        if (sa, sb) in seen:
            continue
        seen.add((sa, sb))
        for i in a.inputs:
            na, oa = a.edges[(sa, i)]
            nb, ob = b.edges[(sb, i)]
            if oa != ob:
                return False
            stack.append((na, nb))
    return True


def shortest_separating_length(a: mealy.MealyMachine, b: mealy.MealyMachine,
                               max_len: int):
    """Plain enumeration of all input sequences by increasing length."""
    for length in range(1, max_len + 1):
        for seq in product(a.inputs, repeat=length):
            if mealy.run(a, seq) != mealy.run(b, seq):
                return length
    return None


def single_input_distinct(m: mealy.MealyMachine) -> bool:
    rows = set()
    for s in m.states:
        row = tuple(m.edges[(s, i)][1] for i in m.inputs)
        if row in rows:
            return False
        rows.add(row)
    return True
