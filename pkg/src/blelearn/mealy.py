"""Deterministic, input-enabled Mealy machines.

The machine is the common currency of the whole package: simulated
peripherals realize one, the learner produces one, the fingerprinting
engine compares several. Machines are immutable after construction and
every operation here is pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from collections import deque
from typing import Iterable, Mapping, Optional, Sequence


class MealyError(Exception):
    pass


class UnknownInputError(MealyError):
    def __init__(self, symbol):
        super().__init__(f"input symbol not in alphabet: {symbol!r}")
        self.symbol = symbol


class AlphabetMismatchError(MealyError):
    pass


class DotParseError(MealyError):
    def __init__(self, message, line, column=0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class MealyMachine:
    """6-tuple (states, initial, inputs, outputs, transition, output).

    Transition and output maps must be total over states x inputs, and
    every state must be reachable from the initial state; construction
    rejects anything else rather than silently completing it.
    """

    inputs: tuple
    initial: int
    # (state, input) -> (next_state, output)
    edges: Mapping[tuple, tuple] = field(hash=False)

    def __post_init__(self):
        states = {self.initial}
        for (s, _i) in self.edges:
            states.add(s)
        for (nxt, _o) in self.edges.values():
            states.add(nxt)
        if len(set(self.inputs)) != len(self.inputs):
            raise MealyError("duplicate input symbols in alphabet")
        for s in states:
            for i in self.inputs:
                if (s, i) not in self.edges:
                    raise MealyError(
                        f"transition map is not total: missing ({s!r}, {i!r})")
        reachable = self._reach(states)
        if reachable != states:
            missing = sorted(states - reachable)
            raise MealyError(f"unreachable states rejected: {missing}")
        object.__setattr__(self, "_states", frozenset(states))
        object.__setattr__(self, "_input_set", frozenset(self.inputs))

    def _reach(self, states):
        seen = {self.initial}
        todo = deque([self.initial])
        while todo:
            s = todo.popleft()
            for i in self.inputs:
                nxt = self.edges[(s, i)][0]
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return seen

    @property
    def states(self) -> frozenset:
        return self._states

    @property
    def outputs(self) -> frozenset:
        return frozenset(o for (_n, o) in self.edges.values())

    def step(self, state, symbol):
        if symbol not in self._input_set:
            raise UnknownInputError(symbol)
        return self.edges[(state, symbol)]

    @property
    def edges_index(self) -> frozenset:
        return self._input_set

    def successor(self, state, symbol):
        return self.step(state, symbol)[0]

    def output_of(self, state, symbol):
        return self.step(state, symbol)[1]

    def state_after(self, seq: Sequence) -> int:
        """delta* extended to sequences."""
        s = self.initial
        for sym in seq:
            s = self.successor(s, sym)
        return s


def run(machine: MealyMachine, seq: Sequence) -> list:
    """lambda*: the output sequence observed for `seq` from the initial state."""
    out = []
    s = machine.initial
    for sym in seq:
        if sym not in machine.edges_index:
            raise UnknownInputError(sym)
        s, o = machine.edges[(s, sym)]
        out.append(o)
    return out


def build(initial, inputs: Iterable, transitions: Mapping) -> MealyMachine:
    """Build a machine from {state: {input: (next, output)}}."""
    inputs = tuple(inputs)
    edges = {}
    for state, row in transitions.items():
        for sym, (nxt, out) in row.items():
            edges[(state, sym)] = (nxt, out)
    return MealyMachine(inputs=inputs, initial=initial, edges=edges)


def _check_same_alphabet(a: MealyMachine, b: MealyMachine):
    if tuple(a.inputs) != tuple(b.inputs):
        if set(a.inputs) == set(b.inputs):
            return  # same symbols, different declared order is fine
        raise AlphabetMismatchError(
            f"input alphabets differ: {sorted(a.inputs)} vs {sorted(b.inputs)}")


def equivalent(a: MealyMachine, b: MealyMachine):
    """None if no input sequence separates the machines, else a shortest
    separating sequence (ties broken lexicographically by the order of
    a.inputs). BFS over the product automaton."""
    _check_same_alphabet(a, b)
    seen = {(a.initial, b.initial)}
    queue = deque([(a.initial, b.initial, ())])
    while queue:
        sa, sb, prefix = queue.popleft()
        for sym in a.inputs:
            na, oa = a.edges[(sa, sym)]
            nb, ob = b.edges[(sb, sym)]
            if oa != ob:
                return prefix + (sym,)
            if (na, nb) not in seen:
                seen.add((na, nb))
                queue.append((na, nb, prefix + (sym,)))
    return None


def distinguishing_sequence(a: MealyMachine, b: MealyMachine):
    """A minimal-length checking sequence separating a and b, or None if
    the machines are equivalent."""
    return equivalent(a, b)


def minimize(machine: MealyMachine) -> MealyMachine:
    """Partition-refinement minimization (outputs first, then successors)."""
    states = sorted(machine.states)
    sig = {s: tuple(machine.edges[(s, i)][1] for i in machine.inputs)
           for s in states}
    block = {}
    for s in states:
        block.setdefault(sig[s], []).append(s)
    partition = list(block.values())
    while True:
        index = {s: n for n, grp in enumerate(partition) for s in grp}
        refined = []
        for grp in partition:
            sub = {}
            for s in grp:
                key = tuple(index[machine.edges[(s, i)][0]] for i in machine.inputs)
                sub.setdefault(key, []).append(s)
            refined.extend(sub.values())
        if len(refined) == len(partition):
            break
        partition = refined
    index = {s: n for n, grp in enumerate(partition) for s in grp}
    edges = {}
    for n, grp in enumerate(partition):
        rep = grp[0]
        for i in machine.inputs:
            nxt, out = machine.edges[(rep, i)]
            edges[(n, i)] = (index[nxt], out)
    # drop blocks unreachable from the initial block
    init = index[machine.initial]
    seen = {init}
    todo = deque([init])
    while todo:
        s = todo.popleft()
        for i in machine.inputs:
            nxt = edges[(s, i)][0]
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    kept = {(s, i): v for (s, i), v in edges.items() if s in seen}
    return MealyMachine(inputs=machine.inputs, initial=init, edges=kept)


def canonical_form(machine: MealyMachine):
    """BFS-canonical edge list; two machines are isomorphic iff their
    canonical forms are equal (state names erased, alphabet order kept)."""
    order = {machine.initial: 0}
    todo = deque([machine.initial])
    while todo:
        s = todo.popleft()
        for i in machine.inputs:
            nxt = machine.edges[(s, i)][0]
            if nxt not in order:
                order[nxt] = len(order)
                todo.append(nxt)
    edges = tuple(
        (order[s], i, order[machine.edges[(s, i)][0]], machine.edges[(s, i)][1])
        for s in sorted(order, key=order.get)
        for i in machine.inputs)
    return (tuple(machine.inputs), edges)


def isomorphic(a: MealyMachine, b: MealyMachine) -> bool:
    return canonical_form(a) == canonical_form(b)


def restrict(machine: MealyMachine, inputs: Sequence, initial=None) -> MealyMachine:
    """Reachable restriction of the machine to a sub-alphabet, optionally
    re-rooted at another state. Used for the catalog's reduced learning
    views (post-connection setups, dropped inputs)."""
    initial = machine.initial if initial is None else initial
    inputs = tuple(inputs)
    for i in inputs:
        if i not in machine.edges_index:
            raise UnknownInputError(i)
    seen = {initial}
    todo = deque([initial])
    edges = {}
    while todo:
        s = todo.popleft()
        for i in inputs:
            nxt, out = machine.edges[(s, i)]
            edges[(s, i)] = (nxt, out)
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return MealyMachine(inputs=inputs, initial=initial, edges=edges)


def relabel(machine: MealyMachine) -> MealyMachine:
    """Rename states to 0..n-1 in BFS order."""
    order = {machine.initial: 0}
    todo = deque([machine.initial])
    while todo:
        s = todo.popleft()
        for i in machine.inputs:
            nxt = machine.edges[(s, i)][0]
            if nxt not in order:
                order[nxt] = len(order)
                todo.append(nxt)
    edges = {(order[s], i): (order[n], o)
             for (s, i), (n, o) in machine.edges.items()}
    return MealyMachine(inputs=machine.inputs, initial=0, edges=edges)


# ---------------------------------------------------------------------------
# DOT serialization
#
# Dialect: a digraph with one node statement per state, the start node
# carrying an `initial` attribute, and edge labels of the exact form
# input/output. The slash is reserved: it may not appear inside symbols.
# ---------------------------------------------------------------------------

def to_dot(machine: MealyMachine, name: str = "mealy") -> str:
    m = relabel(machine)
    lines = [f"digraph {name} {{"]
    for s in sorted(m.states):
        attrs = 'initial=true, shape=doublecircle' if s == m.initial else 'shape=circle'
        lines.append(f'  s{s} [label="s{s}", {attrs}];')
    for s in sorted(m.states):
        for i in m.inputs:
            nxt, out = m.edges[(s, i)]
            if "/" in str(i) or "/" in str(out):
                raise MealyError(f"'/' is reserved in DOT labels: {i!r}/{out!r}")
            lines.append(f'  s{s} -> s{nxt} [label="{i}/{out}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


_NODE_RE = re.compile(r'^\s*(\w+)\s*\[(.*)\]\s*;?\s*$')
_EDGE_RE = re.compile(r'^\s*(\w+)\s*->\s*(\w+)\s*\[\s*label\s*=\s*"([^"]*)"\s*\]\s*;?\s*$')


def from_dot(text: str) -> MealyMachine:
    """Parse the DOT dialect emitted by to_dot. Raises DotParseError with
    line/column information, and MealyError if the parsed transition map
    is not total."""
    initial = None
    nodes = []
    edges = {}
    inputs = []
    in_graph = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("//") or line.startswith("#"):
            continue
        if line.startswith("digraph"):
            in_graph = True
            continue
        if line.startswith("}"):
            in_graph = False
            continue
        if not in_graph:
            raise DotParseError("statement outside digraph", lineno)
        m = _EDGE_RE.match(line)
        if m:
            src, dst, label = m.groups()
            if "/" not in label:
                raise DotParseError(
                    f"edge label {label!r} is not of the form input/output",
                    lineno, raw.index(label))
            if label.count("/") > 1:
                raise DotParseError(
                    f"'/' is reserved and may appear exactly once: {label!r}",
                    lineno, raw.index(label))
            sym, out = label.split("/")
            if not sym or not out:
                raise DotParseError(f"empty symbol in label {label!r}", lineno)
            if (src, sym) in edges:
                raise DotParseError(
                    f"duplicate transition for ({src}, {sym})", lineno)
            edges[(src, sym)] = (dst, out)
            if sym not in inputs:
                inputs.append(sym)
            continue
        m = _NODE_RE.match(line)
        if m:
            name, attrs = m.groups()
            nodes.append(name)
            if "initial" in attrs:
                if initial is not None:
                    raise DotParseError("more than one initial node", lineno)
                initial = name
            continue
        raise DotParseError(f"unparseable statement: {line!r}", lineno)
    if initial is None:
        raise DotParseError("no node carries the initial attribute", 1)
    states = set(nodes) | {s for (s, _i) in edges} | {n for (n, _o) in edges.values()}
    index = {n: k for k, n in enumerate(sorted(states))}
    built = {(index[s], i): (index[n], o) for (s, i), (n, o) in edges.items()}
    machine = MealyMachine(inputs=tuple(inputs), initial=index[initial], edges=built)
    return relabel(machine)
