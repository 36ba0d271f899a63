"""The query boundary between learner and system under learning.

A session owns one peripheral and one mapper and exposes single-step
execution plus pre/post reset hooks. Counters accumulate for the whole
session and feed the stats snapshot.

The response-collection loop models the listening central: packets of a
response arrive spread over listen attempts (a slow responder delivers
on every second attempt); listening stops after `rsp_min` attempts once
a convincing packet (more than a bare data packet) has been seen, and
always stops at `rsp_max`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

from . import mapper as mapper_mod
from .mapper import MapperState
from .mixing import mix, unit_draw
from .packets import ConcretePacket
from .peripheral import PeripheralDevice
from .symbols import ADV, EMPTY, PAUSE_ENC, RESET_INPUT, TERMINATE


@dataclass
class Counters:
    queries: int = 0
    steps: int = 0
    connection_errors: int = 0
    nondet_outputs: int = 0
    cache_updates: int = 0
    hard_resets: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ChannelNoiseConfig:
    loss_prob: float = 0.0
    delay_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("loss_prob", "delay_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be within [0, 1]: {p}")


@dataclass(frozen=True)
class ListenConfig:
    rsp_min: int = 10
    rsp_max: int = 20


class SulSession:
    """Simulated target behind a mapper. Single-owner, strictly
    sequential; step() is only meaningful between begin_query() and the
    closing reset."""

    def __init__(self, device: PeripheralDevice, alphabet,
                 listen: ListenConfig = ListenConfig()):
        self.device = device
        self.alphabet = tuple(alphabet)
        self.mapper_state = MapperState()
        self.counters = Counters()
        self.listen = listen
        self._query_index = 0
        self._step_index = 0

    # -- query bookkeeping ---------------------------------------------------

    def begin_query(self) -> None:
        self.counters.queries += 1
        self._query_index += 1
        self._step_index = 0

    @property
    def query_index(self) -> int:
        return self._query_index

    def hard_reset(self) -> None:
        self.device.hard_reset()
        self.mapper_state.reset()
        self.counters.hard_resets += 1

    # -- single-step execution ----------------------------------------------

    def step(self, symbol: str, count: bool = True) -> str:
        if count:
            self.counters.steps += 1
        self._step_index += 1
        pkt = mapper_mod.concretize(self.mapper_state, symbol)
        response = self._exchange(pkt)
        return mapper_mod.abstract(self.mapper_state, response)

    def _exchange(self, pkt: ConcretePacket) -> list:
        packets = self.device.transmit(pkt)
        return self._collect(packets)

    def _collect(self, packets: list) -> list:
        """Listen-loop: packets arrive with the device's stride; stop at
        rsp_min once something convincing arrived, always stop at rsp_max."""
        if not packets:
            return []
        stride = self.device.entry.response_stride
        if stride * len(packets) <= self.listen.rsp_min:
            return list(packets)  # everything arrives before listening may stop
        arrivals = {(k + 1) * stride: p for k, p in enumerate(packets)}
        observed = []
        convincing = False
        for attempt in range(1, self.listen.rsp_max + 1):
            p = arrivals.get(attempt)
            if p is not None:
                observed.append(p)
                if p.layers != ("BTLE_DATA",):
                    convincing = True
            if attempt >= self.listen.rsp_min and convincing:
                break
        return observed


def execute_query(sess: SulSession, seq) -> list:
    """One full pre / steps / post cycle, without the robust machinery:
    a single scan before, a termination after, best effort both."""
    for sym in seq:
        if sym not in sess.alphabet:
            raise mapper_mod.UnknownSymbolError(sym)
    sess.begin_query()
    sess.step(RESET_INPUT, count=False)
    outputs = [sess.step(sym) for sym in seq]
    sess.step(TERMINATE, count=False)
    return outputs


class NoisySession(SulSession):
    """Channel wrapper: independently per step, the outgoing packet is
    lost (the device never sees it, the observation is EMPTY) or the
    response is delayed by one step, displacing the next step's own
    response. Decisions come from a counter-based PRNG keyed by
    (seed, query index, step index), so any query cycle replays
    identically regardless of execution order."""

    def __init__(self, inner: SulSession, cfg: ChannelNoiseConfig):
        self.inner = inner
        self.cfg = cfg
        self._pending = None

    # shared state lives in the inner session
    @property
    def device(self):
        return self.inner.device

    @property
    def alphabet(self):
        return self.inner.alphabet

    @property
    def mapper_state(self):
        return self.inner.mapper_state

    @property
    def counters(self):
        return self.inner.counters

    @property
    def listen(self):
        return self.inner.listen

    @property
    def query_index(self):
        return self.inner.query_index

    def begin_query(self):
        self.inner.begin_query()

    def hard_reset(self):
        self.inner.hard_reset()
        self._pending = None

    def step(self, symbol: str, count: bool = True) -> str:
        if count:
            self.inner.counters.steps += 1
        self.inner._step_index += 1
        q, s = self.inner._query_index, self.inner._step_index
        lose = unit_draw(self.cfg.seed, 0x105E, q, s) < self.cfg.loss_prob
        delay = unit_draw(self.cfg.seed, 0xDE1A, q, s) < self.cfg.delay_prob

        delivered = self._pending
        self._pending = None

        if lose:
            response = []
        else:
            pkt = mapper_mod.concretize(self.inner.mapper_state, symbol)
            response = self.inner._exchange(pkt)

        if delivered is not None:
            # the late response displaces this step's own
            response = delivered
        elif delay and response:
            self._pending = response
            response = []
        return mapper_mod.abstract(self.inner.mapper_state, response)


def wrap_noisy(inner: SulSession, cfg: ChannelNoiseConfig) -> SulSession:
    return NoisySession(inner, cfg)


def make_session(soc_id: str, procedure: str, quirks_on: bool = False,
                 noise: ChannelNoiseConfig | None = None) -> SulSession:
    device = PeripheralDevice(soc_id, procedure, quirks_on=quirks_on)
    listen = ListenConfig(rsp_min=20, rsp_max=30) \
        if "slow_responder" in device.entry.quirks else ListenConfig()
    sess = SulSession(device, device.entry.learn_alphabet, listen)
    if noise is not None and (noise.loss_prob > 0 or noise.delay_prob > 0):
        return wrap_noisy(sess, noise)
    return sess
