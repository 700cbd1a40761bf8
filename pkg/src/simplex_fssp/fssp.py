"""Firing squad synchronization over simplex-channel digraphs.

The program runs in three waves started by the general:

1. a first broadcast of ``x(k,i)`` that records depths ``n(k)`` and
   virtual-dag parents ``p(j)``;
2. a virtual convergecast, where every cell reports its max-depth to each
   virtual-dag parent as ``a(parent, sender, maxdepth)``, flooding the
   message over the digraph because there is no back channel (cells also
   send zero-payload reports to digraph parents that are not dag parents,
   so that every outgoing arc is eventually accounted for by one ``c``);
3. a countdown broadcast ``f(k)`` started with the general's eccentricity,
   so that every cell reaches ``f(0)`` in the same step and fires.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .engine import Program, Rule, SystemConfiguration, Trace
from .symbols import Symbol, sym
from .topology import Digraph, TopologyError

S0, S1, S2, S3, S4, MAX, S5, SF = "S0", "S1", "S2", "S3", "S4", "Max", "S5", "Sf"
STATES = (S0, S1, S2, S3, S4, MAX, S5, SF)
QUIESCENT, FIRED = S0, SF

# functor -> allowed arities
ALPHABET = {
    "iota": {1},  # cell id
    "a": {0, 3},  # start order / convergecast message a(dest, sender, maxdepth)
    "g": {0},
    "x": {2},  # first-wave message x(depth, sender)
    "n": {1},
    "m": {1},
    "l": {1},
    "p": {1},
    "y": {2},
    "v": {2},
    "s": {1},
    "c": {0},
    "e": {0},
    "b": {0},
    "t": {0},
    "f": {1},
    "w": {0},
}

# (name, rule text, mode).  ``out(...)`` is a broadcast to all children.
_RULES = [
    # S0: start, depth and parent recording
    ("0.1", "S0 a -> S1 g n(0) m(0) out(x(1,i)) | iota(i)", "min.min"),
    ("0.2", "S0 x(k,j) -> S1 l(k) p(j) out(x(k+1,i)) | iota(i)", "max.min"),
    ("0.3", "S0 x(k,j) -> S1 p(j) | iota(i)", "max.max"),
    # S1: finish depth, answer late x with zero reports, relay convergecasts
    ("1.1", "S1 l(k) -> S1 n(k) m(k)", "max.min"),
    ("1.2", "S1 l(k) -> S1", "max.max"),
    ("1.3", "S1 x(k,j) -> S1 y(j,0)", "max.min"),
    ("1.4", "S1 x(k,j) -> S1", "max.max"),
    ("1.5", "S1 s(k) -> Max w m(k)", "min.min"),
    ("1.6", "S1 y(j,k) -> S1 v(j,i) out(a(j,i,k)) | iota(i)", "max.min"),
    ("1.7", "S1 a(j,k,l) -> S1 | v(j,k)", "max.max"),
    ("1.8", "S1 a(i,j,k) -> S1 v(i,j) s(k) | iota(i)", "max.min"),
    ("1.9", "S1 a(j,k,l) -> S1 v(j,k) out(a(j,k,l))", "max.min"),
    # S2: convergecast sent, waiting for the countdown
    ("2.1", "S2 t -> S5 out(t)", "min"),
    ("2.2", "S2 s(k) -> Max w m(k)", "min.min"),
    ("2.3", "S2 y(j,k) -> S2 v(j,i) out(a(j,i,k)) | iota(i)", "max.min"),
    ("2.4", "S2 a(j,k,l) -> S2 | v(j,k)", "max.max"),
    ("2.5", "S2 a(i,j,k) -> S2 v(i,j) s(k) | iota(i)", "max.min"),
    ("2.6", "S2 a(j,k,l) -> S2 v(j,k) out(a(j,k,l))", "max.min"),
    # late x from a deeper digraph parent still needs its zero report
    ("2.7", "S2 x(k,j) -> S2 y(j,0)", "max.min"),
    ("2.8", "S2 x(k,j) -> S2", "max.max"),
    # S3: one more child accounted for
    ("3.1", "S3 c c -> S1 c e", "min"),
    ("3.2", "S3 c -> S4 e b", "min"),
    # S4: every child reported
    ("4.1", "S4 -> S2 t f(k) out(t) | g b m(k)", "max.min"),
    ("4.2", "S4 -> S2 y(j,k) | p(j) m(k)", "max.min"),
    # Max: keep only the largest max-depth
    ("M.1", "Max m(k) -> S3 | m(k+l)", "max.max"),
    ("M.2", "Max -> S3", "min.min"),
    # S5: countdown, clean-up, fire
    ("5.1", "S5 v(k,l) -> Sf | f(0)", "max.max"),
    ("5.2", "S5 p(k) -> Sf | f(0)", "max.max"),
    ("5.3", "S5 n(k) -> Sf | f(0)", "max.max"),
    ("5.4", "S5 m(k) -> Sf | f(0)", "max.max"),
    ("5.5", "S5 e -> Sf | f(0)", "min.max"),
    ("5.6", "S5 b -> Sf | f(0)", "min.max"),
    ("5.7", "S5 -> Sf | f(0)", "min.min"),
    ("5.8", "S5 v(k,l) -> S5 | f(q)", "max.max"),
    ("5.9", "S5 p(k) -> S5 | f(q)", "max.max"),
    ("5.10", "S5 n(k) -> S5 | f(q)", "max.max"),
    ("5.11", "S5 m(k) -> S5 | f(q)", "max.max"),
    ("5.12", "S5 e -> S5 | f(q)", "min.max"),
    ("5.13", "S5 b -> S5 | f(q)", "min.max"),
    ("5.14", "S5 f(k) -> S5 f(k-1) out(f(k-1))", "max.min"),
    ("5.15", "S5 f(k) -> S5", "max.max"),
    ("5.16", "S5 t -> S5", "max"),
]


def build_fssp_program() -> Program:
    """The full linearly ordered rule set shared by every cell."""
    return Program(Rule.parse(name, text, mode) for name, text, mode in _RULES)


def initial_configuration(digraph: Digraph, general: int | None = None) -> SystemConfiguration:
    """All cells quiescent, each holding its id and one ``c`` per outgoing
    arc; the general also holds the start order ``a``."""
    general = digraph.general if general is None else general
    if general not in digraph.nodes:
        raise TopologyError(f"unknown general {general}")
    cells = {}
    for v in digraph.nodes:
        contents = [sym("iota", v)] + [sym("c")] * digraph.outdegree(v)
        if v == general:
            contents.append(sym("a"))
        cells[v] = (S0, contents)
    return SystemConfiguration.initial(cells)


def start_symbol() -> Symbol:
    return sym("a")


@dataclass
class SyncReport:
    fired: bool
    firing_step: Optional[int]
    simultaneous: bool
    first_time: bool
    per_cell_firing_step: dict[int, Optional[int]] = field(default_factory=dict)
    halted: bool = False
    reason: str = ""

    def summary(self) -> str:
        step = self.firing_step if self.firing_step is not None else "-"
        return f"fired={str(self.fired).lower()} step={step}"


def check_synchronization(trace: Trace | list[dict[int, str]], halted: bool | None = None) -> SyncReport:
    """Did every cell enter the firing state in one common step, never
    having been in it before, with the run halting afterwards?

    Accepts a :class:`Trace` or a bare list of per-step state maps (then
    ``halted`` says whether the run ended in a halting configuration).
    """
    if isinstance(trace, Trace):
        states, halted = trace.states, trace.halted
    else:
        states = trace
    if not states:
        raise ValueError("empty trace")
    cells = sorted(states[0])
    first: dict[int, Optional[int]] = {c: None for c in cells}
    left_after_firing = False
    for idx, snap in enumerate(states):
        for c in cells:
            if snap.get(c) == FIRED:
                if first[c] is None:
                    first[c] = idx
            elif first[c] is not None:
                left_after_firing = True
    steps = {first[c] for c in cells}
    all_fired = None not in steps
    simultaneous = all_fired and len(steps) == 1
    first_time = simultaneous and not left_after_firing
    firing_step = steps.pop() if simultaneous else None
    fired = bool(simultaneous and first_time and halted)
    if fired:
        reason = "fired"
    elif not halted:
        reason = "incomplete"
    elif not all_fired:
        reason = "not all cells fired"
    elif not simultaneous:
        reason = "cells fired at different steps"
    else:
        reason = "a cell left the firing state"
    return SyncReport(
        fired=fired,
        firing_step=firing_step,
        simultaneous=bool(simultaneous),
        first_time=bool(first_time),
        per_cell_firing_step=first,
        halted=bool(halted),
        reason=reason,
    )
