"""Synchronous P systems with simplex channels.

Each cell holds a state and a multiset.  A cell's linearly ordered rules
are tried in priority order under weak priority: the first applicable rule
fixes the target state and later rules are used only if they lead to the
same target.  Everything a rule produces or broadcasts becomes visible at
the start of the next step; broadcasts are replicated to every child of
the sending cell.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Literal, Mapping, NamedTuple, Protocol, Sequence

from .multiset import Multiset
from .symbols import NegativeIndex, Pattern, Plus, Symbol, _match_into, parse_pattern, sort_key, substitute

Mode = Literal["once", "max"]


@dataclass(frozen=True)
class RuleMode:
    instantiation: Mode
    application: Mode

    def __post_init__(self):
        for v in (self.instantiation, self.application):
            if v not in ("once", "max"):
                raise ValueError(f"bad mode {v!r}")

    @classmethod
    def parse(cls, text: str) -> "RuleMode":
        """``"min.max"`` style combined modes; a bare ``min``/``max`` is classical."""
        parts = text.replace("·", ".").split(".")
        name = {"min": "once", "max": "max"}
        if not all(p in name for p in parts):
            raise ValueError(f"bad mode {text!r}")
        if len(parts) == 1:
            return cls("once", name[parts[0]])
        if len(parts) == 2:
            return cls(name[parts[0]], name[parts[1]])
        raise ValueError(f"bad mode {text!r}")

    def __str__(self) -> str:
        short = {"once": "min", "max": "max"}
        return f"{short[self.instantiation]}.{short[self.application]}"


MIN_MIN = RuleMode("once", "once")
MIN_MAX = RuleMode("once", "max")
MAX_MIN = RuleMode("max", "once")
MAX_MAX = RuleMode("max", "max")


@dataclass(frozen=True)
class Rule:
    """``state consumed -> target produced (broadcast)! | promoters``."""

    name: str
    state: str
    consumed: tuple[Pattern, ...]
    target: str
    produced: tuple[Pattern, ...] = ()
    broadcast: tuple[Pattern, ...] = ()
    promoters: tuple[Pattern, ...] = ()
    mode: RuleMode = MIN_MIN

    def __post_init__(self):
        bound: set[str] = set()
        for p in self.consumed + self.promoters:
            bound |= p.variables()
        for p in self.produced + self.broadcast:
            free = p.variables() - bound
            if free:
                raise ValueError(f"rule {self.name}: unbound variables {sorted(free)} in {p}")
        object.__setattr__(self, "_variables", tuple(sorted(bound)))

    @property
    def variables(self) -> tuple[str, ...]:
        return self._variables

    @classmethod
    def parse(cls, name: str, text: str, mode: RuleMode | str = MIN_MIN) -> "Rule":
        """Build a rule from ``"S1 y(j,k) -> S1 v(j,i) out(a(j,i,k)) | iota(i)"``.

        ``out(...)`` wraps a symbol broadcast to all children.
        """
        if isinstance(mode, str):
            mode = RuleMode.parse(mode)
        lhs, rhs = text.split("->")
        promoters: list[Pattern] = []
        if "|" in rhs:
            rhs, prom = rhs.split("|")
            promoters = [parse_pattern(t) for t in _split_terms(prom)]
        lhs_terms = _split_terms(lhs)
        rhs_terms = _split_terms(rhs)
        state, target = lhs_terms[0], rhs_terms[0]
        produced, broadcast = [], []
        for t in rhs_terms[1:]:
            if t.startswith("out(") and t.endswith(")"):
                broadcast.append(parse_pattern(t[4:-1]))
            else:
                produced.append(parse_pattern(t))
        return cls(
            name=name,
            state=state,
            consumed=tuple(parse_pattern(t) for t in lhs_terms[1:]),
            target=target,
            produced=tuple(produced),
            broadcast=tuple(broadcast),
            promoters=tuple(promoters),
            mode=mode,
        )

    def __str__(self) -> str:
        lhs = " ".join([self.state] + [str(p) for p in self.consumed])
        rhs = " ".join([self.target] + [str(p) for p in self.produced]
                       + [f"({p})!" for p in self.broadcast])
        prom = (" | " + " ".join(str(p) for p in self.promoters)) if self.promoters else ""
        return f"[{self.name}] {lhs} ->{self.mode} {rhs}{prom}"


def _split_terms(text: str) -> list[str]:
    """Split on whitespace outside parentheses."""
    terms, depth, cur = [], 0, []
    for ch in text.strip():
        if ch.isspace() and depth == 0:
            if cur:
                terms.append("".join(cur))
                cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    if cur:
        terms.append("".join(cur))
    return terms


class Program(Sequence[Rule]):
    """A linearly ordered rule set; priority is the position in the list."""

    def __init__(self, rules: Iterable[Rule]):
        self._rules = tuple(rules)
        self._by_state: dict[str, tuple[Rule, ...]] = {}
        for r in self._rules:
            self._by_state.setdefault(r.state, ())
            self._by_state[r.state] += (r,)

    def __getitem__(self, i):
        return self._rules[i]

    def __len__(self) -> int:
        return len(self._rules)

    def for_state(self, state: str) -> tuple[Rule, ...]:
        return self._by_state.get(state, ())

    def priority(self, rule: Rule) -> int:
        return self._rules.index(rule)

    @property
    def states(self) -> set[str]:
        return {r.state for r in self._rules} | {r.target for r in self._rules}

    def rule(self, name: str) -> Rule:
        for r in self._rules:
            if r.name == name:
                return r
        raise KeyError(name)


def as_program(rules: Program | Iterable[Rule]) -> Program:
    return rules if isinstance(rules, Program) else Program(rules)


class GroundRule(NamedTuple):
    rule: Rule
    bindings: tuple[tuple[str, object], ...]
    consumed: tuple[tuple[Symbol, int], ...]
    produced: tuple[Symbol, ...]
    broadcast: tuple[Symbol, ...]
    promoters: tuple[Symbol, ...]

    def key(self) -> tuple:
        return (
            tuple(sort_key(s) + (n,) for s, n in self.consumed),
            tuple(sort_key(s) for s in self.produced),
            tuple(sort_key(s) for s in self.broadcast),
            tuple(sort_key(s) for s in self.promoters),
        )

    def times_available(self, contents: Multiset) -> int:
        """How many times the consumed part fits into ``contents``."""
        if not self.consumed:
            return 1
        return min(contents.count(s) // n for s, n in self.consumed)

    def __str__(self) -> str:
        env = ", ".join(f"{k}={v}" for k, v in self.bindings)
        return f"{self.rule.name}{{{env}}}"


def _ready(p: Pattern, env: dict) -> bool:
    """A pattern can be matched once every ``k+l`` term has one side bound."""
    for a in p.args:
        if isinstance(a, Plus) and isinstance(a.offset, str):
            if a.var not in env and a.offset not in env:
                return False
        elif isinstance(a, Pattern) and not _ready(a, env):
            return False
    return True


def _ground_or_none(p: Pattern, env: dict) -> Symbol | None:
    try:
        return substitute(p, env)
    except (KeyError, NegativeIndex):
        return None


def iter_bindings(rule: Rule, contents: Multiset) -> Iterator[dict]:
    """All variable assignments under which every consumed and promoter
    pattern matches some symbol present in ``contents``.

    Multiplicities are not checked here; see :func:`instantiate`.
    """
    patterns = list(rule.consumed) + list(rule.promoters)

    def rec(todo: list[Pattern], env: dict) -> Iterator[dict]:
        if not todo:
            yield env
            return
        pick = None
        for idx, p in enumerate(todo):
            if p.is_ground_under(env):
                pick = idx
                break
        if pick is None:
            for idx, p in enumerate(todo):
                if _ready(p, env):
                    pick = idx
                    break
        if pick is None:
            return
        p = todo[pick]
        rest = todo[:pick] + todo[pick + 1:]
        if p.is_ground_under(env):
            s = _ground_or_none(p, env)
            if s is not None and contents.count(s) > 0:
                yield from rec(rest, env)
            return
        for s in contents.with_functor(p.functor):
            if len(s.args) != len(p.args):
                continue
            env2 = dict(env)
            if _match_into(p, s, env2):
                yield from rec(rest, env2)

    yield from rec(patterns, {})


def ground(rule: Rule, env: Mapping) -> GroundRule | None:
    """Substitute ``env`` into ``rule``; None if an index would go negative."""
    try:
        consumed = Multiset(substitute(p, env) for p in rule.consumed)
        produced = tuple(substitute(p, env) for p in rule.produced)
        broadcast = tuple(substitute(p, env) for p in rule.broadcast)
        promoters = tuple(substitute(p, env) for p in rule.promoters)
    except NegativeIndex:
        return None
    return GroundRule(
        rule=rule,
        bindings=tuple((k, env[k]) for k in rule.variables),
        consumed=tuple(consumed.sorted_items()),
        produced=produced,
        broadcast=broadcast,
        promoters=promoters,
    )


def applicable_instances(rule: Rule, contents: Multiset) -> list[GroundRule]:
    """Distinct applicable ground instances of ``rule``, in structural order."""
    names = rule.variables
    envs = {}
    for env in iter_bindings(rule, contents):
        envs.setdefault(tuple(env[k] for k in names), env)
    seen: dict[tuple, GroundRule] = {}
    for env in envs.values():
        g = ground(rule, env)
        if g is None or g.times_available(contents) < 1:
            continue
        k = g.key()
        if k not in seen:
            seen[k] = g
    return [seen[k] for k in sorted(seen)]


def instantiate(rule: Rule, contents: Multiset, rng: random.Random | None = None) -> list[GroundRule]:
    """Ground rules that ``rule`` contributes this step.

    Max instantiation yields every distinct applicable instance.  Once
    instantiation yields one of them: drawn from ``rng`` when given,
    otherwise the lowest in structural order.
    """
    found = applicable_instances(rule, contents)
    if rule.mode.instantiation == "max" or len(found) <= 1:
        return found
    return [rng.choice(found) if rng is not None else found[0]]


@dataclass(frozen=True)
class CellState:
    cell_id: int
    state: str
    contents: Multiset = field(default_factory=Multiset, compare=True)


@dataclass
class AppliedRule:
    ground: GroundRule
    times: int


def apply_cell(
    cell: CellState,
    program: Program | Sequence[Rule],
    rng: random.Random | None = None,
    log: list[AppliedRule] | None = None,
) -> tuple[CellState, Multiset]:
    """One evolution step of a single cell.

    Returns the updated cell and the multiset it sends to each child.  A
    cell with no applicable rule comes back unchanged with an empty
    broadcast.
    """
    program = as_program(program)
    remaining = cell.contents.copy()
    produced = Multiset()
    out = Multiset()
    target: str | None = None
    for rule in program.for_state(cell.state):
        if target is not None and rule.target != target:
            continue
        instances = instantiate(rule, remaining, rng)
        if not instances:
            continue
        if target is None:
            target = rule.target
        for g in instances:
            avail = g.times_available(remaining)
            if avail < 1:
                # an earlier instance of the same rule took what this one needed
                continue
            times = avail if rule.mode.application == "max" else 1
            for s, n in g.consumed:
                remaining.remove(s, n * times)
            for s in g.produced:
                produced.add(s, times)
            for s in g.broadcast:
                out.add(s, times)
            if log is not None:
                log.append(AppliedRule(g, times))
    if target is None:
        return cell, out
    remaining.update(produced)
    return CellState(cell.cell_id, target, remaining), out


def has_applicable_rule(cell: CellState, program: Program | Sequence[Rule]) -> bool:
    program = as_program(program)
    return any(applicable_instances(r, cell.contents) for r in program.for_state(cell.state))


class Topology(Protocol):
    def children(self, node: int) -> Iterable[int]: ...


@dataclass
class SystemConfiguration:
    cells: dict[int, CellState]
    in_flight: dict[int, Multiset]
    step_index: int = 0
    # cells known to have no applicable rule; they stay put until a message lands
    idle: frozenset = frozenset()

    @classmethod
    def initial(cls, cells: Mapping[int, tuple[str, Iterable[Symbol] | Multiset]]) -> "SystemConfiguration":
        return cls(
            cells={cid: CellState(cid, st, Multiset(c)) for cid, (st, c) in cells.items()},
            in_flight={cid: Multiset() for cid in cells},
        )

    def states(self) -> dict[int, str]:
        return {cid: c.state for cid, c in self.cells.items()}

    def pending(self) -> bool:
        return any(self.in_flight.values())


def _step(config: SystemConfiguration, program: Program, topology: Topology,
          rng: random.Random | None, logs: dict | None = None) -> tuple[SystemConfiguration, bool]:
    active = False
    new_cells: dict[int, CellState] = {}
    outgoing: dict[int, Multiset] = {}
    idle = set()
    for cid in sorted(config.cells):
        cell = config.cells[cid]
        incoming = config.in_flight[cid]
        if cid in config.idle and not incoming:
            new_cells[cid] = cell
            idle.add(cid)
            if logs is not None:
                logs[cid] = []
            continue
        log = [] if logs is not None else None
        probe = CellState(cid, cell.state, cell.contents + incoming)
        updated, out = apply_cell(probe, program, rng, log)
        if logs is not None:
            logs[cid] = log
        # apply_cell hands back the very same object when nothing applied
        if updated is probe:
            idle.add(cid)
        else:
            active = True
        new_cells[cid] = updated
        if out:
            outgoing[cid] = out
    in_flight = {cid: Multiset() for cid in config.cells}
    for parent, out in outgoing.items():
        for child in topology.children(parent):
            in_flight[child].update(out)
    return SystemConfiguration(new_cells, in_flight, config.step_index + 1, frozenset(idle)), active


def step(config: SystemConfiguration, program: Program | Sequence[Rule], topology: Topology,
         rng: random.Random | None = None, logs: dict | None = None) -> SystemConfiguration:
    """Advance every cell by one synchronous step.

    Pending messages are merged first, every cell then evolves against its
    own merged contents, and finally each broadcast is copied to the
    children of its sender.  Pass a dict as ``logs`` to collect the applied
    ground rules per cell.
    """
    return _step(config, as_program(program), topology, rng, logs)[0]


def is_halted(config: SystemConfiguration, program: Program | Sequence[Rule]) -> bool:
    if config.pending():
        return False
    program = as_program(program)
    return not any(has_applicable_rule(c, program) for c in config.cells.values())


@dataclass
class Trace:
    """Run history.

    ``states`` holds the per-cell state for every step index from 0 to the
    final one; ``snapshots`` holds full configurations at the sampling
    interval (plus the first and last).
    """

    states: list[dict[int, str]]
    snapshots: list[SystemConfiguration]
    halt_reason: Literal["halted", "max_steps"]
    final: SystemConfiguration

    @property
    def halted(self) -> bool:
        return self.halt_reason == "halted"

    @property
    def steps(self) -> int:
        return self.final.step_index

    def snapshot(self, step_index: int) -> SystemConfiguration:
        for s in self.snapshots:
            if s.step_index == step_index:
                return s
        raise KeyError(f"step {step_index} was not sampled")


def run(config: SystemConfiguration, program: Program | Sequence[Rule], topology: Topology,
        max_steps: int, *, seed: int | None = None, rng: random.Random | None = None,
        every: int = 1, on_step=None) -> Trace:
    """Step until the system halts or ``max_steps`` steps have been taken.

    ``every`` keeps a full snapshot each ``every`` steps (0 keeps only the
    first and last).  ``on_step(config, logs)`` is called after each step
    with the applied-rule logs.
    """
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    if rng is None and seed is not None:
        rng = random.Random(seed)
    program = as_program(program)
    states = [config.states()]
    snapshots = [config]
    reason: Literal["halted", "max_steps"] = "max_steps"
    for _ in range(max_steps):
        logs = {} if on_step is not None else None
        nxt, active = _step(config, program, topology, rng, logs)
        if not active and not config.pending():
            reason = "halted"
            break
        config = nxt
        if on_step is not None:
            on_step(config, logs)
        states.append(config.states())
        if every and config.step_index % every == 0:
            snapshots.append(config)
    else:
        if is_halted(config, program):
            reason = "halted"
    if snapshots[-1] is not config:
        snapshots.append(config)
    return Trace(states, snapshots, reason, config)
