"""Symbols, patterns and free-variable matching.

A symbol is either elementary (``a``, ``c``) or complex (``x(2, 7)``,
``a(1, 4, 4)``).  Arguments are integers (indices, counters, cell ids) or
nested symbols.  Patterns mirror symbols but may hold free variables and
simple arithmetic terms such as ``k+1``, ``k-1`` or ``k+l``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Union


class Symbol(NamedTuple):
    functor: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.functor
        return f"{self.functor}({','.join(str(a) for a in self.args)})"

    @property
    def arity(self) -> int:
        return len(self.args)


Value = Union[int, Symbol]
Bindings = Mapping[str, Value]


def sym(functor: str, *args: Value) -> Symbol:
    return Symbol(functor, tuple(args))


def sort_key(value: Value) -> tuple:
    """Total structural order: integers first, then symbols by functor/args."""
    if isinstance(value, Symbol):
        return (1, value.functor, tuple(sort_key(a) for a in value.args))
    return (0, value)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Plus:
    """``var + offset``; ``offset`` is an integer or the name of a variable.

    A variable offset stands for a strictly positive amount, so ``k+l``
    matches any index at least ``k+1``.
    """

    var: str
    offset: Union[int, str]

    def __str__(self) -> str:
        if isinstance(self.offset, str):
            return f"{self.var}+{self.offset}"
        if self.offset < 0:
            return f"{self.var}{self.offset}"
        return f"{self.var}+{self.offset}"


@dataclass(frozen=True)
class Pattern:
    functor: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.functor
        return f"{self.functor}({','.join(str(a) for a in self.args)})"

    @property
    def arity(self) -> int:
        return len(self.args)

    def __post_init__(self):
        out: set[str] = set()
        for a in self.args:
            out |= _arg_vars(a)
        object.__setattr__(self, "_vars", frozenset(out))

    def variables(self) -> frozenset[str]:
        return self._vars

    def is_ground_under(self, bindings: Bindings) -> bool:
        return self._vars <= bindings.keys()


def _arg_vars(arg) -> set[str]:
    if isinstance(arg, Var):
        return {arg.name}
    if isinstance(arg, Plus):
        return {arg.var, arg.offset} if isinstance(arg.offset, str) else {arg.var}
    if isinstance(arg, Pattern):
        return arg.variables()
    return set()


def _match_arg(arg, value: Value, env: dict) -> bool:
    if isinstance(arg, Var):
        bound = env.get(arg.name, _MISSING)
        if bound is _MISSING:
            env[arg.name] = value
            return True
        return bound == value
    if isinstance(arg, Plus):
        if not isinstance(value, int):
            return False
        base = env.get(arg.var, _MISSING)
        if isinstance(arg.offset, int):
            if base is _MISSING:
                if value - arg.offset < 0:
                    return False
                env[arg.var] = value - arg.offset
                return True
            return isinstance(base, int) and base + arg.offset == value
        off = env.get(arg.offset, _MISSING)
        if base is not _MISSING and off is not _MISSING:
            return isinstance(base, int) and isinstance(off, int) and off >= 1 and base + off == value
        if base is not _MISSING:
            if not isinstance(base, int) or value - base < 1:
                return False
            env[arg.offset] = value - base
            return True
        if off is not _MISSING:
            if not isinstance(off, int) or off < 1 or value - off < 0:
                return False
            env[arg.var] = value - off
            return True
        # both sides free: the term does not determine a binding
        return False
    if isinstance(arg, Pattern):
        return isinstance(value, Symbol) and _match_into(arg, value, env)
    return arg == value


def _match_into(pattern: Pattern, symbol: Symbol, env: dict) -> bool:
    if pattern.functor != symbol.functor or len(pattern.args) != len(symbol.args):
        return False
    for arg, value in zip(pattern.args, symbol.args):
        if not _match_arg(arg, value, env):
            return False
    return True


_MISSING = object()


def match(pattern: Pattern, symbol: Symbol, bindings: Bindings | None = None) -> dict | None:
    """Extend ``bindings`` so that ``pattern`` matches ``symbol``.

    Returns the extended bindings, or None when the symbol does not unify
    with the pattern under the given bindings.
    """
    env = dict(bindings or {})
    if _match_into(pattern, symbol, env):
        return env
    return None


def _eval_arg(arg, env: Bindings):
    if isinstance(arg, Var):
        return env[arg.name]
    if isinstance(arg, Plus):
        off = arg.offset if isinstance(arg.offset, int) else env[arg.offset]
        v = env[arg.var] + off
        if v < 0:
            raise NegativeIndex(str(arg))
        return v
    if isinstance(arg, Pattern):
        return substitute(arg, env)
    return arg


class NegativeIndex(ValueError):
    """An arithmetic term evaluated below zero."""


def substitute(pattern: Pattern, bindings: Bindings) -> Symbol:
    """Ground ``pattern``; raises KeyError on an unbound variable and
    NegativeIndex when an arithmetic term drops below zero."""
    return Symbol(pattern.functor, tuple(_eval_arg(a, bindings) for a in pattern.args))


# -- a small textual notation ------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(.))")


class _Parser:
    def __init__(self, text: str):
        self.tokens = []
        for m in _TOKEN.finditer(text):
            num, name, other = m.groups()
            if num is not None:
                self.tokens.append(("num", int(num)))
            elif name is not None:
                self.tokens.append(("name", name))
            elif other is not None and not other.isspace():
                self.tokens.append(("op", other))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            raise ValueError(f"unexpected token {tok!r} at position {self.pos}")
        self.pos += 1
        return tok[1]

    def term(self, top: bool) -> Pattern:
        functor = self.take("name")
        args = []
        if self.peek() == ("op", "("):
            self.take()
            while True:
                args.append(self.arg())
                if self.peek() == ("op", ","):
                    self.take()
                    continue
                self.take("op", ")")
                break
        return Pattern(functor, tuple(args))

    def arg(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return val
        if kind == "op" and val == "-":
            self.take()
            return -self.take("num")
        name = self.take("name")
        if self.peek() == ("op", "("):
            self.pos -= 1
            return self.term(top=False)
        if self.peek() in (("op", "+"), ("op", "-")):
            sign = self.take()
            kind, off = self.peek()
            self.take()
            if kind == "num":
                return Plus(name, off if sign == "+" else -off)
            if sign == "-":
                raise ValueError("only k+l is supported for variable offsets")
            return Plus(name, off)
        return Var(name)


def parse_pattern(text: str) -> Pattern:
    """Parse ``"x(k+1,i)"`` style notation; bare names inside arguments are variables."""
    p = _Parser(text)
    pat = p.term(top=True)
    if p.peek()[0] is not None:
        raise ValueError(f"trailing input in {text!r}")
    return pat


def parse_symbol(text: str) -> Symbol:
    """Parse a ground symbol such as ``"a(1,4,4)"``."""
    pat = parse_pattern(text)
    try:
        return substitute(pat, {})
    except KeyError as exc:
        raise ValueError(f"{text!r} is not ground") from exc
