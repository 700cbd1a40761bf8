"""Multisets of symbols, indexed by functor for fast pattern lookup."""
from __future__ import annotations

from typing import Iterable, Iterator, Mapping

from .symbols import Symbol, sort_key


class Multiset:
    """A finite multiset of symbols.

    Entries with multiplicity zero are never stored, so they are never
    observable through iteration, ``len`` or equality.
    """

    __slots__ = ("_by_functor",)

    def __init__(self, items: Iterable[Symbol] | Mapping[Symbol, int] | None = None):
        self._by_functor: dict[str, dict[Symbol, int]] = {}
        if items is None:
            return
        if isinstance(items, Multiset):
            self._by_functor = {f: dict(d) for f, d in items._by_functor.items()}
        elif isinstance(items, Mapping):
            for s, n in items.items():
                self.add(s, n)
        else:
            for s in items:
                self.add(s)

    def copy(self) -> "Multiset":
        return Multiset(self)

    def count(self, symbol: Symbol) -> int:
        bucket = self._by_functor.get(symbol.functor)
        return bucket.get(symbol, 0) if bucket else 0

    __getitem__ = count

    def add(self, symbol: Symbol, n: int = 1) -> None:
        if n < 0:
            raise ValueError("negative multiplicity")
        if n == 0:
            return
        bucket = self._by_functor.setdefault(symbol.functor, {})
        bucket[symbol] = bucket.get(symbol, 0) + n

    def remove(self, symbol: Symbol, n: int = 1) -> None:
        have = self.count(symbol)
        if n > have:
            raise KeyError(f"cannot remove {n} x {symbol}: only {have} present")
        if n == 0:
            return
        bucket = self._by_functor[symbol.functor]
        if have == n:
            del bucket[symbol]
            if not bucket:
                del self._by_functor[symbol.functor]
        else:
            bucket[symbol] = have - n

    def update(self, other: "Multiset | Iterable[Symbol]") -> None:
        if isinstance(other, Multiset):
            for s, n in other.items():
                self.add(s, n)
        else:
            for s in other:
                self.add(s)

    def subtract(self, other: "Multiset") -> None:
        if not other <= self:
            raise KeyError("not a sub-multiset")
        for s, n in other.items():
            self.remove(s, n)

    def with_functor(self, functor: str) -> Mapping[Symbol, int]:
        return self._by_functor.get(functor, {})

    def items(self) -> Iterator[tuple[Symbol, int]]:
        for bucket in self._by_functor.values():
            yield from bucket.items()

    def distinct(self) -> Iterator[Symbol]:
        for bucket in self._by_functor.values():
            yield from bucket

    def __iter__(self) -> Iterator[Symbol]:
        for s, n in self.items():
            for _ in range(n):
                yield s

    def __len__(self) -> int:
        return sum(n for _, n in self.items())

    def __bool__(self) -> bool:
        return bool(self._by_functor)

    def __contains__(self, symbol: object) -> bool:
        return isinstance(symbol, Symbol) and self.count(symbol) > 0

    def __le__(self, other: "Multiset") -> bool:
        return all(other.count(s) >= n for s, n in self.items())

    def __ge__(self, other: "Multiset") -> bool:
        return other <= self

    def __add__(self, other: "Multiset") -> "Multiset":
        out = self.copy()
        out.update(other)
        return out

    def __sub__(self, other: "Multiset") -> "Multiset":
        """Truncated difference."""
        out = Multiset()
        for s, n in self.items():
            left = n - other.count(s)
            if left > 0:
                out.add(s, left)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def as_dict(self) -> dict[Symbol, int]:
        return dict(self.items())

    def sorted_items(self) -> list[tuple[Symbol, int]]:
        return sorted(self.items(), key=lambda kv: sort_key(kv[0]))

    def __repr__(self) -> str:
        return "Multiset({" + ", ".join(
            f"{s}: {n}" if n != 1 else str(s) for s, n in self.sorted_items()) + "})"

    def __str__(self) -> str:
        return " ".join(f"{s}^{n}" if n > 1 else str(s) for s, n in self.sorted_items())

    __hash__ = None  # mutable
