"""Classes of disks (Maslov index, area) and the word-area weight.

A :class:`ClassBasis` is a finite list of named classes; exponents of the
Novikov variable ``e^lambda`` are integer vectors over that basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BasisMismatch, SpecError

Exponent = tuple  # tuple[int, ...], one entry per basis class


@dataclass(frozen=True)
class ClassEntry:
    name: str
    maslov: int
    area: Fraction


@dataclass(frozen=True)
class ClassBasis:
    entries: tuple[ClassEntry, ...] = ()
    epsilon_D: Fraction = Fraction(1)
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise SpecError(f"duplicate class names in {names}")
        if self.epsilon_D <= 0:
            raise SpecError("epsilon_D must be positive")
        for e in self.entries:
            if e.area < 0:
                raise SpecError(f"class {e.name} has negative area")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @classmethod
    def from_triples(cls, triples: Iterable[tuple], epsilon_D=1) -> "ClassBasis":
        entries = tuple(ClassEntry(n, int(mu), Fraction(a)) for n, mu, a in triples)
        return cls(entries, Fraction(epsilon_D))

    def __len__(self):
        return len(self.entries)

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SpecError(f"unknown class {name!r}") from None

    def zero(self) -> Exponent:
        return (0,) * len(self.entries)

    def unit(self, name: str, k: int = 1) -> Exponent:
        v = [0] * len(self.entries)
        v[self.index(name)] = k
        return tuple(v)

    def check(self, lam: Sequence[int]) -> None:
        if len(lam) != len(self.entries):
            raise BasisMismatch(
                f"exponent of length {len(lam)} over a basis of size {len(self.entries)}")


def exp_combine(a: Exponent, b: Exponent) -> Exponent:
    if len(a) != len(b):
        raise BasisMismatch(f"cannot combine exponents {a} and {b}")
    return tuple(x + y for x, y in zip(a, b))


def exp_negate(a: Exponent) -> Exponent:
    return tuple(-x for x in a)


def maslov_area(lam: Exponent, basis: ClassBasis) -> tuple[int, Fraction]:
    basis.check(lam)
    mu = 0
    omega = Fraction(0)
    for c, e in zip(lam, basis.entries):
        if c:
            mu += c * e.maslov
            omega += c * e.area
    return mu, omega


def maslov(lam: Exponent, basis: ClassBasis) -> int:
    return maslov_area(lam, basis)[0]


def area(lam: Exponent, basis: ClassBasis) -> Fraction:
    return maslov_area(lam, basis)[1]


def weight(word_len: int, lam: Exponent, basis: ClassBasis) -> Fraction:
    """Word-area weight ``k + 2*omega(lam)/epsilon_D`` of ``x_1...x_k e^lam``."""
    return word_len + 2 * area(lam, basis) / basis.epsilon_D


def format_exponent(lam: Exponent, basis: ClassBasis) -> str:
    parts = []
    for c, e in zip(lam, basis.entries):
        if c == 0:
            continue
        body = e.name if abs(c) == 1 else f"{abs(c)}*{e.name}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts) if parts else "0"
