"""Free graded-commutative algebras over Q with Novikov exponents.

Monomials are kept in normal form: factors sorted by generator position,
odd generators appear at most once, and the Novikov part ``e^lambda`` is a
central coefficient (it never contributes Koszul signs).

Generators of kind ``"bar"`` or ``"intersection"`` are *module* generators.
They are always ordered after every ring generator, so a monomial carrying
one is ``(ring word) * v`` and the algebra acts on it from the left only.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence

from .errors import SpecError, WindowError
from .novikov import ClassBasis, Exponent, exp_combine, maslov_area

RING_KINDS = ("crit",)
MODULE_KINDS = ("bar", "intersection")


def _parity(deg: Fraction) -> Optional[int]:
    if deg.denominator != 1:
        return None
    return deg.numerator % 2


@dataclass(frozen=True)
class Generator:
    name: str
    morse_index: Fraction
    kind: str = "crit"

    def __post_init__(self):
        object.__setattr__(self, "morse_index", Fraction(self.morse_index))
        if self.kind not in RING_KINDS + MODULE_KINDS:
            raise SpecError(f"unknown generator kind {self.kind!r}")
        if self.kind == "crit" and (self.morse_index < 0 or self.morse_index.denominator != 1):
            raise SpecError(f"critical point {self.name} needs a non-negative integer index")
        if self.morse_index.denominator not in (1, 2):
            raise SpecError(f"degree of {self.name} must have denominator 1 or 2")

    @property
    def degree(self) -> Fraction:
        return self.morse_index - 1

    @property
    def is_module(self) -> bool:
        return self.kind in MODULE_KINDS

    @property
    def length(self) -> int:
        # intersection points do not count towards word length
        return 0 if self.kind == "intersection" else 1


class Monomial(NamedTuple):
    factors: tuple  # ((generator position, power), ...) sorted by position
    exp: Exponent


class GradedAlgebra:
    """Generators plus a class basis; owns all monomial arithmetic."""

    def __init__(self, generators: Sequence[Generator], basis: ClassBasis):
        names = [g.name for g in generators]
        if len(set(names)) != len(names):
            raise SpecError(f"duplicate generator names in {names}")
        ring = [g for g in generators if not g.is_module]
        mod = [g for g in generators if g.is_module]
        self.generators: tuple[Generator, ...] = tuple(ring + mod)
        self.basis = basis
        self.n_ring = len(ring)
        self._pos = {g.name: i for i, g in enumerate(self.generators)}
        self.deg = [g.degree for g in self.generators]
        self.par = [_parity(g.degree) for g in self.generators]
        self.length = [g.length for g in self.generators]
        self.is_module = [g.is_module for g in self.generators]
        self._area_cache: dict = {}

    def __repr__(self):
        return f"GradedAlgebra({[g.name for g in self.generators]}, {self.basis.names})"

    @property
    def has_module(self) -> bool:
        return self.n_ring < len(self.generators)

    def pos(self, name: str) -> int:
        try:
            return self._pos[name]
        except KeyError:
            raise SpecError(f"unknown generator {name!r}") from None

    def gen(self, name: str) -> Generator:
        return self.generators[self.pos(name)]

    # ---- monomial primitives -------------------------------------------------

    def one(self) -> Monomial:
        return Monomial((), self.basis.zero())

    def gen_mono(self, i: int, power: int = 1) -> Monomial:
        return Monomial(((i, power),), self.basis.zero())

    def mu_omega(self, lam: Exponent):
        r = self._area_cache.get(lam)
        if r is None:
            r = maslov_area(lam, self.basis)
            self._area_cache[lam] = r
        return r

    def degree(self, m: Monomial) -> Fraction:
        d = Fraction(0)
        for i, p in m.factors:
            d += p * self.deg[i]
        return d - self.mu_omega(m.exp)[0]

    def word_len(self, m: Monomial) -> int:
        return sum(p * self.length[i] for i, p in m.factors)

    def weight(self, m: Monomial) -> Fraction:
        return self.word_len(m) + 2 * self.mu_omega(m.exp)[1] / self.basis.epsilon_D

    def module_count(self, m: Monomial) -> int:
        return sum(p for i, p in m.factors if self.is_module[i])

    def _swap_parity(self, i: int, j: int) -> int:
        pi, pj = self.par[i], self.par[j]
        if pi is None or pj is None:
            raise SpecError(
                f"Koszul sign undefined when reordering {self.generators[i].name} "
                f"and {self.generators[j].name} (non-integral degree)")
        return pi & pj

    def mono_mul(self, a: Monomial, b: Monomial):
        """Return ``(sign, a*b)`` or ``None`` when the product vanishes."""
        if not a.factors:
            return 1, Monomial(b.factors, exp_combine(a.exp, b.exp))
        if not b.factors:
            return 1, Monomial(a.factors, exp_combine(a.exp, b.exp))
        fa, fb = a.factors, b.factors
        out = []
        ia = ib = 0
        flips = 0
        while ia < len(fa) and ib < len(fb):
            ga, pa = fa[ia]
            gb, pb = fb[ib]
            if ga < gb:
                out.append(fa[ia])
                ia += 1
            elif gb < ga:
                # b's factor jumps over every remaining factor of a
                for ja in range(ia, len(fa)):
                    if self._swap_parity(fa[ja][0], gb):
                        flips += fa[ja][1] * pb
                out.append(fb[ib])
                ib += 1
            else:
                if self.par[ga] != 0 or self.is_module[ga]:
                    if self.is_module[ga]:
                        raise SpecError("product of two module elements is undefined")
                    return None
                # even generator: merge powers, b's copy passes a's later factors
                for ja in range(ia + 1, len(fa)):
                    if self._swap_parity(fa[ja][0], gb):
                        flips += fa[ja][1] * pb
                out.append((ga, pa + pb))
                ia += 1
                ib += 1
        out.extend(fa[ia:])
        out.extend(fb[ib:])
        if sum(p for i, p in out if self.is_module[i]) > 1:
            raise SpecError("product of two module elements is undefined")
        sign = -1 if flips % 2 else 1
        return sign, Monomial(tuple(out), exp_combine(a.exp, b.exp))

    def normalize(self, raw: Iterable, lam: Optional[Exponent] = None):
        """Sort a raw list of generators (names or positions) into normal form.

        Returns ``(sign, Monomial)`` or ``None`` if an odd generator repeats.
        """
        lam = self.basis.zero() if lam is None else tuple(lam)
        self.basis.check(lam)
        seq = [self.pos(g) if isinstance(g, str) else int(g) for g in raw]
        for g in seq:
            if not 0 <= g < len(self.generators):
                raise SpecError(f"unknown generator position {g}")
        sign = 1
        # insertion sort, tracking Koszul signs of adjacent transpositions
        arr = list(seq)
        for k in range(1, len(arr)):
            j = k
            while j > 0 and arr[j - 1] > arr[j]:
                if self._swap_parity(arr[j - 1], arr[j]):
                    sign = -sign
                arr[j - 1], arr[j] = arr[j], arr[j - 1]
                j -= 1
        factors = []
        for g in arr:
            if factors and factors[-1][0] == g:
                if self.par[g] != 0 or self.is_module[g]:
                    return None
                factors[-1] = (g, factors[-1][1] + 1)
            else:
                factors.append((g, 1))
        if sum(p for i, p in factors if self.is_module[i]) > 1:
            raise SpecError("a monomial may carry at most one module generator")
        return sign, Monomial(tuple(factors), lam)

    # ---- element construction ------------------------------------------------

    def element(self, terms: Optional[Mapping] = None) -> "Element":
        return Element(self, terms or {})

    def zero(self) -> "Element":
        return Element(self, {})

    def unit(self) -> "Element":
        return Element(self, {self.one(): Fraction(1)})

    def g(self, name: str, power: int = 1) -> "Element":
        i = self.pos(name)
        if power == 0:
            return self.unit()
        if power > 1 and (self.par[i] != 0 or self.is_module[i]):
            return self.zero()
        return Element(self, {self.gen_mono(i, power): Fraction(1)})

    def e(self, lam: Exponent) -> "Element":
        lam = tuple(lam)
        self.basis.check(lam)
        return Element(self, {Monomial((), lam): Fraction(1)})

    def mono_element(self, m: Monomial, c=1) -> "Element":
        return Element(self, {m: Fraction(c)})


def _clean(terms: dict) -> dict:
    return {m: c for m, c in terms.items() if c != 0}


class Element:
    """Finite exact-rational linear combination of monomials."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: GradedAlgebra, terms: Mapping):
        self.alg = alg
        self.terms = {m: Fraction(c) for m, c in terms.items() if c != 0}

    @classmethod
    def _raw(cls, alg, terms):
        obj = cls.__new__(cls)
        obj.alg = alg
        obj.terms = terms
        return obj

    def __iter__(self) -> Iterator:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.alg.unit() * other
        if not isinstance(other, Element):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __neg__(self):
        return Element._raw(self.alg, {m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        return add_scale(self, 1, other)

    def __radd__(self, other):
        return add_scale(self, 1, other)

    def __sub__(self, other):
        return add_scale(self, -1, other)

    def __rsub__(self, other):
        return add_scale(-self, 1, other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Element._raw(self.alg, _clean({m: c * other for m, c in self.terms.items()}))
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        out = self.alg.unit()
        for _ in range(k):
            out = out * self
        return out

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def degrees(self) -> set:
        return {self.alg.degree(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def min_weight(self) -> Optional[Fraction]:
        if not self.terms:
            return None
        return min(self.alg.weight(m) for m in self.terms)

    def __str__(self):
        from .expr import format_element
        return format_element(self)

    def __repr__(self):
        return f"Element({self})"


def _coerce(a: Element, b) -> Element:
    if isinstance(b, Element):
        if b.alg is not a.alg and b.alg.generators != a.alg.generators:
            raise SpecError("elements live in different algebras")
        return b
    return a.alg.unit() * Fraction(b)


def add_scale(a: Element, c, b) -> Element:
    """``a + c*b`` with zero coefficients pruned."""
    b = _coerce(a, b)
    c = Fraction(c)
    out = dict(a.terms)
    if c:
        for m, v in b.terms.items():
            nv = out.get(m, 0) + c * v
            if nv:
                out[m] = nv
            else:
                out.pop(m, None)
    return Element._raw(a.alg, out)


def multiply(a: Element, b, w: Optional["Window"] = None) -> Element:
    b = _coerce(a, b)
    alg = a.alg
    out: dict = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            r = alg.mono_mul(ma, mb)
            if r is None:
                continue
            s, m = r
            if w is not None and not w.contains(alg, m):
                continue
            v = out.get(m, 0) + s * ca * cb
            if v:
                out[m] = v
            else:
                del out[m]
    return Element._raw(alg, out)


@dataclass(frozen=True)
class Window:
    """Truncation parameters.

    weight_cutoff keeps monomials of weight strictly below it; box maps a class
    name to an inclusive ``(lo, hi)`` exponent range (``hi`` may be ``None``);
    classes missing from the box default to ``(0, None)``.
    """

    weight_cutoff: Optional[Fraction] = None
    max_word_len: Optional[int] = None
    box: Mapping = field(default_factory=dict)
    degrees: Optional[tuple] = None
    margin_weight: Fraction = Fraction(2)
    margin_box: int = 1
    max_cells: int = 60000

    def __post_init__(self):
        if self.weight_cutoff is not None:
            object.__setattr__(self, "weight_cutoff", Fraction(self.weight_cutoff))
        if self.degrees is not None:
            lo, hi = (Fraction(x) for x in self.degrees)
            if lo > hi:
                raise WindowError("empty degree interval")
            object.__setattr__(self, "degrees", (lo, hi))
        box = {}
        for k, (lo, hi) in dict(self.box).items():
            if hi is not None and lo > hi:
                raise WindowError(f"empty exponent range for {k}")
            box[k] = (int(lo), None if hi is None else int(hi))
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "margin_weight", Fraction(self.margin_weight))

    def cutoff(self) -> Optional[Fraction]:
        if self.weight_cutoff is not None:
            return self.weight_cutoff
        if self.max_word_len is not None:
            return Fraction(self.max_word_len + 1)
        return None

    def ranges(self, basis: ClassBasis) -> list:
        for k in self.box:
            basis.index(k)
        return [self.box.get(n, (0, None)) for n in basis.names]

    def contains(self, alg: GradedAlgebra, m: Monomial) -> bool:
        if self.max_word_len is not None and alg.word_len(m) > self.max_word_len:
            return False
        if self.box:
            for c, (n, (lo, hi)) in zip(m.exp, ((n, self.box.get(n, (0, None))) for n in alg.basis.names)):
                if c < lo or (hi is not None and c > hi):
                    return False
        elif any(c < 0 for c in m.exp):
            return False
        cut = self.weight_cutoff
        if cut is not None and alg.weight(m) >= cut:
            return False
        if self.degrees is not None:
            d = alg.degree(m)
            if d < self.degrees[0] or d > self.degrees[1]:
                return False
        return True

    def replace(self, **kw) -> "Window":
        from dataclasses import replace
        return replace(self, **kw)


def truncate(a: Element, w: Window) -> Element:
    return Element._raw(a.alg, {m: c for m, c in a.terms.items() if w.contains(a.alg, m)})


def substitute(a: Element, images: Mapping[int, Element], target: GradedAlgebra,
               exp_map=None, w: Optional[Window] = None) -> Element:
    """Evaluate the algebra morphism sending generator ``i`` to ``images[i]``.

    Generators missing from ``images`` are sent to zero.  ``exp_map`` carries
    exponents between class bases (identity by default).
    """
    out = target.zero()
    power_cache: dict = {}

    def power(i, p):
        key = (i, p)
        if key not in power_cache:
            img = images.get(i)
            if img is None:
                power_cache[key] = target.zero()
            else:
                acc = target.unit()
                for _ in range(p):
                    acc = multiply(acc, img, w)
                power_cache[key] = acc
        return power_cache[key]

    for m, c in a.terms.items():
        lam = exp_map(m.exp) if exp_map is not None else m.exp
        acc = target.e(lam) * c
        for i, p in m.factors:
            acc = multiply(acc, power(i, p), w)
            if not acc:
                break
        out = out + acc
    return out if w is None else truncate(out, w)


def normalize(alg: GradedAlgebra, raw: Iterable, lam=None):
    return alg.normalize(raw, lam)


def enumerate_monomials(alg: GradedAlgebra, w: Window, module: Optional[bool] = None,
                        degrees: Optional[Iterable] = None) -> dict:
    """All monomials of the closed window, grouped by degree.

    The closed window is cut out by the exponent box and the weight cutoff
    (the word-length cap is not d-stable and is ignored here).  With
    ``module=True`` every monomial carries exactly one module generator.
    """
    basis = alg.basis
    cut = w.cutoff()
    ranges = w.ranges(basis)
    for (lo, hi), e in zip(ranges, basis.entries):
        if hi is None and (cut is None or e.area <= 0):
            raise WindowError(f"exponent of class {e.name} is unbounded; give window.box.{e.name}")
    if module is None:
        module = alg.has_module
    want = None if degrees is None else {Fraction(d) for d in degrees}
    dlo, dhi = w.degrees if w.degrees is not None else (None, None)

    if cut is None:
        raise WindowError("window needs a weight cutoff or a word-length cap")

    axes = []
    for (lo, hi), e in zip(ranges, basis.entries):
        if hi is None:
            rest = _min_weight_rest(ranges, basis, e)
            # largest c with 2*c*area/eps + rest < cut
            bound = (cut - rest) * basis.epsilon_D / (2 * e.area)
            hi = math.ceil(bound) - 1
        axes.append(range(lo, hi + 1))

    ring = list(range(alg.n_ring))
    mods = list(range(alg.n_ring, len(alg.generators)))
    out: dict = {}
    count = 0
    for lam in itertools.product(*axes):
        mu, om = alg.mu_omega(tuple(lam))
        budget = cut - 2 * om / basis.epsilon_D  # word length must stay below
        if budget <= 0:
            continue
        lam = tuple(lam)
        heads = [((), 0, Fraction(0))]
        if module:
            heads = [(((j, 1),), alg.length[j], alg.deg[j]) for j in mods]
        for head, hl, hd in heads:
            for factors, ln, dg in _words(alg, ring, budget - hl):
                deg = dg + hd - mu
                if dlo is not None and (deg < dlo or deg > dhi):
                    continue
                if want is not None and deg not in want:
                    continue
                m = Monomial(tuple(factors) + head, lam)
                out.setdefault(deg, []).append(m)
                count += 1
                if count > w.max_cells:
                    raise WindowError(f"window has more than {w.max_cells} monomials")
    return out


def _min_weight_rest(ranges, basis, skip) -> Fraction:
    tot = Fraction(0)
    for (lo, hi), e in zip(ranges, basis.entries):
        if e is skip:
            continue
        tot += 2 * lo * e.area / basis.epsilon_D
    return tot


def _words(alg: GradedAlgebra, ring: list, budget: Fraction):
    """Ring words of word length < budget: yields (factors, length, degree)."""
    res = []

    def rec(k, factors, ln, dg):
        if k == len(ring):
            res.append((list(factors), ln, dg))
            return
        i = ring[k]
        rec(k + 1, factors, ln, dg)
        step = alg.length[i]
        maxp = 1 if alg.par[i] else None
        p = 1
        while (maxp is None or p <= maxp) and ln + p * step < budget:
            factors.append((i, p))
            rec(k + 1, factors, ln + p * step, dg + p * alg.deg[i])
            factors.pop()
            p += 1

    rec(0, [], 0, Fraction(0))
    return res
