"""Differential specifications, the Leibniz extension and windowed homology.

A :class:`ComplexSpec` stores ``d`` on generators only; :func:`apply_d`
extends it as a degree -1 derivation (module generators included, acted on
from the left).  Homology is computed in the finite quotient complex cut out
by a :class:`~clusterhom.algebra.Window` and certified by comparing two
nested windows, see :func:`homology`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence, Union

from .algebra import (Element, GradedAlgebra, Generator, Monomial, Window,
                      enumerate_monomials, multiply, substitute, truncate)
from .errors import MathFailure, SpecError, WindowError
from .linalg import kernel, rank, relative_rank
from .novikov import ClassBasis, exp_combine

DEFAULT_WINDOW = Window(max_word_len=6)


class ComplexSpec:
    """Generators, class basis and the value of ``d`` on each generator."""

    def __init__(self, alg: GradedAlgebra, diff: Mapping, label: str = "",
                 window: Optional[Window] = None):
        self.alg = alg
        self.label = label
        self.window = window if window is not None else DEFAULT_WINDOW
        d = {}
        for key, val in diff.items():
            i = alg.pos(key) if isinstance(key, str) else int(key)
            if not isinstance(val, Element):
                from .expr import parse_element
                val = parse_element(str(val), alg)
            elif val.alg is not alg:
                val = Element(alg, val.terms)
            if val:
                d[i] = val
        self.diff = d
        self._word_d: dict = {}

    @classmethod
    def build(cls, generators: Sequence, classes: Sequence = (), diff: Mapping = None,
              epsilon_D=1, label: str = "", window: Optional[Window] = None) -> "ComplexSpec":
        """Convenience constructor from ``(name, index[, kind])`` tuples and text."""
        gens = [g if isinstance(g, Generator) else Generator(*g) for g in generators]
        basis = ClassBasis.from_triples(classes, epsilon_D)
        return cls(GradedAlgebra(gens, basis), diff or {}, label, window)

    @property
    def basis(self) -> ClassBasis:
        return self.alg.basis

    @property
    def generators(self):
        return self.alg.generators

    def d_gen(self, name_or_pos) -> Element:
        i = self.alg.pos(name_or_pos) if isinstance(name_or_pos, str) else name_or_pos
        return self.diff.get(i, self.alg.zero())

    def el(self, text: str) -> Element:
        from .expr import parse_element
        return parse_element(text, self.alg)

    def with_window(self, w: Window) -> "ComplexSpec":
        return ComplexSpec(self.alg, self.diff, self.label, w)

    def __eq__(self, other):
        if not isinstance(other, ComplexSpec):
            return NotImplemented
        return (self.alg.generators == other.alg.generators
                and self.alg.basis == other.alg.basis
                and {k: v.terms for k, v in self.diff.items()}
                == {k: v.terms for k, v in other.diff.items()}
                and self.label == other.label and self.window == other.window)

    def __repr__(self):
        return f"ComplexSpec({self.label!r}, {[g.name for g in self.generators]})"


# ---- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    kind: str
    generator: str
    message: str
    severity: str = "error"

    def __str__(self):
        return f"{self.severity}: [{self.kind}] d {self.generator}: {self.message}"


def is_morse_term(alg: GradedAlgebra, m: Monomial) -> bool:
    """Weight-preserving part of d: no class and word length exactly one."""
    return not any(m.exp) and alg.word_len(m) == 1


def validate_spec(s: ComplexSpec) -> list:
    from .expr import format_monomial
    alg = s.alg
    out = []
    crit = [g for g in alg.generators if g.kind == "crit"]
    top = max((g.morse_index for g in crit), default=None)
    for i, x in enumerate(alg.generators):
        dx = s.diff.get(i)
        if dx is None:
            continue
        want = x.degree - 1
        wx = Fraction(alg.length[i])
        for m, c in dx.terms.items():
            label = format_monomial(alg, m) or "1"
            def diag(kind, msg, sev="error"):
                out.append(Diagnostic(kind, x.name, f"{label}: {msg}", sev))
            fac = [p for p, _ in m.factors]
            if fac != sorted(set(fac)):
                diag("unsorted", "monomial factors are not in generator order")
            if any(alg.par[p] == 1 and e > 1 for p, e in m.factors):
                diag("unsorted", "odd generator raised to a power > 1")
            deg = alg.degree(m)
            if deg != want:
                diag("degree", f"degree {deg} but d {x.name} must have degree {want}")
            nmod = alg.module_count(m)
            if nmod != (1 if x.is_module else 0):
                diag("module", f"term carries {nmod} module generators")
            if any(e < 0 for e in m.exp):
                diag("negative-exponent", "negative class exponent", "warning")
            morse = is_morse_term(alg, m) if not x.is_module else (
                not any(m.exp) and alg.word_len(m) == alg.length[i])
            wt = alg.weight(m)
            if wt < wx:
                diag("filtration", f"weight {wt} below weight {wx} of {x.name}")
            elif not morse and wt < wx + 1:
                diag("weight-ambiguous",
                     f"non-Morse term of weight {wt} < {wx + 1}", "warning")
            if not x.is_module and not morse and alg.word_len(m) >= 1:
                for p, _ in m.factors:
                    g = alg.generators[p]
                    if g.kind == "crit" and g.morse_index == 0:
                        diag("index-0-end", f"index-0 generator {g.name} in a non-Morse term")
            if (x.kind == "crit" and top is not None and x.morse_index == top
                    and alg.word_len(m) == 0):
                diag("free-term-top-index", f"free term at top index {top}")
    return out


def errors_only(diags) -> list:
    return [d for d in diags if d.severity == "error"]


# ---- the derivation -----------------------------------------------------------

def shift_exp(a: Element, lam) -> Element:
    if not any(lam):
        return a
    return Element._raw(a.alg, {Monomial(m.factors, exp_combine(m.exp, lam)): c
                                for m, c in a.terms.items()})


def _d_word(s: ComplexSpec, factors: tuple) -> Element:
    """d of the word ``factors`` (no Novikov part), memoised per ComplexSpec."""
    cache = s._word_d
    r = cache.get(factors)
    if r is not None:
        return r
    alg = s.alg
    if not factors:
        r = alg.zero()
    else:
        (i, p), rest = factors[0], factors[1:]
        dx = s.diff.get(i)
        head = alg.zero()
        if dx is not None:
            # d(x^p) = p x^{p-1} dx  (p > 1 only for even x)
            head = dx if p == 1 else multiply(alg.mono_element(alg.gen_mono(i, p - 1)), dx) * p
        rest_m = Element._raw(alg, {Monomial(rest, alg.basis.zero()): Fraction(1)})
        r = multiply(head, rest_m) if head else alg.zero()
        if rest:
            drest = _d_word(s, rest)
            if drest:
                xp = alg.mono_element(alg.gen_mono(i, p))
                sign = -1 if (alg.par[i] and p % 2) else 1
                r = r + multiply(xp, drest) * sign
    cache[factors] = r
    return r


def d_monomial(s: ComplexSpec, m: Monomial) -> Element:
    return shift_exp(_d_word(s, m.factors), m.exp)


def apply_d(s: ComplexSpec, a: Element, w: Optional[Window] = None) -> Element:
    out: dict = {}
    for m, c in a.terms.items():
        for mm, v in d_monomial(s, m).terms.items():
            if w is not None and not w.contains(s.alg, mm):
                continue
            nv = out.get(mm, 0) + c * v
            if nv:
                out[mm] = nv
            else:
                del out[mm]
    return Element._raw(s.alg, out)


def check_window(w: Window) -> Window:
    """Window used for identities mod F: weight cutoff plus exponent box only."""
    return Window(weight_cutoff=w.cutoff(), box=w.box, max_cells=w.max_cells)


@dataclass
class CheckReport:
    ok: bool
    offender: Optional[str] = None
    residual: Optional[Element] = None
    detail: str = ""

    def __bool__(self):
        return self.ok

    def first_term(self) -> str:
        if not self.residual:
            return ""
        from .expr import format_element
        alg = self.residual.alg
        m = min(self.residual.terms, key=lambda m: (alg.weight(m), m))
        return format_element(alg.mono_element(m, self.residual.terms[m]))


def check_d_squared(s: ComplexSpec, w: Optional[Window] = None) -> CheckReport:
    cw = check_window(w or s.window)
    for i, x in enumerate(s.alg.generators):
        dx = s.diff.get(i)
        if dx is None:
            continue
        res = apply_d(s, dx, cw)
        if res:
            return CheckReport(False, x.name, res, f"d(d {x.name}) != 0")
    return CheckReport(True)


def check_d_squared_on(s: ComplexSpec, a: Element, w: Optional[Window] = None) -> Element:
    cw = check_window(w or s.window)
    return apply_d(s, apply_d(s, a), cw)


# ---- chain maps ---------------------------------------------------------------

MapLike = Union[Mapping, Callable[[Element], Element]]


def check_chain_map(phi: MapLike, src: ComplexSpec, tgt: ComplexSpec,
                    w: Optional[Window] = None, shift=0, exp_map=None) -> CheckReport:
    """Check ``phi d_src = d_tgt phi`` modulo the window.

    A mapping ``generator -> Element of tgt`` is an algebra morphism (shift 0)
    and is checked on generators.  A callable is treated as a linear map of
    the given degree shift and is checked on every window monomial.
    """
    w = w or src.window
    cw = check_window(w)
    shift = Fraction(shift)
    if callable(phi) and not isinstance(phi, Mapping):
        return _check_linear_map(phi, src, tgt, w, cw, shift)
    if shift != 0:
        raise SpecError("an algebra morphism must have degree shift 0")
    images = {}
    for key, val in phi.items():
        i = src.alg.pos(key) if isinstance(key, str) else int(key)
        if not isinstance(val, Element):
            val = tgt.el(str(val))
        images[i] = val
    for i, x in enumerate(src.alg.generators):
        img = images.get(i, tgt.alg.zero())
        for deg in img.degrees():
            if deg != x.degree + shift:
                raise SpecError(f"image of {x.name} has degree {deg}, expected {x.degree + shift}")
    for i, x in enumerate(src.alg.generators):
        lhs = substitute(src.d_gen(i), images, tgt.alg, exp_map)
        rhs = apply_d(tgt, images.get(i, tgt.alg.zero()), cw)
        res = truncate(lhs - rhs, cw)
        if res:
            return CheckReport(False, x.name, res, f"phi(d {x.name}) != d(phi {x.name})")
    return CheckReport(True)


def _check_linear_map(phi, src, tgt, w, cw, shift) -> CheckReport:
    from .expr import format_monomial
    mons = enumerate_monomials(src.alg, check_window(w).replace(degrees=w.degrees))
    for deg in sorted(mons):
        for m in mons[deg]:
            x = src.alg.mono_element(m)
            img = phi(x)
            for dg in img.degrees():
                if dg != deg + shift:
                    raise SpecError(f"phi shifts degree of {format_monomial(src.alg, m)} "
                                    f"by {dg - deg}, expected {shift}")
            lhs = phi(apply_d(src, x))
            rhs = apply_d(tgt, img)
            res = truncate(lhs - rhs, cw)
            if res:
                return CheckReport(False, format_monomial(src.alg, m) or "1", res,
                                   "phi d != d phi")
    return CheckReport(True)


def linear_part_spec(s: ComplexSpec) -> ComplexSpec:
    """Target of the linear projection: keep only word-length-one terms of d."""
    alg = s.alg
    diff = {i: Element._raw(alg, {m: c for m, c in dx.terms.items() if alg.word_len(m) == 1})
            for i, dx in s.diff.items()}
    return ComplexSpec(alg, diff, s.label + "-linear", s.window)


def linear_projection(s: ComplexSpec):
    """The projection ``l`` onto word length one, as a linear map on elements."""
    alg = s.alg

    def l(a: Element) -> Element:
        return Element._raw(alg, {m: c for m, c in a.terms.items() if alg.word_len(m) == 1})
    return l


def filtration_preserved(phi: Mapping, src: ComplexSpec, tgt: ComplexSpec) -> bool:
    """Every generator image has weight >= the generator's weight."""
    for key, val in phi.items():
        i = src.alg.pos(key) if isinstance(key, str) else int(key)
        if val and val.min_weight() < src.alg.length[i]:
            return False
    return True


# ---- homology -----------------------------------------------------------------

@dataclass
class HomologyReport:
    """Windowed homology.

    ``raw_betti`` is ker - im of the quotient complex of the window itself;
    ``betti`` is the certified value: the rank of the map from the homology
    of a wider window into that of the requested one, which removes classes
    created by the truncation edges.
    """
    window: Window
    degrees: list
    dim: dict
    kernel: dict
    image: dict
    raw_betti: dict
    betti: dict
    edge: set = field(default_factory=set)

    @property
    def certified(self) -> list:
        return [n for n in self.degrees if n not in self.edge]

    def certified_betti(self) -> dict:
        return {n: self.betti[n] for n in self.certified}

    def is_zero(self) -> bool:
        return all(self.betti[n] == 0 for n in self.certified)

    def rows(self):
        for n in self.degrees:
            yield n, self.dim[n], self.kernel[n], self.image[n], self.raw_betti[n], \
                self.betti[n], n in self.edge


def _check_nonneg_exponents(s: ComplexSpec):
    for i, dx in s.diff.items():
        for m in dx.terms:
            if any(e < 0 for e in m.exp):
                raise WindowError(
                    f"d {s.alg.generators[i].name} has a negative class exponent; "
                    "the window quotient is not a subcomplex")


def _widen(w: Window, basis: ClassBasis, lo_shift: int, hi_shift: int, cut_shift) -> Window:
    box = {}
    for name, (lo, hi) in zip(basis.names, w.ranges(basis)):
        box[name] = (lo - lo_shift, None if hi is None else hi + hi_shift)
    cut = w.cutoff()
    return Window(weight_cutoff=cut + cut_shift, box=box, degrees=w.degrees,
                  max_cells=w.max_cells)


def _blocks(s: ComplexSpec, w: Window, module, dlo, dhi):
    ew = w.replace(degrees=None if dlo is None else (dlo - 1, dhi + 1))
    mons = enumerate_monomials(s.alg, ew, module=module)
    index = {n: {m: j for j, m in enumerate(sorted(ms))} for n, ms in mons.items()}
    return index


def _columns(s: ComplexSpec, index: dict, n) -> list:
    tgt = index.get(n - 1, {})
    cols = []
    for m in index.get(n, {}):
        col = {}
        for mm, c in d_monomial(s, m).terms.items():
            j = tgt.get(mm)
            if j is not None:
                col[j] = col.get(j, 0) + c
        cols.append({k: v for k, v in col.items() if v})
    return cols


def homology(s: ComplexSpec, w: Optional[Window] = None, module=None,
             certify: bool = True) -> HomologyReport:
    """Homology of the window quotient complex, with stable (certified) ranks.

    The quotient is ``A / (A ∩ B)`` with ``A`` the span of monomials whose
    class exponents are ``>= lo`` and ``B`` the span of monomials of weight
    ``>= cutoff`` or with some exponent ``> hi``; both are subcomplexes when
    every differential term has non-negative exponents.  The certified betti
    number is the rank of ``H(Q_in) -> H(Q_out)`` where ``Q_in`` widens the
    box upwards and the cutoff, and ``Q_out`` is the requested window with the
    box widened downwards.
    """
    w = w or s.window
    if w.cutoff() is None:
        raise WindowError("homology needs a weight cutoff or a word-length cap")
    _check_nonneg_exponents(s)
    basis = s.basis
    dlo, dhi = w.degrees if w.degrees is not None else (None, None)
    req = _widen(w, basis, 0, 0, 0)
    out_w = _widen(w, basis, w.margin_box, 0, 0) if certify else req
    in_w = _widen(w, basis, 0, w.margin_box, w.margin_weight)

    idx_req = _blocks(s, req, module, dlo, dhi)
    idx_out = _blocks(s, out_w, module, dlo, dhi) if certify else idx_req
    if dlo is None:
        degrees = sorted(idx_req)
    else:
        degrees = sorted(n for n in idx_req if dlo <= n <= dhi)

    dim, ker, im, raw, betti = {}, {}, {}, {}, {}
    for n in degrees:
        cn = _columns(s, idx_req, n)
        cn1 = _columns(s, idx_req, n + 1)
        dim[n] = len(idx_req.get(n, {}))
        ker[n] = dim[n] - rank(cn)
        im[n] = rank(cn1)
        raw[n] = ker[n] - im[n]
    if certify:
        idx_in = _blocks(s, in_w, module, dlo, dhi)
        for n in degrees:
            cols_in = _columns(s, idx_in, n)
            z = kernel(cols_in)
            inv = {j: m for m, j in idx_in.get(n, {}).items()}
            tgt = idx_out.get(n, {})
            mapped = []
            for vec in z:
                v = {}
                for j, c in vec.items():
                    k = tgt.get(inv[j])
                    if k is not None:
                        v[k] = c
                mapped.append(v)
            bounds = _columns(s, idx_out, n + 1)
            betti[n] = relative_rank(mapped, bounds)
    else:
        betti = dict(raw)
    edge = set()
    if dlo is not None:
        edge = {n for n in degrees if n - 1 < dlo or n + 1 > dhi}
    if any(b < 0 for b in betti.values()):
        raise MathFailure("negative betti number: d^2 != 0 in the window")
    return HomologyReport(req, degrees, dim, ker, im, raw, betti, edge)
