"""Reduction to a minimal model: cancel pairs of the Morse part of d.

Each step quotients by the differential ideal generated by ``x`` and ``dx``
where ``d0 x = y`` is a generator.  In the quotient ``x = 0`` and ``y`` is
the fixed point of ``Y = -b(x=0, y=Y)`` with ``dx = y + b``; the fixed point
exists modulo the window because ``b`` strictly raises the weight.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebra import Element, GradedAlgebra, Generator, Window, substitute, truncate
from .complex import (ComplexSpec, check_chain_map, check_window, homology,
                      is_morse_term)
from .errors import MathFailure, SpecError
from .linalg import Echelon, inverse


def split_d0(s: ComplexSpec):
    """Return ``(d0, d_plus)`` as dicts ``generator position -> Element``."""
    alg = s.alg
    d0, dp = {}, {}
    for i, dx in s.diff.items():
        a = {m: c for m, c in dx.terms.items() if is_morse_term(alg, m)}
        b = {m: c for m, c in dx.terms.items() if not is_morse_term(alg, m)}
        if a:
            d0[i] = Element._raw(alg, a)
        if b:
            dp[i] = Element._raw(alg, b)
    return d0, dp


def _d0_vectors(s: ComplexSpec) -> dict:
    d0, _ = split_d0(s)
    return {i: {m.factors[0][0]: c for m, c in e.terms.items()} for i, e in d0.items()}


def _fresh(name: str, taken: set) -> str:
    new = name + "'"
    while new in taken:
        new += "'"
    return new


@dataclass
class BasisChange:
    """New generators as combinations of old ones, and the inverse."""
    new_names: list
    to_new: dict        # old position -> Element of the new algebra
    new_as_old: dict    # new name -> {old position: coefficient}

    @property
    def is_identity(self) -> bool:
        return all(len(v) == 1 and next(iter(v.values())) == 1 for v in self.new_as_old.values())


def normalize_d0_with_map(s: ComplexSpec):
    """Change generator basis so that d0 consists of pairs ``x -> y`` and zeros."""
    alg = s.alg
    if alg.has_module:
        raise SpecError("minimal models are defined for cluster specs without module generators")
    vecs = _d0_vectors(s)
    by_deg: dict = {}
    for i, g in enumerate(alg.generators):
        by_deg.setdefault(g.degree, []).append(i)

    sources: dict = {}
    kernels: dict = {}
    for deg, idx in by_deg.items():
        e = Echelon(track=True)
        src, ker = [], []
        for i in idx:
            dep = e.add(vecs.get(i, {}), {i: Fraction(1)})
            if dep is None:
                src.append(i)
            else:
                ker.append(dep)
        sources[deg], kernels[deg] = src, ker

    rows = {}      # new vector (dict over old positions) per degree
    for deg, idx in by_deg.items():
        chosen = []
        e = Echelon()
        for i in sources[deg]:
            v = {i: Fraction(1)}
            e.add(v)
            chosen.append(v)
        for i in sources.get(deg + 1, []):
            v = dict(vecs[i])
            if e.add(v) is None:
                chosen.append(v)
        # later kernel vectors first, so a combination keeps its leading name
        for v in reversed(kernels[deg]):
            if e.add(v) is None:
                chosen.append(v)
        if len(chosen) != len(idx):  # pragma: no cover - rank argument
            raise MathFailure(f"basis change failed in degree {deg}")
        rows[deg] = chosen

    # name each new vector after an old generator it replaces
    taken = {g.name for g in alg.generators}
    new_items = []  # (carrier position, name, vector)
    for deg, chosen in rows.items():
        free = set(by_deg[deg])
        named = [None] * len(chosen)
        for k, v in enumerate(chosen):
            if len(v) == 1 and next(iter(v.values())) == 1:
                i = next(iter(v))
                named[k] = (i, alg.generators[i].name)
                free.discard(i)
        for k, v in enumerate(chosen):
            if named[k] is not None:
                continue
            cands = [i for i in sorted(v) if i in free] or sorted(free)
            i = cands[0]
            free.discard(i)
            nm = _fresh(alg.generators[i].name, taken)
            taken.add(nm)
            named[k] = (i, nm)
        for (i, nm), v in zip(named, chosen):
            new_items.append((i, nm, v))
    new_items.sort()
    new_gens = [Generator(nm, alg.generators[i].morse_index) for i, nm, _ in new_items]
    new_alg = GradedAlgebra(new_gens, alg.basis)

    to_new = {}
    for deg, idx in by_deg.items():
        block = [(k, it) for k, it in enumerate(new_items) if alg.generators[it[0]].degree == deg]
        mat = [[it[2].get(i, Fraction(0)) for i in idx] for _, it in block]
        inv = inverse(mat)  # old_i = sum_k inv[i][k] new_k
        for r, i in enumerate(idx):
            terms = {}
            for c_idx, (k, it) in enumerate(block):
                c = inv[r][c_idx]
                if c:
                    terms[new_alg.gen_mono(new_alg.pos(it[1]))] = c
            to_new[i] = Element(new_alg, terms)
    new_diff = {}
    for i, nm, v in new_items:
        d_old = alg.zero()
        for j, c in v.items():
            d_old = d_old + s.d_gen(j) * c
        new_diff[nm] = substitute(d_old, to_new, new_alg)
    spec = ComplexSpec(new_alg, new_diff, s.label, s.window)
    return spec, BasisChange([nm for _, nm, _ in new_items], to_new,
                             {nm: v for _, nm, v in new_items})


def normalize_d0(s: ComplexSpec) -> ComplexSpec:
    return normalize_d0_with_map(s)[0]


def d0_pairs(s: ComplexSpec) -> list:
    """Pairs ``(x, y)`` of positions with ``d0 x = y`` exactly."""
    out = []
    for i, v in _d0_vectors(s).items():
        if len(v) == 1:
            (j, c), = v.items()
            if c == 1:
                out.append((i, j))
    return out


@dataclass
class EliminationStep:
    x: str
    y: str
    y_image: Element          # y expressed in the surviving generators
    images: dict              # old position -> Element of the new algebra
    iterations: int


def eliminate_pair(s: ComplexSpec, x: str, w: Optional[Window] = None, max_iter: int = 1000):
    """Quotient by the ideal generated by ``x`` and ``dx``; returns (spec, step)."""
    w = w or s.window
    cw = check_window(w)
    alg = s.alg
    xi = alg.pos(x)
    d0, _ = split_d0(s)
    d0x = d0.get(xi)
    if d0x is None or len(d0x) != 1:
        raise MathFailure(f"no pair: d0 {x} is not a single generator")
    (m, c), = d0x.terms.items()
    if c != 1:
        raise MathFailure(f"no pair: d0 {x} = {d0x} is not normalised")
    yi = m.factors[0][0]
    b = s.d_gen(xi) - alg.mono_element(m)

    keep = [g for k, g in enumerate(alg.generators) if k not in (xi, yi)]
    new_alg = GradedAlgebra(keep, alg.basis)
    images = {k: new_alg.g(g.name) for k, g in enumerate(alg.generators) if k not in (xi, yi)}
    Y = new_alg.zero()
    for it in range(max_iter):
        images[yi] = Y
        nxt = truncate(-substitute(b, images, new_alg, w=cw), cw)
        if nxt == Y:
            break
        Y = nxt
    else:
        raise MathFailure(f"substitution for {alg.generators[yi].name} does not raise the filtration")
    images[yi] = Y
    new_diff = {}
    for k, g in enumerate(alg.generators):
        if k in (xi, yi):
            continue
        new_diff[g.name] = truncate(substitute(s.d_gen(k), images, new_alg, w=cw), cw)
    spec = ComplexSpec(new_alg, new_diff, s.label, s.window)
    return spec, EliminationStep(x, alg.generators[yi].name, Y, images, it)


@dataclass
class ReductionTrace:
    eliminated: list = field(default_factory=list)     # (x, y) names
    basis_changes: list = field(default_factory=list)  # BasisChange per round
    projection: dict = field(default_factory=dict)     # original name -> Element
    chain_map_ok: Optional[bool] = None
    homology_match: Optional[bool] = None
    d0_zero: Optional[bool] = None


def minimal_model(s: ComplexSpec, w: Optional[Window] = None, verify: bool = True):
    """Iterate normalisation and pair elimination until d0 = 0."""
    w = w or s.window
    cw = check_window(w)
    trace = ReductionTrace()
    cur = s
    P = {k: s.alg.g(g.name) for k, g in enumerate(s.alg.generators)}
    while True:
        nxt, change = normalize_d0_with_map(cur)
        if not change.is_identity:
            trace.basis_changes.append(change)
            P = {k: substitute(v, change.to_new, nxt.alg) for k, v in P.items()}
        cur = nxt
        pairs = d0_pairs(cur)
        if not pairs:
            break
        alg = cur.alg
        xi, yi = min(pairs, key=lambda p: (alg.generators[p[0]].degree, p[0]))
        cur, step = eliminate_pair(cur, alg.generators[xi].name, w)
        trace.eliminated.append((step.x, step.y))
        P = {k: truncate(substitute(v, step.images, cur.alg, w=cw), cw) for k, v in P.items()}
    out = ComplexSpec(cur.alg, cur.diff, s.label + ("-min" if trace.eliminated else ""), s.window)
    trace.projection = {s.alg.generators[k].name: v for k, v in P.items()}
    d0, _ = split_d0(out)
    trace.d0_zero = not d0
    if not trace.d0_zero:  # pragma: no cover - loop exits only when no pairs remain
        raise MathFailure("minimal model still has a Morse part")
    if verify:
        trace.chain_map_ok = check_chain_map(trace.projection, s, out, w).ok
        h_in, h_out = homology(s, w), homology(out, w)
        degs = set(h_in.certified) | set(h_out.certified)
        trace.homology_match = all(h_in.betti.get(n, 0) == h_out.betti.get(n, 0) for n in degs)
        if not (trace.chain_map_ok and trace.homology_match):
            raise MathFailure("reduction is not a quasi-isomorphism in the window")
    return out, trace
