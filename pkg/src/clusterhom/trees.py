"""Combinatorics of the labelled metric trees behind cluster moduli spaces.

Trees are rooted and non-planar.  Besides structural validation this module
evaluates the expected-dimension formula, enumerates the boundary splittings
of a moduli space with their Koszul reordering signs, and uses them to
re-derive ``d^2`` of a spec independently of the Leibniz code.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Mapping, Optional, Sequence

from .algebra import GradedAlgebra, Monomial, Window, enumerate_monomials
from .complex import ComplexSpec, apply_d, check_window
from .novikov import ClassBasis, maslov


# ---- trees --------------------------------------------------------------------

@dataclass
class ClusterTree:
    vertices: tuple
    root: str
    edges: tuple                       # (parent, child), oriented away from the root
    disk: frozenset                    # V_D; the rest are sphere vertices
    markers: Mapping                   # marker number -> vertex
    n1: int                            # markers 1..n1 sit on disk vertices
    n2: int = 0                        # markers n1+1..n1+n2 sit on sphere vertices
    classes: Mapping = field(default_factory=dict)   # vertex -> exponent tuple
    lengths: Mapping = field(default_factory=dict)   # edge -> rational >= 0
    constant: frozenset = frozenset()

    def neighbours(self, v) -> int:
        return sum(1 for e in self.edges if v in e)

    def n_alpha(self, v) -> int:
        return sum(1 for u in self.markers.values() if u == v) + self.neighbours(v)

    def children(self, v) -> list:
        return [c for p, c in self.edges if p == v]


@dataclass(frozen=True)
class TreeViolation:
    kind: str
    message: str


def validate_tree(t: ClusterTree) -> list:
    out = []

    def bad(kind, msg):
        out.append(TreeViolation(kind, msg))

    verts = set(t.vertices)
    if len(verts) != len(t.vertices):
        bad("vertices", "duplicate vertex names")
    for p, c in t.edges:
        if p not in verts or c not in verts:
            bad("unknown-vertex", f"edge {p}->{c} uses an unknown vertex")
    if out:
        return out
    indeg = {v: 0 for v in verts}
    for _, c in t.edges:
        indeg[c] += 1
    roots = [v for v in t.vertices if indeg[v] == 0]
    if roots != [t.root]:
        bad("root", f"vertices without ingoing edge: {roots}; expected exactly {t.root!r}")
    for v in t.vertices:
        if v != t.root and indeg[v] != 1:
            bad("ingoing", f"vertex {v} has {indeg[v]} ingoing edges")
    seen, stack = {t.root}, [t.root]
    while stack:
        v = stack.pop()
        for c in t.children(v):
            if c not in seen:
                seen.add(c)
                stack.append(c)
    if seen != verts or len(t.edges) != len(verts) - 1:
        bad("connectivity", "the edges do not form a tree spanning all vertices")
    disk = set(t.disk)
    if t.root not in disk:
        bad("disk-subtree", "the root must be a disk vertex")
    if not disk <= verts:
        bad("disk-subtree", "disk vertices must be vertices")
    else:
        sub = {t.root} & disk
        stack = list(sub)
        while stack:
            v = stack.pop()
            for p, c in t.edges:
                for a, b in ((p, c), (c, p)):
                    if a == v and b in disk and b not in sub:
                        sub.add(b)
                        stack.append(b)
        if sub != disk:
            bad("disk-subtree", f"disk vertices {sorted(disk - sub)} are not connected to the root")
    keys = sorted(t.markers)
    if keys != list(range(t.n1 + t.n2 + 1)):
        bad("markers", f"markers must be numbered 0..{t.n1 + t.n2}, got {keys}")
    if t.markers.get(0) != t.root:
        bad("markers", "marker 0 must sit on the root")
    for k, v in t.markers.items():
        if v not in verts:
            bad("markers", f"marker {k} on unknown vertex {v}")
        elif 1 <= k <= t.n1 and v not in disk:
            bad("markers", f"disk marker {k} sits on sphere vertex {v}")
        elif k > t.n1 and v in disk:
            bad("markers", f"sphere marker {k} sits on disk vertex {v}")
    for e in t.edges:
        ln = t.lengths.get(e)
        if ln is None:
            bad("length", f"edge {e[0]}->{e[1]} has no length")
            continue
        if Fraction(ln) < 0:
            bad("length", f"edge {e[0]}->{e[1]} has negative length")
        if (e[0] not in disk or e[1] not in disk) and Fraction(ln) != 0:
            bad("sphere-length", f"edge {e[0]}->{e[1]} touches a sphere vertex but has length {ln}")
    for v in t.constant:
        if t.n_alpha(v) < 3:
            bad("stability", f"constant vertex {v} has n_alpha = {t.n_alpha(v)} < 3")
        if not _zero_chain_to_nonconstant(t, v):
            bad("stability", f"constant vertex {v} has no zero-length chain to a non-constant vertex")
        lam = t.classes.get(v)
        if lam is not None and any(lam):
            bad("constant-class", f"constant vertex {v} carries a non-zero class")
    return out


def _zero_chain_to_nonconstant(t: ClusterTree, v) -> bool:
    seen, stack = {v}, [v]
    while stack:
        u = stack.pop()
        if u not in t.constant:
            return True
        for e in t.edges:
            if u in e and Fraction(t.lengths.get(e, 1)) == 0:
                w = e[1] if e[0] == u else e[0]
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return False


def canonical_form(t: ClusterTree) -> str:
    """Isomorphism invariant of the labelled tree, ignoring child order."""
    def enc(v, length):
        marks = sorted(k for k, u in t.markers.items() if u == v)
        lab = (f"{'D' if v in t.disk else 'S'}{'c' if v in t.constant else 'n'}"
               f"{marks}{tuple(t.classes.get(v, ()))}@{length}")
        kids = sorted(enc(c, Fraction(t.lengths.get((v, c), 0))) for c in t.children(v))
        return "(" + lab + "".join(kids) + ")"
    return enc(t.root, None)


def isomorphic(a: ClusterTree, b: ClusterTree) -> bool:
    return canonical_form(a) == canonical_form(b)


# ---- dimension formula ------------------------------------------------------------

def expected_dimension(x_deg, end_degs: Sequence, lam, basis: ClassBasis,
                       mode: str = "cluster", target_deg=None) -> Fraction:
    """``|x| - sum |x_i| + mu(lam) - 1``; the fine mode also subtracts ``|b|``."""
    mu = maslov(tuple(lam), basis)
    total = Fraction(x_deg) - sum(Fraction(d) for d in end_degs) + mu - 1
    if mode == "fine":
        if target_deg is None:
            raise ValueError("fine mode needs the target intersection degree")
        total -= Fraction(target_deg)
    elif mode != "cluster":
        raise ValueError(f"unknown mode {mode!r}")
    return total


# ---- boundary splittings ------------------------------------------------------------

def _parity(d) -> int:
    d = Fraction(d)
    if d.denominator != 1:
        raise ValueError(f"no Koszul parity for degree {d}")
    return d.numerator % 2


def reorder_sign(degrees: Sequence, perm: Sequence) -> int:
    """Koszul sign of listing items (with given degrees) in the order ``perm``."""
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b] and _parity(degrees[perm[a]]) and _parity(degrees[perm[b]]):
                sign = -sign
    return sign


def sort_sign(items: Sequence, degree: Callable, key: Callable = lambda i: i) -> int:
    """Sign of sorting ``items`` by ``key`` (a stable sort)."""
    order = sorted(range(len(items)), key=lambda i: key(items[i]))
    return reorder_sign([degree(x) for x in items], order)


@dataclass(frozen=True)
class Splitting:
    left: tuple        # positions in S going to the x side
    y: int             # joint generator (position in the generator list)
    right: tuple       # positions in S going to the y side
    lam_left: tuple
    lam_right: tuple
    sign: int


def _lambda_splittings(lam, ranges):
    axes = []
    for c, (lo, hi) in zip(lam, ranges):
        axes.append([a for a in range(lo, hi + 1) if lo <= c - a <= hi])
    for lam1 in itertools.product(*axes):
        yield tuple(lam1), tuple(c - a for c, a in zip(lam, lam1))


def boundary_splittings(S: Sequence, lam, gens: Sequence, ranges: Sequence,
                        degree: Callable = None) -> list:
    """All ``(S', y, S'', lam', lam'')`` with sign ``eps({y}, <S',y>) eps(S'', S)``.

    ``S`` is a list of generator positions in the fixed order; ``gens`` the
    generator list (objects with ``.degree``); ``ranges`` one inclusive
    ``(lo, hi)`` per class.  Sub-lists are taken by position, so a repeated
    even generator yields several splittings with the same multiset.
    """
    deg = degree or (lambda i: gens[i].degree)
    out = []
    n = len(S)
    lams = list(_lambda_splittings(lam, ranges))
    for mask in range(1 << n):
        left = tuple(k for k in range(n) if mask >> k & 1)
        right = tuple(k for k in range(n) if not mask >> k & 1)
        L = [S[k] for k in left]
        R = [S[k] for k in right]
        for y in range(len(gens)):
            try:
                if Fraction(deg(y)).denominator == 1:
                    # eps({y}, <S', y>) * eps(S'', S)
                    sign = sort_sign([y] + L, deg) * sort_sign(R + L, deg)
                else:
                    # module joint acted on from the left: d(L y) = (-1)^|L| L dy
                    sign = (-1) ** sum(_parity(deg(i)) for i in L) * sort_sign(L + R, deg)
            except ValueError:
                sign = 0  # would move a half-integer module factor: no such splitting
            for l1, l2 in lams:
                out.append(Splitting(left, y, right, l1, l2, sign))
    return out


def splitting_multiplicity(S: Sequence, sp: Splitting) -> Fraction:
    """Weight turning position splittings into monomial coefficients.

    ``d(y^k ...)`` contributes ``k``, and a sub-multiset of ``S`` is reached by
    ``prod_g C(n_g(S), n_g(S'))`` position subsets.
    """
    L = [S[k] for k in sp.left]
    w = Fraction(L.count(sp.y) + 1)
    for g in set(S):
        w /= comb(S.count(g), L.count(g))
    return w


def d_squared_consistency(s: ComplexSpec, w: Optional[Window] = None,
                          sign_rule: Optional[Callable] = None):
    """Re-derive ``d^2 x`` from coefficient pairs through boundary splittings.

    Returns ``(ok, details)`` where ``details`` maps each generator to the pair
    (re-derived element, Leibniz residual).  ``sign_rule(splitting, S)`` may
    override the sign (negative controls).
    """
    alg = s.alg
    cw = check_window(w or s.window)
    ranges = cw.ranges(alg.basis)
    cut = cw.cutoff()
    fixed = []
    for (lo, hi), e in zip(ranges, alg.basis.entries):
        if hi is None:
            hi = int((cut - 0) * alg.basis.epsilon_D / (2 * e.area)) + 1 if e.area > 0 else lo
        fixed.append((lo, hi))
    ok = True
    details = {}
    for xi, x in enumerate(alg.generators):
        want = x.degree - 2
        targets = enumerate_monomials(alg, cw, module=x.is_module, degrees=[want]).get(want, [])
        terms = {}
        for tm in targets:
            S = [i for i, p in tm.factors for _ in range(p)]
            total = Fraction(0)
            for sp in boundary_splittings(S, tm.exp, alg.generators, fixed):
                L = [S[k] for k in sp.left]
                R = [S[k] for k in sp.right]
                if sum(alg.is_module[i] for i in L + [sp.y]) != (1 if x.is_module else 0):
                    continue
                T = _runs(sorted(L + [sp.y]))
                if sp.sign == 0 or any(p > 1 and alg.par[i] != 0 for i, p in T):
                    continue
                a_x = s.d_gen(xi).terms.get(Monomial(tuple(T), sp.lam_left))
                a_y = s.d_gen(sp.y).terms.get(Monomial(tuple(_runs(R)), sp.lam_right))
                if not a_x or not a_y:
                    continue
                sign = sp.sign if sign_rule is None else sign_rule(sp, S, alg)
                total += a_x * a_y * sign * splitting_multiplicity(S, sp)
            if total:
                terms[tm] = total
        rederived = alg.element(terms)
        residual = apply_d(s, apply_d(s, alg.g(x.name)), cw)
        details[x.name] = (rederived, residual)
        if rederived != residual:
            ok = False
    return ok, details


def _runs(seq) -> list:
    """Sorted position list -> ((position, power), ...) factors."""
    out = []
    for i in seq:
        if out and out[-1][0] == i:
            out[-1] = (i, out[-1][1] + 1)
        else:
            out.append((i, 1))
    return out
