from fractions import Fraction

import pytest

from clusterhom.algebra import Window, multiply, truncate
from clusterhom.complex import ComplexSpec, check_window
from clusterhom.errors import MathFailure, SpecError
from clusterhom.fine import (FineSpec, builtin_circle_line, check_dF_squared, check_sa_squared,
                             fine_homology, split_sa, symmetrize)
from clusterhom.novikov import ClassBasis

from oracles import free_algebra_counts

SMALL = Window(max_word_len=4, degrees=(-5, 3))


def two_point_spec(dF_text=None):
    """Perfect no-bubbling pair: d_F a = (m - m') a on every intersection point."""
    cl0 = ComplexSpec.build([("m", 0), ("M", 1)], [], {})
    cl1 = ComplexSpec.build([("m1", 0), ("M1", 1)], [], {})
    f = FineSpec(cl0, cl1, ClassBasis(), {}, [("a", 0), ("b", 1)], {}, "pair", SMALL)
    text = {"a": "(m - m1) * a", "b": "(m - m1) * b"} if dF_text is None else dF_text
    return f.with_dF({k: f.el(v) for k, v in text.items()})


def test_split_sa_on_circle_line():
    f = builtin_circle_line()
    s_a, delta_a = split_sa(f, "a")
    assert s_a == f.el("m") and delta_a == f.el("b")
    s_b, delta_b = split_sa(f, "b")
    dm = f.spec.d_gen("m")
    assert s_b == f.el("m") and delta_b == -multiply(dm, f.el("a"))


def test_split_sa_of_zero():
    f = two_point_spec({})
    assert split_sa(f, "a") == (f.alg.zero(), f.alg.zero())


def test_sa_squared():
    assert check_sa_squared(builtin_circle_line()).ok
    assert check_sa_squared(two_point_spec({})).ok
    # an even coefficient would survive squaring, but d_F then has the wrong degree
    bad = two_point_spec({"a": "M * a"})
    with pytest.raises(MathFailure):
        check_sa_squared(bad)


def test_dF_squared_and_negative_control():
    f = builtin_circle_line()
    assert check_dF_squared(f).ok
    assert check_dF_squared(two_point_spec({})).ok
    ctl = builtin_circle_line(sign=+1)
    r = check_dF_squared(ctl)
    assert not r.ok and r.offender == "a"
    dm = ctl.spec.d_gen("m")
    want = truncate(multiply(dm, ctl.el("a")) * 2, check_window(ctl.window))
    assert r.residual == want


def test_circle_line_homology_vanishes():
    h = fine_homology(builtin_circle_line())
    assert h.certified and h.is_zero()


def test_zero_dF_gives_free_module_ranks():
    w = Window(max_word_len=4, box={"lam": (0, 2)}, degrees=(-6, 4))
    f = builtin_circle_line(w).with_dF({})
    # d_F = 0 but the ring differential dm != 0 still acts; use the trivial ring instead
    cl0 = ComplexSpec.build([("m", 0), ("M", 1)], [("lam0", 2, 1)], {})
    g = FineSpec(cl0, f.cl1, f.bar_basis, f.embeddings, f.intersections, {}, "free", w)
    h = fine_homology(g)
    lam = [(-2 * k, 2 * k) for k in range(0, 3)]
    want = free_algebra_counts([-1, 0], lam, w.cutoff(),
                               module_degrees=[Fraction(1, 2), Fraction(-1, 2)], module_len=0)
    for n in h.certified:
        assert h.betti[n] == want.get(n, 0), n


def test_pair_spec_is_acyclic_and_symmetrizes_to_zero():
    f = two_point_spec()
    assert check_dF_squared(f).ok
    assert fine_homology(f).is_zero()
    g = symmetrize(f, {"m1": "m", "M1": "M"})
    assert all(v.is_zero() for v in g.dF.values())


def test_symmetrize_identity_and_degree_check():
    f = builtin_circle_line()
    g = symmetrize(f, {})
    assert {k: v.terms for k, v in g.dF.items()} == {k: v.terms for k, v in f.dF.items()}
    with pytest.raises(SpecError):
        symmetrize(two_point_spec(), {"m1": "M", "M1": "m"})


def test_embedding_must_preserve_maslov_and_area():
    cl0 = ComplexSpec.build([("m", 0)], [("lam0", 2, 1)], {})
    cl1 = ComplexSpec.build([], [], {})
    bar = ClassBasis.from_triples([("lam", 2, 2)])
    with pytest.raises(SpecError):
        FineSpec(cl0, cl1, bar, {("cl0", "lam0"): "lam"}, [], {})
