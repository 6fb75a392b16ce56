import itertools
from fractions import Fraction

import pytest

from clusterhom.algebra import Generator, Window
from clusterhom.complex import ComplexSpec
from clusterhom.novikov import ClassBasis
from clusterhom.trees import (ClusterTree, boundary_splittings, canonical_form,
                              d_squared_consistency, expected_dimension, isomorphic,
                              reorder_sign, validate_tree)

from oracles import reference_splittings


def tree(**kw):
    base = dict(vertices=("v0",), root="v0", edges=(), disk=frozenset({"v0"}),
                markers={0: "v0", 1: "v0"}, n1=1)
    base.update(kw)
    return ClusterTree(**base)


def test_single_disk_vertex_is_valid():
    assert validate_tree(tree()) == []


def test_constant_vertex_needs_three_special_points():
    t = tree(constant=frozenset({"v0"}))
    assert "stability" in {v.kind for v in validate_tree(t)}


def test_sphere_edges_have_zero_length():
    t = tree(vertices=("v0", "s"), edges=(("v0", "s"),), markers={0: "v0", 1: "v0", 2: "s"},
             n1=1, n2=1, lengths={("v0", "s"): Fraction(1)})
    assert "sphere-length" in {v.kind for v in validate_tree(t)}
    ok = tree(vertices=("v0", "s"), edges=(("v0", "s"),), markers={0: "v0", 1: "v0", 2: "s"},
              n1=1, n2=1, lengths={("v0", "s"): Fraction(0)})
    assert validate_tree(ok) == []


def test_structural_violations():
    assert "root" in {v.kind for v in validate_tree(tree(root="zz", vertices=("v0", "zz")))}
    two_in = tree(vertices=("v0", "a", "b"), edges=(("v0", "b"), ("a", "b")),
                  disk=frozenset({"v0", "a", "b"}), lengths={("v0", "b"): 1, ("a", "b"): 1})
    assert {"root", "ingoing"} <= {v.kind for v in validate_tree(two_in)}
    assert "markers" in {v.kind for v in validate_tree(tree(markers={0: "v0", 2: "v0"}))}


def test_isomorphism_ignores_child_order():
    kw = dict(vertices=("r", "a", "b"), root="r", disk=frozenset({"r", "a", "b"}),
              markers={0: "r", 1: "a", 2: "b"}, n1=2)
    t1 = tree(edges=(("r", "a"), ("r", "b")), lengths={("r", "a"): 1, ("r", "b"): 2}, **kw)
    t2 = tree(edges=(("r", "b"), ("r", "a")), lengths={("r", "b"): 2, ("r", "a"): 1}, **kw)
    assert isomorphic(t1, t2)
    t3 = tree(edges=(("r", "a"), ("r", "b")), lengths={("r", "a"): 2, ("r", "b"): 1}, **kw)
    assert not isomorphic(t1, t3) and canonical_form(t1) != canonical_form(t3)


def test_expected_dimension_examples():
    b = ClassBasis.from_triples([("lam0", 2, 1)])
    assert expected_dimension(-1, [0, 0, 0], (1,), b) == 0
    assert expected_dimension(-1, [], (1,), b) == 0
    assert expected_dimension(0, [-1], (0,), b) == 0
    # fine mode: the target intersection degree is subtracted
    assert expected_dimension(Fraction(1, 2), [-1], (0,), b, "fine", Fraction(-1, 2)) == 1


@pytest.mark.parametrize("size", [0, 1, 2, 3])
def test_splittings_match_brute_force(size):
    gens = [Generator("m", 0), Generator("M", 1), Generator("c", 2), Generator("t", 3)]
    odd = {i for i, g in enumerate(gens) if g.degree % 2}
    for S in itertools.combinations_with_replacement(range(4), size):
        if any(S.count(i) > 1 for i in odd):
            continue  # a repeated odd end is the zero monomial; its order is conventional
        for lam in [(0,), (1,), (2,)]:
            ranges = [(0, 2)]
            got = sorted((sp.left, sp.y, sp.right, sp.lam_left, sp.lam_right, sp.sign)
                         for sp in boundary_splittings(list(S), lam, gens, ranges))
            assert got == reference_splittings(list(S), lam, gens, ranges), (S, lam)
            per_lam = sum(1 for a in range(0, 3) if 0 <= lam[0] - a <= 2)
            assert len(got) == 2 ** size * len(gens) * per_lam


def test_two_ends_one_joint():
    gens = [Generator("y", 0)]
    sps = boundary_splittings([0, 0], (0,), gens, [(0, 0)])
    assert len(sps) == 4


def test_swapping_two_odd_ends():
    assert reorder_sign([1, 1], [1, 0]) == -1
    assert reorder_sign([1, 2], [1, 0]) == 1


def cancelling_spec():
    # d x = y u - z u with d y = d z = w, so d^2 x = w u - w u = 0
    return ComplexSpec.build([("u", 1), ("w", 1), ("y", 2), ("z", 2), ("x", 3)], [],
                             {"x": "y*u - z*u", "y": "w", "z": "w"},
                             window=Window(max_word_len=3))


def test_consistency_passes(s1):
    assert d_squared_consistency(s1)[0]
    s = ComplexSpec.build([("x", 1), ("y", 0)], [], {"x": "y"}, window=Window(max_word_len=3))
    assert d_squared_consistency(s)[0]
    ok, details = d_squared_consistency(cancelling_spec())
    assert ok and details["x"][0].is_zero()


def test_consistency_detects_flipped_signs():
    s = cancelling_spec()
    y = s.alg.pos("y")
    flip = lambda sp, S, alg: -sp.sign if sp.y == y else sp.sign
    ok, details = d_squared_consistency(s, sign_rule=flip)
    assert not ok
    rederived, residual = details["x"]
    assert residual.is_zero() and rederived == s.el("-2 * w*u")


def test_consistency_reproduces_a_nonzero_square():
    s = ComplexSpec.build([("a", 1), ("b", 1), ("c", 2), ("x", 3)], [],
                          {"x": "c*a", "c": "b"}, window=Window(max_word_len=3))
    ok, details = d_squared_consistency(s)
    assert ok and details["x"][1] == s.el("a*b")
