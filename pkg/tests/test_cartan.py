import pytest
from fractions import Fraction

from klrloc.cartan import (
    CartanDatum,
    ConvexOrder,
    bilinear,
    bruhat_leq,
    cone_membership,
    positive_roots_of,
    s_i,
    weyl_act,
)

A2 = CartanDatum.type_A(2)
A3 = CartanDatum.type_A(3)
B2 = CartanDatum.type_B2()


def test_bilinear_values():
    a1, a2 = A2.alpha(0), A2.alpha(1)
    L1 = A2.Lambda(0)
    assert bilinear(a1, a1) == 2
    assert bilinear(a1, a2) == -1
    assert bilinear(L1, a2) == 0
    with pytest.raises(ValueError):
        bilinear(A2.alpha(0), CartanDatum.type_A(3).alpha(0))


def test_weyl_act():
    L1, L2 = A2.Lambda(0), A2.Lambda(1)
    a1 = A2.alpha(0)
    assert s_i(A2, 0, L1) == L1 - a1
    assert weyl_act(A2, (0, 1, 0), L1) == -L2
    lam = L1 + L2.scale(3) - a1
    assert s_i(A2, 0, s_i(A2, 0, lam)) == lam


def test_positive_roots():
    a1, a2 = A2.alpha(0), A2.alpha(1)
    assert positive_roots_of(A2, (0, 1, 0)) == [a1, a1 + a2, a2]
    assert positive_roots_of(A2, (0,)) == [a1]
    a1_, a2_ = A3.alpha(0), A3.alpha(1)
    assert positive_roots_of(A3, (0, 1)) == [a1_, a1_ + a2_]
    with pytest.raises(ValueError):
        positive_roots_of(A2, (0, 0))


def test_braid_move_same_root_set():
    r1 = positive_roots_of(A2, (0, 1, 0))
    r2 = positive_roots_of(A2, (1, 0, 1))
    assert set(r1) == set(r2)


def test_weyl_preserves_form():
    import random
    random.seed(0)
    for cartan in (A2, A3, B2):
        n = cartan.n
        for _ in range(20):
            w = tuple(random.randrange(n) for _ in range(4))
            lam = cartan.alpha(random.randrange(n)) + cartan.alpha(random.randrange(n))
            mu = cartan.alpha(random.randrange(n))
            assert bilinear(weyl_act(cartan, w, lam), weyl_act(cartan, w, mu)) == bilinear(lam, mu)


def test_lambda_sum_equals_root_sum_in_A2():
    assert A2.Lambda(0) + A2.Lambda(1) == A2.alpha(0) + A2.alpha(1)


def test_convex_order():
    a1, a2 = A2.alpha(0), A2.alpha(1)
    co = ConvexOrder(A2, (0, 1, 0))
    assert co.compare(a1, a1 + a2) == co.LESS
    assert co.compare(a1.scale(2), a1.scale(3)) == co.EQUIV
    assert co.compare(a2, a1) == co.GREATER
    with pytest.raises(ValueError):
        co.compare(a1 - a2, a1)


def test_convex_order_tail():
    co = ConvexOrder(A2, (0,))
    a1, a2 = A2.alpha(0), A2.alpha(1)
    assert co.compare(a1, a2) == co.LESS
    assert co.compare(a2, a1) == co.GREATER
    with pytest.raises(ValueError):
        co.compare(a2, a1 + a2)  # two tail roots


def test_i_star():
    assert A2.i_star(0) == 1
    assert CartanDatum.type_A(1).i_star(0) == 0
    assert A3.i_star(1) == 1
    assert B2.i_star(0) == 0 and B2.i_star(1) == 1


def test_bruhat():
    assert bruhat_leq(A2, (), (0, 1))
    assert not bruhat_leq(A2, (0, 1), (0,))
    assert bruhat_leq(A2, (0,), (0, 1, 0))
    assert bruhat_leq(A2, (1,), (0, 1, 0))


def test_cone_membership():
    a1, a2 = A2.alpha(0), A2.alpha(1)
    assert cone_membership([a1], a1.scale(3))
    assert not cone_membership([a1], a1 + a2)
    assert cone_membership([a1, a1 + a2], a1.scale(2) + a2)


def test_json_loading():
    c = CartanDatum.from_json({"type": "A2"})
    assert c == A2
    c2 = CartanDatum.from_json({"matrix": [[2, -1], [-1, 2]], "norms": [2, 2]})
    assert c2 == A2
    assert CartanDatum.from_json({"type": "B2"}) == B2
