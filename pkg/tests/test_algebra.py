import random
from fractions import Fraction

import pytest

from klrloc.algebra import (
    AlgElement,
    KLRContext,
    QParams,
    central_p,
    intertwiner,
    intertwiner_element,
    outer_tensor,
)
from klrloc.cartan import CartanDatum

A2 = CartanDatum.type_A(2)
ctx2 = KLRContext(A2)
A3 = CartanDatum.type_A(3)
ctx3 = KLRContext(A3)
B2 = CartanDatum.type_B2()
ctxB = KLRContext(B2)


def tau_sq(ctx, k, nu):
    from klrloc.algebra import s_times, perm_identity
    n = len(nu)
    s = tuple(k + 1 if x == k else (k if x == k + 1 else x) for x in range(n))
    left_word = tuple(nu[s.index(p)] for p in range(n)) if False else None
    first = AlgElement.tau(ctx, k, nu)
    swapped = list(nu)
    swapped[k], swapped[k + 1] = swapped[k + 1], swapped[k]
    second = AlgElement.tau(ctx, k, tuple(swapped))
    return second * first


def test_tau_squared_mixed():
    # tau_0^2 e(1,2) = Q_{1,2}(x_0, x_1) e(1,2) with default Q = u - v
    got = tau_sq(ctx2, 0, (0, 1))
    x0 = AlgElement.x(ctx2, 0, (0, 1))
    x1 = AlgElement.x(ctx2, 1, (0, 1))
    assert got == x0 - x1


def test_tau_squared_equal_letters():
    assert tau_sq(ctx2, 0, (0, 0)).is_zero()


def test_tau_x_relation():
    t = AlgElement.tau(ctx2, 0, (0, 0))
    x0 = AlgElement.x(ctx2, 0, (0, 0))
    x1 = AlgElement.x(ctx2, 1, (0, 0))
    e = AlgElement.idempotent(ctx2, (0, 0))
    assert t * x0 - x1 * t == e.scale(-1)
    assert t * x1 - x0 * t == e


def test_orthogonal_idempotents():
    e1 = AlgElement.idempotent(ctx2, (0, 1))
    e2 = AlgElement.idempotent(ctx2, (1, 0))
    assert (e1 * e2).is_zero()
    assert e1 * e1 == e1


def test_degrees():
    assert AlgElement.x(ctx2, 0, (0,)).degree() == 2
    assert AlgElement.tau(ctx2, 0, (0, 1)).degree() == 1
    assert AlgElement.idempotent(ctx2, (0, 1, 0)).degree() == 0
    # B2: deg x depends on the letter norm
    assert AlgElement.x(ctxB, 0, (0,)).degree() == 4
    assert AlgElement.x(ctxB, 0, (1,)).degree() == 2


def test_degree_additivity():
    random.seed(11)
    beta = (2, 1)
    for _ in range(30):
        a = _rand_elem(ctx2, beta)
        b = _rand_elem(ctx2, beta)
        p = a * b
        if p.is_zero() or a.degree() == "inhomogeneous" or b.degree() == "inhomogeneous":
            continue
        assert p.degree() == a.degree() + b.degree()


def _rand_elem(ctx, beta):
    n = sum(beta)
    kind = random.random()
    if kind < 0.4:
        return AlgElement.tau_all(ctx, random.randrange(n - 1), beta)
    if kind < 0.8:
        return AlgElement.x_all(ctx, random.randrange(n), beta)
    return AlgElement.idempotent(ctx, random.choice(ctx.words_of_weight(beta)))


def test_confluence_two_reduction_orders():
    """Left-fold vs right-fold of random generator words agree (1000 pairs)."""
    random.seed(2024)
    cases = 0
    for cartan, ctx in ((A2, ctx2), (A3, ctx3), (B2, ctxB)):
        while cases % 340 != 333 and cases < (340 * (1 + [A2, A3, B2].index(cartan))):
            n = random.randint(2, 4)
            beta = [0] * cartan.n
            for _ in range(n):
                beta[random.randrange(cartan.n)] += 1
            beta = tuple(beta)
            word = [_rand_elem(ctx, beta) for _ in range(4)]
            left = ((word[0] * word[1]) * word[2]) * word[3]
            right = word[0] * (word[1] * (word[2] * word[3]))
            mixed = (word[0] * word[1]) * (word[2] * word[3])
            assert left == right == mixed
            cases += 1
    assert cases >= 1000


def test_intertwiner_square():
    phi = intertwiner_element(ctx2, 0, (1, 1))
    sq = phi * phi
    # phi_k^2 e(nu) = (Q + delta) e(nu); on mixed letters Q = u-v resp. v-u
    x0 = AlgElement.x_all(ctx2, 0, (1, 1))
    x1 = AlgElement.x_all(ctx2, 1, (1, 1))
    e12 = AlgElement.idempotent(ctx2, (0, 1))
    e21 = AlgElement.idempotent(ctx2, (1, 0))
    expect = (x0 - x1) * e12 + (x1 - x0) * e21
    assert sq == expect
    phi_eq = intertwiner_element(ctx2, 0, (2, 0))
    assert phi_eq * phi_eq == AlgElement.idempotent(ctx2, (0, 0))


def test_intertwiner_braid():
    for beta in ((2, 1), (1, 2)):
        p0 = intertwiner_element(ctx2, 0, beta)
        p1 = intertwiner_element(ctx2, 1, beta)
        assert p0 * p1 * p0 == p1 * p0 * p1


def test_intertwiner_braid_heights_le_4():
    for ctx, beta in ((ctx2, (2, 2)), (ctx3, (2, 1, 1)), (ctxB, (2, 2))):
        for k in range(sum(beta) - 2):
            pk = intertwiner_element(ctx, k, beta)
            pk1 = intertwiner_element(ctx, k + 1, beta)
            assert pk * pk1 * pk == pk1 * pk * pk1


def test_intertwiner_moves_x():
    beta = (2, 1)
    w = (1, 0, 2)  # transposition of positions 0,1
    pw = intertwiner(ctx2, w, beta)
    assert pw * AlgElement.x_all(ctx2, 0, beta) == AlgElement.x_all(ctx2, 1, beta) * pw
    assert intertwiner(ctx2, (0, 1, 2), beta) == AlgElement.unit(ctx2, beta)


def test_central_p():
    assert central_p(ctx2, 0, (1, 0)) == AlgElement.x(ctx2, 0, (0,))
    p = central_p(ctx2, 0, (1, 1))
    x_first = AlgElement(ctx2, (1, 1), {((0, 1), (1, 0), (0, 1)): 1, ((0, 1), (0, 1), (1, 0)): 1})
    assert p == x_first
    t = AlgElement.tau_all(ctx2, 0, (1, 1))
    assert p * t == t * p


def test_central_p_heights_up_to_5():
    random.seed(5)
    for ctx, betas in ((ctx2, [(3, 2), (2, 3)]), (ctx3, [(2, 2, 1)])):
        for beta in betas:
            n = sum(beta)
            p = central_p(ctx, 0, beta)
            for k in range(n - 1):
                t = AlgElement.tau_all(ctx, k, beta)
                assert p * t == t * p
            for k in range(n):
                x = AlgElement.x_all(ctx, k, beta)
                assert p * x == x * p


def test_outer_tensor():
    e1 = AlgElement.idempotent(ctx2, (0,))
    e2 = AlgElement.idempotent(ctx2, (1,))
    assert outer_tensor(e1, e2) == AlgElement.idempotent(ctx2, (0, 1))
    x = AlgElement.x(ctx2, 0, (0,))
    assert outer_tensor(x, e2) == AlgElement.x(ctx2, 0, (0, 1))
    t = AlgElement.tau(ctx2, 0, (0, 0))
    got = outer_tensor(e2, t)
    expect = AlgElement(ctx2, (2, 1), {((0, 2, 1), (0, 0, 0), (1, 0, 0)): 1})
    assert got == expect


def test_outer_tensor_multiplicative():
    random.seed(7)
    for _ in range(20):
        a1 = _rand_elem(ctx2, (1, 1))
        a2 = _rand_elem(ctx2, (1, 1))
        b1 = _rand_elem(ctx2, (1, 0))
        b2 = _rand_elem(ctx2, (1, 0))
        lhs = outer_tensor(a1 * a2, b1 * b2)
        rhs = outer_tensor(a1, b1) * outer_tensor(a2, b2)
        assert lhs == rhs


def test_serialization_roundtrip():
    a = AlgElement.tau_all(ctx2, 0, (1, 1)) * AlgElement.x_all(ctx2, 1, (1, 1))
    doc = a.to_json()
    b = AlgElement.from_json(ctx2, (1, 1), doc)
    assert a == b


def test_qparams_invariants():
    qp = ctx2.q
    # Q_{i,j}(u,v) = Q_{j,i}(v,u)
    assert qp.q_poly(0, 1) == {(p, q): c for (q, p), c in qp.q_poly(1, 0).items()}
    assert qp.is_translation_invariant()
    assert not ctxB.q.is_translation_invariant()
    with pytest.raises(ValueError):
        QParams(A2, {(0, 1): {(2, 0): Fraction(1)}})  # inhomogeneous
    with pytest.raises(ValueError):
        QParams(A2, {(0, 1): {(0, 1): Fraction(1)}})  # zero leading coefficient
