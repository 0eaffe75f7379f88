"""Cartan data, weights, the symmetric bilinear form, and Weyl combinatorics.

Weights are stored exactly in the mixed basis {Lambda_i} + {alpha_i}: an
integer vector of fundamental-weight coordinates plus a Fraction vector of
root coordinates.  The bilinear form is evaluated whenever at least one
argument lies in the root lattice, which covers every pairing the theory
needs; other pairings would require extra choices and raise.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache


class CartanDatum:
    """Symmetrizable generalized Cartan matrix with root norms."""

    def __init__(self, cartan_matrix, root_norms):
        n = len(cartan_matrix)
        self.n = n
        self.index_set = tuple(range(n))
        self.A = tuple(tuple(int(x) for x in row) for row in cartan_matrix)
        self.norms = tuple(int(x) for x in root_norms)
        for i in range(n):
            if self.A[i][i] != 2:
                raise ValueError("Cartan matrix diagonal must be 2")
            if self.norms[i] <= 0 or self.norms[i] % 2:
                raise ValueError("root norms must be positive even integers")
            for j in range(n):
                if i != j and self.A[i][j] > 0:
                    raise ValueError("off-diagonal Cartan entries must be <= 0")
        # (alpha_i, alpha_j) = norms[i] * A[i][j] / 2 must be symmetric integers
        self.root_pairing = []
        for i in range(n):
            row = []
            for j in range(n):
                v = Fraction(self.norms[i] * self.A[i][j], 2)
                if v.denominator != 1:
                    raise ValueError("(alpha_i, alpha_j) must be an integer")
                row.append(int(v))
            self.root_pairing.append(tuple(row))
        self.root_pairing = tuple(self.root_pairing)
        for i in range(n):
            for j in range(n):
                if self.root_pairing[i][j] != self.root_pairing[j][i]:
                    raise ValueError("Cartan datum is not symmetrizable by the given norms")
        self._weyl = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def type_A(n):
        A = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]
        return CartanDatum(A, [2] * n)

    @staticmethod
    def type_B2():
        # alpha_1 long (norm 4), alpha_2 short (norm 2)
        return CartanDatum([[2, -1], [-2, 2]], [4, 2])

    @staticmethod
    def from_json(doc):
        """Accepts {"type": "A2"} or {"matrix": [[...]], "norms": [...]}. """
        if isinstance(doc, str):
            doc = json.loads(doc)
        if "type" in doc:
            t = doc["type"].upper()
            if t.startswith("A"):
                return CartanDatum.type_A(int(t[1:]))
            if t == "B2":
                return CartanDatum.type_B2()
            raise ValueError(f"unknown built-in type {t!r}")
        return CartanDatum(doc["matrix"], doc["norms"])

    # -- basic structure ----------------------------------------------------

    def alpha(self, i):
        return Weight(self, root=tuple(1 if j == i else 0 for j in range(self.n)))

    def Lambda(self, i):
        return Weight(self, lam=tuple(1 if j == i else 0 for j in range(self.n)))

    def zero_weight(self):
        return Weight(self)

    def weight_from_root_coords(self, coords):
        return Weight(self, root=tuple(coords))

    def is_symmetric(self):
        return all(x == self.norms[0] for x in self.norms)

    def __eq__(self, other):
        return isinstance(other, CartanDatum) and (self.A, self.norms) == (other.A, other.norms)

    def __hash__(self):
        return hash((self.A, self.norms))

    def __repr__(self):
        return f"CartanDatum(A={self.A}, norms={self.norms})"

    # -- Weyl group (finite type only where needed) -------------------------

    def weyl_elements(self):
        """All Weyl group elements as tuples of root-lattice matrices; finite type only."""
        if self._weyl is None:
            self._weyl = _generate_weyl(self)
        return self._weyl

    def longest_element_word(self):
        """A reduced word for w_0 (lexicographically smallest); finite type only."""
        elems = self.weyl_elements()
        w0 = max(elems, key=lambda m: elems[m][0])
        return elems[w0][1]

    def i_star(self, i):
        """The involution with alpha_{i*} = -w_0 alpha_i; finite type only."""
        w0 = self.longest_element_word()
        img = weyl_act(self, w0, self.alpha(i))
        neg = -img
        for j in range(self.n):
            if neg == self.alpha(j):
                return j
        raise ValueError("not finite type (w_0 does not permute the negated simple roots)")


class Weight:
    """Element of the weight lattice in the mixed {Lambda_i} / {alpha_i} basis."""

    __slots__ = ("cartan", "lam", "root")

    def __init__(self, cartan, lam=None, root=None):
        self.cartan = cartan
        n = cartan.n
        self.lam = tuple(int(x) for x in (lam if lam is not None else (0,) * n))
        self.root = tuple(Fraction(x) for x in (root if root is not None else (0,) * n))

    def __add__(self, other):
        self._check(other)
        return Weight(
            self.cartan,
            lam=tuple(a + b for a, b in zip(self.lam, other.lam)),
            root=tuple(a + b for a, b in zip(self.root, other.root)),
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Weight(self.cartan, lam=tuple(-a for a in self.lam), root=tuple(-a for a in self.root))

    def scale(self, c):
        c = Fraction(c)
        return Weight(
            self.cartan,
            lam=tuple(int(c * a) for a in self.lam) if all((c * a).denominator == 1 for a in self.lam) else self._scale_fail(),
            root=tuple(c * a for a in self.root),
        )

    def _scale_fail(self):
        raise ValueError("non-integer fundamental coordinates after scaling")

    def _check(self, other):
        if self.cartan != other.cartan:
            raise ValueError("mismatched Cartan data")

    def pairing_vector(self):
        """(<h_i, self>)_i; canonical when the Cartan matrix is nonsingular."""
        return tuple(self.pairing(i) for i in range(self.cartan.n))

    def __eq__(self, other):
        if not (isinstance(other, Weight) and self.cartan == other.cartan):
            return False
        if self.lam == other.lam and self.root == other.root:
            return True
        # the mixed basis is redundant: alpha_j = sum_i a_ij Lambda_i
        return self.pairing_vector() == other.pairing_vector()

    def __hash__(self):
        return hash(self.pairing_vector())

    def pairing(self, i):
        """<h_i, self> (a Fraction in general; integral on lattice weights)."""
        acc = Fraction(self.lam[i])
        for j in range(self.cartan.n):
            acc += self.cartan.A[i][j] * self.root[j]
        return acc

    def is_root_lattice(self):
        try:
            coords = self.root_coords()
        except ValueError:
            return False
        return all(c.denominator == 1 for c in coords)

    def root_coords(self):
        """Coordinates in the alpha basis; raises if not in the Q-span of the roots."""
        if all(a == 0 for a in self.lam):
            return self.root
        # fold the fundamental part through the Cartan matrix if possible
        from .linalg import solve
        A = [[Fraction(self.cartan.A[i][j]) for j in range(self.cartan.n)] for i in range(self.cartan.n)]
        rhs = [Fraction(x) for x in self.pairing_vector()]
        sol = solve(A, rhs)
        if sol is None:
            raise ValueError("weight is not in the root lattice")
        # verify the weight really equals the root combination
        cand = Weight(self.cartan, root=tuple(sol))
        if cand != self:
            raise ValueError("weight is not in the root lattice")
        return tuple(sol)

    def height(self):
        return sum(self.root_coords())

    def is_positive_root_sum(self):
        try:
            coords = self.root_coords()
        except ValueError:
            return False
        return all(a >= 0 and a.denominator == 1 for a in coords)

    def __repr__(self):
        parts = []
        for i, a in enumerate(self.lam):
            if a:
                parts.append(f"{a}*L{i + 1}" if a != 1 else f"L{i + 1}")
        for i, a in enumerate(self.root):
            if a:
                parts.append(f"{a}*a{i + 1}" if a != 1 else f"a{i + 1}")
        return " + ".join(parts) if parts else "0"


def bilinear(lam, mu):
    """Symmetric bilinear form; needs one argument in the Q-span of the roots."""
    if lam.cartan != mu.cartan:
        raise ValueError("mismatched Cartan data")
    cartan = lam.cartan
    for a, b in ((lam, mu), (mu, lam)):
        try:
            coords = b.root_coords()
        except ValueError:
            continue
        acc = Fraction(0)
        for j, c in enumerate(coords):
            if c:
                # (a, alpha_j) = d_j <h_j, a>
                acc += c * Fraction(cartan.norms[j], 2) * a.pairing(j)
        return acc
    raise ValueError("bilinear form needs one argument in the span of the roots")


def s_i(cartan, i, lam):
    """Simple reflection s_i(lam) = lam - <h_i, lam> alpha_i."""
    c = lam.pairing(i)
    return lam - cartan.alpha(i).scale(c)


def weyl_act(cartan, word, lam):
    """Apply s_{word[0]} s_{word[1]} ... (reflections applied right-to-left)."""
    out = lam
    for i in reversed(tuple(word)):
        out = s_i(cartan, i, out)
    return out


def word_length_is_reduced(cartan, word):
    """A word is reduced iff its positive-root sequence has no failures."""
    try:
        positive_roots_of(cartan, word)
        return True
    except ValueError:
        return False


def positive_roots_of(cartan, word):
    """beta_k = s_{i_1} ... s_{i_{k-1}}(alpha_{i_k}); raises on a non-reduced word."""
    word = tuple(word)
    roots = []
    for k in range(len(word)):
        beta = weyl_act(cartan, word[:k], cartan.alpha(word[k]))
        if not beta.is_positive_root_sum() or beta in roots:
            raise ValueError(f"word {word} is not reduced (fails at position {k})")
        roots.append(beta)
    return roots


def all_positive_roots(cartan):
    """All positive roots; finite type only."""
    w0 = cartan.longest_element_word()
    return positive_roots_of(cartan, w0)


class ConvexOrder:
    """Convex order on Z_{>0} * (positive roots) induced by a reduced word.

    Listed roots compare by position; any listed root precedes any tail root.
    Tail-vs-tail comparisons are only defined on a common line.
    """

    LESS, GREATER, EQUIV = "≺", "≻", "≍"

    def __init__(self, cartan, word):
        self.cartan = cartan
        self.word = tuple(word)
        self.root_sequence = positive_roots_of(cartan, self.word)

    def _ray(self, gamma):
        """Return (root, multiple) with gamma = multiple * root, root primitive among positives."""
        coords = gamma.root_coords()
        if all(c == 0 for c in coords):
            raise ValueError("zero is not a positive root multiple")
        if any(c < 0 or c.denominator != 1 for c in coords):
            raise ValueError(f"{gamma} is not a positive multiple of a positive root")
        from math import gcd
        g = 0
        for c in coords:
            g = gcd(g, int(c))
        prim = gamma.scale(Fraction(1, g))
        return prim, g

    def _position(self, prim):
        for k, beta in enumerate(self.root_sequence):
            if beta == prim:
                return k
        return None

    def compare(self, gamma, gamma2):
        p1, _ = self._ray(gamma)
        p2, _ = self._ray(gamma2)
        if p1 == p2:
            return self.EQUIV
        k1, k2 = self._position(p1), self._position(p2)
        if k1 is None and k2 is None:
            raise ValueError("comparison of two tail roots is not determined by this word")
        if k1 is None:
            return self.GREATER
        if k2 is None:
            return self.LESS
        return self.LESS if k1 < k2 else self.GREATER


def convex_compare(order, gamma, gamma2):
    return order.compare(gamma, gamma2)


def cone_membership(generators, gamma):
    """Is gamma a nonnegative rational combination of the generator roots?

    Caratheodory over the exact rationals: gamma is in the cone iff some
    linearly independent subset of size <= rank carries it with nonnegative
    coordinates.
    """
    from itertools import combinations

    coords = [g.root_coords() for g in generators]
    target = gamma.root_coords()
    if all(c == 0 for c in target):
        return True
    n = len(target)
    from .linalg import rank as mat_rank, solve

    full_rank = mat_rank([list(map(Fraction, c)) for c in coords]) if coords else 0
    for size in range(1, full_rank + 1):
        for subset in combinations(range(len(coords)), size):
            cols = [coords[t] for t in subset]
            mat = [[Fraction(cols[t][r]) for t in range(size)] for r in range(n)]
            sol = solve(mat, [Fraction(c) for c in target])
            if sol is not None and all(x >= 0 for x in sol):
                # verify exactly (solve returns one solution of the system)
                ok = True
                for r in range(n):
                    if sum(mat[r][t] * sol[t] for t in range(size)) != target[r]:
                        ok = False
                        break
                if ok:
                    return True
    return False


# ---------------------------------------------------------------------------
# Weyl group generation (finite type, desk scale)

def _perm_matrix_action(cartan, i):
    """Matrix of s_i on the root lattice in the alpha basis (columns = images)."""
    n = cartan.n
    cols = []
    for j in range(n):
        img = s_i(cartan, i, cartan.alpha(j))
        cols.append(tuple(img.root_coords()))
    return tuple(cols)


def _mat_on_roots_compose(cartan, m, i):
    """Compose: first apply s_i, then m (both as alpha-basis column tuples)."""
    n = cartan.n
    si = _perm_matrix_action(cartan, i)
    cols = []
    for j in range(n):
        acc = [Fraction(0)] * n
        for t in range(n):
            c = si[j][t]
            if c:
                for r in range(n):
                    acc[r] += c * m[t][r]
        cols.append(tuple(acc))
    return tuple(cols)


def _generate_weyl(cartan):
    """BFS over the Weyl group; returns {matrix: (length, lex-min reduced word)}."""
    n = cartan.n
    ident = tuple(tuple(Fraction(1) if r == j else Fraction(0) for r in range(n)) for j in range(n))
    elems = {ident: (0, ())}
    frontier = [ident]
    guard = 0
    while frontier:
        guard += 1
        if guard > 100000:
            raise ValueError("Weyl group generation did not terminate; non-finite type?")
        nxt = []
        for m in frontier:
            length, word = elems[m]
            for i in range(n):
                m2 = _mat_on_roots_compose(cartan, m, i)  # m . s_i  (word + [i])
                cand = (length + 1, word + (i,))
                if m2 not in elems:
                    if not word_length_is_reduced(cartan, cand[1]):
                        continue
                    elems[m2] = cand
                    nxt.append(m2)
                else:
                    old = elems[m2]
                    if cand[0] == old[0] and word_length_is_reduced(cartan, cand[1]) and cand[1] < old[1]:
                        elems[m2] = cand
        frontier = nxt
    return elems


def weyl_matrix(cartan, word):
    """Alpha-basis action matrix of the word (for identification in the group)."""
    n = cartan.n
    m = tuple(tuple(Fraction(1) if r == j else Fraction(0) for r in range(n)) for j in range(n))
    for i in tuple(word):
        m = _mat_on_roots_compose(cartan, m, i)
    return m


@lru_cache(maxsize=None)
def _bruhat_table(cartan):
    elems = cartan.weyl_elements()
    return elems


def canonical_word(cartan, word):
    """Lex-min reduced word of the element represented by `word` (finite type)."""
    elems = _bruhat_table(cartan)
    return elems[weyl_matrix(cartan, word)][1]


def weyl_length(cartan, word):
    elems = _bruhat_table(cartan)
    return elems[weyl_matrix(cartan, word)][0]


def bruhat_leq(cartan, vword, wword):
    """v <= w in Bruhat order (subword property on any reduced word of w)."""
    v = canonical_word(cartan, vword)
    w = canonical_word(cartan, wword)

    def leq(vw, ww):
        if not vw:
            return True
        if len(vw) > len(ww):
            return False
        s = ww[0]
        wrest = ww[1:]
        sv = canonical_word(cartan, (s,) + vw)
        if len(sv) < len(vw):
            return leq(sv, wrest)
        return leq(vw, wrest)

    return leq(v, w)
