"""Decategorified shadow: quantum-shuffle characters, q-commutation, Ore localization.

The shuffle product is the closed form with twist -(alpha_a, alpha_b) per
crossing; it is validated wholesale against character(convolve) and the
module refuses the closed form if validation ever fails for a Cartan datum.
"""

from __future__ import annotations

from fractions import Fraction

from .modules import GradedModule
from .rings import ZLaurent


class QChar:
    """Character: map word -> Laurent polynomial in q."""

    def __init__(self, ctx, beta, data):
        self.ctx = ctx
        self.beta = tuple(beta)
        self.data = {tuple(w): c for w, c in dict(data).items() if not c.is_zero()}

    @staticmethod
    def of_module(M: GradedModule):
        return QChar(M.ctx, M.beta, M.character())

    def qshift(self, k):
        return QChar(self.ctx, self.beta, {w: c.qshift(k) for w, c in self.data.items()})

    def bar(self):
        return QChar(self.ctx, self.beta, {w: c.bar() for w, c in self.data.items()})

    def scale(self, c):
        return QChar(self.ctx, self.beta, {w: ZLaurent.const(0) + (v * c) for w, v in self.data.items()})

    def __add__(self, other):
        assert self.beta == other.beta
        out = dict(self.data)
        for w, c in other.data.items():
            out[w] = out.get(w, ZLaurent()) + c
        return QChar(self.ctx, self.beta, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self):
        return not self.data

    def __eq__(self, other):
        return isinstance(other, QChar) and self.beta == other.beta and self.data == other.data

    def dimension(self):
        return sum(c.at_one() for c in self.data.values())

    def __repr__(self):
        parts = [f"({','.join(str(i + 1) for i in w)}): {c}" for w, c in sorted(self.data.items())]
        return "QChar{" + "; ".join(parts) + "}"


_validated_data = {}


def qshuffle(c1: QChar, c2: QChar):
    """Quantum shuffle product matching ch(M o N) = qshuffle(ch M, ch N)."""
    ctx = c1.ctx
    rp = ctx.cartan.root_pairing
    beta = tuple(a + b for a, b in zip(c1.beta, c2.beta))
    out = {}
    for w1, p1 in c1.data.items():
        for w2, p2 in c2.data.items():
            for word, twist in _shuffles_with_twist(rp, w1, w2):
                cur = out.get(word, ZLaurent())
                out[word] = cur + (p1 * p2).qshift(twist)
    return QChar(ctx, beta, out)


def _shuffles_with_twist(rp, w1, w2):
    """All interleavings of w1, w2 with the crossing twist exponent."""
    out = []

    def rec(i, j, word, twist):
        if i == len(w1) and j == len(w2):
            out.append((tuple(word), twist))
            return
        if i < len(w1):
            rec(i + 1, j, word + [w1[i]], twist)
        if j < len(w2):
            # w2[j] crosses the remaining letters of w1
            t = twist
            for k in range(i, len(w1)):
                t += -rp[w1[k]][w2[j]]
            rec(i, j + 1, word + [w2[j]], t)

    rec(0, 0, [], 0)
    return out


def validate_qshuffle(ctx, pairs):
    """Check qshuffle == character(convolve) on the given module pairs."""
    from .conv import convolve
    for M, N in pairs:
        closed = qshuffle(QChar.of_module(M), QChar.of_module(N))
        direct = QChar.of_module(convolve(M, N))
        if closed != direct:
            return False
    return True


def q_commute(M: GradedModule, N: GradedModule):
    """l with [M][N] = q^l [N][M], or None when the classes do not q-commute."""
    a = qshuffle(QChar.of_module(M), QChar.of_module(N))
    b = qshuffle(QChar.of_module(N), QChar.of_module(M))
    if set(a.data) != set(b.data):
        return None
    l = None
    for w, pa in a.data.items():
        pb = b.data[w]
        # pa = q^l pb: compare supports
        ia = pa.sorted_items()
        ib = pb.sorted_items()
        if len(ia) != len(ib):
            return None
        shift = ia[0][0] - ib[0][0]
        for (ka, ca), (kb, cb) in zip(ia, ib):
            if ka - kb != shift or ca != cb:
                return None
        if l is None:
            l = shift
        elif l != shift:
            return None
    return l


def q_commute_checked(M, N, cross_check=True):
    """q_commute with the Lambda cross-check where an affinization exists."""
    l = q_commute(M, N)
    if l is None or not cross_check:
        return l
    from .conv import renorm_r
    try:
        lam = renorm_r(M, N).lam
    except ValueError:
        return l
    assert lam == -l, f"Lambda(M,N) = {lam} != {-l} from q-commutation"
    return l


def k_decompose(M: GradedModule, N: GradedModule, simples):
    """[M o N] in the basis of simple classes (list of (label, shift, mult))."""
    from .conv import convolve
    ch = QChar.of_module(convolve(M, N))
    return char_decompose(ch, simples)


def char_decompose(ch: QChar, simples):
    """Write ch as a nonnegative q-shift combination of simple characters."""
    remaining = ch
    out = []
    guard = 0
    while not remaining.is_zero():
        guard += 1
        if guard > 10000:
            raise RuntimeError("character decomposition did not terminate")
        # pick the word with a lexicographically extreme nonzero entry
        word = min(remaining.data)
        poly = remaining.data[word]
        k, c = poly.sorted_items()[0]
        hit = None
        for lbl, S in simples:
            chs = QChar.of_module(S)
            if word in chs.data:
                p = chs.data[word]
                kk, cc = p.sorted_items()[0]
                hit = (lbl, S, chs, k - kk, Fraction(c) / cc)
                break
        if hit is None:
            raise ValueError("simple basis is incomplete for this weight")
        lbl, S, chs, shift, mult = hit
        out.append((lbl, shift, mult))
        remaining = remaining - chs.qshift(shift).scale(mult)
    merged = {}
    for lbl, shift, mult in out:
        merged[(lbl, shift)] = merged.get((lbl, shift), Fraction(0)) + mult
    return [(lbl, shift, m) for (lbl, shift), m in sorted(merged.items()) if m]


# ---------------------------------------------------------------------------
# Ore localization of the Grothendieck ring at the frozen classes

class KClass:
    """An element of K(C_w): a Z[q,q^-1]-combination of simple classes.

    Stored as {(label, shift): ZLaurent-free integer? } -- we keep it as a
    QChar (characters are injective on the simple basis at desk scale) plus
    the weight.
    """

    def __init__(self, ctx, beta, char: QChar):
        self.ctx = ctx
        self.beta = tuple(beta)
        self.char = char

    @staticmethod
    def of_module(M):
        return KClass(M.ctx, M.beta, QChar.of_module(M))

    def __eq__(self, other):
        return isinstance(other, KClass) and self.beta == other.beta and self.char == other.char

    def mul(self, other):
        return KClass(self.ctx, tuple(a + b for a, b in zip(self.beta, other.beta)),
                      qshuffle(self.char, other.char))

    def add(self, other):
        assert self.beta == other.beta
        return KClass(self.ctx, self.beta, self.char + other.char)

    def qshift(self, k):
        return KClass(self.ctx, self.beta, self.char.qshift(k))

    def is_zero(self):
        return self.char.is_zero()


class OreRing:
    """Left quotients of K(C_w) by the frozen classes q^k prod [C_i]^{a_i}."""

    def __init__(self, family):
        self.fam = family
        self.ctx = family.ctx
        self.frozen = {a: KClass.of_module(family.module(a)) for a in family.index}
        # commutation exponents: [C_a][S] = q^{l_a(S)} [S][C_a]
        self._l_cache = {}

    def l_exponent(self, a, kclass: KClass):
        """l with [C_a] x = q^l x [C_a] (x must q-commute with the frozen class)."""
        Ca = self.frozen[a]
        ab = qshuffle(Ca.char, kclass.char)
        ba = qshuffle(kclass.char, Ca.char)
        l = None
        for w, pa in ab.data.items():
            pb = ba.data.get(w)
            if pb is None:
                raise ValueError("class does not q-commute with a frozen class")
            ia, ib = pa.sorted_items(), pb.sorted_items()
            shift = ia[0][0] - ib[0][0]
            if [(k - shift, c) for k, c in ia] != ib:
                raise ValueError("class does not q-commute with a frozen class")
            if l is None:
                l = shift
            elif l != shift:
                raise ValueError("class does not q-commute with a frozen class")
        return l if l is not None else 0


class OreElement:
    """(alpha, x): represents (prod [C_a]^{alpha_a})^{-1} x with a q-power."""

    def __init__(self, ring: OreRing, alpha, num: KClass, qpow=0):
        self.ring = ring
        self.alpha = tuple(int(x) for x in alpha)
        self.num = num.qshift(qpow)
        self._normalize()

    def _normalize(self):
        # reduce common frozen factors: if num = [C_a] * y, cancel
        changed = True
        while changed and any(self.alpha):
            changed = False
            for pos, a in enumerate(self.ring.fam.index):
                if self.alpha[pos] <= 0:
                    continue
                y = _divide_by_frozen(self.ring, a, self.num)
                if y is not None:
                    self.num = y
                    alpha = list(self.alpha)
                    alpha[pos] -= 1
                    self.alpha = tuple(alpha)
                    changed = True
                    break

    def is_zero(self):
        return self.num.is_zero()

    def __eq__(self, other):
        if not isinstance(other, OreElement):
            return NotImplemented
        # compare after clearing denominators to a common level
        am = tuple(max(a, b) for a, b in zip(self.alpha, other.alpha))
        x = self._raise_to(am)
        y = other._raise_to(am)
        return x.num == y.num

    def _raise_to(self, target):
        out = self
        for pos, a in enumerate(self.ring.fam.index):
            for _ in range(target[pos] - self.alpha[pos]):
                out = out._left_mult_frozen(a)
        return out

    def _left_mult_frozen(self, a):
        """(C^alpha)^{-1} x  ->  (C^{alpha+e_a})^{-1} [C_a] x."""
        Ca = self.ring.frozen[a]
        pos = self.ring.fam.index.index(a)
        alpha = list(self.alpha)
        alpha[pos] += 1
        return OreElement.__new__(OreElement)._init_raw(self.ring, tuple(alpha), Ca.mul(self.num))

    def _init_raw(self, ring, alpha, num):
        self.ring = ring
        self.alpha = alpha
        self.num = num
        return self

    def add(self, other):
        am = tuple(max(a, b) for a, b in zip(self.alpha, other.alpha))
        x = self._raise_to(am)
        y = other._raise_to(am)
        return OreElement(self.ring, am, x.num.add(y.num))

    def mul(self, other):
        """(C^a)^{-1} x . (C^b)^{-1} y = (C^{a+b})^{-1} q^{l} x' y with x moved past C^b."""
        # move x past (C^b)^{-1}: x (C^b)^{-1} = q^{-l} (C^b)^{-1} x with
        # [C^b] x = q^{l} x [C^b]
        l = 0
        for pos, a in enumerate(self.ring.fam.index):
            if other.alpha[pos]:
                l += other.alpha[pos] * self.ring.l_exponent(a, self.num)
        alpha = tuple(x + y for x, y in zip(self.alpha, other.alpha))
        return OreElement(self.ring, alpha, self.num.mul(other.num).qshift(-l))

    def __repr__(self):
        return f"OreElement(alpha={self.alpha}, num={self.num.char})"


def _divide_by_frozen(ring, a, kclass: KClass):
    """y with kclass = [C_a] * y, or None (denominator-set normal form)."""
    Ca = ring.frozen[a]
    beta_y = tuple(x - y for x, y in zip(kclass.beta, Ca.beta))
    if any(x < 0 for x in beta_y):
        return None
    # solve qshuffle(Ca, y) = kclass over the simple characters of weight beta_y
    from .simples import simples_up_to
    table = simples_up_to(ring.ctx, sum(beta_y))
    simples = [(lbl, S) for lbl, S in table.all_simples() if S.beta == beta_y]
    if not simples:
        return None
    # treat unknown y = sum c_{S,k} q^k [S]: match coefficients per word/power
    # desk scale: iterate candidate decomposition greedily via char_decompose
    try:
        target = kclass.char
        # y's char must satisfy qshuffle(chCa, chy) = target; solve by
        # decomposing target against {qshuffle(chCa, chS)}
        basis = [(lbl, S, qshuffle(QChar.of_module(ring.fam.module(a)), QChar.of_module(S))) for lbl, S in simples]
        remaining = target
        acc = {}
        guard = 0
        while not remaining.is_zero():
            guard += 1
            if guard > 1000:
                return None
            word = min(remaining.data)
            poly = remaining.data[word]
            k, c = poly.sorted_items()[0]
            hit = None
            for lbl, S, bch in basis:
                if word in bch.data:
                    kk, cc = bch.data[word].sorted_items()[0]
                    hit = (lbl, S, bch, k - kk, Fraction(c) / cc)
                    break
            if hit is None:
                return None
            lbl, S, bch, shift, mult = hit
            if mult.denominator != 1:
                return None
            acc[(lbl, shift)] = acc.get((lbl, shift), 0) + mult
            remaining = remaining - bch.qshift(shift).scale(mult)
        ych = None
        for (lbl, shift), mult in acc.items():
            S = dict(simples)[lbl]
            term = QChar.of_module(S).qshift(shift).scale(mult)
            ych = term if ych is None else ych + term
        if ych is None:
            return None
        # verify
        if qshuffle(QChar.of_module(ring.fam.module(a)), ych) != target:
            return None
        return KClass(ring.ctx, beta_y, ych)
    except (ValueError, KeyError):
        return None
