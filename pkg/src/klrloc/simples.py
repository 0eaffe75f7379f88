"""Simple modules: crystal operators, enumeration, heads, socles, duality.

Simple modules are produced as explicit matrix modules by iterated crystal
operators from the trivial module; the self-dual normalization fixes the
grading shift.  Heads and socles are computed through homomorphism spaces
against the enumerated simples (exact, and much cheaper than closing the
image algebra); the trace-form Jacobson radical is kept as a cross-check
for small modules.
"""

from __future__ import annotations

from fractions import Fraction

from .conv import convolve, renorm_r, affinize_letter
from .linalg import SpanBuilder, nullspace, rank, rref, transpose, zeros
from .modules import (
    GradedModule,
    ModuleHom,
    dual,
    eps,
    eps_star,
    hom_space,
    one_dim,
    quotient,
    restrict_first,
    restrict_last,
    simple_letter,
    submodule,
    trivial_module,
    word_swap,
)


# ---------------------------------------------------------------------------
# self-dual normalization and isomorphism tests

def self_dual_shift(M: GradedModule):
    degs = M.global_degrees()
    lo, hi = min(degs), max(degs)
    tot = lo + hi
    if tot % 2:
        raise ValueError("no integral self-dual shift exists")
    return -tot // 2


def self_dual_normalize(M: GradedModule):
    Ms = M.shifted(self_dual_shift(M))
    Dd = dual(Ms)
    homs = hom_space(Ms, Dd, degrees=[0])
    for h in homs:
        if h.is_isomorphism():
            return Ms
    # try combinations (rarely needed)
    if len(homs) > 1:
        acc = homs[0]
        for h in homs[1:]:
            acc = acc.add(h)
        if acc.is_isomorphism():
            return Ms
    raise ValueError("module admits no self-dual normalization")


def characters_equal(M, N, shift=0):
    cm = M.character()
    cn = N.character()
    if set(cm) != set(cn):
        return False
    return all(cm[w].qshift(shift) == cn[w] for w in cm)


def find_isomorphism(M, N, degree=0):
    """A degree-`degree` isomorphism M -> N, or None."""
    if M.beta != N.beta or M.dim != N.dim:
        return None
    for h in hom_space(M, N, degrees=[degree]):
        if h.is_isomorphism():
            return h
    hs = hom_space(M, N, degrees=[degree])
    if len(hs) > 1:
        acc = hs[0]
        for h in hs[1:]:
            acc = acc.add(h)
        if acc.is_isomorphism():
            return acc
    return None


def isomorphic(M, N, up_to_shift=False):
    if M.beta != N.beta:
        return False
    if up_to_shift:
        if M.dim != N.dim:
            return False
        degs_m = sorted(M.global_degrees())
        degs_n = sorted(N.global_degrees())
        diffs = {b - a for a, b in zip(degs_m, degs_n)}
        if len(diffs) != 1:
            return False
        shift = diffs.pop()
        return isomorphic(M.shifted(shift), N)
    return characters_equal(M, N) and find_isomorphism(M, N) is not None


# ---------------------------------------------------------------------------
# crystal operators

def crystal_f(i, M: GradedModule):
    """F~_i M: the self-dual simple head of L(i) o M, as the image of r."""
    ctx = M.ctx
    if M.dim == 0:
        raise ValueError("crystal operator on the zero module")
    li = simple_letter(ctx, i)
    res = renorm_r(li, M, side="left", aff=affinize_letter(ctx, i))
    # image of r_{L(i),M} inside M o L(i)... direction: L(i) o M -> M o L(i)
    img_vectors = []
    mat = res.r_matrix.matrix()
    for c in range(res.src.dim):
        col = [mat[r][c] for r in range(res.dst.dim)]
        if any(col):
            img_vectors.append(col)
    sub, _ = submodule(res.dst, img_vectors)
    return self_dual_normalize(sub)


def crystal_e(i, M: GradedModule, simples_by_weight=None):
    """E~_i M: the self-dual simple socle of E_i M (M simple, eps_i > 0)."""
    E = restrict_first(M, i)
    if E is None or E.dim == 0:
        return None
    soc = socle(E, simples_by_weight=simples_by_weight)
    return self_dual_normalize(soc)


# ---------------------------------------------------------------------------
# simples enumeration (crystal closure from the trivial module)

class SimplesTable:
    """All self-dual simples up to a height bound, labeled by crystal strings."""

    def __init__(self, ctx, max_height):
        self.ctx = ctx
        self.max_height = max_height
        self.by_weight = {}
        self.labels = {}
        triv = trivial_module(ctx)
        zero = (0,) * ctx.cartan.n
        self.by_weight[zero] = [triv]
        self.labels[(zero, 0)] = ()
        frontier = [(triv, ())]
        for ht in range(1, max_height + 1):
            new_frontier = []
            for M, label in frontier:
                for i in range(ctx.cartan.n):
                    F = crystal_f(i, M)
                    beta = F.beta
                    bucket = self.by_weight.setdefault(beta, [])
                    found = None
                    for idx, S in enumerate(bucket):
                        if isomorphic(S, F):
                            found = idx
                            break
                    if found is None:
                        bucket.append(F)
                        self.labels[(beta, len(bucket) - 1)] = label + (i,)
                        new_frontier.append((F, label + (i,)))
            frontier = new_frontier

    def of_weight(self, beta):
        return self.by_weight.get(tuple(beta), [])

    def all_simples(self):
        out = []
        for beta in sorted(self.by_weight):
            for idx, S in enumerate(self.by_weight[beta]):
                out.append((self.labels[(beta, idx)], S))
        return out

    def label_of(self, M):
        bucket = self.by_weight.get(M.beta, [])
        for idx, S in enumerate(bucket):
            if isomorphic(S, M, up_to_shift=True):
                return self.labels[(M.beta, idx)]
        return None

    def find(self, M):
        """(label, simple, shift) with M isomorphic to q^shift simple, or None."""
        bucket = self.by_weight.get(M.beta, [])
        for idx, S in enumerate(bucket):
            if M.dim == S.dim and isomorphic(S, M, up_to_shift=True):
                degs_m = sorted(S.global_degrees())
                degs_n = sorted(M.global_degrees())
                shift = degs_n[0] - degs_m[0]
                return (self.labels[(M.beta, idx)], S, shift)
        return None


def simples_up_to(ctx, max_height):
    if max_height not in getattr(ctx, "_simple_cache", {}):
        ctx._simple_cache[max_height] = SimplesTable(ctx, max_height)
    return ctx._simple_cache[max_height]


# ---------------------------------------------------------------------------
# radical / head / socle via homomorphisms to and from simples

def _simples_for(M, simples_by_weight=None):
    if simples_by_weight is not None:
        return simples_by_weight
    table = simples_up_to(M.ctx, sum(M.beta))
    return table.of_weight(M.beta)


def radical_vectors(M: GradedModule, simples_by_weight=None):
    """Spanning vectors of rad M = intersection of kernels of maps to simples."""
    simples = _simples_for(M, simples_by_weight)
    rows = []
    for S in simples:
        for h in hom_space(M, S):
            rows.extend(h.matrix())
    if not rows:
        return [M.basis_vector(w, j) for w in M.words for j in range(M.block_dim(w))]
    return nullspace(rows, M.dim)


def head(M: GradedModule, simples_by_weight=None):
    radv = radical_vectors(M, simples_by_weight)
    quo, _, _ = quotient(M, radv)
    return quo


def socle(M: GradedModule, simples_by_weight=None):
    simples = _simples_for(M, simples_by_weight)
    vectors = []
    for S in simples:
        for h in hom_space(S, M):
            mat = h.matrix()
            for c in range(S.dim):
                col = [mat[r][c] for r in range(M.dim)]
                if any(col):
                    vectors.append(col)
    sub, _ = submodule(M, vectors)
    return sub


def is_simple(M: GradedModule):
    if M.dim == 0:
        return False
    if len(hom_space(M, M)) != 1:
        return False
    radv = radical_vectors(M)
    return all(all(not x for x in v) for v in radv)


# trace-form Jacobson radical (spec's design; used as a small-scale cross-check)

def radical_vectors_trace(M: GradedModule):
    """rad M = J(A) M where A is the image algebra; J via the trace form."""
    gens = []
    for w in M.words:
        pr = zeros(M.dim, M.dim)
        off = M.offset(w)
        for j in range(M.block_dim(w)):
            pr[off + j][off + j] = Fraction(1)
        gens.append(pr)
    for k in range(M.n):
        gens.append(_global_matrix(M, ("x", k)))
    for k in range(M.n - 1):
        gens.append(_global_matrix(M, ("tau", k)))
    # close the span of the generators under multiplication
    basis = []
    sb = SpanBuilder(M.dim * M.dim)
    mats = []
    for g in gens:
        flat = [e for row in g for e in row]
        if sb.add(flat):
            mats.append(g)
    changed = True
    while changed:
        changed = False
        for a in list(mats):
            for g in gens:
                p = _mm(a, g)
                flat = [e for row in p for e in row]
                if sb.add(flat):
                    mats.append(p)
                    changed = True
    # trace form radical
    rows = []
    for b in mats:
        rows.append([_trace(_mm(a, b)) for a in mats])
    ker = nullspace(rows, len(mats))
    radv = []
    for v in ker:
        j = zeros(M.dim, M.dim)
        for c, coeff in enumerate(v):
            if coeff:
                for r in range(M.dim):
                    for s in range(M.dim):
                        j[r][s] += coeff * mats[c][r][s]
        for c in range(M.dim):
            col = [j[r][c] for r in range(M.dim)]
            if any(col):
                radv.append(col)
    return radv


def _global_matrix(M, gen):
    out = zeros(M.dim, M.dim)
    for c in range(M.dim):
        v = M.zero_vector()
        v[c] = M.ring.one()
        img = M.apply_x(gen[1], v) if gen[0] == "x" else M.apply_tau(gen[1], v)
        for r in range(M.dim):
            out[r][c] = img[r]
    return out


def _mm(a, b):
    n = len(a)
    out = zeros(n, n)
    for i in range(n):
        for t in range(n):
            if a[i][t]:
                for j in range(n):
                    if b[t][j]:
                        out[i][j] += a[i][t] * b[t][j]
    return out


def _trace(a):
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


# ---------------------------------------------------------------------------
# head of a convolution (and the crystal-string presentation used by braiders)

def hconv(M: GradedModule, N: GradedModule):
    """Self-dual simple head of M o N via the image of r_{M,N} when possible."""
    try:
        res = renorm_r(M, N)
    except ValueError:
        C = convolve(M, N)
        return self_dual_normalize(head(C))
    mat = res.r_matrix.matrix()
    cols = []
    for c in range(res.src.dim):
        col = [mat[r][c] for r in range(res.dst.dim)]
        if any(col):
            cols.append(col)
    sub, _ = submodule(res.dst, cols)
    return self_dual_normalize(sub)


def strongly_commutes(M: GradedModule, N: GradedModule):
    """True iff M o N is simple (M, N simple)."""
    try:
        dl = renorm_r(M, N).lam
        dr = renorm_r(N, M).lam
        return dl + dr == 0
    except ValueError:
        return is_simple(convolve(M, N))


def crystal_string(M: GradedModule, table: SimplesTable):
    """Lex-min crystal string for a simple M (via the table labels)."""
    return table.label_of(M)


def crystal_parent(M: GradedModule):
    """(i, N0, pi) with M = head(L(i) o N0), pi the projection; M simple, ht >= 1."""
    ctx = M.ctx
    for i in range(ctx.cartan.n):
        if eps(i, M) > 0:
            break
    else:
        raise ValueError("module has no removable letter")
    table = simples_up_to(ctx, sum(M.beta) - 1)
    E = restrict_first(M, i)
    soc = socle(E, simples_by_weight=table.of_weight(E.beta))
    N0 = self_dual_normalize(soc)
    P = convolve(simple_letter(ctx, i), N0)
    homs = hom_space(P, M)
    nonzero = [h for h in homs if not h.is_zero()]
    assert nonzero, "no projection from the crystal presentation"
    pi = nonzero[0]
    # surjectivity check
    assert pi.rank() == M.dim, "crystal presentation projection is not onto"
    return i, N0, pi
