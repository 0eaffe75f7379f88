"""Finite-dimensional graded R(beta)-modules as exact matrix representations.

A module stores, per word nu, a list of basis degrees plus matrices for the
generators: x_k preserves the word block, tau_k maps block nu to block
s_k(nu).  Matrices over Q are Fractions; affinizations reuse the same class
with ZPoly entries (base ring Q[z]).
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import (
    AlgElement,
    fixed_word,
    perm_act_word,
    poly_del_k,
)
from .linalg import (
    SpanBuilder,
    identity,
    inverse,
    mat_mul,
    mat_vec,
    nullspace,
    rank,
    rref,
    sparse_nullspace,
    transpose,
    zeros,
)
from .rings import QQ, BaseRing, ZLaurent, ZPoly


def word_swap(nu, k):
    out = list(nu)
    out[k], out[k + 1] = out[k + 1], out[k]
    return tuple(out)


class GradedModule:
    def __init__(self, ctx, beta, blocks, xmats, taumats, ring=QQ):
        self.ctx = ctx
        self.ring = ring
        self.beta = tuple(int(c) for c in beta)
        self.n = sum(self.beta)
        self.blocks = {tuple(w): list(d) for w, d in blocks.items() if d}
        self.words = sorted(self.blocks)
        self.x = {}
        self.tau = {}
        for (k, w), m in xmats.items():
            if tuple(w) in self.blocks:
                self.x[(k, tuple(w))] = m
        for (k, w), m in taumats.items():
            if tuple(w) in self.blocks and word_swap(w, k) in self.blocks:
                self.tau[(k, tuple(w))] = m
        self._offsets = {}
        off = 0
        for w in self.words:
            self._offsets[w] = off
            off += len(self.blocks[w])
        self.dim = off

    # -- bookkeeping --------------------------------------------------------

    def block_dim(self, w):
        return len(self.blocks.get(tuple(w), ()))

    def degrees(self, w):
        return self.blocks.get(tuple(w), [])

    def offset(self, w):
        return self._offsets[tuple(w)]

    def global_degrees(self):
        out = []
        for w in self.words:
            out.extend(self.blocks[w])
        return out

    def word_of_index(self, idx):
        for w in self.words:
            off = self._offsets[w]
            if off <= idx < off + len(self.blocks[w]):
                return w, idx - off
        raise IndexError(idx)

    def zero_vector(self):
        return [self.ring.zero()] * self.dim

    def basis_vector(self, w, j):
        v = self.zero_vector()
        v[self.offset(w) + j] = self.ring.one()
        return v

    def xmat(self, k, w):
        w = tuple(w)
        d = self.block_dim(w)
        return self.x.get((k, w)) or zeros(d, d, self.ring)

    def taumat(self, k, w):
        w = tuple(w)
        d, d2 = self.block_dim(w), self.block_dim(word_swap(w, k))
        return self.tau.get((k, w)) or zeros(d2, d, self.ring)

    # -- action -------------------------------------------------------------

    def apply_x(self, k, vec):
        out = self.zero_vector()
        for w in self.words:
            off = self.offset(w)
            d = len(self.blocks[w])
            seg = vec[off:off + d]
            if any(x for x in seg):
                m = self.xmat(k, w)
                for r in range(d):
                    acc = self.ring.zero()
                    for c in range(d):
                        if m[r][c] and seg[c]:
                            acc = acc + m[r][c] * seg[c]
                    out[off + r] = out[off + r] + acc
        return out

    def apply_tau(self, k, vec):
        out = self.zero_vector()
        for w in self.words:
            off = self.offset(w)
            d = len(self.blocks[w])
            seg = vec[off:off + d]
            if any(x for x in seg):
                w2 = word_swap(w, k)
                if w2 not in self.blocks:
                    continue
                m = self.taumat(k, w)
                off2 = self.offset(w2)
                for r in range(len(self.blocks[w2])):
                    acc = self.ring.zero()
                    for c in range(d):
                        if m[r][c] and seg[c]:
                            acc = acc + m[r][c] * seg[c]
                    out[off2 + r] = out[off2 + r] + acc
        return out

    def apply_e(self, word, vec):
        out = self.zero_vector()
        w = tuple(word)
        if w in self.blocks:
            off = self.offset(w)
            for j in range(len(self.blocks[w])):
                out[off + j] = vec[off + j]
        return out

    def apply_term(self, w, exps, nu, vec):
        """Apply tau_w x^exps e(nu) to a global vector."""
        cur = self.apply_e(nu, vec)
        if not any(x for x in cur):
            return cur
        for k, e in enumerate(exps):
            for _ in range(e):
                cur = self.apply_x(k, cur)
        for k in reversed(fixed_word(w)):
            cur = self.apply_tau(k, cur)
        return cur

    def apply_element(self, elem: AlgElement, vec):
        out = self.zero_vector()
        for (w, exps, nu), c in elem.terms.items():
            part = self.apply_term(w, exps, nu, vec)
            for i, v in enumerate(part):
                if v:
                    out[i] = out[i] + c * v
        return out

    def element_matrix(self, elem: AlgElement):
        cols = []
        for i in range(self.dim):
            v = self.zero_vector()
            v[i] = self.ring.one()
            cols.append(self.apply_element(elem, v))
        return transpose(cols)

    # -- structural checks ----------------------------------------------------

    def validate(self):
        """List of violated relations / degree constraints; empty iff valid."""
        ctx = self.ctx
        errors = []
        rp = ctx.cartan.root_pairing

        def check_deg(mat, src_deg, dst_deg, gdeg, label):
            for r in range(len(mat)):
                for c in range(len(mat[0]) if mat else 0):
                    e = mat[r][c]
                    if not e:
                        continue
                    if isinstance(e, ZPoly):
                        for p, cc in enumerate(e.coeffs):
                            if cc and dst_deg[r] + p * self.ring.zdeg - src_deg[c] != gdeg:
                                errors.append(f"degree violation on {label} at ({r},{c})")
                                break
                    elif dst_deg[r] - src_deg[c] != gdeg:
                        errors.append(f"degree violation on {label} at ({r},{c})")

        for w in self.words:
            degs = self.blocks[w]
            for k in range(self.n):
                check_deg(self.xmat(k, w), degs, degs, rp[w[k]][w[k]], f"x_{k} e{w}")
            for k in range(self.n - 1):
                w2 = word_swap(w, k)
                if w2 in self.blocks:
                    check_deg(self.taumat(k, w), degs, self.blocks[w2], -rp[w[k]][w[k + 1]], f"tau_{k} e{w}")

        # relations, verified on basis vectors
        basis = [self.basis_vector(w, j) for w in self.words for j in range(len(self.blocks[w]))]

        def apply_poly(p, vec):
            out = self.zero_vector()
            for exps, c in p.items():
                cur = vec
                for k, e in enumerate(exps):
                    for _ in range(e):
                        cur = self.apply_x(k, cur)
                for i, v in enumerate(cur):
                    if v:
                        out[i] = out[i] + c * v
            return out

        for bi, v in enumerate(basis):
            w, _ = self.word_of_index(bi)
            # x commute
            for k in range(self.n):
                for l in range(k + 1, self.n):
                    a = self.apply_x(k, self.apply_x(l, v))
                    b = self.apply_x(l, self.apply_x(k, v))
                    if a != b:
                        errors.append(f"x_{k} x_{l} != x_{l} x_{k} on block {w}")
            for k in range(self.n - 1):
                # tau_k^2 = Q(x_k, x_{k+1})
                lhs = self.apply_tau(k, self.apply_tau(k, v))
                qp = ctx.q.q_at(w[k], w[k + 1], k, k + 1, self.n) if w[k] != w[k + 1] else {}
                rhs = apply_poly(qp, v) if qp else self.zero_vector()
                if lhs != rhs:
                    errors.append(f"tau_{k}^2 relation fails on block {w}")
                # tau x relations
                for l in range(self.n):
                    sl = k + 1 if l == k else (k if l == k + 1 else l)
                    lhs = self.apply_tau(k, self.apply_x(l, v))
                    rhs = self.apply_x(sl, self.apply_tau(k, v))
                    diff = [a - b for a, b in zip(lhs, rhs)]
                    expected = self.zero_vector()
                    if w[k] == w[k + 1]:
                        if l == k:
                            expected = [-x for x in v]
                        elif l == k + 1:
                            expected = list(v)
                    if diff != expected:
                        errors.append(f"tau_{k} x_{l} relation fails on block {w}")
                # distant commutation
                for l in range(k + 2, self.n - 1):
                    a = self.apply_tau(k, self.apply_tau(l, v))
                    b = self.apply_tau(l, self.apply_tau(k, v))
                    if a != b:
                        errors.append(f"tau_{k} tau_{l} commutation fails on block {w}")
            for k in range(self.n - 2):
                lhs = self.apply_tau(k + 1, self.apply_tau(k, self.apply_tau(k + 1, v)))
                rhs = self.apply_tau(k, self.apply_tau(k + 1, self.apply_tau(k, v)))
                diff = [a - b for a, b in zip(lhs, rhs)]
                expected = self.zero_vector()
                if w[k] == w[k + 2]:
                    bq = ctx.q.bq_at(w[k], w[k + 1], k, k + 1, k + 2, self.n)
                    expected = apply_poly(bq, v)
                if diff != expected:
                    errors.append(f"braid relation fails on block {w}")
        return errors

    # -- grading helpers ------------------------------------------------------

    def shifted(self, a):
        """q^a M (all degrees raised by a)."""
        return GradedModule(
            self.ctx,
            self.beta,
            {w: [d + a for d in degs] for w, degs in self.blocks.items()},
            self.x,
            self.tau,
            self.ring,
        )

    def character(self):
        out = {}
        for w in self.words:
            ch = ZLaurent()
            for d in self.blocks[w]:
                ch = ch + ZLaurent.q(d)
            out[w] = ch
        return out

    def weight(self):
        return self.beta

    def __repr__(self):
        return f"GradedModule(beta={self.beta}, dim={self.dim}, words={len(self.words)})"

    # -- serialization ---------------------------------------------------------

    def to_json(self):
        def entry(e):
            if isinstance(e, ZPoly):
                return {"z": [str(c) for c in e.coeffs]}
            return str(e)

        return {
            "beta": list(self.beta),
            "base": "Q" if self.ring.tag == "Q" else f"Qz:{self.ring.zdeg}",
            "blocks": [{"word": list(w), "degrees": list(self.blocks[w])} for w in self.words],
            "x": [
                {"k": k, "word": list(w), "matrix": [[entry(e) for e in row] for row in m]}
                for (k, w), m in sorted(self.x.items())
            ],
            "tau": [
                {"k": k, "word": list(w), "matrix": [[entry(e) for e in row] for row in m]}
                for (k, w), m in sorted(self.tau.items())
            ],
        }

    @staticmethod
    def from_json(ctx, doc):
        base = doc.get("base", "Q")
        if base == "Q":
            ring = QQ
        else:
            ring = BaseRing("Qz", int(base.split(":")[1]))

        def entry(e):
            if isinstance(e, dict):
                return ZPoly([Fraction(c) for c in e["z"]])
            v = Fraction(e)
            return ring.coerce(v)

        blocks = {tuple(b["word"]): list(b["degrees"]) for b in doc["blocks"]}
        xm = {(it["k"], tuple(it["word"])): [[entry(e) for e in row] for row in it["matrix"]] for it in doc["x"]}
        tm = {(it["k"], tuple(it["word"])): [[entry(e) for e in row] for row in it["matrix"]] for it in doc["tau"]}
        return GradedModule(ctx, doc["beta"], blocks, xm, tm, ring)


# ---------------------------------------------------------------------------
# basic constructions

def one_dim(ctx, letters):
    """The one-dimensional module L(i_1, ..., i_m); all x and tau act by zero."""
    letters = tuple(letters)
    rp = ctx.cartan.root_pairing
    for k in range(len(letters) - 1):
        if rp[letters[k]][letters[k + 1]] >= 0:
            raise ValueError(f"(alpha_{letters[k]}, alpha_{letters[k + 1]}) must be negative")
    for k in range(len(letters) - 2):
        if letters[k] == letters[k + 2]:
            raise ValueError("letters k and k+2 must differ")
    beta = ctx.word_weight(letters)
    return GradedModule(ctx, beta, {letters: [0]}, {}, {})


def trivial_module(ctx):
    return GradedModule(ctx, (0,) * ctx.cartan.n, {(): [0]}, {}, {})


def simple_letter(ctx, i):
    return one_dim(ctx, (i,))


# ---------------------------------------------------------------------------
# homomorphisms

class ModuleHom:
    """A homogeneous module homomorphism f: M -> N of the given degree.

    deg f = d means f raises internal degree by d (f(M_e) subset N_{e+d}).
    """

    def __init__(self, source, target, degree, block_mats):
        self.source = source
        self.target = target
        self.degree = degree
        self.blocks = {tuple(w): m for w, m in block_mats.items()}

    def matrix(self):
        """Global matrix (target.dim x source.dim)."""
        M, N = self.source, self.target
        out = zeros(N.dim, M.dim, N.ring)
        for w, m in self.blocks.items():
            if w not in M.blocks or w not in N.blocks:
                continue
            ro, co = N.offset(w), M.offset(w)
            for r in range(len(m)):
                for c in range(len(m[0]) if m else 0):
                    out[ro + r][co + c] = m[r][c]
        return out

    def apply(self, vec):
        return mat_vec(self.matrix(), vec)

    def is_zero(self):
        return all(all(not e for e in row) for m in self.blocks.values() for row in m)

    def compose(self, other):
        """self o other (apply other first)."""
        assert other.target is self.source or other.target.blocks == self.source.blocks
        mats = {}
        for w in self.target.words:
            if w in other.source.blocks:
                a = self.blocks.get(w)
                b = other.blocks.get(w)
                if a is not None and b is not None:
                    mats[w] = mat_mul(a, b)
        return ModuleHom(other.source, self.target, self.degree + other.degree, mats)

    def scale(self, c):
        return ModuleHom(self.source, self.target, self.degree,
                         {w: [[c * e for e in row] for row in m] for w, m in self.blocks.items()})

    def add(self, other):
        assert self.degree == other.degree
        mats = {}
        for w in set(self.blocks) | set(other.blocks):
            a, b = self.blocks.get(w), other.blocks.get(w)
            if a is None:
                mats[w] = b
            elif b is None:
                mats[w] = a
            else:
                mats[w] = [[p + q for p, q in zip(r1, r2)] for r1, r2 in zip(a, b)]
        return ModuleHom(self.source, self.target, self.degree, mats)

    def is_isomorphism(self):
        if self.source.dim != self.target.dim:
            return False
        for w in set(self.source.words) | set(self.target.words):
            dm, dn = self.source.block_dim(w), self.target.block_dim(w)
            if dm != dn:
                return False
            m = self.blocks.get(w)
            if dm and (m is None or rank(m) != dm):
                return False
        return True

    def rank(self):
        return sum(rank(m) for m in self.blocks.values() if m)

    @staticmethod
    def identity_hom(M):
        return ModuleHom(M, M, 0, {w: identity(len(M.blocks[w]), M.ring) for w in M.words})


def hom_space(M: GradedModule, N: GradedModule, degrees=None):
    """Graded basis of HOM(M, N): list of ModuleHom sorted by degree."""
    if M.beta != N.beta:
        return []
    if degrees is None:
        if M.dim == 0 or N.dim == 0:
            return []
        md = M.global_degrees()
        nd = N.global_degrees()
        degrees = sorted({dn - dm for dm in md for dn in nd})
    out = []
    for d in degrees:
        out.extend(_hom_space_degree(M, N, d))
    return out


def _hom_space_degree(M, N, d):
    # variables: (word, r, c) with degN[r] == degM[c] + d
    var_index = {}
    for w in M.words:
        if w not in N.blocks:
            continue
        dm, dn = M.blocks[w], N.blocks[w]
        for r in range(len(dn)):
            for c in range(len(dm)):
                if dn[r] == dm[c] + d:
                    var_index[(w, r, c)] = len(var_index)
    if not var_index:
        return []
    rows = []

    def add_constraints(gm_src, gn_src, w, w2):
        # F_{w2} . gm - gn . F_w = 0 ; gm: M_w -> M_{w2}, gn: N_w -> N_{w2}
        dmw = M.block_dim(w)
        dn2 = N.block_dim(w2)
        for r in range(dn2):
            for c in range(dmw):
                row = {}
                dm2 = M.block_dim(w2)
                for t in range(dm2):
                    coeff = gm_src[t][c] if gm_src else 0
                    if coeff:
                        vid = var_index.get((w2, r, t))
                        if vid is not None:
                            row[vid] = row.get(vid, Fraction(0)) + coeff
                dnw = N.block_dim(w)
                for s in range(dnw):
                    coeff = gn_src[r][s] if gn_src else 0
                    if coeff:
                        vid = var_index.get((w, s, c))
                        if vid is not None:
                            row[vid] = row.get(vid, Fraction(0)) - coeff
                if row:
                    rows.append(row)

    for w in M.words:
        n = M.n
        for k in range(n):
            add_constraints(M.xmat(k, w), N.xmat(k, w) if w in N.blocks else None, w, w)
        for k in range(n - 1):
            w2 = word_swap(w, k)
            add_constraints(M.taumat(k, w), N.taumat(k, w) if w in N.blocks else None, w, w2)

    basis = sparse_nullspace(rows, len(var_index))
    homs = []
    for vec in basis:
        mats = {}
        for w in M.words:
            if w in N.blocks:
                mats[w] = zeros(N.block_dim(w), M.block_dim(w), N.ring)
        for (w, r, c), vid in var_index.items():
            if vec[vid]:
                mats[w][r][c] = vec[vid]
        homs.append(ModuleHom(M, N, d, mats))
    return homs


# ---------------------------------------------------------------------------
# sub/quotient modules from homogeneous spanning vectors

def submodule(M: GradedModule, vectors):
    """Submodule spanned by the given (global, homogeneous) vectors.

    The input must already be action-stable (e.g. the image of a module map
    or a kernel); we reduce per block/degree and reindex.
    """
    per_block = {w: SpanBuilder(len(M.blocks[w])) for w in M.words}
    chosen = {w: [] for w in M.words}
    for v in vectors:
        for w in M.words:
            off = M.offset(w)
            d = len(M.blocks[w])
            seg = v[off:off + d]
            # split by degree
            by_deg = {}
            for j, e in enumerate(seg):
                if e:
                    by_deg.setdefault(M.blocks[w][j], [Fraction(0)] * d)
                    by_deg[M.blocks[w][j]][j] = e
            for dd, segd in by_deg.items():
                if per_block[w].add(segd):
                    chosen[w].append((dd, list(per_block[w].rows[-0]) if False else segd))
    # Build an explicit ordered basis per block from the span builders:
    basis = {}
    degs = {}
    for w in M.words:
        sb = per_block[w]
        rows = [list(r) for r in sb.rows]
        basis[w] = rows
        degs[w] = []
        for r in rows:
            dset = {M.blocks[w][j] for j, e in enumerate(r) if e}
            assert len(dset) <= 1, "non-homogeneous submodule vector"
            degs[w].append(dset.pop() if dset else 0)
    blocks = {w: degs[w] for w in M.words if basis[w]}

    def coords_in_block(w, vec_seg):
        sb = per_block[w]
        v = list(vec_seg)
        coeffs = [Fraction(0)] * len(sb.rows)
        for idx, (row, pc) in enumerate(zip(sb.rows, sb.pivots)):
            if v[pc]:
                f = v[pc]
                coeffs[idx] = f
                v = [a - f * b for a, b in zip(v, row)]
        assert all(not a for a in v), "vector not in the submodule block"
        return coeffs

    xm, tm = {}, {}
    for w in M.words:
        if not basis[w]:
            continue
        for k in range(M.n):
            cols = []
            for b in basis[w]:
                full = M.zero_vector()
                off = M.offset(w)
                for j, e in enumerate(b):
                    full[off + j] = e
                img = M.apply_x(k, full)
                seg = img[off:off + len(M.blocks[w])]
                cols.append(coords_in_block(w, seg))
            xm[(k, w)] = transpose(cols)
        for k in range(M.n - 1):
            w2 = word_swap(w, k)
            if w2 not in blocks:
                # target block of the submodule is zero; tau must land in it
                continue
            cols = []
            for b in basis[w]:
                full = M.zero_vector()
                off = M.offset(w)
                for j, e in enumerate(b):
                    full[off + j] = e
                img = M.apply_tau(k, full)
                off2 = M.offset(w2)
                seg = img[off2:off2 + len(M.blocks[w2])]
                cols.append(coords_in_block(w2, seg))
            tm[(k, w)] = transpose(cols)
    sub = GradedModule(M.ctx, M.beta, blocks, xm, tm, M.ring)
    # inclusion map data (for callers that need it)
    incl = {w: transpose(basis[w]) for w in M.words if basis[w]}
    return sub, incl


def quotient(M: GradedModule, sub_vectors):
    """Quotient of M by the submodule spanned by sub_vectors (action-stable)."""
    per_block = {}
    for w in M.words:
        per_block[w] = SpanBuilder(len(M.blocks[w]))
    for v in sub_vectors:
        for w in M.words:
            off = M.offset(w)
            d = len(M.blocks[w])
            seg = v[off:off + d]
            by_deg = {}
            for j, e in enumerate(seg):
                if e:
                    by_deg.setdefault(M.blocks[w][j], [Fraction(0)] * d)
                    by_deg[M.blocks[w][j]][j] = e
            for segd in by_deg.values():
                per_block[w].add(segd)
    blocks = {}
    keep = {}
    for w in M.words:
        pivots = set(per_block[w].pivots)
        idx = [j for j in range(len(M.blocks[w])) if j not in pivots]
        if idx:
            keep[w] = idx
            blocks[w] = [M.blocks[w][j] for j in idx]

    def project(w, seg):
        sb = per_block[w]
        v = list(seg)
        for row, pc in zip(sb.rows, sb.pivots):
            if v[pc]:
                f = v[pc]
                v = [a - f * b for a, b in zip(v, row)]
        return [v[j] for j in keep.get(w, [])]

    xm, tm = {}, {}
    for w in keep:
        for k in range(M.n):
            cols = []
            for j in keep[w]:
                full = M.basis_vector(w, j)
                img = M.apply_x(k, full)
                off = M.offset(w)
                cols.append(project(w, img[off:off + len(M.blocks[w])]))
            xm[(k, w)] = transpose(cols)
        for k in range(M.n - 1):
            w2 = word_swap(w, k)
            if w2 not in keep:
                continue
            cols = []
            for j in keep[w]:
                full = M.basis_vector(w, j)
                img = M.apply_tau(k, full)
                off2 = M.offset(w2)
                cols.append(project(w2, img[off2:off2 + len(M.blocks[w2])]))
            tm[(k, w)] = transpose(cols)
    quo = GradedModule(M.ctx, M.beta, blocks, xm, tm, M.ring)
    proj = {w: None for w in keep}
    return quo, keep, per_block


# ---------------------------------------------------------------------------
# duality, restriction, epsilon statistics

def dual(M: GradedModule):
    """M* with the action twisted by the antiautomorphism fixing the generators."""
    blocks = {w: [-d for d in M.blocks[w]] for w in M.words}
    xm, tm = {}, {}
    for w in M.words:
        for k in range(M.n):
            xm[(k, w)] = transpose(M.xmat(k, w))
        for k in range(M.n - 1):
            w2 = word_swap(w, k)
            if w2 in M.blocks:
                # tau_k on dual block w = transpose of tau_k: M_{w2} -> M_w... source block w2 on M
                tm[(k, w)] = transpose(M.taumat(k, w2))
    return GradedModule(M.ctx, M.beta, blocks, xm, tm, M.ring)


def restrict_first(M: GradedModule, i):
    """E_i M = e(alpha_i, beta - alpha_i) M as a module over R(beta - alpha_i)."""
    beta2 = list(M.beta)
    if beta2[i] == 0:
        return None
    beta2[i] -= 1
    blocks, xm, tm = {}, {}, {}
    for w in M.words:
        if w and w[0] == i:
            tail = w[1:]
            blocks[tail] = list(M.blocks[w])
    for w in M.words:
        if not (w and w[0] == i):
            continue
        tail = w[1:]
        for k in range(M.n - 1):
            xm[(k, tail)] = M.xmat(k + 1, w)
        for k in range(M.n - 2):
            t2 = word_swap(tail, k)
            if t2 in blocks:
                tm[(k, tail)] = M.taumat(k + 1, w)
    return GradedModule(M.ctx, tuple(beta2), blocks, xm, tm, M.ring)


def restrict_last(M: GradedModule, i):
    """E_i^* M = e(beta - alpha_i, alpha_i) M as a module over R(beta - alpha_i)."""
    beta2 = list(M.beta)
    if beta2[i] == 0:
        return None
    beta2[i] -= 1
    blocks, xm, tm = {}, {}, {}
    for w in M.words:
        if w and w[-1] == i:
            head = w[:-1]
            blocks[head] = list(M.blocks[w])
    for w in M.words:
        if not (w and w[-1] == i):
            continue
        head = w[:-1]
        for k in range(M.n - 1):
            xm[(k, head)] = M.xmat(k, w)
        for k in range(M.n - 2):
            h2 = word_swap(head, k)
            if h2 in blocks:
                tm[(k, head)] = M.taumat(k, w)
    return GradedModule(M.ctx, tuple(beta2), blocks, xm, tm, M.ring)


def eps(i, M):
    count = 0
    cur = M
    while cur is not None and cur.dim > 0:
        cur = restrict_first(cur, i)
        if cur is not None and cur.dim > 0:
            count += 1
        else:
            break
    return count


def eps_star(i, M):
    count = 0
    cur = M
    while cur is not None and cur.dim > 0:
        cur = restrict_last(cur, i)
        if cur is not None and cur.dim > 0:
            count += 1
        else:
            break
    return count


def gW(M: GradedModule):
    """Restriction supports: weights gamma with e(gamma, beta-gamma) M != 0."""
    out = set()
    for w in M.words:
        coords = [0] * M.ctx.cartan.n
        out.add(tuple(coords))
        for letter in w:
            coords[letter] += 1
            out.add(tuple(coords))
    return out


def gW_star(M: GradedModule):
    out = set()
    for w in M.words:
        coords = [0] * M.ctx.cartan.n
        out.add(tuple(coords))
        for letter in reversed(w):
            coords[letter] += 1
            out.add(tuple(coords))
    return out


def restrict(M: GradedModule, gamma_coords):
    """e(gamma, beta-gamma) M with both factor actions.

    Returns (index_list, left_module, right_module): index_list orders the
    truncated basis as (prefix, suffix, j) triples shared by both modules.
    """
    gamma = tuple(int(c) for c in gamma_coords)
    delta = tuple(b - g for b, g in zip(M.beta, gamma))
    if any(d < 0 for d in delta):
        raise ValueError("gamma is not below beta")
    m = sum(gamma)
    index = []
    for w in M.words:
        pre, suf = w[:m], w[m:]
        if M.ctx.word_weight(pre) == gamma:
            for j in range(len(M.blocks[w])):
                index.append((pre, suf, j))
    # left module: blocks by prefix
    left_blocks, right_blocks = {}, {}
    left_index, right_index = {}, {}
    for t, (pre, suf, j) in enumerate(index):
        left_blocks.setdefault(pre, []).append(M.blocks[pre + suf][j])
        left_index.setdefault(pre, []).append(t)
        right_blocks.setdefault(suf, []).append(M.blocks[pre + suf][j])
        right_index.setdefault(suf, []).append(t)

    def build(side):
        blocks = left_blocks if side == "L" else right_blocks
        bindex = left_index if side == "L" else right_index
        nn = m if side == "L" else sum(delta)
        xm, tm = {}, {}
        for w2, rows in bindex.items():
            for k in range(nn):
                kk = k if side == "L" else k + m
                mat = zeros(len(rows), len(rows), M.ring)
                for cpos, t in enumerate(rows):
                    pre, suf, j = index[t]
                    full = M.basis_vector(pre + suf, j)
                    img = M.apply_x(kk, full)
                    for rpos, t2 in enumerate(rows):
                        pre2, suf2, j2 = index[t2]
                        mat[rpos][cpos] = img[M.offset(pre2 + suf2) + j2]
                xm[(k, w2)] = mat
            for k in range(nn - 1):
                kk = k if side == "L" else k + m
                w2t = word_swap(w2, k)
                if w2t not in blocks:
                    continue
                rows_t = bindex[w2t]
                mat = zeros(len(rows_t), len(rows), M.ring)
                for cpos, t in enumerate(rows):
                    pre, suf, j = index[t]
                    full = M.basis_vector(pre + suf, j)
                    img = M.apply_tau(kk, full)
                    for rpos, t2 in enumerate(rows_t):
                        pre2, suf2, j2 = index[t2]
                        mat[rpos][cpos] = img[M.offset(pre2 + suf2) + j2]
                tm[(k, w2)] = mat
        bt = gamma if side == "L" else delta
        return GradedModule(M.ctx, bt, blocks, xm, tm, M.ring)

    return index, build("L"), build("R")
