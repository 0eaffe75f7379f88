"""Convolution products, affinizations, and renormalized R-matrices.

Convolutions are built on the shuffle basis tau_sh (x) (u_1 (x) ... (x) u_t),
sh ranging over minimal coset representatives.  Generator actions are
computed by straightening g . tau_sh in the algebra and splitting the result
into shuffle x (Young subgroup) parts; the within-block part acts factorwise
(the fixed-word choice is block-compatible, so no re-normalization is needed
there).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

from .algebra import (
    coset_factor,
    fixed_word,
    perm_act_word,
    perm_identity,
    perm_length,
    perm_of_word,
    shuffles,
)
from .linalg import (
    rank,
    transpose,
    zeros,
    zmat_at_zero,
    zmat_injective,
    zmat_valuation,
)
from .modules import GradedModule, ModuleHom, hom_space, submodule, word_swap
from .rings import QQ, BaseRing, ZPoly


def coerce_module(M: GradedModule, ring: BaseRing):
    if M.ring == ring:
        return M
    if M.ring.tag != "Q" or ring.tag != "Qz":
        raise ValueError("can only coerce from Q to Q[z]")

    def lift(mat):
        return [[ZPoly.const(e) for e in row] for row in mat]

    return GradedModule(
        M.ctx,
        M.beta,
        M.blocks,
        {k: lift(m) for k, m in M.x.items()},
        {k: lift(m) for k, m in M.tau.items()},
        ring,
    )


class ConvModule(GradedModule):
    """Convolution of an ordered list of modules, with basis bookkeeping.

    Basis keys are (sh, words, indices): a shuffle permutation, one word per
    factor, one basis index per factor.
    """

    def __init__(self, factors, ring=None):
        ctx = factors[0].ctx
        if ring is None:
            ring = QQ
            for f in factors:
                if f.ring.tag == "Qz":
                    ring = f.ring
        factors = [coerce_module(f, ring) for f in factors]
        self.factors = factors
        self.block_sizes = tuple(f.n for f in factors)
        beta = tuple(sum(f.beta[i] for f in factors) for i in range(ctx.cartan.n))
        n = sum(self.block_sizes)
        shs = sorted(shuffles(self.block_sizes), key=lambda p: (perm_length(p), p))
        entries = {}
        pos = {}
        word_lists = [f.words for f in factors]
        for sh in shs:
            for words in iproduct(*word_lists):
                concat = tuple(c for w in words for c in w)
                kappa = perm_act_word(sh, concat)
                for idxs in iproduct(*[range(f.block_dim(w)) for f, w in zip(factors, words)]):
                    key = (sh, words, idxs)
                    entries.setdefault(kappa, []).append(key)
        blocks = {}
        for kappa, keys in entries.items():
            degs = []
            for (sh, words, idxs) in keys:
                concat = tuple(c for w in words for c in w)
                d = ctx.term_degree(sh, (0,) * n, concat)
                d += sum(f.blocks[w][j] for f, w, j in zip(factors, words, idxs))
                degs.append(d)
            blocks[kappa] = degs
        for kappa, keys in entries.items():
            for i, key in enumerate(keys):
                pos[key] = (kappa, i)
        self.entries = entries
        self.pos = pos
        self._decomp_cache = {}
        xm, tm = {}, {}
        super().__init__(ctx, beta, blocks, {}, {}, ring)
        # build generator matrices
        for kappa in self.words:
            for k in range(self.n):
                self.x[(k, kappa)] = self._gen_matrix(("x", k), kappa)
            for k in range(self.n - 1):
                k2 = word_swap(kappa, k)
                if k2 in self.blocks:
                    self.tau[(k, kappa)] = self._gen_matrix(("tau", k), kappa)

    # -- construction internals ---------------------------------------------

    def _decompose(self, gen, sh, concat):
        """Normal form of gen . tau_sh e(concat), split into shuffle x inner parts.

        Returns a list of (coeff, sh2, win, exps); the inner element is
        tau_win x^exps e(concat) with win in the Young subgroup.
        """
        key = (gen, sh, concat)
        hit = self._decomp_cache.get(key)
        if hit is not None:
            return hit
        ctx = self.ctx
        n = len(concat)
        start = {(sh, (0,) * n, concat): Fraction(1)}
        if gen[0] == "x":
            elem = ctx.left_x(gen[1], start)
        else:
            elem = ctx._left_tau(gen[1], start)
        out = []
        guard = 0
        while elem:
            guard += 1
            if guard > 100000:
                raise RuntimeError("decompose loop failed to terminate")
            (sigma, exps, kappa), c = max(
                elem.items(), key=lambda kv: (perm_length(kv[0][0]), kv[0])
            )
            sh2, win = coset_factor(sigma, self.block_sizes)
            out.append((c, sh2, win, exps))
            # subtract c . tau_sh2 . (tau_win x^exps e(kappa))
            sub = {(win, exps, kappa): c}
            for k in reversed(fixed_word(sh2)):
                sub = ctx._left_tau(k, sub)
            for tkey, tc in sub.items():
                v = elem.get(tkey, Fraction(0)) - tc
                if v:
                    elem[tkey] = v
                else:
                    elem.pop(tkey, None)
        self._decomp_cache[key] = out
        return out

    def _gen_matrix(self, gen, kappa):
        if gen[0] == "x":
            target = kappa
        else:
            target = word_swap(kappa, gen[1])
        src_keys = self.entries[kappa]
        dst_keys = self.entries.get(target, [])
        dst_pos = {key: i for i, key in enumerate(dst_keys)}
        mat = zeros(len(dst_keys), len(src_keys), self.ring)
        bounds = []
        startp = 0
        for b in self.block_sizes:
            bounds.append((startp, startp + b))
            startp += b
        for col, (sh, words, idxs) in enumerate(src_keys):
            concat = tuple(c for w in words for c in w)
            for (c, sh2, win, exps) in self._decompose(gen, sh, concat):
                # split the inner part per factor and act
                factor_vecs = []
                okflag = True
                for fi, (lo, hi) in enumerate(bounds):
                    f = self.factors[fi]
                    wdf = words[fi]
                    wloc = tuple(win[p] - lo for p in range(lo, hi))
                    eloc = tuple(exps[lo:hi])
                    vec = f.apply_term(wloc, eloc, wdf, f.basis_vector(wdf, idxs[fi]))
                    if not any(x for x in vec):
                        okflag = False
                        break
                    factor_vecs.append(vec)
                if not okflag:
                    continue
                # combine tensor components
                wloc_words = []
                for fi, (lo, hi) in enumerate(bounds):
                    wloc = tuple(win[p] - lo for p in range(lo, hi))
                    wloc_words.append(perm_act_word(wloc, words[fi]))
                comps = []
                for fi, f in enumerate(self.factors):
                    wt = wloc_words[fi]
                    off = f.offset(wt)
                    d = f.block_dim(wt)
                    comps.append([(j, factor_vecs[fi][off + j]) for j in range(d) if factor_vecs[fi][off + j]])
                for combo in iproduct(*comps):
                    coeff = c
                    tgt_idxs = []
                    for (j, val) in combo:
                        coeff = coeff * val
                        tgt_idxs.append(j)
                    key2 = (sh2, tuple(wloc_words), tuple(tgt_idxs))
                    r = dst_pos.get(key2)
                    if r is None:
                        raise RuntimeError("convolution target basis element missing")
                    mat[r][col] = mat[r][col] + coeff
        return mat

    # -- convenience ----------------------------------------------------------

    def basis_index(self, key):
        kappa, i = self.pos[key]
        return self.offset(kappa) + i

    def entry_degree(self, key):
        kappa, i = self.pos[key]
        return self.blocks[kappa][i]


def convolve(*factors, ring=None):
    factors = [f for f in factors]
    if not factors:
        raise ValueError("need at least one factor")
    return ConvModule(factors, ring=ring)


def cached_conv(*factors, ring=None):
    """Convolution with instance caching keyed on the factor identities."""
    ctx = factors[0].ctx
    if not hasattr(ctx, "_convmod_cache"):
        ctx._convmod_cache = {}
    key = (tuple(id(f) for f in factors), None if ring is None else (ring.tag, ring.zdeg))
    hit = ctx._convmod_cache.get(key)
    if hit is None:
        hit = ConvModule(list(factors), ring=ring)
        ctx._convmod_cache[key] = hit
    return hit


def letter(ctx, i):
    if not hasattr(ctx, "_letter_cache"):
        ctx._letter_cache = {}
    if i not in ctx._letter_cache:
        from .modules import simple_letter
        ctx._letter_cache[i] = simple_letter(ctx, i)
    return ctx._letter_cache[i]


def thick(ctx, i, ell):
    if not hasattr(ctx, "_thick_cache"):
        ctx._thick_cache = {}
    if (i, ell) not in ctx._thick_cache:
        ctx._thick_cache[(i, ell)] = thick_letter(ctx, i, ell)
    return ctx._thick_cache[(i, ell)]


def unit_module(ctx):
    if not hasattr(ctx, "_unit_cache"):
        from .modules import trivial_module
        ctx._unit_cache = trivial_module(ctx)
    return ctx._unit_cache


# ---------------------------------------------------------------------------
# morphism convolution and merge/split bookkeeping

def _merge_sizes(sizes, p, q):
    return tuple(list(sizes[:p]) + [sum(sizes[p:q + 1])] + list(sizes[q + 1:]))


def _entry_of_index(conv: ConvModule, idx):
    kappa, i = conv.word_of_index(idx)
    return conv.entries[kappa][i]


def _embed_mid(sh_out, offset_mid, mid_n, sh_mid):
    """Compose sh_out with sh_mid embedded in the merged middle block."""
    n = len(sh_out)
    emb = list(range(n))
    for r in range(mid_n):
        emb[offset_mid + r] = offset_mid + sh_mid[r]
    return tuple(sh_out[emb[pp]] for pp in range(n))


def _hom_blocks_from_matrix(src, dst, mat):
    blocks = {}
    for w in src.words:
        if w in dst.blocks:
            ro, co = dst.offset(w), src.offset(w)
            blocks[w] = [row[co:co + src.block_dim(w)] for row in mat[ro:ro + dst.block_dim(w)]]
    return blocks


def _replace_factor(src: ConvModule, p, g: ModuleHom, dst: ConvModule):
    """id (x) g (x) id when g maps factor p of src to factor p of dst.

    Exact on the shuffle basis: the fine block structure is unchanged, so
    tau_sh (x) (... m ...) -> tau_sh (x) (... g(m) ...) termwise.
    """
    mat = zeros(dst.dim, src.dim, dst.ring)
    gdst = g.target
    for key in src.pos:
        sh, words, idxs = key
        col = src.basis_index(key)
        gm = g.blocks.get(words[p])
        if gm is None:
            continue
        for r in range(gdst.block_dim(words[p])):
            val = gm[r][idxs[p]]
            if not val:
                continue
            new_idxs = tuple(list(idxs[:p]) + [r] + list(idxs[p + 1:]))
            row = dst.basis_index((sh, words, new_idxs))
            mat[row][col] = mat[row][col] + val
    return ModuleHom(src, dst, g.degree, _hom_blocks_from_matrix(src, dst, mat))


def invert_hom(hom: ModuleHom):
    from .linalg import inverse
    blocks = {}
    for w, m in hom.blocks.items():
        if not m or not m[0]:
            continue
        inv = inverse(m)
        assert inv is not None, "homomorphism is not invertible"
        blocks[w] = inv
    return ModuleHom(hom.target, hom.source, -hom.degree, blocks)


def sandwich(src: ConvModule, p, q, g: ModuleHom, dst: ConvModule, p2=None, q2=None):
    """id (x) g (x) id on multi-convolutions.

    g maps the sub-convolution of src.factors[p..q] to that of
    dst.factors[p2..q2]; slices of length one may be plain factors.  The
    computation routes through the canonical regrouping isomorphisms, since
    the naive basis bijection is wrong for multi-factor slices.
    """
    if p2 is None:
        p2, q2 = p, q
    plain_src = (q == p) and (g.source is src.factors[p] or g.source.blocks == src.factors[p].blocks)
    plain_dst = (q2 == p2) and (g.target is dst.factors[p2] or g.target.blocks == dst.factors[p2].blocks)
    if plain_src and plain_dst:
        return _replace_factor(src, p, g, dst)
    # regroup to the merged presentation, replace, regroup back
    merged_src_factors = list(src.factors[:p]) + [g.source] + list(src.factors[q + 1:])
    merged_dst_factors = list(dst.factors[:p2]) + [g.target] + list(dst.factors[q2 + 1:])
    msrc = cached_conv(*merged_src_factors, ring=src.ring if src.ring.tag == "Qz" else None)
    mdst = cached_conv(*merged_dst_factors, ring=dst.ring if dst.ring.tag == "Qz" else None)
    assert p == p2, "outer factors of src and dst must align"
    groupingS = [(t, t) for t in range(p)] + [(p, q)] + [(t, t) for t in range(q + 1, len(src.factors))]
    groupingD = [(t, t) for t in range(p2)] + [(p2, q2)] + [(t, t) for t in range(q2 + 1, len(dst.factors))]
    regS = ModuleHom.identity_hom(src) if msrc is src else regroup_iso(src, groupingS, msrc)
    regD = ModuleHom.identity_hom(dst) if mdst is dst else regroup_iso(dst, groupingD, mdst)
    mid = _replace_factor(msrc, p, g, mdst)
    return invert_hom(regD).compose(mid).compose(regS)


def regroup_iso(src: ConvModule, grouping, dst: ConvModule):
    """Canonical iso conv(F_0,...,F_t) -> conv(G_0,...,G_s) for a coarser grouping.

    grouping[g] is the (start, end) slice of src factors making up dst factor
    g; a slice of length one must have dst.factors[g] = src.factors[start],
    a longer one must have dst.factors[g] a ConvModule of those factors.
    The iso sends a basis element tau_sh . (pure tensor) to the action of
    tau_sh on the corresponding coarse pure tensor.
    """
    n = src.n
    mat = zeros(dst.dim, src.dim, dst.ring)
    for key in src.pos:
        sh, words, idxs = key
        col = src.basis_index(key)
        # coarse pure tensor for the identity shuffle
        coarse_words = []
        coarse_idxs = []
        for gidx, (a, b) in enumerate(grouping):
            G = dst.factors[gidx]
            if b == a:
                coarse_words.append(words[a])
                coarse_idxs.append(idxs[a])
            else:
                assert isinstance(G, ConvModule)
                inner_id = tuple(range(sum(src.block_sizes[a:b + 1])))
                inner_key = (inner_id, tuple(words[a:b + 1]), tuple(idxs[a:b + 1]))
                kappa, ii = G.pos[inner_key]
                coarse_words.append(kappa)
                coarse_idxs.append(ii)
        concat = tuple(c for w in words for c in w)
        pure_key = (tuple(range(n)), tuple(coarse_words), tuple(coarse_idxs))
        vec = dst.zero_vector()
        vec[dst.basis_index(pure_key)] = dst.ring.one()
        out = dst.apply_term(sh, (0,) * n, concat, vec)
        for r in range(dst.dim):
            if out[r]:
                mat[r][col] = out[r]
    return ModuleHom(src, dst, 0, _hom_blocks_from_matrix(src, dst, mat))


# ---------------------------------------------------------------------------
# intertwiner application and the R-matrix

def apply_phi(module: GradedModule, k, vec):
    """Apply the intertwiner phi_k to a global vector."""
    out = module.zero_vector()
    for w in module.words:
        off = module.offset(w)
        d = module.block_dim(w)
        seg = vec[off:off + d]
        if not any(x for x in seg):
            continue
        emb = module.zero_vector()
        for j in range(d):
            emb[off + j] = seg[j]
        if w[k] == w[k + 1]:
            part1 = module.apply_tau(k, module.apply_x(k, emb))
            part2 = module.apply_x(k, module.apply_tau(k, emb))
            part = [a - b for a, b in zip(part1, part2)]
        else:
            part = module.apply_tau(k, emb)
        for i, v in enumerate(part):
            if v:
                out[i] = out[i] + v
    return out


def apply_phi_word(module, word, vec):
    for k in reversed(tuple(word)):
        vec = apply_phi(module, k, vec)
    return vec


def w_block_swap(n_first, n_second):
    """Permutation moving the first block (size n_first) past the second."""
    n = n_first + n_second
    return tuple(p + n_second if p < n_first else p - n_first for p in range(n))


def rr_matrix_raw(M: GradedModule, N: GradedModule, ring=None):
    """The intertwiner-induced map R: M o N -> N o M (possibly zero).

    Returns (src_conv, dst_conv, global matrix).
    """
    src = convolve(M, N, ring=ring)
    dst = convolve(N, M, ring=ring)
    m, n = sum(M.beta), sum(N.beta)
    w = w_block_swap(n, m)
    word = fixed_word(w)
    cols = [None] * src.dim
    # pure tensors first
    for key in src.pos:
        sh, words, idxs = key
        if perm_length(sh) == 0:
            dkey = (perm_identity(n + m), (words[1], words[0]), (idxs[1], idxs[0]))
            vec = dst.zero_vector()
            vec[dst.basis_index(dkey)] = dst.ring.one()
            cols[src.basis_index(key)] = apply_phi_word(dst, word, vec)
    # then tau_sh chains
    for key in src.pos:
        sh, words, idxs = key
        if perm_length(sh) == 0:
            continue
        ekey = (perm_identity(n + m), words, idxs)
        base = cols[src.basis_index(ekey)]
        vec = list(base)
        for k in reversed(fixed_word(sh)):
            vec = dst.apply_tau(k, vec)
        cols[src.basis_index(key)] = vec
    mat = transpose(cols)
    return src, dst, mat


# ---------------------------------------------------------------------------
# affinizations

class Affinization:
    """A z-deformation of a simple module, free over Q[z]."""

    def __init__(self, module: GradedModule, zdeg, fiber: GradedModule, label=""):
        self.module = module
        self.zdeg = zdeg
        self.fiber = fiber
        self.label = label

    @property
    def ring(self):
        return self.module.ring

    def __repr__(self):
        return f"Affinization({self.label}, dim={self.module.dim}, deg z={self.zdeg})"


def affinize_letter(ctx, i):
    """\\tilde L(i) = Q[z]<i> with x_0 acting by z; deg z = (alpha_i, alpha_i)."""
    d = ctx.cartan.root_pairing[i][i]
    ring = BaseRing("Qz", d)
    word = (i,)
    blocks = {word: [0]}
    xm = {(0, word): [[ZPoly.z()]]}
    beta = ctx.word_weight(word)
    mod = GradedModule(ctx, beta, blocks, xm, {}, ring)
    from .modules import simple_letter
    return Affinization(mod, d, simple_letter(ctx, i), label=f"L~({i + 1})")


def thick_letter(ctx, i, ell):
    """L_ell(i) = \\tilde L(i) / z^ell as a Q-module of dimension ell."""
    d = ctx.cartan.root_pairing[i][i]
    word = (i,)
    degs = [k * d for k in range(ell)]
    x0 = zeros(ell, ell)
    for k in range(ell - 1):
        x0[k + 1][k] = Fraction(1)
    return GradedModule(ctx, ctx.word_weight(word), {word: degs}, {(0, word): x0}, {})


def affinize_power(ctx, i, m, f_coeffs):
    """Affinization W(i, f) of L(i^m): the quotient ring model.

    f = sum_j f_coeffs[j] t^j must be monic of t-degree m, homogeneous for
    deg t = deg z = (alpha_i, alpha_i), with f(0) != 0.
    """
    dd = ctx.cartan.root_pairing[i][i]
    f = [c if isinstance(c, ZPoly) else ZPoly.const(c) for c in f_coeffs]
    if len(f) != m + 1 or f[m] != ZPoly.const(1):
        raise ValueError("f must be monic of t-degree m")
    if f[0].is_zero():
        raise ValueError("f(0) must be nonzero")
    for j, c in enumerate(f):
        for p, cc in enumerate(c.coeffs):
            if cc and p != m - j:
                raise ValueError("f must be homogeneous with deg t = deg z")
    ring = BaseRing("Qz", dd)
    # Triangular relations G_k: G_0 = f; G_{k+1}(t) = (G_k(t) - G_k(x_k)) / (t - x_k).
    # Coefficients are staircase-reduced polynomials in x_0..x_{k-1} over Q[z].
    # Polynomials here: {exps tuple: ZPoly}.

    def pmul(a, b):
        out = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = out.get(e, ZPoly(())) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return out

    def padd(a, b):
        out = dict(a)
        for e, c in b.items():
            v = out.get(e, ZPoly(())) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return out

    def pscale(c, a):
        if not c:
            return {}
        return {e: c * v for e, v in a.items() if c * v}

    zerotup = (0,) * m

    def mono(k, power):
        e = list(zerotup)
        e[k] = power
        return tuple(e)

    # G[k] = list of coefficient polys (dicts) for t^0..t^{m-k}
    G = [[{zerotup: c} if c else {} for c in f]]
    for k in range(m - 1):
        Gk = G[k]
        deg_t = m - k
        newG = [dict() for _ in range(deg_t)]
        # G_{k+1}(t) = sum_j Gk[j] * sum_{a=0}^{j-1} t^a x_k^{j-1-a}
        for j in range(1, deg_t + 1):
            cj = Gk[j]
            if not cj:
                continue
            for a in range(j):
                powk = j - 1 - a
                term = pmul(cj, {mono(k, powk): ZPoly.const(1)})
                newG[a] = padd(newG[a], term)
        G.append(newG)

    bounds = [m - 1 - k for k in range(m)]  # staircase: exps[k] <= m-1-k

    def reduce_poly(p):
        p = dict(p)
        guard = 0
        while True:
            guard += 1
            if guard > 200000:
                raise RuntimeError("splitting-algebra reduction did not terminate")
            viol = None
            for e in p:
                for k in range(m - 1, -1, -1):
                    if e[k] > bounds[k]:
                        viol = (e, k)
                        break
                if viol:
                    break
            if not viol:
                return p
            e, k = viol
            c = p.pop(e)
            # x_k^{m-k} = -sum_{j<m-k} G[k][j] x_k^j  (G[k] monic of t-degree m-k)
            rest = list(e)
            rest[k] -= (m - k)
            rest = tuple(rest)
            for j in range(m - k):
                cj = G[k][j]
                if not cj:
                    continue
                term = pmul({rest: c}, pmul(cj, {mono(k, j): ZPoly.const(1)}))
                p = padd(p, pscale(ZPoly.const(-1), term))

    def del_k(k, p):
        out = {}
        for e, c in p.items():
            a, b = e[k], e[k + 1]
            if a == b:
                continue
            sign = -1 if a > b else 1
            lo, hi = min(a, b), max(a, b)
            for t in range(lo, hi):
                e2 = list(e)
                e2[k], e2[k + 1] = t, a + b - 1 - t
                key = tuple(e2)
                v = out.get(key, ZPoly(())) + ZPoly.const(sign) * c
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return out

    # staircase basis
    basis = []
    for exps in iproduct(*[range(b + 1) for b in bounds]):
        basis.append(tuple(exps))
    basis.sort()
    index = {e: i for i, e in enumerate(basis)}
    word = (i,) * m
    D = dd * (m * (m - 1) // 2)
    g0 = -D // 2
    degs = [g0 + dd * sum(e) for e in basis]

    def poly_to_vec(p):
        v = [ZPoly(()) for _ in basis]
        for e, c in p.items():
            v[index[e]] = v[index[e]] + c
        return v

    xm, tm = {}, {}
    for k in range(m):
        cols = []
        for e in basis:
            p = reduce_poly(pmul({e: ZPoly.const(1)}, {mono(k, 1): ZPoly.const(1)}))
            cols.append(poly_to_vec(p))
        xm[(k, word)] = transpose(cols)
    for k in range(m - 1):
        cols = []
        for e in basis:
            p = reduce_poly(del_k(k, {e: ZPoly.const(1)}))
            cols.append(poly_to_vec(p))
        tm[(k, word)] = transpose(cols)
    mod = GradedModule(ctx, ctx.word_weight(word), {word: degs}, xm, tm, ring)
    fiber = fiber_at_zero(mod)
    return Affinization(mod, dd, fiber, label=f"W({i + 1}, m={m})")


def affinize_generic(M: GradedModule):
    """x_k -> x_k + z on a symmetric-type module with translation-invariant Q."""
    ctx = M.ctx
    if not ctx.q.is_translation_invariant():
        raise ValueError("Q parameters are not translation invariant")
    norms = set(ctx.cartan.norms)
    if len(norms) != 1:
        raise ValueError("generic affinization needs all root norms equal")
    d = norms.pop()
    ring = BaseRing("Qz", d)
    Mz = coerce_module(M, ring)
    xm = {}
    for w in Mz.words:
        dim = Mz.block_dim(w)
        for k in range(Mz.n):
            base = Mz.xmat(k, w)
            mat = [[base[r][c] + (ZPoly.z() if r == c else ZPoly(())) for c in range(dim)] for r in range(dim)]
            xm[(k, w)] = mat
    mod = GradedModule(ctx, Mz.beta, Mz.blocks, xm, Mz.tau, ring)
    return Affinization(mod, d, M, label="generic")


def fiber_at_zero(Mz: GradedModule):
    """Specialize a Q[z]-module at z = 0."""
    xm = {k: zmat_at_zero(m) for k, m in Mz.x.items()}
    tm = {k: zmat_at_zero(m) for k, m in Mz.tau.items()}
    return GradedModule(Mz.ctx, Mz.beta, Mz.blocks, xm, tm, QQ)


def check_affinization(aff: Affinization):
    """Report of failures: relations, p_i injectivity, simple z = 0 fiber."""
    from .algebra import central_p
    from .simples import is_simple

    errors = aff.module.validate()
    for i in range(aff.module.ctx.cartan.n):
        if aff.module.beta[i] == 0:
            continue
        elem = central_p(aff.module.ctx, i, aff.module.beta)
        mat = aff.module.element_matrix(elem)
        if not zmat_injective(mat, aff.module.dim):
            errors.append(f"p_{i} is not injective")
    fib = fiber_at_zero(aff.module)
    if not is_simple(fib):
        errors.append("z = 0 fiber is not simple")
    return errors


# ---------------------------------------------------------------------------
# renormalized R-matrices and the Lambda invariants

class RResult:
    def __init__(self, lam, s, r_matrix, direction, raw_scalar, src, dst, raw_matrix):
        self.lam = lam
        self.s = s
        self.r_matrix = r_matrix
        self.direction = direction
        self.raw_scalar = raw_scalar
        self.src = src
        self.dst = dst
        self.raw_matrix = raw_matrix

    def __repr__(self):
        return f"RResult(Lambda={self.lam}, s={self.s}, dir={self.direction})"


def _hom_from_matrix(src, dst, mat, degree):
    blocks = {}
    for w in src.words:
        if w in dst.blocks:
            ro, co = dst.offset(w), src.offset(w)
            blocks[w] = [row[co:co + src.block_dim(w)] for row in mat[ro:ro + dst.block_dim(w)]]
    return ModuleHom(src, dst, degree, blocks)


def _map_degree(src, dst, mat, zdeg=0):
    """Common degree of the homogeneous map given by mat; assert consistency."""
    degA = src.global_degrees()
    degB = dst.global_degrees()
    found = None
    for r in range(len(mat)):
        for c in range(len(mat[0]) if mat else 0):
            e = mat[r][c]
            if isinstance(e, ZPoly):
                for p, cc in enumerate(e.coeffs):
                    if cc:
                        d = degB[r] + p * zdeg - degA[c]
                        if found is None:
                            found = d
                        elif found != d:
                            raise ValueError("map is not homogeneous")
            elif e:
                d = degB[r] - degA[c]
                if found is None:
                    found = d
                elif found != d:
                    raise ValueError("map is not homogeneous")
    return found


def renorm_r(M: GradedModule, N: GradedModule, side="auto", aff=None):
    """Renormalized R-matrix r_{M,N}: M o N -> N o M over Q, with Lambda.

    One of M, N must carry an affinization: pass one explicitly via `aff`
    (with side 'left' or 'right'), or let `auto` try a generic one, then a
    single-letter / power one if the module is L(i)- or L(i^m)-shaped.
    """
    ctx = M.ctx
    if side == "auto":
        for s_, mod in (("left", M), ("right", N)):
            a = _find_affinization(mod)
            if a is not None:
                return renorm_r(M, N, s_, a)
        raise ValueError("no affinization available on either side")
    if aff is None:
        a = _find_affinization(M if side == "left" else N)
        if a is None:
            raise ValueError(f"no affinization available on side {side}")
        aff = a
    if side == "left":
        src, dst, mat = rr_matrix_raw(aff.module, N, ring=aff.ring)
        fsrc, fdst = convolve(aff.fiber, N), convolve(N, aff.fiber)
    else:
        src, dst, mat = rr_matrix_raw(M, aff.module, ring=aff.ring)
        fsrc, fdst = convolve(M, aff.fiber), convolve(aff.fiber, M)
    s = zmat_valuation(mat)
    if s is None:
        raise ValueError("R-matrix is identically zero (unexpected)")
    shifted = [[e.shift_down(s) if isinstance(e, ZPoly) else e for e in row] for row in mat]
    fib = zmat_at_zero(shifted)
    D = _map_degree(src, dst, mat, zdeg=aff.zdeg)
    lam = D - s * aff.zdeg
    # normalize: first nonzero entry (row-major over the fiber basis order) = 1
    raw_scalar = None
    for r in range(len(fib)):
        for c in range(len(fib[0]) if fib else 0):
            if fib[r][c]:
                raw_scalar = fib[r][c]
                break
        if raw_scalar is not None:
            break
    norm = [[e / raw_scalar for e in row] for row in fib]
    r_hom = _hom_from_matrix(fsrc, fdst, norm, lam)
    raw_hom = _hom_from_matrix(fsrc, fdst, fib, lam)
    return RResult(lam, s, r_hom, side, raw_scalar, fsrc, fdst, raw_hom)


def _find_affinization(M: GradedModule):
    ctx = M.ctx
    # L(i)^m shaped? single word (i,...,i)
    if len(M.words) == 1:
        w = M.words[0]
        if len(set(w)) == 1 and len(w) >= 1:
            i = w[0]
            m = len(w)
            d = ctx.cartan.root_pairing[i][i]
            if m == 1 and M.dim == 1:
                return affinize_letter(ctx, i)
            # L(i^m): dimension m!
            from math import factorial
            if M.dim == factorial(m):
                # default affinization W(i, t^m - z^m)
                coeffs = [ZPoly(()) for _ in range(m + 1)]
                coeffs[m] = ZPoly.const(1)
                coeffs[0] = ZPoly([0] * m + [-1])
                return affinize_power(ctx, i, m, coeffs)
    if ctx.q.is_translation_invariant() and len(set(ctx.cartan.norms)) == 1:
        return affinize_generic(M)
    return None


def lam_value(M, N, **kw):
    return renorm_r(M, N, **kw).lam


def lambda_tilde(M, N, **kw):
    from .cartan import bilinear
    lam = lam_value(M, N, **kw)
    wtM = _wt(M)
    wtN = _wt(N)
    return Fraction(lam + bilinear(wtM, wtN), 2)


def d_invariant(M, N, **kw):
    return Fraction(lam_value(M, N, **kw) + lam_value(N, M, **kw), 2)


def _wt(M):
    cartan = M.ctx.cartan
    w = cartan.zero_weight()
    for i, c in enumerate(M.beta):
        if c:
            w = w - cartan.alpha(i).scale(c)
    return w


# ---------------------------------------------------------------------------
# chi and lifted-epsilon polynomials

def _expand_z_rows(rows):
    """Split rows with ZPoly coefficients into one Fraction row per z-power.

    Solving the expanded system finds the kernel among constant vectors,
    which is all the lifted-epsilon machinery needs for the affinizations in
    scope (single letters and the L(i^m) quotient-ring models).
    """
    out = []
    for row in rows:
        if any(isinstance(v, ZPoly) for v in row.values()):
            by_power = {}
            for c, v in row.items():
                if isinstance(v, ZPoly):
                    for p, cc in enumerate(v.coeffs):
                        if cc:
                            by_power.setdefault(p, {})[c] = cc
                elif v:
                    by_power.setdefault(0, {})[c] = Fraction(v)
            out.extend(by_power.values())
        else:
            out.append(row)
    return out


def _divided_power_subspace_first(M: GradedModule, i, m):
    """E_i^{(m)} M inside e(m alpha_i, *) M: vectors killed by tau_0..tau_{m-2}."""
    from .linalg import sparse_nullspace
    idxs = []
    for w in M.words:
        if all(w[k] == i for k in range(m)):
            off = M.offset(w)
            idxs.extend(range(off, off + M.block_dim(w)))
    if not idxs:
        return []
    consts = []
    for k in range(m - 1):
        cols = []
        for gi in idxs:
            v = M.zero_vector()
            v[gi] = M.ring.one()
            img = M.apply_tau(k, v)
            cols.append(img)
        for r in range(M.dim):
            row = {}
            for c, img in enumerate(cols):
                if img[r]:
                    row[c] = img[r]
            if row:
                consts.append(row)
    basis = sparse_nullspace(_expand_z_rows(consts), len(idxs))
    out = []
    for b in basis:
        v = M.zero_vector()
        for c, gi in enumerate(idxs):
            v[gi] = M.ring.coerce(b[c])
        out.append(v)
    return out


def chi_lep(i, M: GradedModule):
    """(chi_i, lep_i, lep_i*) as coefficient lists (t^0..t^top) of scalars.

    Scalars are Fractions (base Q) or ZPoly (base Q[z]); each polynomial acts
    as a scalar on the relevant space, which is asserted.
    """
    from .modules import eps as eps_fn, eps_star as eps_star_fn
    n = M.n

    def scalar_of(matvecs, space):
        # matvecs: list of image vectors of the space basis; space: basis vectors
        # solve c with image = c * basis for each, assert consistent
        cval = None
        for b, img in zip(space, matvecs):
            # find c with img == c*b on the span? assert img is multiple of b
            c = None
            for x, y in zip(b, img):
                if x:
                    c = y * _inv(x) if not isinstance(y, ZPoly) else _zdiv(y, x)
                    break
            if c is None:
                continue
            chk = [_smul(c, x) for x in b]
            if chk != img:
                raise ValueError("polynomial does not act by a scalar")
            if cval is None:
                cval = c
            elif cval != c:
                raise ValueError("polynomial does not act by a single scalar")
        return cval if cval is not None else (M.ring.zero())

    # chi_i(M): prod over positions with word letter i of (t - x_k), per word block.
    # Every word of weight beta has beta_i letters i, so the t-degree is uniform
    # and the t^j coefficient is (-1)^{ei-j} e_{ei-j}(x at the i-positions).
    ei = M.beta[i] if i < len(M.beta) else 0
    chi = []
    basis_info = [(w, j) for w in M.words for j in range(M.block_dim(w))]
    basis = [M.basis_vector(w, j) for (w, j) in basis_info]
    for j in range(ei + 1):
        k = ei - j
        images = []
        for (w, jj), b in zip(basis_info, basis):
            positions = [p for p in range(n) if w[p] == i]
            img = _esym_apply(M, w, positions, k, b)
            images.append([((-1) ** k) * x for x in img])
        chi.append(scalar_of(images, basis))
    m = eps_fn(i, M)
    mstar = eps_star_fn(i, M)
    lep = _lep_poly(M, i, m, first=True)
    lepstar = _lep_poly(M, i, mstar, first=False)
    return chi, lep, lepstar


def _esym_apply(M, w, positions, k, vec):
    """Apply e_k(x at positions) to vec (supported handling per word w)."""
    from itertools import combinations
    out = M.zero_vector()
    if k == 0:
        return list(vec)
    for combo in combinations(positions, k):
        cur = list(vec)
        for p in combo:
            cur = M.apply_x(p, cur)
        for t in range(M.dim):
            if cur[t]:
                out[t] = out[t] + cur[t]
    return out


def _smul(c, x):
    return c * x


def _inv(x):
    return Fraction(1) / x


def _zdiv(y, x):
    # divide ZPoly y by ZPoly/Fraction x when x is a nonzero constant
    if isinstance(x, ZPoly):
        assert x.degree_in_z() == 0
        x = x.at_zero()
    return y * ZPoly.const(Fraction(1) / Fraction(x))


def _lep_poly(M, i, m, first=True):
    """Coefficients of (t - x_a)...(t - x_b) restricted to E_i^{(m)}-type subspace."""
    if m == 0:
        return [M.ring.one()]
    n = M.n
    if first:
        space = _divided_power_subspace_first(M, i, m)
        positions = list(range(m))
    else:
        space = _divided_power_subspace_last(M, i, m)
        positions = list(range(n - m, n))
    coeffs = []
    from itertools import combinations
    for j in range(m + 1):
        # coefficient of t^j: (-1)^{m-j} e_{m-j}(x at positions)
        k = m - j
        images = []
        for b in space:
            img = M.zero_vector()
            if k == 0:
                img = list(b)
            else:
                for combo in combinations(positions, k):
                    cur = list(b)
                    for p in combo:
                        cur = M.apply_x(p, cur)
                    for t in range(M.dim):
                        if cur[t]:
                            img[t] = img[t] + cur[t]
            images.append([((-1) ** k) * x for x in img])
        # scalar on the subspace (vectors not in coordinate form; compare proportionality)
        cval = None
        for b, img in zip(space, images):
            c = None
            for x, y in zip(b, img):
                if x:
                    c = _zdiv(y, x) if isinstance(y, ZPoly) else y / x
                    break
            if c is None:
                continue
            chk = [c * x for x in b]
            if chk != img:
                raise ValueError("lep polynomial does not act by a scalar")
            if cval is None:
                cval = c
            elif cval != c:
                raise ValueError("lep polynomial does not act by a single scalar")
        coeffs.append(cval if cval is not None else M.ring.zero())
    return coeffs


def _divided_power_subspace_last(M: GradedModule, i, m):
    from .linalg import sparse_nullspace
    n = M.n
    idxs = []
    for w in M.words:
        if all(w[n - 1 - k] == i for k in range(m)):
            off = M.offset(w)
            idxs.extend(range(off, off + M.block_dim(w)))
    if not idxs:
        return []
    consts = []
    for k in range(n - m, n - 1):
        cols = []
        for gi in idxs:
            v = M.zero_vector()
            v[gi] = M.ring.one()
            img = M.apply_tau(k, v)
            cols.append(img)
        for r in range(M.dim):
            row = {}
            for c, img in enumerate(cols):
                if img[r]:
                    row[c] = img[r]
            if row:
                consts.append(row)
    basis = sparse_nullspace(_expand_z_rows(consts), len(idxs))
    out = []
    for b in basis:
        v = M.zero_vector()
        for c, gi in enumerate(idxs):
            v[gi] = M.ring.coerce(b[c])
        out.append(v)
    return out
