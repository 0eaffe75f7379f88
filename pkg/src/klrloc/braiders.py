"""Graded braiders, determinantial modules, real commuting families, eta tables.

A braider structure on a simple module C is determined by its single-letter
values: the renormalized R-matrices C o L~(i) -> L~(i) o C over Q[z], scaled
by free recorded constants.  Evaluation on an arbitrary simple N descends the
hexagon composite through a crystal presentation L(i) o N_0 ->> N; the
solved-for map is verified against the commuting square exactly.
"""

from __future__ import annotations

from fractions import Fraction

from .cartan import Weight, bilinear, canonical_word, positive_roots_of, weyl_act, cone_membership
from .conv import (
    Affinization,
    ConvModule,
    affinize_letter,
    cached_conv,
    convolve,
    letter,
    regroup_iso,
    renorm_r,
    rr_matrix_raw,
    sandwich,
    thick,
    unit_module,
    _map_degree,
)
from .linalg import identity, rank, solve_right_factor, transpose, zeros, zmat_valuation
from .modules import GradedModule, ModuleHom, eps_star, hom_space, restrict_last, word_swap
from .rings import QQ, ZPoly
from .simples import (
    SimplesTable,
    self_dual_normalize,
    simples_up_to,
    socle,
    isomorphic,
)


# ---------------------------------------------------------------------------
# braiders

class GradedBraider:
    """(C, R_C, phi): a braider in R gmod built from single-letter data."""

    def __init__(self, C: GradedModule, name=""):
        self.C = C
        self.ctx = C.ctx
        self.name = name or "C"
        self.letters = {}        # i -> dict(s=..., zmat=..., zsrc=..., zdst=..., scalar=...)
        self.phi_alpha = {}      # i -> phi(alpha_i)
        self._eval_cache = {}
        self._thick_cache = {}

    # -- phi as a linear map on the root lattice ------------------------------

    def phi(self, beta_coords):
        return sum(int(c) * self.phi_alpha[i] for i, c in enumerate(beta_coords))

    def phi_weight(self, M: GradedModule):
        return self.phi(M.beta)

    # -- single letters --------------------------------------------------------

    def eval_thick_letter(self, i, ell):
        key = (i, ell)
        if key in self._thick_cache:
            return self._thick_cache[key]
        data = self.letters[i]
        T = thick(self.ctx, i, ell)
        tsrc = cached_conv(self.C, T)
        tdst = cached_conv(T, self.C)
        zsrc, zdst, zmat = data["zsrc"], data["zdst"], data["zmat"]
        mat = zeros(tdst.dim, tsrc.dim, QQ)
        for key2 in tsrc.pos:
            sh, words, idxs = key2
            jC, k = idxs
            col = tsrc.basis_index(key2)
            zcol = zsrc.basis_index((sh, words, (jC, 0)))
            for r in range(zdst.dim):
                e = zmat[r][zcol]
                if isinstance(e, ZPoly):
                    coeffs = e.coeffs
                elif e:
                    coeffs = (Fraction(e),)
                else:
                    continue
                sh2, words2, idxs2 = _entry(zdst, r)
                for pwr, cc in enumerate(coeffs):
                    if not cc:
                        continue
                    t = pwr + k
                    if t >= ell:
                        continue
                    pos2 = list(idxs2)
                    # the thick-letter factor index is the z-power
                    lf = 0 if words2[0] == (i,) and zdst.factors[0].dim == 1 else 1
                    # locate the letter factor: it is the one with word (i,) and rank 1
                    lf = 0 if zdst.factors[0].n == 1 else 1
                    pos2[lf] = t
                    row = tdst.basis_index((sh2, words2, tuple(pos2)))
                    mat[row][col] = mat[row][col] + data["scalar"] * cc
        deg = _map_degree(tsrc, tdst, mat)
        hom = ModuleHom(tsrc, tdst, deg if deg is not None else data["lam"], _blocks(tsrc, tdst, mat))
        self._thick_cache[key] = hom
        return hom

    # -- evaluation on simples via crystal descent -----------------------------

    def eval_simple(self, N: GradedModule, table: SimplesTable):
        key = id(N)
        if key in self._eval_cache:
            return self._eval_cache[key]
        ctx = self.ctx
        if N.n == 0:
            src = cached_conv(self.C, N)
            dst = cached_conv(N, self.C)
            mat = _basis_transport(src, dst, lambda k: (k[0], (k[1][1], k[1][0]), (k[2][1], k[2][0])))
            hom = ModuleHom(src, dst, 0, _blocks(src, dst, mat))
        elif N.n == 1 and N.dim == 1:
            i = N.words[0][0]
            base = self.eval_thick_letter(i, 1)
            src = cached_conv(self.C, N)
            dst = cached_conv(N, self.C)
            hom = _copy_hom(base, src, dst)
        else:
            found = table.find(N)
            assert found is not None, "simple not in the table"
            lbl, S, shift = found
            assert S is N, "braider evaluation expects table-canonical simples"
            i = lbl[-1]
            beta0 = list(N.beta)
            beta0[i] -= 1
            N0 = None
            for idx, cand in enumerate(table.of_weight(tuple(beta0))):
                if table.labels[(tuple(beta0), idx)] == lbl[:-1]:
                    N0 = cand
                    break
            assert N0 is not None
            Li = letter(ctx, i)
            P = cached_conv(Li, N0)
            pis = [h for h in hom_space(P, N) if not h.is_zero()]
            assert pis, "no projection from the crystal presentation"
            pi = pis[0]
            src3 = cached_conv(self.C, Li, N0)
            mid3 = cached_conv(Li, self.C, N0)
            dst3 = cached_conv(Li, N0, self.C)
            g1 = _copy_hom(self.eval_thick_letter(i, 1), cached_conv(self.C, Li), cached_conv(Li, self.C))
            step1 = sandwich(src3, 0, 1, g1, mid3, 0, 1)
            g2 = self.eval_simple(N0, table)
            step2 = sandwich(mid3, 1, 2, g2, dst3, 1, 2)
            RP = step2.compose(step1)
            CN = cached_conv(self.C, N)
            NC = cached_conv(N, self.C)
            Cpi = sandwich(src3, 1, 2, pi, CN, 1, 1)
            piC = sandwich(dst3, 0, 1, pi, NC, 0, 0)
            A = Cpi.matrix()
            B = piC.compose(RP).matrix()
            X = solve_right_factor(A, B)
            if X is None:
                raise RuntimeError("braider descent failed (internal consistency error)")
            # exact verification of the commuting square
            from .linalg import mat_mul
            assert mat_mul(X, A) == B, "braider descent does not commute"
            deg = _map_degree(CN, NC, X)
            hom = ModuleHom(CN, NC, deg if deg is not None else 0, _blocks(CN, NC, X))
        self._eval_cache[key] = hom
        return hom

    def eval_conv_factors(self, factors, table):
        """R_C on a convolution given by its factor list (hexagon composite).

        Returns a ModuleHom cached_conv(C, *factors) -> cached_conv(*factors, C).
        Factors must each be table-canonical simples, letters, or thicks.
        """
        ctx = self.ctx
        cur_factors = [self.C] + list(factors)
        src = cached_conv(*cur_factors)
        total = None
        for p in range(len(factors)):
            # swap C (at position p) past factors[p]
            F = factors[p]
            g = self._eval_factor(F, table)
            nxt_factors = cur_factors[:p] + [F, self.C] + cur_factors[p + 2:]
            dst = cached_conv(*nxt_factors)
            step = sandwich(cached_conv(*cur_factors), p, p + 1, g, dst, p, p + 1)
            total = step if total is None else step.compose(total)
            cur_factors = nxt_factors
        if total is None:
            # no factors: C o 1
            return ModuleHom.identity_hom(src)
        return total

    def _eval_factor(self, F, table):
        ctx = self.ctx
        if F.n == 1 and F.dim == 1:
            return _copy_hom(self.eval_thick_letter(F.words[0][0], 1),
                             cached_conv(self.C, F), cached_conv(F, self.C))
        if F.n == 1 and len(F.words) == 1:
            # thick letter
            i = F.words[0][0]
            return _copy_hom(self.eval_thick_letter(i, F.dim),
                             cached_conv(self.C, F), cached_conv(F, self.C))
        return self.eval_simple(F, table)

    def eval_module(self, X: GradedModule, table):
        """R_C(X) for any finite-dimensional X.

        Simples go through the crystal descent, convolutions through the
        hexagon, and everything else through a presentation by convolutions
        of thick letters (every module is such a quotient since the x's act
        nilpotently).
        """
        if isinstance(X, ConvModule):
            fine = self.eval_conv_factors(list(X.factors), table)
            src2 = cached_conv(self.C, X)
            dst2 = cached_conv(X, self.C)
            t = len(X.factors)
            reg_src = regroup_iso(fine.source, [(0, 0), (1, t)], src2)
            reg_dst = regroup_iso(fine.target, [(0, t - 1), (t, t)], dst2)
            inv = _invert_hom(reg_src)
            return reg_dst.compose(fine).compose(inv)
        if X.n == 0:
            return self.eval_simple(X, table)
        if X.n == 1 and len(X.words) == 1 and len(set(X.words[0])) == 1:
            i = X.words[0][0]
            return _copy_hom(self.eval_thick_letter(i, X.dim),
                             cached_conv(self.C, X), cached_conv(X, self.C))
        found = table.find(X)
        if found is not None and found[1] is X:
            return self.eval_simple(X, table)
        return self.eval_general(X, table)

    def eval_general(self, X: GradedModule, table):
        """Descent of R_C through a presentation by thick-letter convolutions."""
        key = ("gen", id(X))
        if key in self._eval_cache:
            return self._eval_cache[key]
        ctx = self.ctx
        from .linalg import SpanBuilder, mat_mul
        # homogeneous generating set (greedy by degree)
        order = sorted(
            ((w, j) for w in X.words for j in range(X.block_dim(w))),
            key=lambda t: (X.blocks[t[0]][t[1]], t[0], t[1]),
        )
        span = SpanBuilder(X.dim)
        gens = []
        for (w, j) in order:
            v = X.basis_vector(w, j)
            if span.contains(v):
                continue
            gens.append((w, j))
            frontier = [v]
            span.add(v)
            while frontier:
                nxt = []
                for u in frontier:
                    for k in range(X.n):
                        img = X.apply_x(k, u)
                        if any(img) and span.add(img):
                            nxt.append(img)
                    for k in range(X.n - 1):
                        img = X.apply_tau(k, u)
                        if any(img) and span.add(img):
                            nxt.append(img)
                frontier = nxt
        CN = cached_conv(self.C, X)
        NC = cached_conv(X, self.C)
        Acols, Bcols = [], []
        for (w, j) in gens:
            u = X.basis_vector(w, j)
            ells = []
            for k in range(X.n):
                e, cur = 0, u
                while any(cur):
                    cur = X.apply_x(k, cur)
                    e += 1
                ells.append(e)
            thicks = [thick(ctx, w[k], ells[k]) for k in range(X.n)]
            P = cached_conv(*thicks)
            # pi: P ->> submodule generated by u
            from .linalg import zeros as zz
            pim = zz(X.dim, P.dim)
            for pkey in P.pos:
                sh, words, idxs = pkey
                exps = tuple(idxs)
                img = X.apply_term(sh, exps, w, u)
                col = P.basis_index(pkey)
                for r in range(X.dim):
                    pim[r][col] = img[r]
            pi = ModuleHom(P, X, _map_degree(P, X, pim) or 0, _blocks(P, X, pim))
            RP = self.eval_module(P, table)
            CP = cached_conv(self.C, P)
            PC = cached_conv(P, self.C)
            Cpi = sandwich(CP, 1, 1, pi, CN, 1, 1)
            piC = sandwich(PC, 0, 0, pi, NC, 0, 0)
            Acols.append(Cpi.matrix())
            Bcols.append(piC.compose(RP).matrix())
        A = [sum((list(Ac[r]) for Ac in Acols), []) for r in range(CN.dim)]
        B = [sum((list(Bc[r]) for Bc in Bcols), []) for r in range(NC.dim)]
        Xmat = solve_right_factor(A, B)
        if Xmat is None:
            raise RuntimeError("general braider descent failed (internal consistency error)")
        from .linalg import mat_mul as mm
        assert mm(Xmat, A) == B, "general braider descent does not commute"
        deg = _map_degree(CN, NC, Xmat)
        hom = ModuleHom(CN, NC, deg if deg is not None else 0, _blocks(CN, NC, Xmat))
        self._eval_cache[key] = hom
        return hom


def _entry(conv: ConvModule, idx):
    kappa, i = conv.word_of_index(idx)
    return conv.entries[kappa][i]


def _blocks(src, dst, mat):
    blocks = {}
    for w in src.words:
        if w in dst.blocks:
            ro, co = dst.offset(w), src.offset(w)
            blocks[w] = [row[co:co + src.block_dim(w)] for row in mat[ro:ro + dst.block_dim(w)]]
    return blocks


def _basis_transport(src: ConvModule, dst: ConvModule, keymap):
    mat = zeros(dst.dim, src.dim, dst.ring)
    for key in src.pos:
        col = src.basis_index(key)
        row = dst.basis_index(keymap(key))
        mat[row][col] = dst.ring.one()
    return mat


def _copy_hom(hom: ModuleHom, src, dst):
    """Reinterpret a hom between convolutions over identical block data."""
    assert src.blocks == hom.source.blocks and dst.blocks == hom.target.blocks
    return ModuleHom(src, dst, hom.degree, hom.blocks)


def _invert_hom(hom: ModuleHom):
    from .linalg import inverse
    blocks = {}
    for w, m in hom.blocks.items():
        if not m:
            continue
        inv = inverse(m)
        assert inv is not None, "regrouping iso is not invertible"
        blocks[w] = inv
    return ModuleHom(hom.target, hom.source, -hom.degree, blocks)


def braider_from(C: GradedModule, letter_scalars=None, name="C"):
    """Non-degenerate graded braider on the simple module C.

    letter_scalars (i -> nonzero rational) are the free normalization
    constants; the recorded values enter the eta identities.
    """
    ctx = C.ctx
    br = GradedBraider(C, name)
    n = ctx.cartan.n
    scal = {i: Fraction(1) for i in range(n)}
    if letter_scalars:
        for i, c in dict(letter_scalars).items():
            c = Fraction(c)
            if not c:
                raise ValueError("letter scalars must be nonzero")
            scal[i] = c
    for i in range(n):
        aff = affinize_letter(ctx, i)
        src, dst, mat = rr_matrix_raw(C, aff.module, ring=aff.ring)
        s = zmat_valuation(mat)
        assert s is not None, "single-letter R-matrix vanished identically"
        zmat = [[e.shift_down(s) if isinstance(e, ZPoly) else e for e in row] for row in mat]
        D = _map_degree(src, dst, mat, zdeg=aff.zdeg)
        lam = D - s * aff.zdeg
        br.letters[i] = {"s": s, "zmat": zmat, "zsrc": src, "zdst": dst, "scalar": scal[i], "lam": lam}
        br.phi_alpha[i] = -lam
    return br


# ---------------------------------------------------------------------------
# determinantial modules

class DetSpec:
    """Data (Lambda, w, v) for the determinantial module M(w Lambda, v Lambda)."""

    def __init__(self, ctx, Lambda_coeffs, w_word, v_word=()):
        self.ctx = ctx
        cartan = ctx.cartan
        self.Lambda_coeffs = tuple(int(c) for c in Lambda_coeffs)
        if any(c < 0 for c in self.Lambda_coeffs):
            raise ValueError("Lambda must be dominant")
        self.w_word = tuple(w_word)
        self.v_word = tuple(v_word)
        self.Lambda = cartan.zero_weight()
        for i, c in enumerate(self.Lambda_coeffs):
            if c:
                self.Lambda = self.Lambda + cartan.Lambda(i).scale(c)
        from .cartan import bruhat_leq
        if not bruhat_leq(cartan, self.v_word, self.w_word):
            raise ValueError("need v <= w in Bruhat order")
        # divided powers along w
        self.m = []
        for k in range(len(self.w_word)):
            rest = self.w_word[k + 1:]
            mk = weyl_act(cartan, rest, self.Lambda).pairing(self.w_word[k])
            if mk < 0 or mk != int(mk):
                raise ValueError("invalid divided power along w")
            self.m.append(int(mk))
        self.nv = []
        for k in range(len(self.v_word)):
            rest = self.v_word[k + 1:]
            nk = weyl_act(cartan, rest, self.Lambda).pairing(self.v_word[k])
            if nk < 0 or nk != int(nk):
                raise ValueError("invalid divided power along v")
            self.nv.append(int(nk))

    @property
    def lam(self):
        return weyl_act(self.ctx.cartan, self.w_word, self.Lambda)

    @property
    def mu(self):
        return weyl_act(self.ctx.cartan, self.v_word, self.Lambda)


def detmod(spec: DetSpec):
    """M(w Lambda, v Lambda) via crystal operators and star-extraction."""
    from .simples import crystal_f
    ctx = spec.ctx
    M = unit_module(ctx)
    for k in range(len(spec.w_word) - 1, -1, -1):
        i = spec.w_word[k]
        for _ in range(spec.m[k]):
            M = crystal_f(i, M)
    # extract along v (innermost = last letter of v first)
    for k in range(len(spec.v_word) - 1, -1, -1):
        j = spec.v_word[k]
        for _ in range(spec.nv[k]):
            E = restrict_last(M, j)
            assert E is not None and E.dim > 0, "star extraction hit zero"
            table = simples_up_to(ctx, sum(E.beta))
            M = self_dual_normalize(socle(E, simples_by_weight=table.of_weight(E.beta)))
    return M


def frozen(ctx, w_word, i):
    """C_i = M(w Lambda_i, Lambda_i); the unit module when w Lambda_i = Lambda_i."""
    coeffs = tuple(1 if j == i else 0 for j in range(ctx.cartan.n))
    spec = DetSpec(ctx, coeffs, w_word)
    if spec.lam == spec.Lambda:
        return unit_module(ctx)
    return detmod(spec)


def in_Cw(M: GradedModule, w_word):
    """Membership in C_w: gW(M) inside the cone over Delta_+ cap w Delta_-."""
    from .modules import gW
    ctx = M.ctx
    gens = positive_roots_of(ctx.cartan, canonical_word(ctx.cartan, w_word))
    for coords in gW(M):
        gamma = Weight(ctx.cartan, root=coords)
        if not cone_membership(gens, gamma):
            return False
    return True


def verify_cuspidal(L: GradedModule, order, proposal):
    """Check that `proposal` is the cuspidal decomposition of L for `order`."""
    from .modules import gW
    from .simples import hconv as hconv_fn, isomorphic as iso_fn
    ctx = L.ctx
    cartan = ctx.cartan
    # cuspidality of each factor
    for Lk in proposal:
        beta = Weight(cartan, root=Lk.beta)
        try:
            order._ray(beta)
        except ValueError:
            return False
        below = [g for g in order.root_sequence if order.compare(g, beta) != order.GREATER]
        # tail roots are all above the listed sequence; a tail beta needs everything
        for coords in gW(Lk):
            gamma = Weight(cartan, root=coords)
            if not cone_membership(below, gamma):
                return False
    # weights strictly descending
    for a, b in zip(proposal, proposal[1:]):
        wa = Weight(cartan, root=a.beta)
        wb = Weight(cartan, root=b.beta)
        if order.compare(wa, wb) != order.GREATER:
            return False
    # head isomorphism
    cur = proposal[0]
    for nxt in proposal[1:]:
        cur = hconv_fn(cur, nxt)
    return iso_fn(cur, L, up_to_shift=True)


# ---------------------------------------------------------------------------
# families, eta tables, power objects

class BraiderFamily:
    def __init__(self, ctx, index_list, braiders, table, H=None):
        """index_list: sorted member indices; braiders: {a: GradedBraider}."""
        self.ctx = ctx
        self.index = list(index_list)
        self.braiders = dict(braiders)
        self.table = table
        self.eta = None
        self._power_cache = {}
        self._xi_cache = {}
        if H is None:
            H = {}
            for a in self.index:
                for b in self.index:
                    if a < b:
                        H[(a, b)] = self.braiders[a].phi(self.braiders[b].C.beta)
                    else:
                        H[(a, b)] = 0
        self.H = H

    def module(self, a):
        return self.braiders[a].C

    def grading(self, a):
        return self.module(a).beta

    def Hform(self, alpha, beta):
        acc = 0
        for ai, a in enumerate(self.index):
            for bi, b in enumerate(self.index):
                acc += alpha[ai] * beta[bi] * self.H.get((a, b), 0)
        return acc

    def phi_of(self, alpha, beta_coords):
        """phi_{C^alpha}(beta) = sum alpha_a phi_a(beta)."""
        acc = 0
        for ai, a in enumerate(self.index):
            acc += alpha[ai] * self.braiders[a].phi(beta_coords)
        return acc

    def real_commuting_check(self):
        for a in self.index:
            for b in self.index:
                s = self.braiders[a].phi(self.grading(b)) + self.braiders[b].phi(self.grading(a))
                if s != 0:
                    return False, (a, b, s)
        return True, None

    def compute_eta(self):
        """eta_{ab} from the evaluated braider scalars."""
        if self.eta is not None:
            return self.eta
        ok, witness = self.real_commuting_check()
        if not ok:
            raise ValueError(f"family is not real commuting: {witness}")
        eta = {}
        for ai, a in enumerate(self.index):
            Ca = self.module(a)
            Raa = self.braiders[a].eval_simple(Ca, self.table)
            c = _scalar_of_endo(Raa)
            eta[(a, a)] = c
            for b in self.index:
                if b <= a:
                    continue
                Cb = self.module(b)
                Rab = self.braiders[a].eval_simple(Cb, self.table)   # C_a o C_b -> C_b o C_a
                Rba = self.braiders[b].eval_simple(Ca, self.table)   # C_b o C_a -> C_a o C_b
                comp = _compose_matching(Rba, Rab)
                cab = _scalar_of_endo(comp)
                eta[(a, b)] = cab
                eta[(b, a)] = Fraction(1)
        self.eta = eta
        return eta

    def eta_pairing(self, alpha, beta):
        """eta(alpha, beta) = prod eta_{ab}^{alpha_a beta_b}."""
        eta = self.compute_eta()
        acc = Fraction(1)
        for ai, a in enumerate(self.index):
            for bi, b in enumerate(self.index):
                e = alpha[ai] * beta[bi]
                if e:
                    acc *= eta[(a, b)] ** e
        return acc

    # -- power objects ----------------------------------------------------------

    def factor_list(self, alpha):
        out = []
        for ai, a in enumerate(self.index):
            out.extend([a] * alpha[ai])
        return out

    def power_object(self, alpha):
        """(conv module, q-shift) for C^alpha (alpha in Z_{>=0}^I)."""
        alpha = tuple(int(x) for x in alpha)
        if any(x < 0 for x in alpha):
            raise ValueError("negative entry in a power-object exponent")
        key = alpha
        if key in self._power_cache:
            return self._power_cache[key]
        facs = [self.module(a) for a in self.factor_list(alpha)]
        if not facs:
            mod = unit_module(self.ctx)
            self._power_cache[key] = (mod, 0)
            return (mod, 0)
        if len(facs) == 1:
            self._power_cache[key] = (facs[0], 0)
            return (facs[0], 0)
        mod = cached_conv(*facs)
        shift = self._power_shift(alpha)
        self._power_cache[key] = (mod, shift)
        return (mod, shift)

    def _power_shift(self, alpha):
        # c(alpha) with c(e_i) = 0, c(alpha + e_j) = c(alpha) - H(alpha, e_j)
        # when j is appended in sorted order (no sorting map needed).
        total = 0
        seen = [0] * len(self.index)
        for ai, a in enumerate(self.index):
            for _ in range(alpha[ai]):
                total -= self.Hform(tuple(seen), tuple(1 if t == ai else 0 for t in range(len(self.index))))
                seen[ai] += 1
        return total

    def normalized_swap(self, a, b):
        """\\hat B_{ab} = eta_{ab}^{-1} R_{C_a}(C_b): conv(C_a,C_b) -> conv(C_b,C_a)."""
        eta = self.compute_eta()
        R = self.braiders[a].eval_simple(self.module(b), self.table)
        return R.scale(Fraction(1) / eta[(a, b)])

    def xi_sort(self, seq):
        """Sorting map conv(C_{seq}) -> conv(C_{sorted seq}) via normalized swaps.

        Returns (ModuleHom, None); identity when already sorted.
        """
        seq = list(seq)
        facs = [self.module(a) for a in seq]
        src = cached_conv(*facs) if len(facs) > 1 else (facs[0] if facs else unit_module(self.ctx))
        cur_seq = list(seq)
        total = None
        changed = True
        while changed:
            changed = False
            for p in range(len(cur_seq) - 1):
                if cur_seq[p] > cur_seq[p + 1]:
                    a, b = cur_seq[p], cur_seq[p + 1]
                    g = self.normalized_swap(a, b)
                    src_facs = [self.module(x) for x in cur_seq]
                    new_seq = cur_seq[:p] + [b, a] + cur_seq[p + 1:][1:]
                    dst_facs = [self.module(x) for x in new_seq]
                    if len(cur_seq) == 2:
                        step = g
                    else:
                        step = sandwich(cached_conv(*src_facs), p, p + 1, g,
                                        cached_conv(*dst_facs), p, p + 1)
                    total = step if total is None else step.compose(total)
                    cur_seq = new_seq
                    changed = True
                    break
        if total is None:
            if len(facs) > 1:
                total = ModuleHom.identity_hom(src)
            else:
                total = ModuleHom.identity_hom(src)
        return total

    def xi(self, alpha, beta):
        """xi_{alpha,beta}: C^alpha o C^beta -> q^{H(alpha,beta)} C^{alpha+beta}.

        Returned as a ModuleHom between the underlying convolutions together
        with the degree ledger handled by the caller through power shifts.
        """
        key = (tuple(alpha), tuple(beta))
        if key in self._xi_cache:
            return self._xi_cache[key]
        seq = self.factor_list(alpha) + self.factor_list(beta)
        hom = self.xi_sort(seq)
        self._xi_cache[key] = hom
        return hom


def _scalar_of_endo(hom: ModuleHom):
    """The scalar c with hom = c . id (source and target share block data)."""
    c = None
    for w, m in hom.blocks.items():
        d = len(m)
        for r in range(d):
            for s in range(len(m[r]) if m else 0):
                want = m[r][s]
                if r == s:
                    if c is None and want:
                        c = want
                    elif want and c != want:
                        raise ValueError("endomorphism is not scalar")
                elif want:
                    raise ValueError("endomorphism is not scalar")
    if c is None:
        raise ValueError("zero endomorphism where a scalar was expected")
    return c


def _compose_matching(g: ModuleHom, f: ModuleHom):
    """g o f across equal-but-distinct conv instances (same block data)."""
    assert f.target.blocks == g.source.blocks
    f2 = ModuleHom(f.source, g.source, f.degree, f.blocks)
    return g.compose(f2)


def canonical_family(ctx, w_word, table_height=0):
    """The frozen-module family {(C_i, R_{C_i}, phi_i)} for the Weyl element w."""
    cartan = ctx.cartan
    w_word = canonical_word(cartan, w_word)
    index = []
    fro = {}
    for i in range(cartan.n):
        lam_i = weyl_act(cartan, w_word, cartan.Lambda(i))
        if lam_i != cartan.Lambda(i):
            index.append(i)
            fro[i] = frozen(ctx, w_word, i)
    maxht = max(max((sum(f.beta) for f in fro.values()), default=0), table_height)
    table = simples_up_to(ctx, maxht)
    # use table instances for the frozen modules
    braiders = {}
    for i in index:
        found = table.find(fro[i])
        assert found is not None, "frozen module missing from the simples table"
        _, S, shift = found
        assert shift == 0, "frozen module should be self-dual normalized"
        braiders[i] = braider_from(S, name=f"C_{i + 1}")
    # verify phi_i = -(lambda_i, .)
    for i in index:
        lam_i = weyl_act(cartan, w_word, cartan.Lambda(i)) + cartan.Lambda(i)
        for j in range(cartan.n):
            expected = -bilinear(lam_i, cartan.alpha(j))
            got = braiders[i].phi_alpha[j]
            assert got == expected, f"phi_{i}(alpha_{j}) = {got} != {expected}"
    H = {}
    for a in index:
        for b in index:
            wLb = weyl_act(cartan, w_word, cartan.Lambda(b))
            H[(a, b)] = int(bilinear(cartan.Lambda(a), wLb - cartan.Lambda(b)))
    return BraiderFamily(ctx, index, braiders, table, H=H)
