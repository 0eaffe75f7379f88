"""The graded localization: objects (X, alpha), stabilized hom-sets, duals.

Objects carry a module, an exponent vector over the family index, and a
grading shift.  Morphisms are represented at a level delta by module
homomorphisms C^{delta+alpha} o X -> Y o C^{delta+beta}; pushing up levels
(zeta), composition (with the eta correction), and tensor products follow
the graded construction, with every degree identity asserted exactly.
"""

from __future__ import annotations

from fractions import Fraction

from .braiders import BraiderFamily, frozen, canonical_family
from .cartan import bilinear, canonical_word, weyl_act
from .conv import (
    ConvModule,
    cached_conv,
    invert_hom,
    letter,
    regroup_iso,
    renorm_r,
    sandwich,
    thick,
    unit_module,
    _map_degree,
)
from .linalg import SpanBuilder, rank, solve_right_factor, zeros
from .modules import GradedModule, ModuleHom, dual, eps_star, hom_space, restrict_last, word_swap
from .simples import (
    find_isomorphism,
    hconv,
    isomorphic,
    self_dual_normalize,
    simples_up_to,
    socle,
)


class LocObject:
    __slots__ = ("module", "alpha", "shift")

    def __init__(self, module: GradedModule, alpha, shift=0):
        self.module = module
        self.alpha = tuple(int(a) for a in alpha)
        self.shift = int(shift)

    def __repr__(self):
        return f"LocObject(beta={self.module.beta}, alpha={self.alpha}, shift={self.shift})"


class LocHom:
    def __init__(self, loc, src: LocObject, dst: LocObject, delta, F: ModuleHom):
        self.loc = loc
        self.src = src
        self.dst = dst
        self.delta = tuple(int(d) for d in delta)
        self.F = F

    @property
    def tdeg(self):
        loc = self.loc
        fam = loc.fam
        da = _vadd(self.delta, self.src.alpha)
        db = _vadd(self.delta, self.dst.alpha)
        ca = loc.power_shift(da)
        cb = loc.power_shift(db)
        mu = self.dst.module.beta
        return (
            self.F.degree
            - ca
            + cb
            + fam.Hform(self.delta, _vsub(self.dst.alpha, self.src.alpha))
            + fam.phi_of(db, mu)
            - self.src.shift
            + self.dst.shift
        )

    def is_zero(self):
        return self.F.is_zero()

    def scale(self, c):
        return LocHom(self.loc, self.src, self.dst, self.delta, self.F.scale(c))

    def __repr__(self):
        return f"LocHom(delta={self.delta}, tdeg={self.tdeg}, zero={self.is_zero()})"


def _vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _vmax0(a):
    return tuple(max(x, 0) for x in a)


class LocContext:
    """Localization of the ambient category at a real commuting braider family."""

    def __init__(self, family: BraiderFamily, cap=8):
        self.fam = family
        self.ctx = family.ctx
        self.cap = cap
        self.table = family.table
        self._rpow_cache = {}
        self._xi_cache = {}

    # -- power objects ---------------------------------------------------------

    def nI(self):
        return len(self.fam.index)

    def zero_vec(self):
        return (0,) * self.nI()

    def basis_vec(self, a):
        return tuple(1 if x == a else 0 for x in self.fam.index)

    def power(self, gamma):
        return self.fam.power_object(gamma)

    def power_shift(self, gamma):
        return self.power(gamma)[1]

    def power_module(self, gamma):
        return self.power(gamma)[0]

    # -- structural maps ---------------------------------------------------------

    def unit_absorb_left(self, X):
        """conv(1, X) -> X (canonical)."""
        src = cached_conv(unit_module(self.ctx), X)
        mat = zeros(X.dim, src.dim, X.ring)
        for key in src.pos:
            sh, words, idxs = key
            col = src.basis_index(key)
            row = X.offset(words[1]) + idxs[1]
            mat[row][col] = X.ring.one()
        return ModuleHom(src, X, 0, _blk(src, X, mat))

    def unit_absorb_right(self, X):
        src = cached_conv(X, unit_module(self.ctx))
        mat = zeros(X.dim, src.dim, X.ring)
        for key in src.pos:
            sh, words, idxs = key
            col = src.basis_index(key)
            row = X.offset(words[0]) + idxs[0]
            mat[row][col] = X.ring.one()
        return ModuleHom(src, X, 0, _blk(src, X, mat))

    def xi_map(self, gamma, eps):
        """xi: conv(P(gamma), P(eps)) -> P(gamma+eps) as a ModuleHom."""
        key = (tuple(gamma), tuple(eps))
        if key in self._xi_cache:
            return self._xi_cache[key]
        fam = self.fam
        Pg, Pe = self.power_module(gamma), self.power_module(eps)
        tot = _vadd(gamma, eps)
        Pt = self.power_module(tot)
        if sum(gamma) == 0:
            out = self.unit_absorb_left(Pe)
        elif sum(eps) == 0:
            out = self.unit_absorb_right(Pg)
        else:
            seq = fam.factor_list(gamma) + fam.factor_list(eps)
            facs = [fam.module(a) for a in seq]
            fine = cached_conv(*facs)
            co = cached_conv(Pg, Pe)
            kg = len(fam.factor_list(gamma))
            grouping = [(0, kg - 1), (kg, len(facs) - 1)]
            reg = regroup_iso(fine, grouping, co)
            sortmap = fam.xi(gamma, eps)  # fine -> sorted fine (= Pt when len > 1)
            if len(facs) == 1:
                base = sortmap
            else:
                base = sortmap
            out = base.compose(invert_hom(reg))
            if out.target is not Pt and out.target.blocks == Pt.blocks:
                out = ModuleHom(out.source, Pt, out.degree, out.blocks)
        self._xi_cache[key] = out
        return out

    def R_power(self, gamma, Y):
        """R_{C^gamma}(Y): conv(P(gamma), Y) -> conv(Y, P(gamma))."""
        key = (tuple(gamma), id(Y))
        if key in self._rpow_cache:
            return self._rpow_cache[key]
        fam = self.fam
        Pg = self.power_module(gamma)
        if sum(gamma) == 0:
            src = cached_conv(Pg, Y)
            dst = cached_conv(Y, Pg)
            mat = zeros(dst.dim, src.dim, dst.ring)
            for k in src.pos:
                sh, words, idxs = k
                mat[dst.basis_index((sh, (words[1], words[0]), (idxs[1], idxs[0])))][src.basis_index(k)] = dst.ring.one()
            out = ModuleHom(src, dst, 0, _blk(src, dst, mat))
            self._rpow_cache[key] = out
            return out
        seq = fam.factor_list(gamma)
        facs = [fam.module(a) for a in seq]
        cur = facs + [Y]
        total = None
        # move Y left one swap at a time
        for p in range(len(facs) - 1, -1, -1):
            a = seq[p]
            g = fam.braiders[a].eval_module(Y, self.table)
            src_facs = cur[:p] + [facs[p], Y] + cur[p + 2:]
            dst_facs = cur[:p] + [Y, facs[p]] + cur[p + 2:]
            step = sandwich(cached_conv(*src_facs), p, p + 1, g, cached_conv(*dst_facs), p, p + 1)
            total = step if total is None else step.compose(total)
            cur = dst_facs
        fine_src = cached_conv(*(facs + [Y]))
        fine_dst = cached_conv(*([Y] + facs))
        src2 = cached_conv(Pg, Y)
        dst2 = cached_conv(Y, Pg)
        k = len(facs)
        if k == 1:
            out = ModuleHom(src2, dst2, total.degree, total.blocks)
        else:
            regS = regroup_iso(fine_src, [(0, k - 1), (k, k)], src2)
            regD = regroup_iso(fine_dst, [(0, 0), (1, k)], dst2)
            out = regD.compose(total).compose(invert_hom(regS))
        assert out.degree == -self.fam.phi_of(gamma, Y.beta), "R_power degree mismatch"
        self._rpow_cache[key] = out
        return out

    # -- hom sets -----------------------------------------------------------------

    def hom_at(self, delta, A: LocObject, B: LocObject):
        """All LocHoms at the given level (graded basis)."""
        delta = tuple(delta)
        da, db = _vadd(delta, A.alpha), _vadd(delta, B.alpha)
        if any(x < 0 for x in da) or any(x < 0 for x in db):
            raise ValueError("level not admissible for these objects")
        S = cached_conv(self.power_module(da), A.module)
        T = cached_conv(B.module, self.power_module(db))
        if S.beta != T.beta:
            return []
        return [LocHom(self, A, B, delta, h) for h in hom_space(S, T)]

    def identity_hom(self, A: LocObject, delta=None):
        if delta is None:
            delta = _vmax0(tuple(-x for x in A.alpha))
        da = _vadd(delta, A.alpha)
        R = self.R_power(da, A.module)
        return LocHom(self, A, A, delta, R)

    def zeta(self, f: LocHom, delta2):
        delta2 = tuple(delta2)
        gamma = _vsub(delta2, f.delta)
        assert all(x >= 0 for x in gamma)
        if all(x == 0 for x in gamma):
            return f
        A, B = f.src, f.dst
        da, db = _vadd(f.delta, A.alpha), _vadd(f.delta, B.alpha)
        da2, db2 = _vadd(delta2, A.alpha), _vadd(delta2, B.alpha)
        Pg = self.power_module(gamma)
        Pa, Pb = self.power_module(da), self.power_module(db)
        Pa2, Pb2 = self.power_module(da2), self.power_module(db2)
        X, Y = A.module, B.module
        S3 = cached_conv(Pg, Pa, X)
        S2b = cached_conv(Pa2, X)
        xiA = self.xi_map(gamma, da)
        mapA = sandwich(S3, 0, 1, xiA, S2b, 0, 0)
        T3 = cached_conv(Pg, Y, Pb)
        mid = sandwich(S3, 1, 2, f.F, T3, 1, 2)
        T3b = cached_conv(Y, Pg, Pb)
        RY = self.R_power(gamma, Y)
        sw = sandwich(T3, 0, 1, RY, T3b, 0, 1)
        xiB = self.xi_map(gamma, db)
        T2b = cached_conv(Y, Pb2)
        last = sandwich(T3b, 1, 2, xiB, T2b, 1, 1)
        F2 = last.compose(sw).compose(mid).compose(invert_hom(mapA))
        out = LocHom(self, A, B, delta2, F2)
        assert out.tdeg == f.tdeg, "zeta changed the localized degree"
        return out

    def compose(self, f: LocHom, g: LocHom):
        """g after f (f: A -> B, g: B -> C), with the eta correction."""
        assert f.dst.module is g.src.module and f.dst.alpha == g.src.alpha
        A, B, C = f.src, f.dst, g.dst
        delta, epsv = f.delta, g.delta
        bv, gv = B.alpha, C.alpha
        eb = _vadd(epsv, bv)
        dala = _vadd(delta, A.alpha)
        dbl = _vadd(delta, bv)
        egl = _vadd(epsv, gv)
        # all nonnegative: f, g were admissible at their own levels
        X, Y, Z = A.module, B.module, C.module
        Peb = self.power_module(eb)
        Pda = self.power_module(dala)
        Pdb = self.power_module(dbl)
        Peg = self.power_module(egl)
        S3 = cached_conv(Peb, Pda, X)
        T3 = cached_conv(Peb, Y, Pdb)
        st1 = sandwich(S3, 1, 2, f.F, T3, 1, 2)
        U3 = cached_conv(Z, Peg, Pdb)
        st2 = sandwich(T3, 0, 1, g.F, U3, 0, 1)
        xiL = self.xi_map(eb, dala)
        S2 = cached_conv(self.power_module(_vadd(eb, dala)), X)
        mL = sandwich(S3, 0, 1, xiL, S2, 0, 0)
        xiR = self.xi_map(egl, dbl)
        U2 = cached_conv(Z, self.power_module(_vadd(egl, dbl)))
        mR = sandwich(U3, 1, 2, xiR, U2, 1, 1)
        F = mR.compose(st2).compose(st1).compose(invert_hom(mL))
        scal = self.fam.eta_pairing(_vadd(delta, bv), _vsub(bv, gv))
        F = F.scale(scal)
        lvl = _vadd(_vadd(delta, epsv), bv)
        out = LocHom(self, A, C, lvl, F)
        assert out.tdeg == f.tdeg + g.tdeg, "composition degree mismatch"
        return out

    def obj_tensor(self, A: LocObject, B: LocObject):
        lamX = A.module.beta
        mod = cached_conv(A.module, B.module)
        shift = (
            A.shift
            + B.shift
            - self.fam.phi_of(B.alpha, lamX)
            + self.fam.Hform(A.alpha, B.alpha)
        )
        return LocObject(mod, _vadd(A.alpha, B.alpha), shift)

    def tensor(self, f: LocHom, g: LocHom):
        A, A2 = f.src, f.dst
        B, B2 = g.src, g.dst
        delta, epsv = f.delta, g.delta
        X, Xp = A.module, A2.module
        Y, Yp = B.module, B2.module
        da, dap = _vadd(delta, A.alpha), _vadd(delta, A2.alpha)
        eb, ebp = _vadd(epsv, B.alpha), _vadd(epsv, B2.alpha)
        Pda, Pdap = self.power_module(da), self.power_module(dap)
        Peb, Pebp = self.power_module(eb), self.power_module(ebp)
        # source chain
        S4 = cached_conv(Pda, Peb, X, Y)
        S4b = cached_conv(Pda, X, Peb, Y)
        sw1 = sandwich(S4, 1, 2, self.R_power(eb, X), S4b, 1, 2)
        # wait: R_power(eb, X): conv(Peb, X) -> conv(X, Peb); forward move
        T4 = cached_conv(Xp, Pdap, Yp, Pebp)
        stf = sandwich(S4b, 0, 1, f.F, cached_conv(Xp, Pdap, Peb, Y), 0, 1)
        stg = sandwich(cached_conv(Xp, Pdap, Peb, Y), 2, 3, g.F, T4, 2, 3)
        T4b = cached_conv(Xp, Yp, Pdap, Pebp)
        sw2 = sandwich(T4, 1, 2, self.R_power(dap, Yp), T4b, 1, 2)
        # collapse ends
        xiS = self.xi_map(da, eb)
        S3 = cached_conv(self.power_module(_vadd(da, eb)), cached_conv(X, Y))
        # merge (X, Y) into a single factor and (Pda, Peb) into one power
        XY = cached_conv(X, Y)
        XpYp = cached_conv(Xp, Yp)
        S2 = cached_conv(self.power_module(_vadd(da, eb)), XY)
        regS = regroup_iso(S4, [(0, 1), (2, 3)], cached_conv(cached_conv(Pda, Peb), XY))
        mS = sandwich(cached_conv(cached_conv(Pda, Peb), XY), 0, 0, xiS, S2, 0, 0)
        headS = mS.compose(regS)
        xiT = self.xi_map(dap, ebp)
        T2 = cached_conv(XpYp, self.power_module(_vadd(dap, ebp)))
        regT = regroup_iso(T4b, [(0, 1), (2, 3)], cached_conv(XpYp, cached_conv(Pdap, Pebp)))
        mT = sandwich(cached_conv(XpYp, cached_conv(Pdap, Pebp)), 1, 1, xiT, T2, 1, 1)
        headT = mT.compose(regT)
        F = headT.compose(sw2).compose(stg).compose(stf).compose(sw1).compose(invert_hom(headS))
        scal = self.fam.eta_pairing(epsv, _vsub(A.alpha, A2.alpha))
        F = F.scale(scal)
        src = self.obj_tensor(A, B)
        dst = self.obj_tensor(A2, B2)
        out = LocHom(self, src, dst, _vadd(delta, epsv), F)
        assert out.tdeg == f.tdeg + g.tdeg, "tensor degree mismatch"
        return out

    # -- stabilized homs -------------------------------------------------------------

    def stab_hom(self, A: LocObject, B: LocObject, tdeg=0):
        """Stabilized hom basis in the given localized degree, with witness level.

        The colimit is filtered and stabilizes degreewise; stabilization is
        declared after two consecutive zeta-isomorphisms along the diagonal.
        """
        base = _vmax0(tuple(max(-a, -b, 0) for a, b in zip(A.alpha, B.alpha)))
        ones = tuple(1 for _ in range(self.nI()))
        prev = None
        prev_delta = None
        stable_runs = 0
        t = 0
        while t <= self.cap:
            delta = _vadd(base, tuple(t * x for x in ones))
            cur = [h for h in self.hom_at(delta, A, B) if h.tdeg == tdeg]
            if prev is not None:
                if len(cur) == len(prev) and self._zeta_is_iso(prev, delta, cur):
                    stable_runs += 1
                    if stable_runs >= 2:
                        return prev, prev_delta
                else:
                    stable_runs = 0
            prev, prev_delta = cur, delta
            t += 1
        raise RuntimeError(f"stab_hom did not stabilize below the cap {self.cap}")

    def _zeta_is_iso(self, homs, delta2, target_homs):
        if not homs and not target_homs:
            return True
        if len(homs) != len(target_homs):
            return False
        # push homs up and check they span the target space
        flat_target = []
        sb = SpanBuilder(0)
        vecs = []
        for h in target_homs:
            vecs.append(_flatten_hom(h.F))
        dim = len(vecs[0]) if vecs else 0
        sb = SpanBuilder(dim)
        for v in vecs:
            sb.add(v)
        pushed = []
        sb2 = SpanBuilder(dim)
        cnt = 0
        for h in homs:
            hf = self.zeta(h, delta2)
            fv = _flatten_hom(hf.F)
            if len(fv) != dim:
                return False
            if sb2.add(fv):
                cnt += 1
            if not sb.contains(fv):
                return False
        return cnt == len(homs)

    # -- the localization functor -----------------------------------------------------

    def phi_object(self, X: GradedModule):
        return LocObject(X, self.zero_vec(), 0)

    def phi_hom(self, h: ModuleHom):
        X, Y = h.source, h.target
        delta = self.zero_vec()
        S = cached_conv(self.power_module(delta), X)
        T = cached_conv(Y, self.power_module(delta))
        F = self.unit_absorb_right_inv(Y).compose(h).compose(self.unit_absorb_left(X))
        F = ModuleHom(S, T, F.degree, F.blocks)
        return LocHom(self, self.phi_object(X), self.phi_object(Y), delta, F)

    def unit_absorb_right_inv(self, X):
        return invert_hom(self.unit_absorb_right(X))

    def phi_status(self, S: GradedModule):
        """'simple' or 'zero' for the image of a simple S, by the exact dichotomy.

        R_{C_a}(S) vanishes iff Lambda(C_a, S) < -phi_a(beta_S); Phi(S) is
        simple iff no braider vanishes on it.
        """
        fam = self.fam
        for a in fam.index:
            Ca = fam.module(a)
            if S.n == 0:
                continue
            lam = renorm_r(Ca, S).lam
            thr = -fam.braiders[a].phi(S.beta)
            if lam < thr:
                return "zero"
            assert lam == thr, "effective-braider dichotomy violated"
        return "simple"


    # -- morphism utilities -----------------------------------------------------

    def lochom_from_plain(self, A: LocObject, B: LocObject, h: ModuleHom, delta):
        """Wrap h: conv(P(delta+alpha_A), A.module) -> conv(B.module, P(delta+alpha_B))."""
        return LocHom(self, A, B, tuple(delta), h)

    def wrap_module_iso(self, A: LocObject, B: LocObject, h: ModuleHom):
        """LocHom induced by a module map h: A.module -> B.module (same alpha)."""
        assert A.alpha == B.alpha
        delta = _vmax0(tuple(-x for x in A.alpha))
        da = _vadd(delta, A.alpha)
        P = self.power_module(da)
        S = cached_conv(P, A.module)
        mid = cached_conv(P, B.module)
        step = sandwich(S, 1, 1, h, mid, 1, 1)
        R = self.R_power(da, B.module)
        F = R.compose(step)
        return LocHom(self, A, B, delta, F)

    def lochom_equal(self, f: LocHom, g: LocHom, up_to_scalar=False):
        if f.src.alpha != g.src.alpha or f.dst.alpha != g.dst.alpha:
            return (False, None) if up_to_scalar else False
        lvl = tuple(max(a, b) for a, b in zip(f.delta, g.delta))
        fa = _flatten_hom(self.zeta(f, lvl).F)
        fb = _flatten_hom(self.zeta(g, lvl).F)
        if up_to_scalar:
            ratio = None
            for x, y in zip(fa, fb):
                if (x == 0) != (y == 0):
                    return (False, None)
                if y:
                    r = x / y
                    if ratio is None:
                        ratio = r
                    elif r != ratio:
                        return (False, None)
            return (ratio is not None, ratio)
        return fa == fb

    def scalar_of_identity(self, h: LocHom):
        """c with h = c . id, or None."""
        idr = self.identity_hom(h.src, h.delta)
        fa = _flatten_hom(h.F)
        fb = _flatten_hom(idr.F)
        ratio = None
        for x, y in zip(fa, fb):
            if (x == 0) != (y == 0):
                return None
            if y:
                r = x / y
                if ratio is None:
                    ratio = r
                elif r != ratio:
                    return None
        return ratio

    def is_invertible_hom(self, h: LocHom):
        """Invertibility in the localization: some zeta-push is invertible as a matrix,
        verified by producing a two-sided inverse representative."""
        hs, _ = self.stab_hom(h.dst, h.src, tdeg=-h.tdeg)
        for g in hs:
            c1 = self.scalar_of_identity(self.compose(h, g))
            c2 = self.scalar_of_identity(self.compose(g, h))
            if c1 and c2:
                return True
        return False

    # -- units, associativity ---------------------------------------------------

    def unit_object(self):
        return LocObject(unit_module(self.ctx), self.zero_vec(), 0)

    def lunitor(self, A: LocObject):
        """obj_tensor(1, A) -> A (invertible; inverse via invert_wrapped)."""
        U = self.unit_object()
        src = self.obj_tensor(U, A)
        h = self.unit_absorb_left(A.module)
        out = self.wrap_module_iso(LocObject(src.module, A.alpha, A.shift), A, h)
        out = LocHom(self, src, A, out.delta, out.F)
        out._wrap = (src, A, h)
        return out

    def runitor(self, A: LocObject):
        U = self.unit_object()
        src = self.obj_tensor(A, U)
        h = self.unit_absorb_right(A.module)
        out = self.wrap_module_iso(LocObject(src.module, A.alpha, A.shift), A, h)
        out = LocHom(self, src, A, out.delta, out.F)
        out._wrap = (src, A, h)
        return out

    def associator(self, A: LocObject, B: LocObject, C: LocObject):
        """(A (x) B) (x) C -> A (x) (B (x) C)."""
        left = self.obj_tensor(self.obj_tensor(A, B), C)
        right = self.obj_tensor(A, self.obj_tensor(B, C))
        fine = cached_conv(A.module, B.module, C.module)
        rl = regroup_iso(fine, [(0, 1), (2, 2)], left.module)
        rr = regroup_iso(fine, [(0, 0), (1, 2)], right.module)
        h = rr.compose(invert_hom(rl))
        out = self.wrap_module_iso(LocObject(left.module, left.alpha, left.shift), right, h)
        out = LocHom(self, left, right, out.delta, out.F)
        out._wrap = (left, right, h)
        return out

    def invert_wrapped(self, f: LocHom):
        """Inverse of a LocHom produced by the unitors/associator."""
        src, dst, h = f._wrap
        hinv = invert_hom(h)
        out = self.wrap_module_iso(LocObject(dst.module, src.alpha, src.shift), LocObject(src.module, src.alpha, src.shift), hinv)
        out = LocHom(self, dst, src, out.delta, out.F)
        out._wrap = (dst, src, hinv)
        return out

    def make_eps(self, Xo: LocObject, Yo: LocObject, epi: ModuleHom, vec):
        """eps: Xo (x) Yo -> 1 from an epimorphism conv(X, Y) ->> P(vec)."""
        vec = tuple(vec)
        assert _vadd(Xo.alpha, Yo.alpha) == tuple(-v for v in vec)
        T = self.obj_tensor(Xo, Yo)
        U = self.unit_object()
        Pv = self.power_module(vec)
        F = invert_hom(self.unit_absorb_left(Pv)).compose(epi).compose(self.unit_absorb_left(T.module))
        out = LocHom(self, T, U, vec, F)
        out._parts = (Xo, Yo)
        return out

    def make_eta(self, Yo: LocObject, Xo: LocObject, mono: ModuleHom, vec):
        """eta: 1 -> Yo (x) Xo from a monomorphism P(vec) -> conv(Y, X)."""
        vec = tuple(vec)
        assert _vadd(Yo.alpha, Xo.alpha) == tuple(-v for v in vec)
        U = self.unit_object()
        T = self.obj_tensor(Yo, Xo)
        Pv = self.power_module(vec)
        F = invert_hom(self.unit_absorb_right(T.module)).compose(mono).compose(self.unit_absorb_right(Pv))
        out = LocHom(self, U, T, vec, F)
        out._parts = (Yo, Xo)
        return out

    def verify_adjunction(self, eps: LocHom, eta: LocHom, Xo=None, Yo=None):
        """Classify (eps, eta): eps: X (x) Y -> 1, eta: 1 -> Y (x) X.

        Returns ('adjunction' | 'quasi' | 'neither', (snake scalars)).
        """
        if Xo is None:
            Xo, Yo = eps._parts
        idX = self.identity_hom(Xo)
        idY = self.identity_hom(Yo)
        # snake on X: X -> X(x)1 -> X(x)(Y(x)X) -> (X(x)Y)(x)X -> 1(x)X -> X
        ru = self.runitor(Xo)
        t1 = self.tensor(idX, eta)
        a = self.associator(Xo, Yo, Xo)
        t2 = self.tensor(eps, idX)
        lu = self.lunitor(Xo)
        snake_x = self.compose(
            self.compose(self.compose(self.compose(self.invert_wrapped(ru), t1), self.invert_wrapped(a)), t2), lu
        )
        # snake on Y: Y -> 1(x)Y -> (Y(x)X)(x)Y -> Y(x)(X(x)Y) -> Y(x)1 -> Y
        lu2 = self.lunitor(Yo)
        t3 = self.tensor(eta, idY)
        a2 = self.associator(Yo, Xo, Yo)
        t4 = self.tensor(idY, eps)
        ru2 = self.runitor(Yo)
        snake_y = self.compose(
            self.compose(self.compose(self.compose(self.invert_wrapped(lu2), t3), a2), t4), ru2
        )
        c1 = self.scalar_of_identity(snake_x)
        c2 = self.scalar_of_identity(snake_y)
        if c1 == 1 and c2 == 1:
            return "adjunction", (c1, c2)
        if c1 and c2:
            return "quasi", (c1, c2)
        return "neither", (c1, c2)

    # -- duals --------------------------------------------------------------------

    def find_left_dual(self, A: LocObject, max_fund=3, max_copies=2):
        """Left dual object for a simple A, via an epimorphism X o M ->> C_Lambda.

        Returns (dual object, (X, vec, epi)) or (None, None) when the search
        bound is exhausted.  The search depends only on the module part and
        is cached.
        """
        M = A.module
        if not hasattr(self, "_ldual_cache"):
            self._ldual_cache = {}
        hit = self._ldual_cache.get(id(M))
        if hit is None:
            hit = self._dual_search_core(M, left=True, max_fund=max_fund, max_copies=max_copies)
            self._ldual_cache[id(M)] = hit
        if hit == (None, None, None):
            return None, None
        X, vec, h = hit
        return LocObject(X, _vsub(tuple(-v for v in vec), A.alpha), 0), (X, vec, h)

    def _dual_search_core(self, M, left, max_fund, max_copies):
        table = self.table
        for vec in _exponent_vectors(self.nI(), max_fund, max_copies):
            P = self.power_module(vec)
            need = tuple(p - m for p, m in zip(P.beta, M.beta))
            if any(x < 0 for x in need) or sum(need) > table.max_height:
                continue
            for X in table.of_weight(need):
                cm = cached_conv(X, M) if left else cached_conv(M, X)
                for h in hom_space(cm, P):
                    if h.rank() == P.dim:
                        return (X, vec, h)
        return (None, None, None)

    def find_right_dual(self, A: LocObject, max_fund=3, max_copies=2):
        """Right dual via an epimorphism M o X ->> C_Lambda (cached on the module)."""
        M = A.module
        if not hasattr(self, "_rdual_cache"):
            self._rdual_cache = {}
        hit = self._rdual_cache.get(id(M))
        if hit is None:
            hit = self._dual_search_core(M, left=False, max_fund=max_fund, max_copies=max_copies)
            self._rdual_cache[id(M)] = hit
        if hit == (None, None, None):
            return None, None
        X, vec, h = hit
        return LocObject(X, _vsub(tuple(-v for v in vec), A.alpha), 0), (X, vec, h)

    def obj_iso_up_to_shift(self, A: LocObject, B: LocObject):
        """A isomorphic to B up to a grading shift.

        Twisting by the invertible C^{-alpha_B} reduces to comparing
        (A.module, alpha_A - alpha_B) with (B.module, 0); only the difference
        is padded, keeping the comparison desk-sized.
        """
        from .simples import isomorphic as iso_fn
        d = _vsub(A.alpha, B.alpha)
        if all(x == 0 for x in d):
            return iso_fn(A.module, B.module, up_to_shift=True)
        gamma = _vmax0(tuple(-x for x in d))
        MA = cached_conv(self.power_module(_vadd(gamma, d)), A.module)
        MB = cached_conv(self.power_module(gamma), B.module)
        return iso_fn(MA, MB, up_to_shift=True)


def _exponent_vectors(n, max_total, max_entry):
    from itertools import product as ip
    for vec in sorted(ip(range(max_entry + 1), repeat=n), key=lambda v: (sum(v), v)):
        if 0 < sum(vec) <= max_total:
            yield vec


# ---------------------------------------------------------------------------
# thick-letter left duals (the K_ell construction)

def left_dual_Ll(loc: LocContext, i, ell, alpha_vec):
    """Left dual C^{-ell alpha} o K_ell of the thick letter L_ell(i).

    Requires eps_i^*(C^alpha) = 1.  Returns (dual object, eps, eta) with the
    structure maps as LocHoms ready for verify_adjunction.
    """
    ctx = loc.ctx
    C = loc.power_module(alpha_vec)
    if eps_star(i, C) != 1:
        raise ValueError("need eps_i^*(C) = 1 for the thick-letter dual")
    lvec = tuple(ell * a for a in alpha_vec)
    Cl = loc.power_module(lvec)
    K = restrict_last(Cl, i)
    assert K is not None and K.dim > 0
    Ll = thick(ctx, i, ell)
    eps_map = _thick_eval_map(loc, K, Ll, Cl, i, ell)
    assert eps_map.rank() == Cl.dim, "thick counit is not surjective"
    D = LocObject(K, tuple(-x for x in lvec), 0)
    Lobj = loc.phi_object(Ll)
    eps = loc.make_eps(D, Lobj, eps_map, lvec)
    # the unit: a monomorphism C_ell -> L_ell o K_ell in the predicted degree
    LK = cached_conv(Ll, K)
    phi_ai = loc.fam.phi_of(alpha_vec, ctx.word_weight((i,)))
    target_deg = -ell * phi_ai
    candidates = [h for h in hom_space(Cl, LK) if h.degree == target_deg and not h.is_zero()]
    if not candidates:
        candidates = [h for h in hom_space(Cl, LK) if not h.is_zero()]
    assert candidates, "no unit candidate for the thick-letter dual"
    etas = [loc.make_eta(Lobj, D, h, lvec) for h in candidates]
    return D, eps, etas


def _thick_eval_map(loc, K, Ll, Cl, i, ell):
    """eps_ell: K o L_ell ->> C_ell, u (x) x^k<i> -> x_last^k u."""
    src = cached_conv(K, Ll)
    n_last = Cl.n - 1
    from .linalg import zeros as zz
    mat = zz(Cl.dim, src.dim, Cl.ring)
    # pure tensors
    from .algebra import perm_identity, perm_length, fixed_word
    for key in src.pos:
        sh, words, idxs = key
        if perm_length(sh) != 0:
            continue
        wK = words[0]
        jK, k = idxs[0], idxs[1]
        vec = Cl.basis_vector(wK + (i,), jK)
        for _ in range(k):
            vec = Cl.apply_x(n_last, vec)
        col = src.basis_index(key)
        for r in range(Cl.dim):
            mat[r][col] = vec[r]
    for key in src.pos:
        sh, words, idxs = key
        if perm_length(sh) == 0:
            continue
        base_col = src.basis_index((perm_identity(src.n), words, idxs))
        vec = [mat[r][base_col] for r in range(Cl.dim)]
        for kk in reversed(fixed_word(sh)):
            vec = Cl.apply_tau(kk, vec)
        col = src.basis_index(key)
        for r in range(Cl.dim):
            mat[r][col] = vec[r]
    deg = _map_degree(src, Cl, mat)
    return ModuleHom(src, Cl, deg if deg is not None else 0, _blk(src, Cl, mat))


def verify_thick_dual(loc: LocContext, i, ell, alpha_vec):
    """Snake verification for the thick-letter dual C^{-ell} o K_ell of L_ell(i).

    ell = 1: both snake composites are evaluated directly in the localized
    category and must be the identity (after the unit rescale).

    ell = 2: the direct snake representatives are out of desk scale, so the
    inductive step is verified instead, exactly as the general proof reduces
    it: the two short exact sequences are constructed, and the four
    module-level squares (two for the counit, two for the unit) are checked
    to commute up to nonzero scalars inside one-dimensional hom spaces.
    """
    ctx = loc.ctx
    if ell == 1:
        D, eps, etas = left_dual_Ll(loc, i, 1, alpha_vec)
        for eta in etas:
            verdict, scal = loc.verify_adjunction(eps, eta)
            if verdict != "neither":
                return {"ell": 1, "verdict": verdict, "scalars": scal}
        return {"ell": 1, "verdict": "neither", "scalars": None}
    if ell != 2:
        raise NotImplementedError("desk-scale verification covers ell in {1, 2}")
    a = b = 1
    report = {"ell": 2, "checks": {}}
    avec = tuple(alpha_vec)
    lvec = tuple(2 * x for x in avec)
    C = loc.power_module(avec)
    C2 = loc.power_module(lvec)
    K1 = restrict_last(C, i)
    K2 = restrict_last(C2, i)
    L1m = thick(ctx, i, 1)
    L2m = thick(ctx, i, 2)
    eps1 = _thick_eval_map(loc, K1, L1m, C, i, 1)
    eps2 = _thick_eval_map(loc, K2, L2m, C2, i, 2)
    # L-sequence maps
    zb = _thick_z_map(ctx, i, 1, 2)       # q L_1 -> L_2
    pr = _thick_proj_map(ctx, i, 2, 1)    # L_2 -> L_1
    report["checks"]["L_ses"] = zb.rank() == 1 and pr.rank() == 1
    # K-sequence: f: C o K_1 -> K_2 (last-letter embedding), g = cokernel iso
    f = _last_letter_embed(loc, C, K1, C2, K2, i)
    report["checks"]["f_module_hom"] = _is_module_hom(f)
    report["checks"]["f_injective"] = f.rank() == cached_conv(C, K1).dim
    g, KaCb = _cokernel_iso(loc, f, K1, C, i)
    report["checks"]["g_found"] = g is not None
    # (dia A): eps2 o (f o L_2)  ==  (merge) o (C o eps1) o (C o K1 o pr)  up to scalar
    srcA = cached_conv(C, K1, L2m)
    fL = sandwich(srcA, 0, 1, f, cached_conv(K2, L2m), 0, 0)
    lhsA = eps2.compose(fL)
    midA = sandwich(srcA, 2, 2, pr, cached_conv(C, K1, L1m), 2, 2)
    epsb = sandwich(cached_conv(C, K1, L1m), 1, 2, eps1, cached_conv(C, C), 1, 1)
    rhsA = _to_power(loc, epsb, lvec).compose(midA)
    report["checks"]["dia_A"] = _proportional_nonzero(lhsA, rhsA)
    # (dia B): eps2 o (K2 o zb)  ==  (merge) o (eps1 o C) o (K1 o R_C(L1)) o (g o L1)
    srcB = cached_conv(K2, L1m)
    zstep = sandwich(srcB, 1, 1, zb, cached_conv(K2, L2m), 1, 1)
    lhsB = eps2.compose(zstep)
    gstep = sandwich(srcB, 0, 0, g, cached_conv(KaCb, L1m), 0, 0)
    fine = cached_conv(K1, C, L1m)
    unm = sandwich(cached_conv(KaCb, L1m), 0, 0, ModuleHom.identity_hom(KaCb), fine, 0, 1)
    RCL = loc.fam.braiders[_single_index(loc, avec)].eval_module(L1m, loc.table) if sum(avec) == 1 else None
    if RCL is None:
        RCL = _power_swap(loc, avec, L1m)
    sw = sandwich(fine, 1, 2, RCL, cached_conv(K1, L1m, C), 1, 2)
    epsa = sandwich(cached_conv(K1, L1m, C), 0, 1, eps1, cached_conv(C, C), 0, 0)
    rhsB = _to_power(loc, epsa, lvec).compose(sw).compose(unm).compose(gstep)
    report["checks"]["dia_B"] = _proportional_nonzero(lhsB, rhsB)
    # unit side: eta_ell found in the predicted degree, squares dualized
    LK2 = cached_conv(L2m, K2)
    phi_ai = loc.fam.phi_of(avec, ctx.word_weight((i,)))
    eta2c = [h for h in hom_space(C2, LK2) if h.degree == -2 * phi_ai and not h.is_zero()]
    LK1 = cached_conv(L1m, K1)
    eta1c = [h for h in hom_space(C, LK1) if h.degree == -phi_ai and not h.is_zero()]
    report["checks"]["eta_spaces_1dim"] = len(eta2c) == 1 and len(eta1c) == 1
    eta2, eta1 = eta2c[0], eta1c[0]
    # square (eta 1): (L2 o g) o eta2  ~  (zb o K1 o C) o (eta1 o C)
    gstep2 = sandwich(LK2, 1, 1, g, cached_conv(L2m, KaCb), 1, 1)
    lhsE1 = gstep2.compose(eta2)
    srcE = cached_conv(C, C)
    e1C = sandwich(srcE, 0, 0, eta1, cached_conv(LK1, C), 0, 0)
    fineE = cached_conv(L1m, K1, C)
    unmE = sandwich(cached_conv(LK1, C), 0, 0, ModuleHom.identity_hom(LK1), fineE, 0, 1)
    zbK = sandwich(fineE, 0, 0, zb, cached_conv(L2m, K1, C), 0, 0)
    mrg = sandwich(cached_conv(L2m, K1, C), 1, 2, ModuleHom.identity_hom(cached_conv(K1, C)), cached_conv(L2m, cached_conv(K1, C)), 1, 1)
    toKaCb = sandwich(cached_conv(L2m, cached_conv(K1, C)), 1, 1, _identify(KaCb, cached_conv(K1, C), invert=True), cached_conv(L2m, KaCb), 1, 1)
    rhsE1 = toKaCb.compose(mrg).compose(zbK).compose(unmE).compose(_from_power(loc, e1C, lvec))
    report["checks"]["eta_square_1"] = _proportional_nonzero(lhsE1, rhsE1)
    # square (eta 2): (pr o K2) o eta2  ~  (L1 o f) o (R_C(L1) o K1) o (C o eta1)
    prK = sandwich(LK2, 0, 0, pr, cached_conv(L1m, K2), 0, 0)
    lhsE2 = prK.compose(eta2)
    Ce1 = sandwich(srcE, 1, 1, eta1, cached_conv(C, LK1), 1, 1)
    fineE2 = cached_conv(C, L1m, K1)
    unmE2 = sandwich(cached_conv(C, LK1), 1, 1, ModuleHom.identity_hom(LK1), fineE2, 1, 2)
    swE = sandwich(fineE2, 0, 1, RCL, cached_conv(L1m, C, K1), 0, 1)
    fstep = sandwich(cached_conv(L1m, C, K1), 1, 2, f, cached_conv(L1m, K2), 1, 1)
    rhsE2 = fstep.compose(swE).compose(unmE2).compose(_from_power(loc, Ce1, lvec))
    report["checks"]["eta_square_2"] = _proportional_nonzero(lhsE2, rhsE2)
    report["verdict"] = "quasi (inductive premises verified)" if all(report["checks"].values()) else "neither"
    return report


def _single_index(loc, avec):
    for pos, a in enumerate(loc.fam.index):
        if avec[pos]:
            return a
    raise ValueError


def _power_swap(loc, avec, Y):
    return loc.R_power(avec, Y)


def _to_power(loc, h: ModuleHom, lvec):
    """Recast a hom into conv(C, C) as one into P(lvec) when they coincide."""
    P = loc.power_module(lvec)
    if h.target is P:
        return h
    assert h.target.blocks == P.blocks
    return ModuleHom(h.source, P, h.degree, h.blocks)


def _from_power(loc, h: ModuleHom, lvec):
    P = loc.power_module(lvec)
    if h.source is P:
        return h
    assert h.source.blocks == P.blocks
    return ModuleHom(P, h.target, h.degree, h.blocks)


def _identify(A, B, invert=False):
    """Identity hom between equal-but-distinct module instances."""
    assert A.blocks == B.blocks
    if invert:
        return ModuleHom(B, A, 0, ModuleHom.identity_hom(B).blocks)
    return ModuleHom(A, B, 0, ModuleHom.identity_hom(A).blocks)


def _thick_z_map(ctx, i, a, ell):
    """q_i^{2(ell-a)} L_a -> L_ell, <i>_a -> z^{ell-a} <i>_ell."""
    La, Ll = thick(ctx, i, a), thick(ctx, i, ell)
    b = ell - a
    word = (i,)
    from .linalg import zeros as zz
    mat = zz(Ll.dim, La.dim)
    for k in range(a):
        mat[k + b][k] = Fraction(1)
    return ModuleHom(La, Ll, _map_degree(La, Ll, mat), {word: mat})


def _thick_proj_map(ctx, i, ell, b):
    Ll, Lb = thick(ctx, i, ell), thick(ctx, i, b)
    word = (i,)
    from .linalg import zeros as zz
    mat = zz(Lb.dim, Ll.dim)
    for k in range(b):
        mat[k][k] = Fraction(1)
    return ModuleHom(Ll, Lb, 0, {word: mat})


def _last_letter_embed(loc, C, K1, C2, K2, i):
    """f: C o K_1 -> K_2 from E_i^*(M o N) >= M o E_i^*(N)."""
    src = cached_conv(C, K1)
    from .linalg import zeros as zz
    mat = zz(K2.dim, src.dim)
    m = C.n
    for key in src.pos:
        sh, words, idxs = key
        wK = words[1]
        # view inside C o C: second word = wK + (i,), shuffle extended by a fixed point
        full_word = wK + (i,)
        sh2 = tuple(sh) + (src.n,)
        inner = cached_conv(C, C)
        ikey = (sh2, (words[0], full_word), (idxs[0], idxs[1]))
        kappa, pos = inner.pos[ikey]
        # K2 = restrict_last(inner): block kappa[:-1], same index
        row = K2.offset(kappa[:-1]) + pos
        mat[row][src.basis_index(key)] = Fraction(1)
    deg = _map_degree(src, K2, mat)
    return ModuleHom(src, K2, deg if deg is not None else 0, _blk(src, K2, mat))


def _cokernel_iso(loc, f: ModuleHom, K1, C, i):
    """coker(f) identified with K_1 o C (up to shift); returns (g, conv(K1, C))."""
    from .modules import quotient
    from .linalg import zeros as zz
    K2 = f.target
    mat = f.matrix()
    cols = []
    for c in range(f.source.dim):
        col = [mat[r][c] for r in range(K2.dim)]
        if any(col):
            cols.append(col)
    quo, keep, per_block = quotient(K2, cols)
    KaCb = cached_conv(K1, C)
    homs = hom_space(quo, KaCb)
    iso = None
    for h in homs:
        if h.is_isomorphism():
            iso = h
            break
    if iso is None and homs:
        acc = homs[0]
        for h in homs[1:]:
            acc = acc.add(h)
        if acc.is_isomorphism():
            iso = acc
    if iso is None:
        return None, KaCb
    # projection K2 -> quo
    proj = zz(quo.dim, K2.dim)
    for w, idxs in keep.items():
        sb = per_block[w]
        off2 = K2.offset(w)
        for c in range(K2.block_dim(w)):
            vec = [Fraction(0)] * K2.block_dim(w)
            vec[c] = Fraction(1)
            for row, pc in zip(sb.rows, sb.pivots):
                if vec[pc]:
                    fmul = vec[pc]
                    vec = [x - fmul * y for x, y in zip(vec, row)]
            for rpos, j in enumerate(idxs):
                if vec[j]:
                    proj[quo.offset(w) + rpos][off2 + c] = vec[j]
    pr_hom = ModuleHom(K2, quo, 0, _blk(K2, quo, proj))
    return iso.compose(pr_hom), KaCb


def _proportional_nonzero(h1: ModuleHom, h2: ModuleHom):
    a = _flatten_hom(h1)
    b = _flatten_hom(h2)
    if not any(a) or not any(b):
        return False
    ratio = None
    for x, y in zip(a, b):
        if (x == 0) != (y == 0):
            return False
        if y:
            r = x / y
            if ratio is None:
                ratio = r
            elif r != ratio:
                return False
    return True


def _is_module_hom(f: ModuleHom):
    from .linalg import mat_mul, zeros as zz
    M, N = f.source, f.target
    F = f.matrix()

    def gm(X, gen):
        out = zz(X.dim, X.dim, X.ring)
        for c in range(X.dim):
            v = X.zero_vector()
            v[c] = X.ring.one()
            img = X.apply_x(gen[1], v) if gen[0] == "x" else X.apply_tau(gen[1], v)
            for r in range(X.dim):
                out[r][c] = img[r]
        return out

    for k in range(M.n):
        if mat_mul(F, gm(M, ("x", k))) != mat_mul(gm(N, ("x", k)), F):
            return False
    for k in range(M.n - 1):
        if mat_mul(F, gm(M, ("tau", k))) != mat_mul(gm(N, ("tau", k)), F):
            return False
    return True


# ---------------------------------------------------------------------------
# the word-reversal involution and right duals in finite type

def a_involution(M: GradedModule):
    """Twist by the automorphism e(nu) -> e(rev nu), x_i -> x_{n-1-i}, tau_j -> -tau_{n-2-j}."""
    n = M.n
    blocks = {tuple(reversed(w)): list(M.blocks[w]) for w in M.words}
    xm, tm = {}, {}
    for w in M.words:
        wr = tuple(reversed(w))
        for k in range(n):
            xm[(k, wr)] = M.xmat(n - 1 - k, w)
        for k in range(n - 1):
            w2r = word_swap(wr, k)
            if w2r in blocks:
                m = M.taumat(n - 2 - k, w)
                tm[(k, wr)] = [[-e for e in row] for row in m]
    return GradedModule(M.ctx, M.beta, blocks, xm, tm, M.ring)


def a_object(loc: LocContext, A: LocObject):
    """The involution on localized objects: module twisted, alpha permuted by i*."""
    ctx = loc.ctx
    table = loc.table
    Ma = a_involution(A.module)
    found = table.find(Ma)
    mod = found[1] if found is not None else Ma
    star = {}
    for pos, a in enumerate(loc.fam.index):
        astar = ctx.cartan.i_star(a)
        star[pos] = loc.fam.index.index(astar)
    alpha2 = [0] * len(A.alpha)
    for pos, v in enumerate(A.alpha):
        alpha2[star[pos]] = v
    return LocObject(mod, tuple(alpha2), A.shift)


def right_dual_finite(loc: LocContext, A: LocObject):
    """a(lD(a(X))): the right dual in finite type with w = w_0."""
    B = a_object(loc, A)
    D, _ = loc.find_left_dual(B)
    assert D is not None, "left dual search exhausted"
    return a_object(loc, D)


def left_dual_simple(loc: LocContext, A: LocObject):
    D, wit = loc.find_left_dual(A)
    if D is None:
        raise RuntimeError("left dual search exhausted")
    # reduce the module to a table-canonical simple instance
    found = loc.table.find(D.module)
    if found is not None:
        D = LocObject(found[1], D.alpha, D.shift)
    return D


def periodicity_check(loc: LocContext, heights=2):
    """(lD)^3 on the letters and (lD)^6 on simples up to the given height.

    Grading shifts are ignored throughout.  Returns a report dict.
    """
    ctx = loc.ctx
    cartan = ctx.cartan
    table = loc.table
    report = {"cubes": [], "sixth": []}
    n = cartan.n
    w0 = cartan.longest_element_word()
    for i in range(n):
        Li = table.of_weight(tuple(1 if j == i else 0 for j in range(n)))[0]
        T = loc.phi_object(Li)
        for _ in range(3):
            T = left_dual_simple(loc, T)
        istar = cartan.i_star(i)
        Listar = table.of_weight(tuple(1 if j == istar else 0 for j in range(n)))[0]
        # C_{-alpha_i}: alpha_i = sum_j <h_j, alpha_i> Lambda_j
        avec = tuple(-cartan.A[j][i] for j in loc.fam.index)
        expected = LocObject(Listar, avec, 0)
        ok = loc.obj_iso_up_to_shift(T, expected)
        report["cubes"].append((i, ok))
    for lbl, S in table.all_simples():
        if not (0 < sum(S.beta) <= heights):
            continue
        T = loc.phi_object(S)
        for _ in range(6):
            T = left_dual_simple(loc, T)
        beta_w = ctx.cartan.zero_weight()
        for j, c in enumerate(S.beta):
            if c:
                beta_w = beta_w + cartan.alpha(j).scale(c)
        target_wt = beta_w + weyl_act(cartan, w0, beta_w)
        cvec = tuple(int(target_wt.pairing(j)) for j in loc.fam.index)
        expected = LocObject(S, cvec, 0)
        ok = loc.obj_iso_up_to_shift(T, expected)
        report["sixth"].append((lbl, ok))
    report["all_ok"] = all(ok for _, ok in report["cubes"]) and all(ok for _, ok in report["sixth"])
    return report


def _vmax0f(bv):
    return tuple(max(-x, 0) for x in bv)


def _blk(src, dst, mat):
    blocks = {}
    for w in src.words:
        if w in dst.blocks:
            ro, co = dst.offset(w), src.offset(w)
            blocks[w] = [row[co:co + src.block_dim(w)] for row in mat[ro:ro + dst.block_dim(w)]]
    return blocks


def _flatten_hom(F: ModuleHom):
    """Canonical flattening over the full source/target block structure."""
    out = []
    M, N = F.source, F.target
    for w in sorted(set(M.words) & set(N.words)):
        m = F.blocks.get(w)
        dn, dm = N.block_dim(w), M.block_dim(w)
        if m is None:
            out.extend([Fraction(0)] * (dn * dm))
        else:
            for row in m:
                out.extend(row)
    return out
