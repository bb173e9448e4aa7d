"""Synthetic global Selmer engine.

The global stage is a finite-dimensional stand-in for the Poitou-Tate
exact sequences: per place a pair of local H^1 blocks (module side and
Tate-dual side) with a perfect local pairing, and global images A (for
W) and B (for W*) that are exact annihilators of each other under the
summed pairing -- so the combined global image is maximal isotropic,
which is the structure every argument here actually uses.  Chebotarev
sets are modeled as seeded uniform draws from independent coordinates
(one per linearly disjoint fixed field); density arguments become
bounded-budget searches with diagnostics.

At trivial-prime places the local blocks are honest: coordinates are
cocycle values (c(sigma), c(tau)) over F_p and the pairing is the tame
local duality.  p-adic and archimedean contributions enter through
dimension ledgers only.

Everything global is linear algebra over F_p (modp); exactness is an
invariant, not a tolerance.
"""

from __future__ import annotations

import json

import numpy as np

from . import modp
from .chevgroup import LieAlgebra, identity, torus_elt, u_alpha
from .coeffring import CoeffRing
from .rootdata import phi_alpha


class SelmerError(ValueError):
    pass


class ModelInconsistencyError(SelmerError):
    pass


# ---------------------------------------------------------------------------
# places


class TrivialPlace:
    """A trivial prime: local H^1 = W^2 on each side (sigma, tau blocks),
    tame duality pairing, and an optional torus frame (g, alpha, t, c)
    fixed when the place was installed by a witness search."""

    def __init__(self, w, frame=None):
        self.kind = "trivial"
        self.w = w
        self.h1 = 2 * w
        self.h0 = w
        self.h0_star = w
        self.frame = frame

    def pairing_matrix(self, p):
        w = self.w
        J = np.zeros((2 * w, 2 * w), dtype=np.int64)
        # <phi, psi> = phi_tau . psi_sigma - phi_sigma . psi_tau
        J[w:, :w] = np.eye(w, dtype=np.int64)
        J[:w, w:] = (-np.eye(w, dtype=np.int64)) % p
        return J


class LedgerPlace:
    """A p-adic or other ledger place: abstract blocks of equal
    dimension h1 on both sides with the identity pairing; dim L and the
    h0 entries are data (those theories are inputs here, not
    computations)."""

    def __init__(self, h1, h0, h0_star, dim_l=None, kind="p-adic-ledger"):
        self.kind = kind
        self.h1 = h1
        self.h0 = h0
        self.h0_star = h0_star
        self.dim_l = h0 if dim_l is None else dim_l
        self.frame = None

    def pairing_matrix(self, p):
        return np.eye(self.h1, dtype=np.int64)


# ---------------------------------------------------------------------------
# the model


class SyntheticGlobalModel:
    """Global H^1 models with restriction maps to each local block.

    A (rows = global W-classes, columns = concatenated local W-blocks)
    and B (same for W*) satisfy: B is exactly the annihilator of A
    under the summed local pairing, so the combined image is a maximal
    isotropic subspace -- the Poitou-Tate consistency invariant.
    """

    def __init__(self, p, places, A, B, arch_h0, h0_glob=0, h0_glob_star=0,
                 module=None, eta=None, datum=None, basis=None, seed=None):
        self.p = p
        self.places = places
        self.A = A % p
        self.B = B % p
        self.arch_h0 = list(arch_h0)
        self.h0_glob = h0_glob
        self.h0_glob_star = h0_glob_star
        self.module = module
        self.eta = eta
        self.datum = datum
        self.basis = basis
        self.seed = seed
        self.check_consistency()

    # -- block bookkeeping

    def offsets(self):
        out = []
        pos = 0
        for pl in self.places:
            out.append((pos, pos + pl.h1))
            pos += pl.h1
        return out

    @property
    def total_dim(self):
        return sum(pl.h1 for pl in self.places)

    def big_pairing(self):
        J = np.zeros((self.total_dim, self.total_dim), dtype=np.int64)
        for (a, b), pl in zip(self.offsets(), self.places):
            J[a:b, a:b] = pl.pairing_matrix(self.p)
        return J

    def restrict(self, vec, place_index):
        a, b = self.offsets()[place_index]
        return vec[a:b]

    def check_consistency(self):
        p = self.p
        J = self.big_pairing()
        if self.A.shape[0]:
            M = self.A @ J % p
            ann = modp.kernel_basis(M, p)
        else:
            ann = np.eye(self.total_dim, dtype=np.int64)
        if self.B.shape[0] != ann.shape[0] or \
                (self.B.shape[0] and not all(
                    modp.row_space_contains(ann, row, p) for row in self.B)):
            raise ModelInconsistencyError(
                "B is not the exact annihilator of A")
        # maximal isotropic: dim A + dim B = total
        if self.A.shape[0] + self.B.shape[0] != self.total_dim:
            raise ModelInconsistencyError("global image not half-dimensional")
        # ledger consistency: dim A matches the Euler-characteristic data
        want = sum(pl.h1 - pl.h0 for pl in self.places) - sum(self.arch_h0) \
            + self.h0_glob - self.h0_glob_star
        if self.A.shape[0] != want:
            raise ModelInconsistencyError(
                "global dimension %d does not match the ledger %d"
                % (self.A.shape[0], want))

    def spec_json(self):
        return json.dumps({
            "p": self.p,
            "places": [{"kind": pl.kind, "h1": pl.h1, "h0": pl.h0,
                        "h0_star": pl.h0_star} for pl in self.places],
            "arch_h0": self.arch_h0,
            "dim_A": int(self.A.shape[0]),
            "dim_B": int(self.B.shape[0]),
            "seed": self.seed,
        }, sort_keys=True)


def build_synthetic_model(p, places, prescribed_w=None, prescribed_wstar=None,
                          arch_h0=(), h0_glob=0, h0_glob_star=0, seed=0,
                          **extra):
    """Isotropic completion: a model whose global image contains the
    prescribed classes.

    The W-image starts from the prescribed classes, is extended inside
    the annihilator of the prescribed W*-classes to the target
    dimension (greedy extension by seeded random vectors), and the
    W*-image is then the exact annihilator.  Raises if the prescribed
    classes violate reciprocity (non-isotropic demand) or exceed the
    target dimension.
    """
    rng = np.random.default_rng(seed)
    total = sum(pl.h1 for pl in places)
    target = sum(pl.h1 - pl.h0 for pl in places) - sum(arch_h0) \
        + h0_glob - h0_glob_star
    if target < 0 or target > total:
        raise SelmerError("infeasible ledger: dim A = %d" % target)
    J = np.zeros((total, total), dtype=np.int64)
    pos = 0
    for pl in places:
        J[pos:pos + pl.h1, pos:pos + pl.h1] = pl.pairing_matrix(p)
        pos += pl.h1
    A0 = np.array(prescribed_w if prescribed_w is not None else [],
                  dtype=np.int64).reshape(-1, total) % p
    B0 = np.array(prescribed_wstar if prescribed_wstar is not None else [],
                  dtype=np.int64).reshape(-1, total) % p
    if A0.shape[0] and B0.shape[0]:
        if np.any(A0 @ J @ B0.T % p):
            raise SelmerError("prescribed classes are not isotropic "
                              "(reciprocity violated)")
    if modp.rank(A0, p) != A0.shape[0] or A0.shape[0] > target:
        raise SelmerError("prescribed classes not extendable")
    # allowed ambient for A: annihilator of B0 (v with v J B0^t = 0)
    if B0.shape[0]:
        allowed = modp.kernel_basis(B0 @ J.T % p, p)
    else:
        allowed = np.eye(total, dtype=np.int64)
    A = A0.copy()
    guard = 0
    while A.shape[0] < target:
        guard += 1
        if guard > 200 * target + 200:
            raise SelmerError("isotropic completion stalled")
        coeffs = rng.integers(0, p, size=allowed.shape[0], dtype=np.int64)
        v = coeffs @ allowed % p
        if not np.any(v):
            continue
        if A.shape[0] == 0 or not modp.row_space_contains(A, v, p):
            A = np.vstack([A, v]) if A.shape[0] else v.reshape(1, -1)
    B = modp.kernel_basis(A @ J % p, p) if A.shape[0] else \
        np.eye(total, dtype=np.int64)
    for row in B0:
        if not modp.row_space_contains(B, row, p):
            raise SelmerError("prescribed dual class lost (infeasible spec)")
    return SyntheticGlobalModel(p, list(places), A, B, list(arch_h0),
                                h0_glob, h0_glob_star, seed=seed, **extra)


# ---------------------------------------------------------------------------
# Selmer systems and computation


class SelmerSystem:
    """Per place a condition subspace of the W-block (rows in local
    coordinates); the dual system is derived as the pairing annihilator
    place by place."""

    def __init__(self, model, local_conditions):
        if len(local_conditions) != len(model.places):
            raise SelmerError("one condition per place required")
        self.model = model
        self.L = [np.atleast_2d(np.asarray(Lv, dtype=np.int64)) % model.p
                  if np.asarray(Lv).size else
                  np.zeros((0, pl.h1), dtype=np.int64)
                  for Lv, pl in zip(local_conditions, model.places)]
        self.L = [modp.echelon_basis(Lv, model.p) for Lv in self.L]
        self.L_perp = []
        for Lv, pl in zip(self.L, model.places):
            J = pl.pairing_matrix(model.p)
            if Lv.shape[0]:
                self.L_perp.append(modp.kernel_basis(Lv @ J % model.p,
                                                     model.p))
            else:
                self.L_perp.append(np.eye(pl.h1, dtype=np.int64))

    def dims(self):
        return [int(Lv.shape[0]) for Lv in self.L]


def _selmer_of(model, image, conditions):
    """Classes in the row space of `image` whose every local block lies
    in the given condition subspace; returns a coefficient basis."""
    p = model.p
    rows = []
    for (a, b), cond, pl in zip(model.offsets(), conditions, model.places):
        ann = modp.kernel_basis(cond, p) if cond.shape[0] else \
            np.eye(pl.h1, dtype=np.int64)
        if ann.shape[0] == 0:
            continue
        block = image[:, a:b]
        rows.append(block @ ann.T % p)
    if not rows:
        return np.eye(image.shape[0], dtype=np.int64)
    M = np.concatenate(rows, axis=1)
    return modp.kernel_basis(M.T % p, p)


def selmer_compute(model, system):
    """(Selmer basis, dual Selmer basis, balance report).

    The report re-derives the Greenberg-Wiles ledger
    h1_L - h1_{L*} = sum_v (dim L_v - h0_v) + h0 - h0* - sum_inf h0_v
    and raises on mismatch (the synthetic model makes the identity a
    theorem, so a mismatch means corrupted data, never tolerance)."""
    p = model.p
    sel_coeff = _selmer_of(model, model.A, system.L)
    dual_coeff = _selmer_of(model, model.B, system.L_perp)
    sel = sel_coeff @ model.A % p if sel_coeff.shape[0] else \
        np.zeros((0, model.total_dim), dtype=np.int64)
    dual = dual_coeff @ model.B % p if dual_coeff.shape[0] else \
        np.zeros((0, model.total_dim), dtype=np.int64)
    h1l, h1ld = sel.shape[0], dual.shape[0]
    ledger = sum(Lv.shape[0] - pl.h0 for Lv, pl in zip(system.L, model.places))
    ledger += model.h0_glob - model.h0_glob_star - sum(model.arch_h0)
    if h1l - h1ld != ledger:
        raise ModelInconsistencyError(
            "balance report %d - %d does not match the ledger %d"
            % (h1l, h1ld, ledger))
    report = {
        "h1_L": h1l,
        "h1_L_perp": h1ld,
        "ledger": ledger,
        "dims_L": system.dims(),
        "balanced": h1l == h1ld,
    }
    return sel, dual, report


# ---------------------------------------------------------------------------
# eta maps and the Cartan search


class EtaMap:
    """Equivariant endomorphism acting by a scalar on each isotypic
    summand in a chosen support set, zero elsewhere."""

    def __init__(self, p, matrix, scalars, support):
        self.p = p
        self.matrix = matrix % p
        self.scalars = dict(scalars)
        self.support = list(support)

    def __call__(self, v):
        return self.matrix @ v % self.p

    def is_zero(self):
        return not np.any(self.matrix)


def eta_build(module, decomposition, scalars):
    """EtaMap from a Decomposition: scalars maps isotypic indices to
    nonzero residues; each chosen class must have multiplicity 1 and
    endomorphism field F_p (the assumption the paper's argument needs;
    violating it is an error, mirroring the hypothesis)."""
    p = module.p
    n = module.dim
    support = sorted(scalars)
    for i in support:
        iso = decomposition.isotypic[i]
        if iso["multiplicity"] != 1:
            raise SelmerError("isotypic class %d has multiplicity %d > 1"
                              % (i, iso["multiplicity"]))
        if iso["endo_degree"] != 1:
            raise SelmerError("isotypic class %d has endo degree %d != 1"
                              % (i, iso["endo_degree"]))
    # change of basis: stack all summand bases; eta scales each block
    blocks = [b for b, ci in decomposition.summands]
    T = np.vstack(blocks) % p
    if modp.rank(T, p) != n:
        raise SelmerError("decomposition does not span (bug)")
    diag = np.zeros((n, n), dtype=np.int64)
    row = 0
    for b, ci in decomposition.summands:
        dd = b.shape[0]
        c = scalars.get(ci, 0)
        for k in range(row, row + dd):
            diag[k, k] = c % p
        row += dd
    # row convention: v = coords . T, so eta(v) = (coords diag) . T and
    # the matrix acting on column vectors is T^t diag (T^t)^-1
    Tt_inv = _inv_modp(T.T % p, p)
    M = (T.T % p) @ diag % p @ Tt_inv % p
    eta = EtaMap(p, M, scalars, support)
    for g in module.gens:
        if np.any((g @ M - M @ g) % p):
            raise SelmerError("eta not equivariant (bug)")
    return eta


def _inv_modp(M, p):
    n = M.shape[0]
    aug = np.concatenate([M % p, np.eye(n, dtype=np.int64)], axis=1)
    R, piv = modp.rref(aug, p)
    if piv != list(range(n)):
        raise SelmerError("matrix not invertible mod p")
    return R[:, n:]


def random_group_element(alg, rng, nfactors=4):
    """Seeded random constructor-built adjoint element over the residue
    field (products of root elements and a torus element)."""
    R = alg.ring
    g = identity(alg)
    roots = alg.datum.roots
    for _ in range(nfactors):
        r = roots[int(rng.integers(len(roots)))]
        g = g @ u_alpha(alg, r, R.el(int(rng.integers(0, R.q))))
    g = g @ torus_elt(alg, [R.random_unit(rng) for _ in range(alg.datum.rank)])
    return g


def larsen_search(eta, alg1, rng, budget=200):
    """Find a Cartan frame where eta has a nonzero Cartan component:
    an element g and a witness x in the standard Cartan with
    B(x, (Ad g)^-1 eta (Ad g) x) != 0; equivalent to
    p_{t_g} eta(t_g) != 0 since the B-annihilator of a Cartan is the
    sum of the root spaces."""
    if eta.is_zero():
        raise SelmerError("eta must be nonzero")
    p = alg1.ring.p
    Bform = alg1.trace_form_matrix() % p
    rank = alg1.datum.rank
    for trial in range(budget):
        g = identity(alg1) if trial == 0 else random_group_element(alg1, rng)
        gm = g.mat[..., 0] % p
        gi = _inv_modp(gm, p)
        eta_g = gi @ eta.matrix @ gm % p
        # quadratic form Q(x) = B(x, eta_g x) on the Cartan block
        S = (Bform @ eta_g) % p
        St = S[:rank, :rank]
        sym = (St + St.T) % p
        if not np.any(sym) and not np.any(np.diag(St) % p):
            continue
        # find a witness
        for i in range(rank):
            if St[i, i] % p:
                x = np.zeros(rank, dtype=np.int64)
                x[i] = 1
                return g, x, {"trial": trial, "value": int(St[i, i] % p)}
        for i in range(rank):
            for j in range(i + 1, rank):
                val = (St[i, i] + St[j, j] + St[i, j] + St[j, i]) % p
                if val:
                    x = np.zeros(rank, dtype=np.int64)
                    x[i] = x[j] = 1
                    return g, x, {"trial": trial, "value": int(val)}
    raise SelmerError("larsen search exhausted after %d trials "
                      "(p too small for this eta?)" % budget)


# ---------------------------------------------------------------------------
# Chebotarev sampler


class ChebotarevSampler:
    """Uniform seeded draws from a finite Galois-group model with
    independent coordinates (strong linear disjointness is a model
    assumption).  Coordinates: c (the unit (q-1)/p), t (an element of
    the Lie algebra over F_p, the exp-coordinate of rho_2(Frobenius)),
    one W-value per global W-class generator and one W*-value per dual
    generator."""

    def __init__(self, p, dim_g, n_w, n_wstar, w):
        self.p = p
        self.dim_g = dim_g
        self.n_w = n_w
        self.n_wstar = n_wstar
        self.w = w

    def draw(self, rng):
        p = self.p
        return {
            "c": int(rng.integers(1, p)),
            "t": rng.integers(0, p, size=self.dim_g, dtype=np.int64),
            "w_vals": rng.integers(0, p, size=(self.n_w, self.w),
                                   dtype=np.int64),
            "wstar_vals": rng.integers(0, p, size=(self.n_wstar, self.w),
                                       dtype=np.int64),
        }

    def class_count(self):
        return self.p - 1, self.p ** self.dim_g


def sampler_uniformity_histogram(sampler, rng, n):
    """Histogram of the c-coordinate over n draws (for the chi-square
    uniformity test)."""
    counts = np.zeros(sampler.p - 1, dtype=np.int64)
    for _ in range(n):
        counts[sampler.draw(rng)["c"] - 1] += 1
    return counts


def chi_square_uniform(counts):
    n = counts.sum()
    k = len(counts)
    expected = n / k
    return float(((counts - expected) ** 2 / expected).sum()), k - 1


# ---------------------------------------------------------------------------
# the splitcase witness search


def splitcase_search(model, phi, psi, rng, budget=200):
    """Find (g, alpha, t, draw) as in the auxiliary-prime step:

    1. rho_2(sigma_q) = exp(p t_g) is torus-valued in the frame g with
       beta != 1 mod p^2 on Phi^alpha (i.e. beta(t) != 0);
    2. phi(sigma_q) = eta(Ad(g) t) lies outside
       Ad(g)(ker(alpha|t) + sum of root spaces);
    3. <psi(sigma_q), Ad(g) g_alpha> != 0 for a sampler draw.

    All three bullets are re-verified on the returned witness."""
    if not np.any(phi % model.p):
        raise SelmerError("phi must be nonzero")
    if not np.any(psi % model.p):
        raise SelmerError("psi must be nonzero")
    if model.datum is None or model.eta is None:
        raise SelmerError("model carries no module frame / eta data")
    p = model.p
    K = CoeffRing(p, 1, 1)
    alg1 = LieAlgebra(model.datum, model.basis, K)
    d = model.datum
    eta = model.eta
    rank = d.rank
    sampler = ChebotarevSampler(p, d.dim, model.A.shape[0], model.B.shape[0],
                                d.dim)
    draw0 = sampler.draw(rng)
    c = draw0["c"]
    for trial in range(budget):
        g = identity(alg1) if trial == 0 else random_group_element(alg1, rng)
        gm = g.mat[..., 0] % p
        gi = _inv_modp(gm, p)
        eta_g = gi @ eta.matrix @ gm % p
        for alpha in d.roots:
            # functional t |-> alpha(p_t(eta_g t)) on the Cartan block
            M_tt = eta_g[:rank, :rank]
            arow = np.array([d.pair_simple_coroot(alpha, i)
                             for i in range(rank)], dtype=np.int64)
            f_alpha = arow @ M_tt % p
            if not np.any(f_alpha):
                continue
            t = _find_torus_witness(d, alpha, c, f_alpha, p, rng)
            if t is None:
                continue
            witness = _finish_splitcase(model, alg1, g, gm, gi, alpha, t, c,
                                        phi, psi, rng, budget)
            if witness is not None:
                return witness
    raise SelmerError("splitcase search budget exhausted (seeded); "
                      "model may be infeasible at this p")


def _find_torus_witness(d, alpha, c, f_alpha, p, rng, tries=400):
    """t in the Cartan over F_p with alpha(t) = c and f_alpha(t) != 0.
    The Phi^alpha regularity conditions beta(t) != 0 are re-checked in
    _finish_splitcase, which retries on failure."""
    rank = d.rank
    arow = np.array([d.pair_simple_coroot(alpha, i) for i in range(rank)],
                    dtype=np.int64) % p
    for _ in range(tries):
        t = rng.integers(0, p, size=rank, dtype=np.int64)
        if int(arow @ t % p) != c % p:
            continue
        if int(f_alpha @ t % p) == 0:
            continue
        return t
    return None


def _finish_splitcase(model, alg1, g, gm, gi, alpha, t, c, phi, psi, rng,
                      budget):
    p = model.p
    d = model.datum
    rank = d.rank
    # beta(t) != 0 for all beta in Phi^alpha
    for beta in phi_alpha(model.basis, tuple(alpha)):
        brow = np.array([d.pair_simple_coroot(beta, i) for i in range(rank)],
                        dtype=np.int64)
        if int(brow @ t % p) == 0:
            return None
    # t as a Lie vector in the standard frame, then moved to the g-frame
    tvec = np.zeros(d.dim, dtype=np.int64)
    tvec[:rank] = t
    t_global = gm @ tvec % p
    phival = model.eta.matrix @ t_global % p
    # bullet 2: phival outside Ad(g)(ker(alpha|t) + all root spaces)
    bad = _frame_subspace(alg1, gm, tuple(alpha), p)
    if modp.row_space_contains(bad, phival, p):
        return None
    # bullet 3: draw psi value until it pairs nontrivially with Ad(g) X_alpha
    Xa = np.zeros(d.dim, dtype=np.int64)
    Xa[alg1.basis.root_basis_index(tuple(alpha))] = 1
    gXa = gm @ Xa % p
    psival = None
    for _ in range(budget):
        cand = rng.integers(0, p, size=d.dim, dtype=np.int64)
        if int(cand @ gXa % p):
            psival = cand
            break
    if psival is None:
        return None
    # bullet 1 re-verification: exp(p t_g) is diagonal in the g-frame with
    # beta-values 1 + p beta(t) != 1 mod p^2
    R2 = CoeffRing(p, 2, 1)
    alg2 = LieAlgebra(model.datum, model.basis, R2)
    tvec2 = np.zeros((d.dim, 1), dtype=np.int64)
    tvec2[:rank, 0] = t
    from .chevgroup import exp_hat
    rho2_frame = exp_hat(alg2, (p * tvec2) % R2.q)
    Mfr = rho2_frame.mat[..., 0]
    diag_ok = True
    off = Mfr.copy()
    off[np.arange(d.dim), np.arange(d.dim)] = 0
    if np.any(off % (p * p)):
        diag_ok = False
    for beta in phi_alpha(model.basis, tuple(alpha)):
        i = alg1.basis.root_basis_index(tuple(beta))
        if int(Mfr[i, i] % (p * p)) == 1:
            diag_ok = False
    if not diag_ok:
        return None
    return {
        "g": g, "g_mat": gm, "alpha": tuple(alpha), "t": t, "c": c,
        "phi_value": phival, "psi_value": psival,
        "rho2_torus_values": {tuple(b): int(Mfr[alg1.basis.root_basis_index(tuple(b)),
                                                alg1.basis.root_basis_index(tuple(b))] % (p * p))
                              for b in d.roots},
    }


def _frame_subspace(alg1, gm, alpha, p):
    """Ad(g)(ker(alpha|t) + sum of all root spaces) as a row basis."""
    d = alg1.datum
    rank = d.rank
    rows = []
    arow = np.array([d.pair_simple_coroot(alpha, i) for i in range(rank)],
                    dtype=np.int64).reshape(1, -1)
    ker = modp.kernel_basis(arow, p)
    for v in ker:
        e = np.zeros(d.dim, dtype=np.int64)
        e[:rank] = v
        rows.append(e)
    for r in d.roots:
        e = np.zeros(d.dim, dtype=np.int64)
        e[alg1.basis.root_basis_index(r)] = 1
        rows.append(e)
    M = np.array(rows, dtype=np.int64)
    return modp.echelon_basis(M @ gm.T % p, p)


def l_alpha_in_frame(alg1, gm, alpha, p):
    """L^alpha at an installed place, in the g-frame: sigma-part
    anywhere in Ad(g)(ker(alpha|t) + all root spaces), tau-part in
    Ad(g) g_alpha."""
    d = alg1.datum
    n = d.dim
    sig = _frame_subspace(alg1, gm, alpha, p)
    out = []
    for v in sig:
        row = np.zeros(2 * n, dtype=np.int64)
        row[:n] = v
        out.append(row)
    Xa = np.zeros(n, dtype=np.int64)
    Xa[alg1.basis.root_basis_index(tuple(alpha))] = 1
    row = np.zeros(2 * n, dtype=np.int64)
    row[n:] = gm @ Xa % p
    out.append(row)
    return np.array(out, dtype=np.int64)


# ---------------------------------------------------------------------------
# installing a witness place (model extension)


def extend_model_at_witness(model, system, witness, rng):
    """Extend the model by one trivial prime at the witness and install
    L^alpha there; returns (model', system').

    The old classes embed with unramified restriction (sigma-value from
    the witness draw / sampler); dim A grows by w with the new classes'
    tau-values spanning W, their old-block components solving the
    reciprocity constraints against B.  B' is recomputed as the exact
    annihilator and must contain the embedded B (checked)."""
    p = model.p
    w = model.datum.dim
    nA, nB = model.A.shape[0], model.B.shape[0]
    total = model.total_dim
    # evaluation maps: conditioned on the constrained classes
    evalA = _conditioned_eval(model.A, witness.get("phi_coeffs"),
                              witness["phi_value"], w, p, rng)
    evalB = _conditioned_eval(model.B, witness.get("psi_coeffs"),
                              witness["psi_value"], w, p, rng)
    Jold = model.big_pairing()
    A_embed = np.concatenate([model.A, evalA,
                              np.zeros((nA, w), dtype=np.int64)], axis=1)
    B_embed = np.concatenate([model.B, evalB,
                              np.zeros((nB, w), dtype=np.int64)], axis=1)
    # new classes: tau-part x (a basis of W), old part solving the
    # reciprocity constraint <y, b>_old = -x . b(sigma_q) for all b in B;
    # row b of M is the functional y -> <y, b>_old
    M = (model.B @ Jold.T) % p
    new_rows = []
    for k in range(w):
        x = np.zeros(w, dtype=np.int64)
        x[k] = 1
        rhs = (-(evalB @ x)) % p
        y = modp.solve(M, rhs, p)
        if y is None:
            raise ModelInconsistencyError("reciprocity solve failed (bug)")
        row = np.concatenate([y, np.zeros(w, dtype=np.int64), x])
        new_rows.append(row)
    A2 = np.vstack([A_embed, np.array(new_rows, dtype=np.int64)]) % p
    place = TrivialPlace(w, frame={"g_mat": witness["g_mat"],
                                   "alpha": witness["alpha"],
                                   "t": witness["t"], "c": witness["c"]})
    places2 = list(model.places) + [place]
    J2 = np.zeros((total + 2 * w, total + 2 * w), dtype=np.int64)
    J2[:total, :total] = Jold
    J2[total:, total:] = place.pairing_matrix(p)
    B2 = modp.kernel_basis(A2 @ J2 % p, p)
    for row in B_embed:
        if not modp.row_space_contains(B2, row, p):
            raise ModelInconsistencyError("embedded dual classes lost (bug)")
    model2 = SyntheticGlobalModel(p, places2, A2, B2, model.arch_h0,
                                  model.h0_glob, model.h0_glob_star,
                                  module=model.module, eta=model.eta,
                                  datum=model.datum, basis=model.basis,
                                  seed=model.seed)
    alg1 = LieAlgebra(model.datum, model.basis, CoeffRing(p, 1, 1))
    Lq = l_alpha_in_frame(alg1, witness["g_mat"], witness["alpha"], p)
    system2 = SelmerSystem(model2, [Lv for Lv in system.L] + [Lq])
    # cross-check: the installed dual condition equals the corollary
    # description in the g-frame
    perp = system2.L_perp[-1]
    desc = _corollary_in_frame(alg1, witness["g_mat"], witness["alpha"], p)
    if not (modp.rank(perp, p) == modp.rank(desc, p) ==
            modp.rank(np.vstack([perp, desc]), p)):
        raise ModelInconsistencyError("installed dual condition does not "
                                      "match the explicit description")
    return model2, system2


def _conditioned_eval(image, coeffs, value, w, p, rng):
    """A (rows x w) evaluation matrix: uniform rows, except that the
    class with the given coefficient vector evaluates to `value`."""
    n = image.shape[0]
    E = rng.integers(0, p, size=(n, w), dtype=np.int64)
    if coeffs is None or not np.any(coeffs % p):
        return E
    coeffs = np.asarray(coeffs, dtype=np.int64) % p
    # adjust one coordinate with nonzero coefficient
    j = int(np.nonzero(coeffs)[0][0])
    cur = coeffs @ E % p
    delta = (np.asarray(value, dtype=np.int64) - cur) % p
    cinv = pow(int(coeffs[j]), p - 2, p)
    E[j] = (E[j] + cinv * delta) % p
    return E


def _corollary_in_frame(alg1, gm, alpha, p):
    d = alg1.datum
    n = d.dim
    rows = []
    Xa = np.zeros(n, dtype=np.int64)
    Xa[alg1.basis.root_basis_index(tuple(alpha))] = 1
    gXa = (gm @ Xa % p).reshape(1, -1)
    for v in modp.kernel_basis(gXa, p):
        row = np.zeros(2 * n, dtype=np.int64)
        row[:n] = v
        rows.append(row)
    sub = _frame_subspace(alg1, gm, tuple(alpha), p)
    for v in modp.kernel_basis(sub, p):
        row = np.zeros(2 * n, dtype=np.int64)
        row[n:] = v
        rows.append(row)
    return np.array(rows, dtype=np.int64)


# ---------------------------------------------------------------------------
# the annihilation loop


def annihilation_loop(model, system, rng, max_steps=64):
    """Kill the dual Selmer group by installing witness places.

    Per step the balance is re-verified and the dual dimension must
    strictly decrease (the witness guarantees the (-1, -1) step); a
    non-decreasing step is a hard error.  Returns the trace of
    (h1_L, h1_L_perp) from the start to (0, 0)."""
    sel, dual, rep = selmer_compute(model, system)
    trace = [(rep["h1_L"], rep["h1_L_perp"])]
    steps = 0
    while trace[-1][1] > 0:
        steps += 1
        if steps > max_steps:
            raise SelmerError("annihilation loop exceeded max steps")
        if trace[-1][0] == 0:
            raise ModelInconsistencyError(
                "dual Selmer nonzero with zero Selmer in balanced model")
        phi_coeffs = _coeffs_of(model.A, sel[0], model.p)
        psi_coeffs = _coeffs_of(model.B, dual[0], model.p)
        witness = splitcase_search(model, sel[0], dual[0], rng)
        witness["phi_coeffs"] = phi_coeffs
        witness["psi_coeffs"] = psi_coeffs
        model, system = extend_model_at_witness(model, system, witness, rng)
        sel, dual, rep = selmer_compute(model, system)
        prev = trace[-1]
        cur = (rep["h1_L"], rep["h1_L_perp"])
        if not (cur[0] - prev[0] == cur[1] - prev[1]):
            raise ModelInconsistencyError("balance broken at step %d" % steps)
        if cur[1] >= prev[1]:
            raise ModelInconsistencyError(
                "dual Selmer did not decrease at step %d" % steps)
        trace.append(cur)
    return trace, model, system


def _coeffs_of(image, vec, p):
    sol = modp.solve(image.T % p, vec % p, p)
    if sol is None:
        raise SelmerError("class not in the global image (bug)")
    return sol


# ---------------------------------------------------------------------------
# the doubling method


class DoublingModel:
    """Finite data for the mod-p^3 modification step.

    T-block: one coordinate block per place in T; im_psi_T is the image
    of the global restriction map; families are the auxiliary-prime
    class families: each draws primes v carrying a class h^(v) with a
    FIXED restriction to T (Y) and a fixed inertia value (X, a nonzero
    vector of W); values of any class at any other new prime are fresh
    uniform draws (linear disjointness).  The spanning property
    sum_n F_p[G] X_n = W is a construction input, mirrored here by
    requiring that the X_n span W over F_p."""

    def __init__(self, p, w, t_block_dims, im_psi_t, families):
        self.p = p
        self.w = w
        self.t_dims = list(t_block_dims)
        self.t_total = sum(t_block_dims)
        self.im = np.atleast_2d(np.asarray(im_psi_t, dtype=np.int64)) % p \
            if np.asarray(im_psi_t).size else \
            np.zeros((0, self.t_total), dtype=np.int64)
        self.families = families   # dicts: {"Y": vec, "X": vec, "kind": str}
        gens = np.array([f["X"] for f in families], dtype=np.int64)
        if families and modp.rank(gens, p) != w:
            raise SelmerError("family inertia values do not span W")

    def coker_rank(self):
        extra = np.array([f["Y"] for f in self.families], dtype=np.int64)
        full = np.vstack([self.im, extra]) if self.im.size else extra
        return self.t_total - modp.rank(self.im, self.p), \
            self.t_total - modp.rank(full, self.p)


def doubling_solve(dmodel, z_t, rng, cap=100000, targets=None,
                   exhaustive=None):
    """Find tuples (v, v') and h = h_old - sum h^(v_n) + 2 sum h^(v'_n)
    with h|_T = z_T exactly and prescribed Frobenius sums
    sum_n h^(v'_n)(sigma_{v_m}) = C_m, sum_n h^(v_n)(sigma_{v'_m}) = C'_m.

    The restriction h|_T is exact by construction (the families' T-
    restrictions are draw-independent) and is re-verified; the
    Frobenius-sum equations are met by conditioned resampling of the
    second tuple, exhaustively when the draw space is small (the only
    complete mode), otherwise under the iteration cap with a
    frequency-table diagnostic on failure."""
    p, w = dmodel.p, dmodel.w
    z_t = np.asarray(z_t, dtype=np.int64) % p
    fams = dmodel.families
    # first bullet: z_T may already lie in im(Psi_T) -- direct solve, no Q
    if dmodel.im.size:
        direct = modp.solve(dmodel.im.T % p, z_t, p)
        if direct is not None:
            h_T = (direct @ dmodel.im) % p
            return {"Q_empty": True, "h_T": h_T,
                    "verified": bool(not np.any((h_T - z_t) % p)),
                    "pairs": 0}
    # step 1: write z_T - sum_A Y_a = Psi(h_old) + sum_B c_b Y_b
    z2 = z_t.copy()
    active = []
    for f in fams:
        if f["kind"] == "gens":
            z2 = (z2 - f["Y"]) % p
            active.append((f, 1))
    bcands = [f for f in fams if f["kind"] == "cokernel"]
    stack = [row for row in dmodel.im]
    stack += [f["Y"] for f in bcands]
    Mt = np.array(stack, dtype=np.int64).T % p if stack else \
        np.zeros((dmodel.t_total, 0), dtype=np.int64)
    sol = modp.solve(Mt, z2, p)
    if sol is None:
        raise SelmerError("z_T not solvable against the cokernel basis "
                          "(infeasible model)")
    nim = dmodel.im.shape[0]
    h_old_t = (sol[:nim] @ dmodel.im) % p if nim else \
        np.zeros(dmodel.t_total, dtype=np.int64)
    for k, f in enumerate(bcands):
        c = int(sol[nim + k]) % p
        if c:
            active.append((f, c))
    if not active:
        # z_T already in im(Psi_T): empty Q, direct solve
        return {"Q_empty": True, "h_T": h_old_t, "verified": bool(
            not np.any((h_old_t - z_t) % p)), "pairs": 0}
    # restriction of h to T is already exact:
    h_T = h_old_t.copy()
    for f, c in active:
        h_T = (h_T + c * f["Y"]) % p
    if np.any((h_T - z_t) % p):
        raise SelmerError("h|_T != z_T (bug)")
    n_act = len(active)
    if targets is None:
        targets = {
            "C": rng.integers(0, p, size=(n_act, w), dtype=np.int64),
            "C_prime": rng.integers(0, p, size=(n_act, w), dtype=np.int64),
        }
    # draw the first tuple v (its identities carry no constraints yet)
    v_ids = ["v%d" % k for k in range(n_act)]
    # conditioned resampling of v': each draw produces, independently and
    # uniformly, h^(v_n)(sigma_{v'_m}) and h^(v'_n)(sigma_{v_m}) in W
    space = (p ** w) ** (2 * n_act * n_act)
    if exhaustive is None:
        exhaustive = space <= 200000
    freq = {}
    draws = 0

    def check(old_at_new, new_at_old):
        for m in range(n_act):
            s1 = new_at_old[:, m].sum(axis=0) % p
            if np.any((s1 - targets["C"][m]) % p):
                return False
            s2 = old_at_new[:, m].sum(axis=0) % p
            if np.any((s2 - targets["C_prime"][m]) % p):
                return False
        return True

    if exhaustive:
        total_cells = 2 * n_act * n_act * w
        for code in range(p ** total_cells):
            vals = []
            cc = code
            for _ in range(total_cells):
                vals.append(cc % p)
                cc //= p
            arr = np.array(vals, dtype=np.int64).reshape(2, n_act, n_act, w)
            if check(arr[0], arr[1]):
                return _doubling_result(dmodel, z_t, h_T, active, targets,
                                        arr, v_ids, draws=code + 1,
                                        exhaustive=True)
        raise SelmerError("exhaustive doubling search found no solution "
                          "(model spanning defect)")
    while draws < cap:
        draws += 1
        arr = rng.integers(0, p, size=(2, n_act, n_act, w), dtype=np.int64)
        key = (int(arr[1][:, 0].sum(axis=0)[0] % p))
        freq[key] = freq.get(key, 0) + 1
        if check(arr[0], arr[1]):
            return _doubling_result(dmodel, z_t, h_T, active, targets, arr,
                                    v_ids, draws=draws, exhaustive=False)
    raise SelmerError("doubling cap %d exhausted; empirical class "
                      "frequencies: %r" % (cap, freq))


def _doubling_result(dmodel, z_t, h_T, active, targets, arr, v_ids, draws,
                     exhaustive):
    p = dmodel.p
    return {
        "Q_empty": False,
        "h_T": h_T,
        "verified": bool(not np.any((h_T - z_t) % p)),
        "pairs": len(active),
        "v_tuple": v_ids,
        "v_prime_tuple": ["v%d'" % k for k in range(len(active))],
        "inertia_values": [((f["X"] * c) % p).tolist() for f, c in active],
        "frobenius_sums": {
            "C": targets["C"].tolist(),
            "C_prime": targets["C_prime"].tolist(),
        },
        "draws": draws,
        "exhaustive": exhaustive,
    }


# ---------------------------------------------------------------------------
# random balanced models and the end-to-end lifting driver


def build_balanced_model(datum, basis, p, n_trivial=2, n_ledger=1, f_deg=1,
                         selmer_rank=0, seed=0):
    """A random balanced synthetic model over the adjoint module of the
    given root datum: trivial primes contribute net zero, each p-adic
    ledger place contributes +f dim n, and the archimedean ledger
    subtracts the same total (odd h0 = dim Flag per real place).

    selmer_rank prescribes that many independent global classes inside
    the balanced Selmer condition on each side (unramified at trivial
    places, in L at ledger places), so the annihilation loop has work
    to do; such prescriptions are automatically isotropic."""
    rng = np.random.default_rng(seed + 77)
    w = datum.dim
    dim_n = len(datum.positive_roots)
    places = [TrivialPlace(w) for _ in range(n_trivial)]
    arch = []
    for _ in range(n_ledger):
        h1 = 2 * w + f_deg * w
        places.append(LedgerPlace(h1, w, w, dim_l=w + f_deg * dim_n))
        arch.extend([dim_n] * f_deg)
    total = sum(pl.h1 for pl in places)

    def in_condition_class():
        v = np.zeros(total, dtype=np.int64)
        pos = 0
        for pl in places:
            if pl.kind == "trivial":
                v[pos:pos + pl.w] = rng.integers(0, p, size=pl.w)
            else:
                v[pos:pos + pl.dim_l] = rng.integers(0, p, size=pl.dim_l)
            pos += pl.h1
        return v

    def in_perp_class():
        v = np.zeros(total, dtype=np.int64)
        pos = 0
        for pl in places:
            if pl.kind == "trivial":
                # unramified dual classes annihilate unramified classes
                v[pos:pos + pl.w] = rng.integers(0, p, size=pl.w)
            else:
                v[pos + pl.dim_l:pos + pl.h1] = \
                    rng.integers(0, p, size=pl.h1 - pl.dim_l)
            pos += pl.h1
        return v

    pres_w = [in_condition_class() for _ in range(selmer_rank)]
    pres_ws = [in_perp_class() for _ in range(selmer_rank)]
    model = build_synthetic_model(p, places, prescribed_w=pres_w,
                                  prescribed_wstar=pres_ws,
                                  arch_h0=arch, seed=seed,
                                  datum=datum, basis=basis)
    return model


def attach_adjoint_eta(model, scalar=1):
    """The identity-scalar eta on the full adjoint module (the coupled
    field diagram with one irreducible constituent); enough for the
    simple types the engine runs on."""
    w = model.datum.dim
    model.eta = EtaMap(model.p, (scalar % model.p) * np.eye(w, dtype=np.int64),
                       {0: scalar}, [0])
    return model


def standard_balanced_system(model):
    """The balanced Selmer system: full-dimension L^alpha-style spaces
    of dim h0 at trivial places (unramified condition: the annihilation
    loop replaces them at new places by honest L^alpha), and first-dimL
    coordinates at ledger places."""
    conds = []
    for pl in model.places:
        if pl.kind == "trivial":
            w = pl.w
            # unramified condition: tau-part zero, dim = h0 = w
            L = np.zeros((w, 2 * w), dtype=np.int64)
            L[:, :w] = np.eye(w, dtype=np.int64)
            conds.append(L)
        else:
            L = np.zeros((pl.dim_l, pl.h1), dtype=np.int64)
            for i in range(pl.dim_l):
                L[i, i] = 1
            conds.append(L)
    return SelmerSystem(model, conds)


def sampler_uniformity_test(sampler, rng, n=10000, confidence=0.99):
    """Chi-square uniformity test of the sampler's class coordinate;
    returns (statistic, critical value, passed)."""
    import scipy.stats
    counts = sampler_uniformity_histogram(sampler, rng, n)
    stat, dof = chi_square_uniform(counts)
    crit = float(scipy.stats.chi2.ppf(confidence, dof))
    return stat, crit, stat < crit


def ledger_places_from_file(path, h1_of=None):
    """LedgerPlace list from the localconds ledger text format; h1_of
    maps a ledger entry to its local h1 (defaults to h0 + h0star +
    dim_l - h0, the balanced bookkeeping)."""
    from .localconds import read_local_ledger
    out = []
    for e in read_local_ledger(path):
        if h1_of is not None:
            h1 = h1_of(e)
        else:
            h1 = e["h0"] + e["h0star"] + (e["dim_l"] - e["h0"])
        out.append(LedgerPlace(h1, e["h0"], e["h0star"], dim_l=e["dim_l"],
                               kind=e["kind"]))
    return out
