"""The adjoint Chevalley group over a truncated Witt coefficient ring.

Group elements are invertible operators on g tensor R in the Chevalley
basis, stored as (dim x dim x r) int64 arrays beside a provenance tag.
The center is invisible in the adjoint representation; central and
similitude directions are tracked as formal direct-sum data by the
local-condition and Selmer modules.

All constructors are exact: root elements are exponentials with
integral divided powers ad(X_alpha)^k / k! computed over Z, so no ring
division occurs there; exp of a general p-divisible element divides by
k! for k < m and therefore requires m <= p.
"""

from __future__ import annotations

import math

import numpy as np

from .coeffring import CoeffRing, sqrt_one_mod_p
from .rootdata import phi_alpha


class ChevGroupError(ValueError):
    pass


class LieAlgebra:
    """A Chevalley Lie algebra over a fixed CoeffRing.

    Wraps (datum, basis, ring); Lie elements are (dim, r) int64 arrays
    of ring coordinates in the Chevalley basis, group elements are
    GroupElement instances.  Immutable and shareable.
    """

    def __init__(self, datum, basis, ring):
        if ring.p < 5:
            raise ChevGroupError("p >= 5 required (very good prime)")
        if datum.family == "A" and (datum.rank + 1) % ring.p == 0:
            raise ChevGroupError("p | n+1 is not very good for A_n")
        self.datum = datum
        self.basis = basis
        self.ring = ring
        self.dim = datum.dim
        self.rank = datum.rank
        # dense integer ad matrices per basis element (dim <= 8+240 fine)
        self._ad_int = [basis.ad_int(i) for i in range(self.dim)]
        self._trace_form = self._build_trace_form()

    # -- elements

    def zero_vec(self):
        return np.zeros((self.dim, self.ring.r), dtype=np.int64)

    def vec_from_int(self, v):
        out = self.zero_vec()
        out[:, 0] = np.asarray(v, dtype=np.int64) % self.ring.q
        return out

    def root_vector(self, alpha):
        """X_alpha as a coordinate vector."""
        out = self.zero_vec()
        out[self.basis.root_basis_index(alpha), 0] = 1
        return out

    def coroot_vector(self, alpha):
        """h_alpha = alpha^vee in the Cartan."""
        out = self.zero_vec()
        for i, c in enumerate(self.datum.coroot_coords(alpha)):
            out[i, 0] = c % self.ring.q
        return out

    def random_vec(self, rng):
        return rng.integers(0, self.ring.q, size=(self.dim, self.ring.r),
                            dtype=np.int64)

    def bracket(self, x, y):
        """[x, y] over the ring, via the sparse integral table."""
        R = self.ring
        out = np.zeros((self.dim, R.r), dtype=np.int64)
        xi = np.nonzero(np.any(x % R.q, axis=-1))[0]
        yi = np.nonzero(np.any(y % R.q, axis=-1))[0]
        for i in xi:
            for j in yi:
                vec = self.basis.table.get((int(i), int(j)))
                if vec:
                    c = R.mul(x[i], y[j])
                    for k, n in vec:
                        out[k] = R.add(out[k], R.scalar_mul(n, c))
        return out

    def ad(self, x):
        """ad(x) as a ring matrix."""
        R = self.ring
        M = np.zeros((self.dim, self.dim, R.r), dtype=np.int64)
        for i in range(self.dim):
            if np.any(x[i] % R.q):
                Mi = R.mat_from_int(self._ad_int[i])
                M = R.add(M, R.mul(np.broadcast_to(x[i], (self.dim, self.dim, R.r)), Mi))
        return M

    # -- trace form

    def _build_trace_form(self):
        """Normalized invariant form: B(X_b, X_-b) = (long,long)/(b,b),
        B(g_a, g_b) = 0 otherwise, B on the Cartan induced by
        invariance: B(h_ai, h) = l_i <a_i, h>."""
        d = self.datum
        dim = d.dim
        B = np.zeros((dim, dim), dtype=np.int64)
        dmax = max(d.norms)
        for r in d.roots:
            lr = dmax // d.norm2(r)
            i = self.basis.root_basis_index(r)
            j = self.basis.root_basis_index(d.neg(r))
            B[i, j] = lr
        for i in range(d.rank):
            li = dmax // d.norms[i]
            for j in range(d.rank):
                # B(h_i, h_j) = l_i <alpha_i, alpha_j^vee>
                B[i, j] = li * d.cartan[j][i]
        if (B != B.T).any():
            raise ChevGroupError("trace form asymmetric (bug)")
        return B

    def trace_form(self, x, y):
        """B(x, y) in the ring."""
        R = self.ring
        Bx = R.mat_vec(R.mat_from_int(self._trace_form), x)
        acc = R.zero()
        for i in range(self.dim):
            acc = R.add(acc, R.mul(Bx[i], y[i]))
        return acc

    def trace_form_matrix(self):
        return self._trace_form.copy()


class GroupElement:
    """Adjoint operator with constructor provenance."""

    __slots__ = ("alg", "mat", "tag")

    def __init__(self, alg, mat, tag="product"):
        self.alg = alg
        self.mat = mat % alg.ring.q
        self.tag = tag

    def __matmul__(self, other):
        return GroupElement(self.alg, self.alg.ring.mat_mul(self.mat, other.mat),
                            "product")

    def inv(self):
        return GroupElement(self.alg, self.alg.ring.mat_inv(self.mat),
                            "inverse:" + self.tag)

    def pow(self, e):
        return GroupElement(self.alg, self.alg.ring.mat_pow(self.mat, e),
                            "power:" + self.tag)

    def apply(self, vec):
        return self.alg.ring.mat_vec(self.mat, vec)

    def conjugate(self, other):
        """self other self^-1."""
        R = self.alg.ring
        return GroupElement(self.alg, R.mat_mul(self.mat,
                            R.mat_mul(other.mat, R.mat_inv(self.mat))), "product")

    def eq(self, other):
        return self.alg.ring.mat_eq(self.mat, other.mat)

    def reduce(self, m2):
        alg2 = LieAlgebra(self.alg.datum, self.alg.basis,
                          CoeffRing(self.alg.ring.p, m2, self.alg.ring.r))
        return GroupElement(alg2, self.mat % alg2.ring.q, self.tag)

    def serialize(self):
        """Provenance tag plus matrix rows of ring elements."""
        R = self.alg.ring
        return {"tag": self.tag,
                "rows": [[R.format_el(self.mat[i, j])
                          for j in range(self.alg.dim)]
                         for i in range(self.alg.dim)]}


def identity(alg):
    return GroupElement(alg, alg.ring.mat_id(alg.dim), "identity")


def u_alpha(alg, alpha, x):
    """Root group element exp(ad(x X_alpha)).

    The divided powers ad(X_alpha)^k / k! are computed exactly over Z,
    so this is defined at every p and u_alpha(x) u_alpha(y) =
    u_alpha(x+y) holds exactly.
    """
    R = alg.ring
    alpha = tuple(alpha)
    i = alg.basis.root_basis_index(alpha)
    A = alg._ad_int[i]
    term = np.eye(alg.dim, dtype=np.int64)
    M = R.mat_from_int(term)
    xk = R.el(1)
    k = 0
    Ak = term
    while True:
        k += 1
        Ak = Ak @ A
        if not Ak.any():
            break
        if np.any(Ak % math.factorial(k)):
            raise ChevGroupError("divided power not integral (bug)")
        xk = R.mul(xk, x if not np.isscalar(x) else R.el(x))
        Mk = R.mat_from_int(Ak // math.factorial(k))
        M = R.add(M, R.mul(np.broadcast_to(xk, (alg.dim, alg.dim, R.r)), Mk))
    return GroupElement(alg, M, "root:%s" % (alpha,))


def torus_elt(alg, values):
    """Diagonal torus element from unit values on the simple roots.

    Acts on g_beta by beta(t) computed multiplicatively and trivially
    on the Cartan; in the adjoint group any tuple of units occurs.
    """
    R = alg.ring
    vals = [v if not np.isscalar(v) else R.el(v) for v in values]
    for v in vals:
        if not R.is_unit(v):
            raise ChevGroupError("torus values must be units")
    M = R.mat_id(alg.dim)
    for r in alg.datum.roots:
        c = R.one()
        for i, e in enumerate(r):
            if e:
                c = R.mul(c, R.pow(vals[i], e))
        M[alg.basis.root_basis_index(r), alg.basis.root_basis_index(r)] = c
    return GroupElement(alg, M, "torus")


def root_value_of_torus(alg, t, beta):
    """beta(t) for a torus-like (diagonal) element."""
    i = alg.basis.root_basis_index(tuple(beta))
    return t.mat[i, i].copy()


def exp_hat(alg, x):
    """exp(ad x) for x with all coordinates of valuation >= 1.

    The series truncates at k = m - 1 because p^m = 0; it divides by
    k! and therefore requires m <= p.
    """
    R = alg.ring
    if R.m > R.p:
        raise ChevGroupError("exp_hat needs m <= p (factorial division)")
    for i in range(alg.dim):
        if np.any(x[i] % R.p):
            raise ChevGroupError("exp_hat needs valuation >= 1 coordinates")
    A = alg.ad(x)
    M = R.mat_id(alg.dim)
    term = R.mat_id(alg.dim)
    for k in range(1, R.m):
        term = R.mat_mul(term, A)
        if not term.any():
            break
        coef = R.inv(R.el(math.factorial(k) % R.q))
        M = R.add(M, R.mul(np.broadcast_to(coef, term.shape), term))
    return GroupElement(alg, M, "exp")


def one_plus(alg, scale, x):
    """1 + scale * ad(x) as an operator (no exp series)."""
    R = alg.ring
    M = R.add(R.mat_id(alg.dim), R.scalar_mul(scale, alg.ad(x)))
    return GroupElement(alg, M, "affine")


def matrix_identity_check(p, m, n, samples, rng):
    """The mod-p^m operator identity behind the stability lemmas:

        (1 + p^{m-2} X)(1 + pA + p^2 B)(1 - p^{m-2} X + p^{2m-4} X^2)
            = (1 + p^{m-1} [X, A])(1 + pA + p^2 B)

    for any n x n integer matrices X, A, B and m >= 3.  Returns the
    number of failures among `samples` random instances (0 expected;
    a failure would falsify the ring arithmetic).
    """
    if m < 3:
        raise ChevGroupError("identity requires m >= 3")
    q = p ** m
    fails = 0
    for _ in range(samples):
        X = rng.integers(0, q, size=(n, n), dtype=np.int64)
        A = rng.integers(0, q, size=(n, n), dtype=np.int64)
        B = rng.integers(0, q, size=(n, n), dtype=np.int64)
        one = np.eye(n, dtype=np.int64)
        mid = (one + p * A + p * p * B) % q
        sq = (X @ X) % q if 2 * m - 4 < m else np.zeros_like(X)
        left = (one + p ** (m - 2) * X) % q
        right = (one - p ** (m - 2) * X + p ** (2 * m - 4) % q * sq) % q
        lhs = (left @ mid % q) @ right % q
        comm = (X @ A - A @ X) % q
        rhs = ((one + p ** (m - 1) * comm) % q) @ mid % q
        if np.any((lhs - rhs) % q):
            fails += 1
    return fails


def image_growth_check(p, n, nmat, samples, rng):
    """(1 + p^{n-1} X + p^n Y)^p = 1 + p^n X mod p^{n+1} on random
    integer matrices; the step that propagates fullness of the image
    from level 2 to all levels.  Returns failure count."""
    if n < 2:
        raise ChevGroupError("requires n >= 2")
    q = p ** (n + 1)
    R = CoeffRing(p, n + 1, 1)
    fails = 0
    for _ in range(samples):
        X = rng.integers(0, q, size=(nmat, nmat), dtype=np.int64)
        Y = rng.integers(0, q, size=(nmat, nmat), dtype=np.int64)
        A = (np.eye(nmat, dtype=np.int64) + p ** (n - 1) * X + p ** n * Y) % q
        P = R.mat_pow(A[:, :, None], p)[:, :, 0]
        tgt = (np.eye(nmat, dtype=np.int64) + p ** n * X) % q
        if np.any((P - tgt) % q):
            fails += 1
    return fails


def principal_sl2(alg):
    """The principal sl2 triple (e, h, f) with h = sum of positive
    coroots, e = sum of simple root vectors, f determined by h.

    Requires p > Coxeter number so that the weights 2 m_i stay
    distinct and nonzero mod p.  All three bracket relations are
    verified exactly before returning.
    """
    d = alg.datum
    hcox = d.coxeter_number()
    if alg.ring.p <= hcox:
        raise ChevGroupError(
            "principal sl2 needs p > Coxeter number %d" % hcox)
    R = alg.ring
    h = alg.zero_vec()
    for r in d.positive_roots:
        cc = d.coroot_coords(r)
        for i in range(d.rank):
            h[i] = R.add(h[i], R.el(cc[i]))
    e = alg.zero_vec()
    f = alg.zero_vec()
    hc = [int(h[i, 0]) for i in range(d.rank)]
    for i in range(d.rank):
        simple = tuple(1 if j == i else 0 for j in range(d.rank))
        e[alg.basis.root_basis_index(simple)] = R.one()
        f[alg.basis.root_basis_index(d.neg(simple))] = R.el(hc[i])
    if not (np.array_equal(alg.bracket(h, e), R.scalar_mul(2, e))
            and np.array_equal(alg.bracket(h, f), R.scalar_mul(-2, f) % R.q)
            and np.array_equal(alg.bracket(e, f), h)):
        raise ChevGroupError("principal sl2 relations failed (bug)")
    return e, h, f


def ad_eigenvalues_on_roots(alg, h):
    """Eigenvalues of ad(h) for h in the Cartan: <beta, h> per root,
    plus rank zeros."""
    d = alg.datum
    R = alg.ring
    out = []
    for r in d.roots:
        val = 0
        for i in range(d.rank):
            val += d.pair_simple_coroot(r, i) * int(h[i, 0])
        out.append(val % R.q)
    return sorted(out) + [0] * d.rank


def trivial_frobenius_search(alg2, alpha, q, seed=0):
    """Torus element t_b = (1 + p b) alpha^vee(q^(1/2)) over O/p^2 with
    alpha(t_b) = q and beta(t_b) != 1 mod p^2 for every beta in
    Phi^alpha.

    b runs over ker(alpha) in the F_p-points of the Cartan; the search
    is a deterministic scan in seed order and raises if the hyperplane
    complement is empty (tiny p only).  Returns (element, b, report).
    """
    R = alg2.ring
    if R.m != 2:
        raise ChevGroupError("search works over precision m = 2")
    p = R.p
    d = alg2.datum
    alpha = tuple(alpha)
    qel = R.el(q)
    c = (int(q) - 1) // p % p
    if c % p == 0 or (int(q) - 1) % p != 0:
        raise ChevGroupError("q must be 1 mod p and not 1 mod p^2")
    s = sqrt_one_mod_p(R, qel)
    pa = phi_alpha(alg2.basis, alpha)
    # enumerate b in ker(alpha) subset t(F_p), seeded order
    rank = d.rank
    rng = np.random.default_rng(seed)
    # parametrize kernel of <alpha, . > on coweight-ish coordinates:
    # b as integer vector (b_1..b_rank) acting by beta(b) = sum beta_i' b_i
    # where beta(b) uses the coroot-coordinate pairing of the Cartan.
    # We take b in the span of simple coroots: beta(b) = sum_i b_i <beta, alpha_i^vee>.
    def beta_of_b(beta, b):
        return sum(int(b[i]) * d.pair_simple_coroot(beta, i) for i in range(rank)) % p

    candidates = []
    total = p ** rank
    order = rng.permutation(total)
    for k in order:
        b = []
        kk = int(k)
        for _ in range(rank):
            b.append(kk % p)
            kk //= p
        if beta_of_b(alpha, b) % p == 0:
            candidates.append(b)
    half = pow(2, p - 2, p)
    for b in candidates:
        ok = True
        for beta in pa:
            m = int(d.pair_root_coroot(beta, alpha))
            # beta(t_b) = (1 + p beta(b)) q^{m/2}; != 1 mod p^2 iff
            # beta(b) + c m / 2 != 0 mod p
            if (beta_of_b(beta, b) + c * m % p * half) % p == 0:
                ok = False
                break
        if ok:
            t = torus_from_coroot_data(alg2, alpha, s, b)
            report = {"seed": seed, "b": list(int(x) for x in b),
                      "alpha": list(alpha), "q": int(q)}
            return t, b, report
    raise ChevGroupError("search space exhausted (p too small for %s)" %
                         (alpha,))


def torus_from_coroot_data(alg2, alpha, s, b):
    """(1 + p b) alpha^vee(s) as a diagonal group element over O/p^2."""
    R = alg2.ring
    d = alg2.datum
    p = R.p
    M = R.mat_id(alg2.dim)
    for r in d.roots:
        m = int(d.pair_root_coroot(r, alpha))
        val = R.pow(s, m)
        bb = sum(int(b[i]) * d.pair_simple_coroot(r, i) for i in range(d.rank)) % p
        val = R.mul(val, R.el(1 + p * bb))
        M[alg2.basis.root_basis_index(r), alg2.basis.root_basis_index(r)] = val
    return GroupElement(alg2, M, "torus")


def centralizer_roots_of_torus_power(datum, tvals, n, q):
    """Roots beta with beta(t)^n = 1 in F_q^x, for a torus element given
    by its unit values on the simple roots.  This is the root part of
    the centralizer subalgebra of t^n at the Lie-algebra level; the
    exponent is reduced mod q - 1."""
    out = []
    e = int(n) % (q - 1)
    for r in datum.roots:
        val = 1
        for i, expo in enumerate(r):
            val = val * pow(int(tvals[i]), expo % (q - 1), q) % q
        if pow(val, e, q) == 1:
            out.append(r)
    return out


def levi_certificate_check(datum, n_prime, m_g, q, samples, rng):
    """Certificate for the Levi bound at the Lie-algebra level.

    For random semisimple s in T(F_q) (unit values on the simple roots)
    there must be some n = n_prime^j with j <= m_g such that the
    vanishing-root subsystem Psi = {beta : beta(s)^n = 1} is rationally
    closed (Psi = Phi intersect Q-span(Psi)) -- then the centralizer
    subalgebra of s^n, computed as the kernel of Ad(s^n) - 1 over F_q,
    equals the Levi subalgebra of Psi; both are compared exactly.
    Returns the number of successes (must equal samples)."""
    from . import modp
    from .intlinalg import in_rational_span
    ok = 0
    dim = datum.dim
    rank = datum.rank
    for _ in range(samples):
        tvals = [int(rng.integers(1, q)) for _ in range(rank)]
        found = False
        for j in range(m_g + 1):
            n = pow(n_prime, j, q - 1) if n_prime > 1 else 1
            psi = centralizer_roots_of_torus_power(datum, tvals, n, q)
            closed = all(
                (r in psi) == in_rational_span([list(x) for x in psi] or
                                               [[0] * rank], list(r))
                for r in datum.roots) if psi else True
            if psi and not closed:
                continue
            if not psi:
                closed = True
            # centralizer subalgebra of s^n via the kernel of Ad - 1
            M = np.zeros((dim, dim), dtype=np.int64)
            for i in range(rank):
                M[i, i] = 1
            for r in datum.roots:
                val = 1
                for i, e in enumerate(r):
                    val = val * pow(tvals[i], (e * n) % (q - 1), q) % q
                idx = rank + datum.root_index[r]
                M[idx, idx] = val
            ker = modp.kernel_basis((M - np.eye(dim, dtype=np.int64)) % q, q)
            levi = np.zeros((rank + len(psi), dim), dtype=np.int64)
            for i in range(rank):
                levi[i, i] = 1
            for k, r in enumerate(psi):
                levi[rank + k, rank + datum.root_index[r]] = 1
            if ker.shape[0] == levi.shape[0] and \
                    modp.rank(np.vstack([ker, levi]), q) == ker.shape[0]:
                found = True
                break
        if not found:
            raise ChevGroupError("no divisor of n_G yields a Levi "
                                 "centralizer for s = %r" % (tvals,))
        ok += 1
    return ok
