"""Exact arithmetic in truncated Witt coefficient rings O/p^m.

The ring GR(p^m, r) is the degree-r unramified extension of Z/p^m,
realized as (Z/p^m)[x] / (f) for a monic degree-r polynomial f whose
reduction mod p is irreducible.  Elements are coefficient vectors of
length r with entries in [0, p^m), stored as int64 numpy arrays; the
ring object holds all arithmetic.  Values are immutable in intent:
every operation returns a fresh array, so elements are safe to share
between threads.

The modulus is chosen deterministically from (p, r): the
lexicographically smallest monic irreducible of degree r over F_p,
coefficients lifted to [0, p).  Reduction GR(p^m, r) -> GR(p^m', r)
for m' <= m is coefficientwise reduction mod p^m' and is a ring
homomorphism because the modulus does not depend on m.
"""

from __future__ import annotations

import numpy as np


class CoeffRingError(ValueError):
    pass


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# --- polynomial helpers over F_p (dense coefficient lists, low degree first)


def _poly_trim(a):
    while len(a) > 1 and a[-1] == 0:
        a = a[:-1]
    return a


def _poly_mul_modp(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_divmod_modp(a, b, p):
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    inv_lb = pow(lb, p - 2, p)
    q = [0] * max(1, len(a) - db)
    while len(a) - 1 >= db and any(a):
        da = len(a) - 1
        if a[-1] == 0:
            a = a[:-1]
            continue
        c = (a[-1] * inv_lb) % p
        q[da - db] = c
        for i in range(db + 1):
            a[da - db + i] = (a[da - db + i] - c * b[i]) % p
        a = _poly_trim(a)
    return _poly_trim(q), _poly_trim(a)

def _poly_powmod(a, e, mod, p):
    result = [1]
    base = _poly_divmod_modp(a, mod, p)[1]
    while e:
        if e & 1:
            result = _poly_divmod_modp(_poly_mul_modp(result, base, p), mod, p)[1]
        base = _poly_divmod_modp(_poly_mul_modp(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _poly_gcd_modp(a, b, p):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b != [0]:
        a, b = b, _poly_divmod_modp(a, b, p)[1]
    return a


def _is_irreducible_modp(f, p):
    """Rabin test: f irreducible iff x^(p^r) = x mod f and
    gcd(x^(p^(r/l)) - x, f) = 1 for each prime l | r."""
    r = len(f) - 1
    if r == 1:
        return True
    x = [0, 1]
    xq = _poly_powmod(x, p ** r, f, p)
    # xq - x
    diff = list(xq) + [0] * (2 - len(xq))
    diff[1] = (diff[1] - 1) % p
    if _poly_trim(diff) != [0]:
        return False
    ell = 2
    rr = r
    checked = set()
    while rr > 1:
        while rr % ell:
            ell += 1
        if ell not in checked:
            checked.add(ell)
            xe = _poly_powmod(x, p ** (r // ell), f, p)
            d = list(xe) + [0] * (2 - len(xe))
            d[1] = (d[1] - 1) % p
            d = _poly_trim(d)
            g = _poly_gcd_modp(d, f, p) if d != [0] else list(f)
            if len(g) > 1:
                return False
        rr //= ell
    return True


def _find_modulus(p, r):
    """Lexicographically smallest monic irreducible of degree r over F_p."""
    if r == 1:
        return [0, 1]
    # iterate over coefficient tuples (c_0, ..., c_{r-1}) in lex order
    total = p ** r
    for k in range(total):
        coeffs = []
        kk = k
        for _ in range(r):
            coeffs.append(kk % p)
            kk //= p
        f = coeffs + [1]
        if _is_irreducible_modp(f, p):
            return f
    raise CoeffRingError("no irreducible modulus found (unreachable)")


class CoeffRing:
    """GR(p^m, r) = W(F_{p^r}) / p^m with a fixed deterministic modulus.

    Elements are int64 arrays of shape (r,) (or any shape ending in r
    for the vectorized helpers).  |R| = p^(m r), unit group has order
    p^((m-1) r) (p^r - 1).
    """

    def __init__(self, p, m, r=1):
        if not _is_prime(p):
            raise CoeffRingError("p must be prime, got %r" % (p,))
        if p == 2:
            raise CoeffRingError("p = 2 is not supported (odd p required)")
        if m < 1:
            raise CoeffRingError("precision m must be >= 1")
        if r < 1:
            raise CoeffRingError("residue degree r must be >= 1")
        self.p = p
        self.m = m
        self.r = r
        self.q = p ** m
        self.modulus = _find_modulus(p, r)
        # reduction rows: x^k = _red[k - r] (degree < r) for k = r .. 2r-2
        red = np.zeros((max(r - 1, 1), r), dtype=np.int64)
        if r > 1:
            top = [(-c) % self.q for c in self.modulus[:r]]
            cur = np.array(top, dtype=np.int64)  # x^r
            red[0] = cur
            for k in range(1, r - 1):
                nxt = np.zeros(r, dtype=np.int64)
                nxt[1:] = cur[:-1]
                nxt = (nxt + cur[-1] * red[0]) % self.q
                red[k] = nxt
                cur = nxt
        self._red = red

    # -- element constructors

    def el(self, v):
        """Coerce an int or length-r sequence to a ring element."""
        if np.isscalar(v):
            out = np.zeros(self.r, dtype=np.int64)
            out[0] = int(v) % self.q
            return out
        a = np.asarray(v, dtype=np.int64) % self.q
        if a.shape != (self.r,):
            raise CoeffRingError("element must have %d coefficients" % self.r)
        return a

    def zero(self):
        return np.zeros(self.r, dtype=np.int64)

    def one(self):
        return self.el(1)

    def random(self, rng):
        return rng.integers(0, self.q, size=self.r, dtype=np.int64)

    def random_unit(self, rng):
        while True:
            x = self.random(rng)
            if self.is_unit(x):
                return x

    # -- arithmetic (shapes (..., r) throughout)

    def add(self, a, b):
        return (a + b) % self.q

    def sub(self, a, b):
        return (a - b) % self.q

    def neg(self, a):
        return (-a) % self.q

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.r == 1:
            return (a * b) % self.q
        shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
        conv = np.zeros(shape + (2 * self.r - 1,), dtype=np.int64)
        for i in range(self.r):
            for j in range(self.r):
                conv[..., i + j] = (conv[..., i + j] + a[..., i] * b[..., j]) % self.q
        return self._reduce_poly(conv)

    def _reduce_poly(self, conv):
        out = conv[..., : self.r] % self.q
        for k in range(self.r, conv.shape[-1]):
            c = conv[..., k]
            out = (out + c[..., None] * self._red[k - self.r]) % self.q
        return out

    def scalar_mul(self, c, a):
        return (int(c) * np.asarray(a, dtype=np.int64)) % self.q

    def pow(self, a, e):
        result = self.one()
        base = a
        e = int(e)
        if e < 0:
            base = self.inv(a)
            e = -e
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_unit(self, a):
        """Unit iff the reduction mod p is non-zero."""
        return bool(np.any(np.asarray(a) % self.p))

    def valuation(self, a):
        """v(x) in {0, ..., m}, with v(0) = m."""
        a = np.asarray(a)
        for v in range(self.m):
            if np.any(a % self.p ** (v + 1)):
                return v
        return self.m

    def inv(self, a):
        """Inverse of a unit; Hensel lift of the mod-p inverse.

        Division by a non-unit is an error, never a silent truncation.
        """
        if not self.is_unit(a):
            raise CoeffRingError("division by non-unit")
        # inverse mod p by extended euclid over F_p[x]
        if self.r == 1:
            x = np.array([pow(int(a[0]) % self.p, self.p - 2, self.p)],
                         dtype=np.int64)
        else:
            g = self._invert_modp([int(c) % self.p for c in a])
            x = np.array(g + [0] * (self.r - len(g)), dtype=np.int64)
        # Newton: x <- x (2 - a x), doubles p-adic precision each step
        prec = 1
        while prec < self.m:
            ax = self.mul(a, x)
            x = self.mul(x, (2 * np.eye(1, self.r, 0, dtype=np.int64)[0] - ax) % self.q)
            prec *= 2
        return x

    def _invert_modp(self, f):
        # extended euclid: find g with f g = 1 mod (modulus, p)
        p = self.p
        r0, r1 = list(self.modulus), _poly_trim(f)
        s0, s1 = [0], [1]
        while r1 != [0]:
            qq, rr = _poly_divmod_modp(r0, r1, p)
            r0, r1 = r1, rr
            s2 = [(c) % p for c in s0]
            t = _poly_mul_modp(qq, s1, p)
            ln = max(len(s2), len(t))
            s2 = s2 + [0] * (ln - len(s2))
            t = list(t) + [0] * (ln - len(t))
            s0, s1 = s1, _poly_trim([(x - y) % p for x, y in zip(s2, t)])
        if len(r0) != 1:
            raise CoeffRingError("element not invertible mod p")
        c = pow(r0[0], p - 2, p)
        return [(c * x) % p for x in s0]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def eq(self, a, b):
        return bool(np.all((np.asarray(a) - np.asarray(b)) % self.q == 0))

    def is_zero(self, a):
        return not np.any(np.asarray(a) % self.q)

    # -- precision change

    def reduce_ring(self, m2):
        if m2 > self.m:
            raise CoeffRingError("cannot increase precision by reduction")
        R2 = CoeffRing(self.p, m2, self.r)
        return R2

    def reduce_el(self, a, m2):
        return np.asarray(a, dtype=np.int64) % (self.p ** m2)

    # -- matrices: int64 arrays of shape (n, n, r) (adjoint operators etc.)

    def mat_id(self, n):
        M = np.zeros((n, n, self.r), dtype=np.int64)
        M[np.arange(n), np.arange(n), 0] = 1
        return M

    def mat_from_int(self, A):
        A = np.asarray(A)
        M = np.zeros(A.shape + (self.r,), dtype=np.int64)
        M[..., 0] = A % self.q
        return M

    def mat_mul(self, A, B):
        if self.r == 1:
            return (A[..., 0] @ B[..., 0])[..., None] % self.q
        n, k = A.shape[0], A.shape[1]
        mcols = B.shape[1]
        conv = np.zeros((n, mcols, 2 * self.r - 1), dtype=np.int64)
        for a in range(self.r):
            for b in range(self.r):
                conv[:, :, a + b] = (conv[:, :, a + b]
                                     + A[:, :, a] @ B[:, :, b]) % self.q
        return self._reduce_poly(conv)

    def mat_vec(self, A, v):
        if self.r == 1:
            return (A[..., 0] @ v[..., 0])[..., None] % self.q
        n = A.shape[0]
        conv = np.zeros((n, 2 * self.r - 1), dtype=np.int64)
        for a in range(self.r):
            for b in range(self.r):
                conv[:, a + b] = (conv[:, a + b] + A[:, :, a] @ v[:, b]) % self.q
        return self._reduce_poly(conv)

    def mat_pow(self, A, e):
        n = A.shape[0]
        result = self.mat_id(n)
        base = A
        e = int(e)
        if e < 0:
            base = self.mat_inv(A)
            e = -e
        while e:
            if e & 1:
                result = self.mat_mul(result, base)
            base = self.mat_mul(base, base)
            e >>= 1
        return result

    def mat_inv(self, A):
        """Inverse of a matrix invertible mod p, by Hensel lifting."""
        n = A.shape[0]
        X = self._mat_inv_modp(A)
        prec = 1
        while prec < self.m:
            AX = self.mat_mul(A, X)
            X = self.mat_mul(X, (2 * self.mat_id(n) - AX) % self.q)
            prec *= 2
        return X

    def _mat_inv_modp(self, A):
        # Gauss-Jordan over the residue field F_{p^r}
        n = A.shape[0]
        Rp = self if self.m == 1 else CoeffRing(self.p, 1, self.r)
        M = np.concatenate([A % self.p, Rp.mat_id(n)], axis=1).astype(np.int64)
        for col in range(n):
            piv = None
            for row in range(col, n):
                if Rp.is_unit(M[row, col]):
                    piv = row
                    break
            if piv is None:
                raise CoeffRingError("matrix not invertible mod p")
            if piv != col:
                M[[col, piv]] = M[[piv, col]]
            inv = Rp.inv(M[col, col])
            M[col] = Rp.mul(M[col], inv[None, :])
            for row in range(n):
                if row != col and np.any(M[row, col] % self.p):
                    M[row] = Rp.sub(M[row], Rp.mul(M[row, col][None, :], M[col]))
        return M[:, n:] % self.q

    def mat_eq(self, A, B):
        return bool(np.all((A - B) % self.q == 0))

    def mat_reduce(self, A, m2):
        return A % (self.p ** m2)

    # -- serialization: GR(p^m,r):[c_0,...,c_{r-1}]

    def format_el(self, a):
        return "GR(%d^%d,%d):[%s]" % (self.p, self.m, self.r,
                                      ",".join(str(int(c)) for c in a))

    def parse_el(self, s):
        head, _, body = s.partition(":")
        if head != "GR(%d^%d,%d)" % (self.p, self.m, self.r):
            raise CoeffRingError("ring tag mismatch: %s" % head)
        return self.el([int(t) for t in body.strip("[]").split(",")])

    def __repr__(self):
        return "CoeffRing(p=%d, m=%d, r=%d)" % (self.p, self.m, self.r)


def ring_make(p, m, r=1):
    """Construct GR(p^m, r); rejects p = 2, composite p and m = 0."""
    return CoeffRing(p, m, r)


def sqrt_one_mod_p(R, q):
    """The square root of q that is = 1 mod p, for q = 1 mod p.

    For q = 1 + pc the root is s = 1 + pc/2 + ...; it is computed by
    Hensel iteration from s = 1 and is the unique root = 1 (mod p)
    since p is odd.  Requires a unit q = 1 mod p; works at any
    precision m (the spec's primary use is m = 2).
    """
    q = R.el(q) if np.isscalar(q) else q
    if not R.is_unit(q):
        raise CoeffRingError("q must be a unit")
    if np.any(R.sub(q, R.one()) % R.p):
        raise CoeffRingError("q must be = 1 mod p")
    s = R.one()
    inv2 = R.inv(R.el(2))
    # Newton for s^2 = q: s <- (s + q/s)/2
    for _ in range(R.m + 1):
        s = R.mul(inv2, R.add(s, R.mul(q, R.inv(s))))
    if not R.eq(R.mul(s, s), q):
        raise CoeffRingError("square root iteration failed")
    return s
