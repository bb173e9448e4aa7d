"""Exact arithmetic in cyclotomic integer rings Z[zeta_N].

Elements are integer coefficient vectors in the power basis
1, x, ..., x^{phi(N)-1} of Z[x]/Phi_N(x).  Everything stays in exact
integer arithmetic; rationality checks divide only at the end.
"""

from __future__ import annotations


def cyclotomic_polynomial(n):
    """Phi_n as an integer coefficient list (low degree first)."""
    f = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            g = cyclotomic_polynomial(d) if d > 1 else [-1, 1]
            f = _exact_div(f, g)
    return f


def _exact_div(f, g):
    f = list(f)
    out = [0] * (len(f) - len(g) + 1)
    while len(f) >= len(g) and any(f):
        while f and f[-1] == 0:
            f.pop()
        if len(f) < len(g):
            break
        c = f[-1] // g[-1]
        k = len(f) - len(g)
        out[k] = c
        for i in range(len(g)):
            f[k + i] -= c * g[i]
    if any(f):
        raise ValueError("non-exact cyclotomic division (bug)")
    return out


class CycloContext:
    """Fixed-N context: multiplication, Galois maps and power tables."""

    def __init__(self, n):
        self.n = n
        self.phi = cyclotomic_polynomial(n)
        self.deg = len(self.phi) - 1
        # x^k for k = deg .. 2 deg - 2 as reduced vectors
        red = []
        top = [-c for c in self.phi[: self.deg]]  # x^deg
        cur = list(top)
        red.append(list(cur))
        for _ in range(self.deg - 2):
            cur = self._shift_reduce(cur, top)
            red.append(list(cur))
        self._red = red
        # zeta^j for all j mod n
        pows = []
        v = [0] * self.deg
        v[0] = 1
        for _ in range(n):
            pows.append(list(v))
            v = self._shift_reduce(v, top)
        self._pow = pows

    def _shift_reduce(self, v, top):
        out = [0] + list(v[:-1])
        lead = v[-1]
        if lead:
            out = [a + lead * b for a, b in zip(out, top)]
        return out

    def zero(self):
        return [0] * self.deg

    def one(self):
        return self.integer(1)

    def integer(self, c):
        v = [0] * self.deg
        v[0] = int(c)
        return v

    def zeta(self, k=1):
        return list(self._pow[k % self.n])

    def add(self, a, b):
        return [x + y for x, y in zip(a, b)]

    def sub(self, a, b):
        return [x - y for x, y in zip(a, b)]

    def scal(self, c, a):
        return [int(c) * x for x in a]

    def mul(self, a, b):
        conv = [0] * (2 * self.deg - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        out = conv[: self.deg]
        for k in range(self.deg, len(conv)):
            c = conv[k]
            if c:
                row = self._red[k - self.deg]
                out = [u + c * v for u, v in zip(out, row)]
        return out

    def galois(self, a, s):
        """The map zeta -> zeta^s (s coprime to n); conjugation is s = -1."""
        out = [0] * self.deg
        for j, c in enumerate(a):
            if c:
                row = self._pow[(j * s) % self.n]
                out = [u + c * v for u, v in zip(out, row)]
        return out

    def conj(self, a):
        return self.galois(a, self.n - 1)

    def is_rational(self, a):
        return all(c == 0 for c in a[1:])

    def rational_value(self, a):
        if not self.is_rational(a):
            raise ValueError("value is not rational: %r" % (a,))
        return a[0]
