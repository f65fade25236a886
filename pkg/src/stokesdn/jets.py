"""Truncated multivariate Taylor arithmetic (forward-mode AD to arbitrary order).

A ``Jet`` is the Taylor polynomial of a smooth function at a point, truncated
at a fixed total degree.  Seeding coordinates as first-degree jets and running
a computation through the overloaded arithmetic yields every mixed partial
derivative up to the truncation order in one pass.  This is the engine behind
all derivative bookkeeping in the package: metric jets, Christoffel jets,
symbol jets in (x, xi'), and the normal-derivative chains of the viscosity.

Design notes:

* Coefficients are complex (the tangential symbols carry factors of i*xi).
* All jets in one computation share a :class:`JetSpace`, which precomputes the
  monomial basis and a sparse multiplication table once; products then cost a
  couple of numpy gathers plus a bincount.
* Scalars (int/float/complex) mix freely with jets, so field code written
  against the ``smooth`` helpers runs unchanged on plain numbers (order-0
  fast path) and on jets.
"""

import itertools
import math
from functools import lru_cache

import numpy as np

__all__ = [
    "JetSpace", "Jet", "space", "sqrt", "exp", "log", "sin", "cos",
    "powf", "value_of", "as_jet",
]


@lru_cache(maxsize=None)
def space(nvars, order):
    """Memoized JetSpace factory; spaces are immutable and shareable."""
    return JetSpace(nvars, order)


def _monomials(nvars, order):
    """All exponent tuples with total degree <= order, graded-lex ordered."""
    out = []
    for deg in range(order + 1):
        # compositions of `deg` into nvars parts, lexicographic
        for comb in itertools.combinations_with_replacement(range(nvars), deg):
            alpha = [0] * nvars
            for v in comb:
                alpha[v] += 1
            out.append(tuple(alpha))
    # combinations_with_replacement repeats nothing; dedupe not needed
    return out


class JetSpace:
    """Shared context for jets: monomial basis and multiplication table."""

    def __init__(self, nvars, order):
        self.nvars = int(nvars)
        self.order = int(order)
        self.monomials = _monomials(self.nvars, self.order)
        self.nmono = len(self.monomials)
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self.degrees = np.array([sum(m) for m in self.monomials])

        # Sparse multiplication table: (a*b)[ic] += a[ia]*b[ib]
        ia, ib, ic = [], [], []
        for i, mi in enumerate(self.monomials):
            di = sum(mi)
            for j, mj in enumerate(self.monomials):
                if di + sum(mj) > self.order:
                    continue
                k = self.index[tuple(a + b for a, b in zip(mi, mj))]
                ia.append(i)
                ib.append(j)
                ic.append(k)
        self._ia = np.array(ia)
        self._ib = np.array(ib)
        self._ic = np.array(ic)

        # Differentiation table per variable: d/dx_v maps coefficient at
        # alpha+e_v (times alpha_v+1) down to alpha.
        self._dsrc, self._ddst, self._dfac = [], [], []
        for v in range(self.nvars):
            src, dst, fac = [], [], []
            for i, m in enumerate(self.monomials):
                if m[v] >= 1:
                    tgt = list(m)
                    tgt[v] -= 1
                    src.append(i)
                    dst.append(self.index[tuple(tgt)])
                    fac.append(m[v])
            self._dsrc.append(np.array(src, dtype=int))
            self._ddst.append(np.array(dst, dtype=int))
            self._dfac.append(np.array(fac, dtype=float))

        self._fact = np.array(
            [math.prod(math.factorial(a) for a in m) for m in self.monomials],
            dtype=float,
        )

    # -- constructors -------------------------------------------------------

    def constant(self, value):
        c = np.zeros(self.nmono, dtype=complex)
        c[0] = value
        return Jet(self, c)

    def variable(self, v, value):
        """The coordinate jet x_v = value + (x_v - value)."""
        c = np.zeros(self.nmono, dtype=complex)
        c[0] = value
        if self.order >= 1:
            e = [0] * self.nvars
            e[v] = 1
            c[self.index[tuple(e)]] = 1.0
        return Jet(self, c)

    def variables(self, values):
        return [self.variable(v, x) for v, x in enumerate(values)]

    def mul_coeffs(self, a, b):
        w = a[self._ia] * b[self._ib]
        out = np.bincount(self._ic, weights=w.real, minlength=self.nmono).astype(complex)
        out += 1j * np.bincount(self._ic, weights=w.imag, minlength=self.nmono)
        return out

    def __repr__(self):
        return f"JetSpace(nvars={self.nvars}, order={self.order})"


class Jet:
    """Truncated Taylor polynomial with complex coefficients."""

    __slots__ = ("space", "c")
    __array_ufunc__ = None  # keep numpy from absorbing us into object arrays

    def __init__(self, space, coeffs):
        self.space = space
        self.c = coeffs

    # -- readout ------------------------------------------------------------

    @property
    def value(self):
        return self.c[0]

    def deriv(self, alpha):
        """Partial derivative d^alpha f, as a number (coefficient * alpha!)."""
        alpha = tuple(alpha)
        idx = self.space.index.get(alpha)
        if idx is None:
            raise KeyError(f"jet order {self.space.order} has no entry for {alpha}")
        return self.c[idx] * self.space._fact[idx]

    def partial(self, v):
        """d/dx_v as a new jet.

        The result is exact only through order-1 of this jet's order; callers
        are responsible for evaluating in a space deep enough for the chain of
        derivatives they take.
        """
        sp = self.space
        c = np.zeros(sp.nmono, dtype=complex)
        c[sp._ddst[v]] = self.c[sp._dsrc[v]] * sp._dfac[v]
        return Jet(sp, c)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ValueError("jets from different spaces")
            return other
        if isinstance(other, (int, float, complex, np.integer, np.floating, np.complexfloating)):
            return None  # scalar fast path
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = self.c.copy()
            c[0] += other
            return Jet(self.space, c)
        return Jet(self.space, self.c + o.c)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = self.c.copy()
            c[0] -= other
            return Jet(self.space, c)
        return Jet(self.space, self.c - o.c)

    def __rsub__(self, other):
        c = -self.c
        c[0] += other
        return Jet(self.space, c)

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.space, self.c * other)
        return Jet(self.space, self.space.mul_coeffs(self.c, o.c))

    __rmul__ = __mul__

    def reciprocal(self):
        c0 = self.c[0]
        if c0 == 0:
            raise ZeroDivisionError("jet with zero value is not invertible")
        sp = self.space
        y = np.zeros(sp.nmono, dtype=complex)
        y[0] = 1.0 / c0
        # Newton iteration y <- y(2 - x y); doubles correct order each pass
        passes = max(1, math.ceil(math.log2(sp.order + 1))) if sp.order else 1
        for _ in range(passes):
            xy = sp.mul_coeffs(self.c, y)
            xy = -xy
            xy[0] += 2.0
            y = sp.mul_coeffs(y, xy)
        return Jet(sp, y)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.space, self.c / other)
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            out = self.space.constant(1.0)
            base = self
            k = int(p)
            while k:
                if k & 1:
                    out = out * base
                base = base * base
                k >>= 1
            return out
        return powf(self, p)

    def __repr__(self):
        return f"Jet({self.value!r}; order {self.space.order})"


# -- analytic function lifting ---------------------------------------------

def _lift(x, derivs):
    """Compose scalar Taylor data f(c0), f'(c0), ... with the jet x = c0 + h."""
    sp = x.space
    h = Jet(sp, x.c.copy())
    h.c[0] = 0.0
    out = sp.constant(derivs[-1] / math.factorial(len(derivs) - 1))
    for m in range(len(derivs) - 2, -1, -1):
        out = out * h + derivs[m] / math.factorial(m)
    return out


def value_of(x):
    return x.value if isinstance(x, Jet) else x


def as_jet(x, sp):
    return x if isinstance(x, Jet) else sp.constant(x)


def sqrt(x):
    if not isinstance(x, Jet):
        return np.sqrt(complex(x)) if (isinstance(x, complex) or x < 0) else math.sqrt(x)
    return powf(x, 0.5)


def powf(x, p):
    """x**p for real p, principal branch at the jet's base value."""
    if not isinstance(x, Jet):
        return x ** p
    c0 = x.value
    n = x.space.order
    derivs = []
    coeff = 1.0
    for m in range(n + 1):
        derivs.append(coeff * c0 ** (p - m))
        coeff *= (p - m)
    return _lift(x, derivs)


def exp(x):
    if not isinstance(x, Jet):
        return np.exp(x) if isinstance(x, complex) else math.exp(x)
    e = np.exp(x.value)
    return _lift(x, [e] * (x.space.order + 1))


def log(x):
    if not isinstance(x, Jet):
        return np.log(x) if isinstance(x, complex) else math.log(x)
    c0 = x.value
    derivs = [np.log(c0)]
    for m in range(1, x.space.order + 1):
        derivs.append((-1.0) ** (m + 1) * math.factorial(m - 1) / c0 ** m)
    return _lift(x, derivs)


def sin(x):
    if not isinstance(x, Jet):
        return np.sin(x) if isinstance(x, complex) else math.sin(x)
    s, c = np.sin(x.value), np.cos(x.value)
    table = [s, c, -s, -c]
    return _lift(x, [table[m % 4] for m in range(x.space.order + 1)])


def cos(x):
    if not isinstance(x, Jet):
        return np.cos(x) if isinstance(x, complex) else math.cos(x)
    s, c = np.sin(x.value), np.cos(x.value)
    table = [c, -s, -c, s]
    return _lift(x, [table[m % 4] for m in range(x.space.order + 1)])
