"""Graded matrix symbols, asymptotic composition, and vec/Kronecker helpers.

A tangential symbol here is a finite collection of terms a_d(x, xi'), each
positively homogeneous of degree d in the tangential covariable xi', taking
(n+1) x (n+1) matrix values.  Terms are evaluated at a point into matrices of
jets so that the composition calculus can read off the x'/xi' derivatives it
needs.

Conventions, used package-wide:

* evaluation spaces have 2n-1 variables: 0..n-1 are x_1..x_n, and n..2n-2 are
  the tangential xi_1..xi_{n-1};
* ``vec`` stacks columns (Fortran order), so vec(L X + X M) = (I (x) L
  + M^t (x) I) vec X.
"""

import itertools
import math

import numpy as np

from . import jets as jm

__all__ = [
    "CotangentSample", "GradedSymbol", "asymptotic_compose",
    "homogeneity_check", "kron_operator", "kron_vec", "vec", "unvec",
    "value_matrix", "deriv_matrix",
]


class CotangentSample:
    """An evaluation point (x, xi') on the boundary-collar cotangent bundle.

    xi' is the tangential covariable and must be nonzero (the symbols are
    homogeneous and several of them divide by |xi'|_g).
    """

    __slots__ = ("x", "xi")

    def __init__(self, x, xi):
        self.x = np.asarray(x, dtype=float)
        self.xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if not np.any(self.xi):
            raise ValueError("xi' must be nonzero")

    def __repr__(self):
        return f"CotangentSample(x={self.x}, xi={self.xi})"


def as_sample(s):
    """Coerce a CotangentSample or an (x, xi') pair."""
    if isinstance(s, CotangentSample):
        return s
    x, xi = s
    return CotangentSample(x, xi)


# -- small object-matrix helpers -------------------------------------------

def value_matrix(a):
    """Complex value array of a matrix whose entries are jets or scalars."""
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=complex)
    for idx in np.ndindex(a.shape):
        out[idx] = jm.value_of(a[idx])
    return out


def deriv_matrix(a, alpha):
    """Entrywise partial derivative d^alpha, as a complex value array."""
    a = np.asarray(a, dtype=object)
    if not any(alpha):
        return value_matrix(a)
    out = np.zeros(a.shape, dtype=complex)
    for idx in np.ndindex(a.shape):
        v = a[idx]
        out[idx] = v.deriv(alpha) if isinstance(v, jm.Jet) else 0.0
    return out


def partial_matrix(a, v):
    """Entrywise d/dx_v keeping jet entries (order drops by one)."""
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(a.shape):
        entry = a[idx]
        out[idx] = entry.partial(v) if isinstance(entry, jm.Jet) else 0.0
    return out


def partial_multi(a, theta, offset):
    """Entrywise d^theta where slot l of theta acts on variable offset+l."""
    out = a
    for l, p in enumerate(theta):
        for _ in range(p):
            out = partial_matrix(out, offset + l)
    return out


# -- graded symbols ---------------------------------------------------------

class GradedSymbol:
    """Finite graded family {degree: term evaluator}.

    Each evaluator has signature term(x, xi, space) -> (m x m) object array of
    jets in the shared 2n-1 variable convention.  `n` is the base dimension,
    `m` the matrix size.
    """

    def __init__(self, n, terms, m=None, name="symbol"):
        self.n = n
        self.m = m if m is not None else n + 1
        self.terms = dict(terms)
        self.name = name

    @property
    def degrees(self):
        return sorted(self.terms, reverse=True)

    def evaluate(self, degree, x, xi, space=None, order=0):
        if degree not in self.terms:
            raise KeyError(f"degree not computed: {degree} (have {self.degrees})")
        sp = space or jm.space(2 * self.n - 1, order)
        return self.terms[degree](x, xi, sp)

    def value(self, degree, x, xi, order=1):
        return value_matrix(self.evaluate(degree, x, xi, order=order))


def homogeneity_check(sym, x, xi, lambdas=(2.0, 5.0, 10.0), order=1):
    """Worst relative deviation of a(x, s*xi) from s^d a(x, xi) over the terms."""
    worst = 0.0
    xi = np.asarray(xi, dtype=float)
    for d in sym.degrees:
        base = sym.value(d, x, xi, order=order)
        scale = max(np.max(np.abs(base)), 1e-300)
        for s in lambdas:
            scaled = sym.value(d, x, s * xi, order=order)
            dev = np.max(np.abs(scaled - s ** d * base)) / (s ** d * scale)
            worst = max(worst, dev)
    return worst


def asymptotic_compose(a, b, keep=None, theta_cap=None):
    """Asymptotic product of two graded symbols.

    Degree-d term:  sum over theta (tangential multi-index), j, k with
    j + k - |theta| = d of  ((-i)^|theta| / theta!) (d^theta_xi a_j)
    (d^theta_x' b_k).  Only tangential x-derivatives enter.  `keep` selects
    the output degrees (defaults to every reachable one down to the point
    where unknown lower-order terms of a or b would matter); `theta_cap`
    truncates |theta| (defaults to the available jet order at evaluation).
    """
    n = a.n
    if b.n != n or a.m != b.m:
        raise ValueError("incompatible symbols")
    da, db = a.degrees, b.degrees
    if keep is None:
        # safe degrees: above (min_a + max_b) and (max_a + min_b) any missing
        # lower-order term of a or b would contribute
        keep = range(max(da) + max(db),
                     max(min(da) + max(db), max(da) + min(db)) - 1, -1)
    keep = sorted(set(keep), reverse=True)

    def make_term(d):
        def term(x, xi, sp):
            cap = sp.order if theta_cap is None else min(theta_cap, sp.order)
            acc = np.full((a.m, a.m), 0.0, dtype=object)
            cache_a, cache_b = {}, {}
            for j in da:
                for k in db:
                    need = j + k - d
                    if need < 0:
                        continue
                    if need > cap:
                        if theta_cap is None:
                            raise ValueError(
                                f"jet depth exceeded: degree {d} needs |theta|={need}"
                                f" > order {sp.order}")
                        continue
                    if j not in cache_a:
                        cache_a[j] = a.terms[j](x, xi, sp)
                    if k not in cache_b:
                        cache_b[k] = b.terms[k](x, xi, sp)
                    for theta in _multi_indices(n - 1, need):
                        fac = (-1j) ** need / math.prod(
                            math.factorial(t) for t in theta)
                        da_j = partial_multi(cache_a[j], theta, offset=n)
                        db_k = partial_multi(cache_b[k], theta, offset=0)
                        acc = acc + fac * np.dot(da_j, db_k)
            return acc
        return term

    return GradedSymbol(n, {d: make_term(d) for d in keep}, m=a.m,
                        name=f"({a.name}#{b.name})")


def _multi_indices(slots, total):
    """All multi-indices with `slots` entries summing to `total`."""
    if slots == 1:
        yield (total,)
        return
    for comb in itertools.combinations_with_replacement(range(slots), total):
        alpha = [0] * slots
        for v in comb:
            alpha[v] += 1
        yield tuple(alpha)


# -- vec / Kronecker --------------------------------------------------------

def vec(X):
    """Column-stacking vectorization."""
    return np.asarray(X).reshape(-1, order="F")


def unvec(v, m):
    return np.asarray(v).reshape((m, m), order="F")


def kron_operator(L, M):
    """U with U vec(X) = vec(L X + X M)."""
    L = np.asarray(L)
    M = np.asarray(M)
    m = L.shape[0]
    eye = np.eye(m)
    return np.kron(eye, L) + np.kron(M.T, eye)


def kron_vec(L, M, E):
    """Vectorized Sylvester data: (U, vec E, unvec) with U vec X = vec(LX+XM)."""
    L, M, E = (np.asarray(a) for a in (L, M, E))
    if not (L.shape == M.shape == E.shape and L.ndim == 2
            and L.shape[0] == L.shape[1]):
        raise ValueError("kron_vec needs three square matrices of equal size")
    m = L.shape[0]
    return kron_operator(L, M), vec(E), lambda v: unvec(v, m)
