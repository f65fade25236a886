"""Tangential symbols of the equivalent interior system.

After the solenoidal Stokes problem is rewritten as an elliptic system for
(w, f) in boundary-normal coordinates, the operator takes the form

    d^2/dx_n^2 I + B d/dx_n + C,

with B and C tangential differential operators of order 1 and 2.  This module
assembles their graded symbols

    b(x, xi') = b_1 + b_0,      c(x, xi') = c_2 + c_1 + c_0,

as (n+1) x (n+1) matrices of jets: rows/columns 0..n-1 are the vector slots,
row/column n is the scalar slot f.  Greek (tangential) sums run over 0..n-2,
Roman sums over 0..n-1; the normal index is n-1 (0-based).

The viscosity mu must be positive; rho is the positive zeroth-order shift
picked in the problem configuration (a plain constant here).
"""

import numpy as np

from . import jets as jm
from .fields import check_point
from .geometry import GeometryJet, laplace_beltrami, covariant_jets, gradient
from .symbols import GradedSymbol

__all__ = ["ProblemData", "SymbolContext", "assemble_b", "assemble_c",
           "InteriorSymbols", "interior_symbols"]


class ProblemData:
    """Metric + viscosity + shift; caches per-point geometry/viscosity jets."""

    def __init__(self, metric, mu, rho=1.0):
        if rho < 0:
            raise ValueError("shift rho must be >= 0")
        self.metric = metric
        self.mu = mu
        self.rho = float(rho)
        self.n = metric.n
        self._ctx = {}

    def context(self, x, space):
        key = (tuple(np.asarray(x, dtype=float)), space.nvars, space.order)
        ctx = self._ctx.get(key)
        if ctx is None:
            ctx = SymbolContext(self, x, space)
            self._ctx[key] = ctx
        return ctx

    def context_at(self, x, order, extra_vars=None):
        nv = 2 * self.n - 1 if extra_vars is None else self.n + extra_vars
        return self.context(x, jm.space(nv, order))

    def xi_jets(self, space, xi):
        """Tangential covariable jets (variables n..2n-2 of the space)."""
        xi = np.asarray(xi, dtype=float)
        if space.nvars >= 2 * self.n - 1:
            return [space.variable(self.n + a, xi[a]) for a in range(self.n - 1)]
        return [space.constant(xi[a]) for a in range(self.n - 1)]


class SymbolContext:
    """Jets of metric data and viscosity at one collar point."""

    def __init__(self, data, x, space):
        n = data.n
        x = check_point(x, n)
        self.data = data
        self.n = n
        self.x = x
        self.space = space
        xs = [space.variable(v, x[v]) for v in range(n)]
        self.geo = GeometryJet.at(data.metric, xs, space)

        self.mu = jm.as_jet(data.mu(xs), space)
        self.rho = data.rho
        self.mu_inv = self.mu.reciprocal()
        mr = self.mu + self.rho
        self.sqrt_mr = jm.sqrt(mr)
        self.isqrt_mr = self.sqrt_mr.reciprocal()
        self.t = self.mu_inv * self.sqrt_mr       # mu^{-1} (mu+rho)^{1/2}

        gi = self.geo.ginv
        self.dmu = [self.mu.partial(k) for k in range(n)]
        dmu_inv = [self.mu_inv.partial(k) for k in range(n)]
        self.minv_up = [sum((gi[j, l] * dmu_inv[l] for l in range(n)), 0.0)
                        for j in range(n)]
        self.disqrt = [self.isqrt_mr.partial(k) for k in range(n)]
        self.isqrt_up = [sum((gi[j, l] * self.disqrt[l] for l in range(n)), 0.0)
                         for j in range(n)]
        self._cov_mu_inv = None
        self._lap_isqrt = None

    @property
    def cov_mu_inv(self):
        """Covariant derivative stack of mu^{-1} (used by c_0)."""
        if self._cov_mu_inv is None:
            self._cov_mu_inv = covariant_jets(self.geo, self.mu_inv)
        return self._cov_mu_inv

    @property
    def lap_isqrt(self):
        if self._lap_isqrt is None:
            self._lap_isqrt = laplace_beltrami(self.geo, self.isqrt_mr)
        return self._lap_isqrt

    def gxixi(self, xi):
        gi = self.geo.ginv
        m = self.n - 1
        return sum((gi[a, b] * xi[a] * xi[b] for a in range(m) for b in range(m)),
                   0.0)


def _zeros(m):
    out = np.empty((m, m), dtype=object)
    out[:] = 0.0
    return out


def assemble_b(ctx, xi):
    """Symbols (b_1, b_0) of the first-order coefficient B.

    b_1 is supported on the last column, rows 0..n-1:
    4 i mu^{-1}(mu+rho)^{1/2} Gamma^j_{beta n} g^{alpha beta} xi_alpha.
    """
    n = ctx.n
    nn = n - 1            # normal index, 0-based
    tang = range(n - 1)
    gi = ctx.geo.ginv
    gam = ctx.geo.gamma
    ric = ctx.geo.ricci_mixed

    b1 = _zeros(n + 1)
    for j in range(n):
        acc = 0.0
        for a in tang:
            for b in tang:
                acc = acc + gam[j, b, nn] * gi[b, a] * xi[a]
        b1[j, n] = 4j * ctx.t * acc

    b0 = _zeros(n + 1)
    trace_tang = sum((gam[b, nn, b] for b in tang), 0.0)
    for j in range(n + 1):
        b0[j, j] = b0[j, j] + trace_tang

    rr = ctx.rho / (ctx.mu * (ctx.mu + ctx.rho))
    for j in range(n):
        for k in range(n):
            entry = 2.0 * gam[j, k, nn]
            if k == nn:
                entry = entry + ctx.mu * ctx.minv_up[j]
            if j == k:
                entry = entry + rr * ctx.dmu[nn]
            b0[j, k] = b0[j, k] + entry

    for j in range(n):
        col = 2.0 * ric[j, nn]
        col = col - 2.0 * ctx.mu * ctx.minv_up[j].partial(nn)
        col = col - 2.0 * ctx.mu * sum(
            (gam[j, a, nn] * ctx.minv_up[a] for a in tang), 0.0)
        for a in tang:
            for b in tang:
                col = col + gi[a, b] * gam[j, nn, a].partial(b)
                for c in tang:
                    col = col - gi[a, c] * gam[j, b, c] * gam[b, nn, a] \
                              - gi[a, b] * gam[j, nn, c] * gam[c, a, b]
        for a in tang:
            for b in tang:
                for c in tang:
                    for s in tang:
                        col = col - 2.0 * gi[a, c] * gi[b, s] \
                            * gam[j, c, s] * gam[nn, a, b]
        b0[j, n] = b0[j, n] + ctx.sqrt_mr * ctx.mu_inv * col

    b0[n, nn] = b0[n, nn] + ctx.mu * ctx.isqrt_mr
    return b1, b0


def assemble_c(ctx, xi):
    """Symbols (c_2, c_1, c_0) of the zeroth-order (in d/dx_n) coefficient C."""
    n = ctx.n
    nn = n - 1
    tang = range(n - 1)
    full = range(n)
    gi = ctx.geo.ginv
    gam = ctx.geo.gamma
    ric = ctx.geo.ricci_mixed
    gxx = ctx.gxixi(xi)

    # ---- c_2 ---------------------------------------------------------------
    c2 = _zeros(n + 1)
    for j in range(n + 1):
        c2[j, j] = -gxx
    for j in range(n):
        theta = 0.0
        for a in tang:
            for b in tang:
                for c in tang:
                    for s in tang:
                        theta = theta + gam[j, c, s] * gi[a, c] * gi[b, s] \
                                      * xi[a] * xi[b]
        c2[j, n] = -2.0 * ctx.t * theta

    # ---- c_1 ---------------------------------------------------------------
    c1 = _zeros(n + 1)
    ident = 0.0
    for b in tang:
        coeff = 0.0
        for a in tang:
            coeff = coeff + gi[a, b] * sum((gam[c, a, c] for c in tang), 0.0)
            coeff = coeff + gi[a, b].partial(a)
        ident = ident + coeff * xi[b]
    for j in range(n + 1):
        c1[j, j] = c1[j, j] + 1j * ident

    rr = ctx.rho / (ctx.mu * (ctx.mu + ctx.rho))
    for j in range(n):
        for k in range(n):
            acc = 0.0
            if k != nn:
                acc = acc + ctx.mu * ctx.minv_up[j] * xi[k]
            for a in tang:
                term = 2.0 * gam[j, k, a]
                if j == k:
                    term = term + rr * ctx.dmu[a]
                for b in tang:
                    acc = acc + term * gi[a, b] * xi[b]
            c1[j, k] = c1[j, k] + 1j * acc

    for j in range(n):
        col = 0.0
        for a in tang:
            for b in tang:
                piece = 2.0 * ric[j, a] * gi[a, b]
                piece = piece - 2.0 * ctx.mu * gi[a, b] * ctx.minv_up[j].partial(a)
                for s in full:
                    piece = piece - 2.0 * ctx.mu * gi[a, b] * gam[j, s, a] \
                                  * ctx.minv_up[s]
                inner = 0.0
                for m in full:
                    for r in full:
                        inner = inner + gi[m, r] * gam[j, a, r].partial(m)
                        for h in full:
                            inner = inner - gi[m, r] * gam[j, h, r] * gam[h, a, m]
                            inner = inner - gi[m, r] * gam[j, a, h] * gam[h, m, r]
                piece = piece - inner * gi[a, b]
                col = col + piece * xi[b]
        for b in tang:
            curv = 0.0
            for s in full:
                for h in full:
                    for r in full:
                        for m in full:
                            curv = curv + gam[j, s, h] * gi[s, r] * gi[h, m] \
                                        * gam[b, r, m]
            col = col - 2.0 * curv * xi[b]
        c1[j, n] = 1j * ctx.sqrt_mr * ctx.mu_inv * col

    for k in tang:
        c1[n, k] = c1[n, k] + 1j * ctx.mu * ctx.isqrt_mr * xi[k]

    # ---- c_0 ---------------------------------------------------------------
    c0 = _zeros(n + 1)
    diag = ctx.sqrt_mr * ctx.lap_isqrt
    diag = diag + ctx.mu_inv * ctx.sqrt_mr * sum(
        (ctx.dmu[l] * ctx.isqrt_up[l] for l in full), 0.0)
    for j in range(n):
        c0[j, j] = c0[j, j] + diag

    cov = ctx.cov_mu_inv
    trace_gam = [sum((gam[l, k, l] for l in full), 0.0) for k in full]
    for j in range(n):
        for k in range(n):
            entry = ctx.mu * ctx.minv_up[j] * trace_gam[k]
            entry = entry + ctx.mu * ctx.sqrt_mr * ctx.minv_up[j] * ctx.disqrt[k]
            for m in full:
                for l in full:
                    entry = entry + gi[m, l] * gam[j, k, l].partial(m)
                    for h in full:
                        entry = entry + gi[m, l] * gam[j, h, l] * gam[h, k, m] \
                                      - gi[m, l] * gam[j, k, h] * gam[h, m, l]
                    entry = entry + rr * gi[m, l] * gam[j, k, m] * ctx.dmu[l]
            entry = entry + ric[j, k]
            hkj = sum((gi[j, l] * ctx.dmu[k].partial(l) for l in full), 0.0)
            entry = entry - ctx.mu_inv * hkj
            c0[j, k] = c0[j, k] + entry

    lap_minv = cov["laplacian"]
    grad_lap_minv = cov["grad_laplacian"]
    hess_minv = cov["hess_up"]
    dminv_up = [[ctx.minv_up[s].partial(l) for l in full] for s in full]
    for j in range(n):
        col = -2.0 * grad_lap_minv[j]
        for l in full:
            col = col - 2.0 * ric[j, l] * cov["grad"][l]
        for s in full:
            for m in full:
                for l in full:
                    col = col - 2.0 * gi[m, l] * gam[j, s, m] * dminv_up[s][l]
        for m in full:
            col = col - 2.0 * ctx.mu_inv * ctx.dmu[m] * hess_minv[m, j]
        for s in full:
            coeff = 0.0
            for m in full:
                for l in full:
                    coeff = coeff + gi[m, l] * gam[j, s, l].partial(m)
                    for h in full:
                        coeff = coeff + gi[m, l] * gam[j, h, l] * gam[h, s, m] \
                                      - gi[m, l] * gam[j, s, h] * gam[h, m, l]
            col = col - coeff * cov["grad"][s]
        c0[j, n] = ctx.sqrt_mr * col

    for k in range(n):
        c0[n, k] = ctx.mu * ctx.isqrt_mr * trace_gam[k] + ctx.mu * ctx.disqrt[k]
    c0[n, n] = -ctx.mu * lap_minv
    return c2, c1, c0


class InteriorSymbols:
    """The five coefficient symbols as graded evaluators.

    ``b`` carries degrees {1, 0}, ``c`` degrees {2, 1, 0}; each term follows
    the GradedSymbol calling convention term(x, xi, space) and the five
    assemblies at one (x, xi, space) sample are computed together and cached.
    """

    def __init__(self, data):
        self.data = data
        self._cache = {}
        n = data.n

        def term(name):
            def f(x, xi, sp):
                return self._at(x, xi, sp)[name]
            return f

        self.b = GradedSymbol(n, {1: term("b1"), 0: term("b0")}, name="b")
        self.c = GradedSymbol(n, {2: term("c2"), 1: term("c1"), 0: term("c0")},
                              name="c")

    def _at(self, x, xi, sp):
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        key = (tuple(x), tuple(xi), sp.nvars, sp.order)
        out = self._cache.get(key)
        if out is None:
            ctx = self.data.context(x, sp)
            xij = self.data.xi_jets(sp, xi)
            b1, b0 = assemble_b(ctx, xij)
            c2, c1, c0 = assemble_c(ctx, xij)
            out = {"b1": b1, "b0": b0, "c2": c2, "c1": c1, "c0": c0}
            self._cache[key] = out
        return out


def interior_symbols(data):
    return InteriorSymbols(data)
