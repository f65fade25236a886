"""Riemannian geometry jets: Christoffel symbols, curvature, Laplacians.

Everything is computed at a single collar point from the metric's Taylor jet,
so derivatives of geometric quantities come out of the same pass.  Index
conventions: Roman j,k,l,m run over 1..n (stored 0-based), Greek indices in
the symbol modules run over the tangential 1..n-1.  The mixed Ricci tensor is
R^j_k = g^{jl} R_{lk} with R_{jk} = R^l_{jlk}.
"""

import numpy as np

from . import jets as jm
from .fields import check_point

__all__ = [
    "GeometryJet", "metric_inverse", "laplace_beltrami", "covariant_jets",
    "verify_boundary_normal_form", "lemma21_residual",
]


def _det(g, n):
    if n == 1:
        return g[0, 0]
    if n == 2:
        return g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    return (g[0, 0] * (g[1, 1] * g[2, 2] - g[1, 2] * g[2, 1])
            - g[0, 1] * (g[1, 0] * g[2, 2] - g[1, 2] * g[2, 0])
            + g[0, 2] * (g[1, 0] * g[2, 1] - g[1, 1] * g[2, 0]))


def metric_inverse(g):
    """Inverse of a small (2x2/3x3) metric of jets, via cofactors.

    Raises ValueError("singular metric") when |det| < 1e-12 at the point, and
    checks the reconstruction residual ||g g^{-1} - I|| < 1e-13.
    """
    n = g.shape[0]
    det = _det(g, n)
    if abs(jm.value_of(det)) < 1e-12:
        raise ValueError("singular metric")
    inv_det = 1.0 / det if not isinstance(det, jm.Jet) else det.reciprocal()
    ginv = np.empty((n, n), dtype=object)
    if n == 2:
        ginv[0, 0] = g[1, 1] * inv_det
        ginv[1, 1] = g[0, 0] * inv_det
        ginv[0, 1] = -g[0, 1] * inv_det
        ginv[1, 0] = -g[1, 0] * inv_det
    elif n == 3:
        for j in range(3):
            for k in range(3):
                r = [a for a in range(3) if a != k]
                c = [a for a in range(3) if a != j]
                minor = g[r[0], c[0]] * g[r[1], c[1]] - g[r[0], c[1]] * g[r[1], c[0]]
                ginv[j, k] = ((-1.0) ** (j + k)) * minor * inv_det
    else:
        raise ValueError("only n in {2,3} supported")
    resid = _value_mat(g) @ _value_mat(ginv) - np.eye(n)
    if np.max(np.abs(resid)) >= 1e-13:
        raise ValueError("singular metric")  # numerically unusable inverse
    return ginv, det


def _value_mat(a):
    return np.array([[jm.value_of(v) for v in row] for row in a], dtype=complex)


class GeometryJet:
    """Metric, inverse, Christoffel, and curvature jets at one point.

    Construct with :meth:`at`; `xs` are coordinate jets (the first n variables
    of whatever space the caller works in), so the same object serves plain
    evaluation (order-0 reads) and deep derivative chains.
    """

    def __init__(self, n, space, xs, g, ginv, det):
        self.n = n
        self.space = space
        self.xs = xs
        self.g = g
        self.ginv = ginv
        self.det = det
        self._gamma = None
        self._riemann = None
        self._ricci = None

    @classmethod
    def at(cls, metric, xs, space):
        g = metric.jet(xs, space)
        ginv, det = metric_inverse(g)
        return cls(metric.n, space, xs, g, ginv, det)

    @classmethod
    def at_point(cls, metric, x, order, extra_vars=0):
        """Convenience: build a fresh space with n (+extra) variables."""
        x = check_point(x, metric.n)
        sp = jm.space(metric.n + extra_vars, order)
        xs = [sp.variable(v, x[v]) for v in range(metric.n)]
        return cls.at(metric, xs, sp)

    # -- Christoffel symbols ------------------------------------------------

    @property
    def gamma(self):
        """Gamma[j][l][k] = Gamma^j_{lk} = 1/2 g^{jm} (d_l g_{km} + d_k g_{lm} - d_m g_{lk})."""
        if self._gamma is None:
            n = self.n
            dg = [[[self.g[a, b].partial(l) for l in range(n)] for b in range(n)]
                  for a in range(n)]
            gam = np.empty((n, n, n), dtype=object)
            for j in range(n):
                for l in range(n):
                    for k in range(n):
                        acc = 0.0
                        for m in range(n):
                            acc = acc + self.ginv[j, m] * (
                                dg[k][m][l] + dg[l][m][k] - dg[l][k][m])
                        gam[j, l, k] = 0.5 * acc
            self._gamma = gam
        return self._gamma

    # -- curvature ----------------------------------------------------------

    @property
    def riemann(self):
        """R^j_{klm} = d_l Gamma^j_{km} - d_m Gamma^j_{kl} + Gamma^j_{sl}Gamma^s_{km} - Gamma^j_{sm}Gamma^s_{kl}."""
        if self._riemann is None:
            n = self.n
            gam = self.gamma
            R = np.empty((n, n, n, n), dtype=object)
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        for m in range(n):
                            term = gam[j, k, m].partial(l) - gam[j, k, l].partial(m)
                            for s in range(n):
                                term = term + gam[j, s, l] * gam[s, k, m] \
                                            - gam[j, s, m] * gam[s, k, l]
                            R[j, k, l, m] = term
            self._riemann = R
        return self._riemann

    @property
    def ricci_mixed(self):
        """R^j_k = g^{jl} R_{lk}, with R_{jk} = R^l_{jlk}."""
        if self._ricci is None:
            n = self.n
            R = self.riemann
            ric_low = np.empty((n, n), dtype=object)
            for j in range(n):
                for k in range(n):
                    acc = 0.0
                    for l in range(n):
                        acc = acc + R[l, j, l, k]
                    ric_low[j, k] = acc
            mixed = np.empty((n, n), dtype=object)
            for j in range(n):
                for k in range(n):
                    acc = 0.0
                    for l in range(n):
                        acc = acc + self.ginv[j, l] * ric_low[l, k]
                    mixed[j, k] = acc
            self._ricci = mixed
        return self._ricci

    @property
    def sqrt_det(self):
        return jm.sqrt(self.det)

    def christoffel_trace(self):
        """Gamma^l_{kl} summed over l, one entry per k (equals d_k log sqrt|g|)."""
        n = self.n
        gam = self.gamma
        return [sum((gam[l, k, l] for l in range(n)), 0.0) for k in range(n)]


def laplace_beltrami(geo, f_jet):
    """Laplace-Beltrami of a scalar jet: (1/sqrt|g|) d_j (sqrt|g| g^{jk} d_k f)."""
    n = geo.n
    s = geo.sqrt_det
    acc = 0.0
    for j in range(n):
        inner = 0.0
        for k in range(n):
            inner = inner + s * geo.ginv[j, k] * f_jet.partial(k)
        acc = acc + inner.partial(j)
    return acc / s


def gradient(geo, f_jet):
    """Contravariant gradient components f^{;j} = g^{jl} d_l f."""
    n = geo.n
    return [sum((geo.ginv[j, l] * f_jet.partial(l) for l in range(n)), 0.0)
            for j in range(n)]


def covariant_jets(geo, f_jet):
    """Gradient, second covariant derivative (both indices raised), and (Delta f)^{;j}.

    f^{;j;k} = g^{km} (d_m f^{;j} + Gamma^j_{lm} f^{;l}).
    """
    n = geo.n
    grad = gradient(geo, f_jet)
    gam = geo.gamma
    hess = np.empty((n, n), dtype=object)
    for j in range(n):
        for k in range(n):
            acc = 0.0
            for m in range(n):
                cov = grad[j].partial(m)
                for l in range(n):
                    cov = cov + gam[j, l, m] * grad[l]
                acc = acc + geo.ginv[k, m] * cov
            hess[j, k] = acc
    lap = laplace_beltrami(geo, f_jet)
    grad_lap = [sum((geo.ginv[j, l] * lap.partial(l) for l in range(n)), 0.0)
                for j in range(n)]
    return {"grad": grad, "hess_up": hess, "grad_laplacian": grad_lap,
            "laplacian": lap}


def verify_boundary_normal_form(metric, points=None, tol=1e-10):
    """Check g_{nn} = 1 and g_{alpha n} = 0 on a sample of collar points.

    Returns the worst violation; raises ValueError("not boundary-normal ...")
    above `tol`, naming the offending sample point.
    """
    n = metric.n
    if points is None:
        rng = np.random.default_rng(0)
        points = rng.uniform(0.0, 1.0, size=(25, n))
        points[:, :-1] = rng.uniform(-2.0, 2.0, size=(25, n - 1))
    worst, worst_x = 0.0, None
    for x in points:
        g = metric.at(x)
        v = abs(g[n - 1, n - 1] - 1.0)
        for a in range(n - 1):
            v = max(v, abs(g[a, n - 1]), abs(g[n - 1, a]))
        if v > worst:
            worst, worst_x = v, np.asarray(x)
    if worst > tol:
        raise ValueError(
            f"not boundary-normal: violation {worst:.3e} at x = {worst_x}")
    return worst


def _scalar_laplacian_fd(geo_c, comp_fn, x, h):
    """Scalar Laplace-Beltrami with the outer derivatives by central FD.

    Delta phi = g^{kl} (d_k d_l phi - Gamma^m_{kl} d_m phi), second and first
    differences on `comp_fn`, metric data from the AD jets at the center.
    """
    n = len(x)
    phi0 = comp_fn(x)
    d1 = np.zeros(n, dtype=complex)
    d2 = np.zeros((n, n), dtype=complex)
    for k in range(n):
        xp, xm = np.array(x), np.array(x)
        xp[k] += h
        xm[k] -= h
        fp, fm = comp_fn(xp), comp_fn(xm)
        d1[k] = (fp - fm) / (2 * h)
        d2[k, k] = (fp - 2 * phi0 + fm) / h ** 2
    for k in range(n):
        for l in range(k + 1, n):
            q = np.zeros((2, 2), dtype=complex)
            for sk, sgnk in ((0, 1.0), (1, -1.0)):
                for sl, sgnl in ((0, 1.0), (1, -1.0)):
                    xx = np.array(x)
                    xx[k] += sgnk * h
                    xx[l] += sgnl * h
                    q[sk, sl] = comp_fn(xx)
            d2[k, l] = d2[l, k] = (q[0, 0] - q[0, 1] - q[1, 0] + q[1, 1]) / (4 * h ** 2)
    ginv = _value_mat(geo_c.ginv)
    gam = geo_c.gamma
    acc = 0.0
    for k in range(n):
        for l in range(n):
            corr = d2[k, l]
            for m in range(n):
                corr -= jm.value_of(gam[m, k, l]) * d1[m]
            acc += ginv[k, l] * corr
    return acc, d1


def lemma21_residual(metric, f, x, h):
    """Residual of the gradient Bochner identity, mixing FD and AD routes.

    Left side: the rough Laplacian of the gradient field u = grad_g f,
    componentwise via Delta_g u^j + 2 g^{kl} Gamma^j_{sk} d_l u^s
    + (g^{kl} d_k Gamma^j_{sl} + g^{kl} Gamma^j_{hl} Gamma^h_{sk}
       - g^{kl} Gamma^j_{sh} Gamma^h_{kl}) u^s, with the outer derivatives of
    u^s taken by central finite differences of step h.  Right side, all-AD:
    (Delta_g f)^{;j} + R^j_l f^{;l}.  The residual decays at O(h^2).

    Returns the residual vector (one entry per j).
    """
    n = metric.n
    x = np.asarray(x, dtype=float)
    geo_c = GeometryJet.at_point(metric, x, order=3)
    sp = geo_c.space
    f_jet = jm.as_jet(f(sp.variables(x)), sp)

    def component(j):
        def comp(xx):
            geo = GeometryJet.at_point(metric, xx, order=1)
            fj = jm.as_jet(f(geo.space.variables(xx)), geo.space)
            return jm.value_of(gradient(geo, fj)[j])
        return comp

    gam = geo_c.gamma
    ginv = _value_mat(geo_c.ginv)
    u0 = np.array([jm.value_of(v) for v in gradient(geo_c, f_jet)])

    lhs = np.zeros(n, dtype=complex)
    d1_all = {}
    for j in range(n):
        lap_j, d1_all[j] = _scalar_laplacian_fd(geo_c, component(j), x, h)
        lhs[j] = lap_j
    for j in range(n):
        for k in range(n):
            for l in range(n):
                for s in range(n):
                    lhs[j] += 2 * ginv[k, l] * jm.value_of(gam[j, s, k]) * d1_all[s][l]
            for s in range(n):
                coeff = 0.0
                for l in range(n):
                    coeff = coeff + ginv[k, l] * (
                        jm.value_of(gam[j, s, l].partial(k))
                        + sum(jm.value_of(gam[j, hh, l] * gam[hh, s, k])
                              for hh in range(n))
                        - sum(jm.value_of(gam[j, s, hh] * gam[hh, k, l])
                              for hh in range(n)))
                lhs[j] += coeff * u0[s]

    cov = covariant_jets(geo_c, f_jet)
    ric = geo_c.ricci_mixed
    rhs = np.zeros(n, dtype=complex)
    for j in range(n):
        rhs[j] = jm.value_of(cov["grad_laplacian"][j])
        for l in range(n):
            rhs[j] += jm.value_of(ric[j, l]) * u0[l]
    return lhs - rhs
