"""Exact layered-medium reference for the boundary symbol expansion.

On a flat metric with stratified viscosity mu = mu(x_n), the transformed
Stokes system separates under the tangential Fourier ansatz
(w, f) = W(x_n) exp(i k . x'): each frequency k leaves a linear two-point
boundary problem on the strip [0, T],

    W'' + b(x_n) W' + c(x_n, k) W = 0,    W(0) = e_j,    W(T) = 0,

and the Dirichlet-to-Neumann matrix is read off the boundary slope,
N(k)[:, j] = -W'(0).  Up to an exponentially small far-wall correction,
N(k) agrees with the boundary trace of the graded factor symbol,
q_1 + q_0 + q_{-1} + O(|k|^{-2}).

The coefficient matrices here are specialised to the layer by hand (b loses
its frequency part entirely, c collapses to a quadratic polynomial in k) and
their entries are generated symbolically from the profile, so the oracle
shares no assembly code with the symbol calculus it is used to test.

`convergence_report` drives both sides over a geometric frequency ladder and
fits the decay exponent of the remainder for each truncation depth.
"""

import numpy as np
from scipy.integrate import solve_bvp

from .factorization import full_symbol
from .fields import metric_flat, scalar_from_expression
from .interior import ProblemData

__all__ = [
    "LayeredProfile",
    "layered_ode_dn",
    "mesh_refinement_gap",
    "asymptotic_dn",
    "default_profiles",
    "constant_profile",
    "convergence_report",
]


def _vectorised(f):
    """Lift a lambdified scalar function to array-in/array-out over floats."""
    def g(tt):
        tt = np.asarray(tt, dtype=float)
        out = np.asarray(f(tt), dtype=float)
        if out.shape != tt.shape:
            out = np.broadcast_to(out, tt.shape).copy()
        return out
    return g


class LayeredProfile:
    """Stratified configuration: viscosity mu(t) on a strip of given depth.

    `mu` is a sympy expression (or parsable string) in the single symbol t,
    the normal coordinate; `rho` is the zeroth-order shift and `depth` the
    strip thickness, with a homogeneous Dirichlet wall at t = depth.  Every
    scalar coefficient the separated system needs -- down to the third
    derivative of 1/mu -- is derived symbolically and compiled once, so the
    ODE side never touches the jet machinery.

    A tangential frequency may be stored on the profile (`k`) or passed
    per call; `with_k` returns a re-frequencied copy for ladder sweeps.
    """

    def __init__(self, mu="2.0", n=2, rho=1.0, depth=1.0, k=None, name=None):
        import sympy

        if n < 2:
            raise ValueError("layered profile needs n >= 2")
        if rho < 0:
            raise ValueError("shift rho must be nonnegative")
        if depth <= 0:
            raise ValueError("strip depth must be positive")
        t = sympy.Symbol("t")
        tree = sympy.sympify(mu)
        tree = tree.subs({s: t for s in tree.free_symbols if s.name == "t"})
        extra = tree.free_symbols - {t}
        if extra:
            raise ValueError(
                f"profile must depend on t only, found {sorted(map(str, extra))}")
        self.n = int(n)
        self.rho = float(rho)
        self.depth = float(depth)
        self.k = None
        if k is not None:
            k = np.atleast_1d(np.asarray(k, dtype=float))
            if k.shape != (self.n - 1,):
                raise ValueError(f"k must have shape ({self.n - 1},)")
            self.k = k
        self.expr = tree
        self.name = name if name is not None else f"mu={tree}"
        self._sym = t
        self._fn = self._compile(tree, t, sympy)
        samples = self._fn["mu"](np.linspace(0.0, self.depth, 33))
        if np.min(samples) <= 0.0:
            raise ValueError("viscosity profile must stay positive on the strip")

    def _compile(self, tree, t, sympy):
        mr = tree + self.rho
        isq = mr ** sympy.Rational(-1, 2)
        minv = 1 / tree
        pieces = {
            "mu": tree,
            "mup": tree.diff(t),
            "mupp": tree.diff(t, 2),
            "sq": sympy.sqrt(mr),
            "isq": isq,
            "isqp": isq.diff(t),
            "isqpp": isq.diff(t, 2),
            "minvp": minv.diff(t),
            "minvpp": minv.diff(t, 2),
            "minvppp": minv.diff(t, 3),
        }
        return {key: _vectorised(sympy.lambdify(t, expr, modules="numpy"))
                for key, expr in pieces.items()}

    def with_k(self, k):
        return LayeredProfile(self.expr, n=self.n, rho=self.rho,
                              depth=self.depth, k=k, name=self.name)

    def mu_at(self, tt):
        return self._fn["mu"](tt)

    def problem_data(self):
        """The same configuration packaged as symbol-assembly input."""
        import sympy

        xn = sympy.Symbol(f"x{self.n}")
        field = scalar_from_expression(
            str(self.expr.subs(self._sym, xn)), self.n,
            positive=True, name=self.name)
        return ProblemData(metric_flat(self.n), field, rho=self.rho)

    # -- separated coefficient matrices --------------------------------
    #
    # Slots 0 .. n-1 are the vector components (n-1 is normal), slot n the
    # auxiliary scalar.  Tangential sums collapse because the metric is
    # euclidean and mu depends on t alone.

    def drift_matrix(self, tt):
        """First-order coefficient b(t); real, frequency-free, (m, m, ...)."""
        tt = np.asarray(tt, dtype=float)
        m = self.n + 1
        nn = self.n - 1
        f = self._fn
        mu = f["mu"](tt)
        mup = f["mup"](tt)
        b = np.zeros((m, m) + tt.shape)
        shear = self.rho * mup / (mu * (mu + self.rho))
        for j in range(self.n):
            b[j, j] = shear
        b[nn, nn] -= mup / mu
        b[nn, self.n] = -2.0 * f["sq"](tt) * f["minvpp"](tt)
        b[self.n, nn] = mu * f["isq"](tt)
        return b

    def potential_matrix(self, tt, k):
        """Zeroth-order coefficient c(t, k); complex, quadratic in k."""
        tt = np.asarray(tt, dtype=float)
        k = np.atleast_1d(np.asarray(k, dtype=float))
        if k.shape != (self.n - 1,):
            raise ValueError(f"k must have shape ({self.n - 1},)")
        m = self.n + 1
        nn = self.n - 1
        f = self._fn
        mu = f["mu"](tt)
        mup = f["mup"](tt)
        mupp = f["mupp"](tt)
        sq = f["sq"](tt)
        isq = f["isq"](tt)
        isqp = f["isqp"](tt)
        isqpp = f["isqpp"](tt)
        minvp = f["minvp"](tt)
        minvpp = f["minvpp"](tt)
        minvppp = f["minvppp"](tt)

        c = np.zeros((m, m) + tt.shape, dtype=complex)
        ksq = float(k @ k)
        for j in range(m):
            c[j, j] -= ksq
        diag = sq * isqpp + mup * sq / mu * isqp
        for j in range(self.n):
            c[j, j] += diag
        c[nn, nn] += mu * sq * minvp * isqp - mupp / mu
        for a in range(self.n - 1):
            c[nn, a] += -1j * (mup / mu) * k[a]
            c[self.n, a] += 1j * mu * isq * k[a]
        c[nn, self.n] += sq * (-2.0 * minvppp - 2.0 * (mup / mu) * minvpp)
        c[self.n, nn] += mu * isqp
        c[self.n, self.n] += -mu * minvpp
        return c


def _initial_mesh(depth, knorm, npts=None):
    """Exponentially graded mesh, dense toward the boundary layer at 0."""
    if npts is None:
        npts = int(min(1600, max(81, 10.0 * knorm * depth)))
    a = max(1.0, np.log(2.0 * max(knorm * depth, 1.0)))
    s = np.linspace(0.0, 1.0, npts)
    return depth * np.expm1(a * s) / np.expm1(a)


def layered_ode_dn(prof, k=None, tol=1e-10, max_nodes=200000, npts=None):
    """Dirichlet-to-Neumann matrix of the strip by direct boundary solves.

    Column j is -W'(0) for the solution with W(0) = e_j and W(T) = 0; the
    complex system is split into real and imaginary parts (4(n+1) first-order
    unknowns) for the collocation solver, whose adaptive mesh starts from an
    exponential grading matched to the O(1/|k|) boundary layer.

    Raises RuntimeError when the solve stalls or the interior amplifies the
    boundary data beyond reason -- both read as a resonant shift: adjust rho.
    """
    if k is None:
        k = prof.k
    if k is None:
        raise ValueError("no tangential frequency: pass k or set it on the profile")
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.shape != (prof.n - 1,):
        raise ValueError(f"k must have shape ({prof.n - 1},)")
    knorm = float(np.linalg.norm(k))
    if knorm == 0.0:
        raise ValueError("tangential frequency must be nonzero")

    m = prof.n + 1
    T = prof.depth
    mesh = _initial_mesh(T, knorm, npts)

    def fun(tt, y):
        b = prof.drift_matrix(tt)
        c = prof.potential_matrix(tt, k)
        cr, ci = c.real, c.imag
        Wr, Wi = y[0:m], y[m:2 * m]
        Vr, Vi = y[2 * m:3 * m], y[3 * m:4 * m]
        dot = lambda M, X: np.einsum("ijp,jp->ip", M, X)
        acc_r = -(dot(b, Vr) + dot(cr, Wr) - dot(ci, Wi))
        acc_i = -(dot(b, Vi) + dot(cr, Wi) + dot(ci, Wr))
        return np.vstack([Vr, Vi, acc_r, acc_i])

    # Initial guess per column: the decaying profile sinh(|k|(T-t))/sinh(|k|T),
    # written in exponentials so large |k|T cannot overflow.  A failed solve
    # gets one retry from a four-times denser grading before the failure is
    # reported as a resonance.
    den = 1.0 - np.exp(-2.0 * knorm * T)

    N = np.zeros((m, m), dtype=complex)
    for j in range(m):
        e = np.zeros(m)
        e[j] = 1.0

        def bc(ya, yb, e=e):
            return np.concatenate([ya[0:m] - e, ya[m:2 * m],
                                   yb[0:m], yb[m:2 * m]])

        sol = None
        for grid in (mesh, _initial_mesh(T, knorm, 4 * mesh.size - 3)):
            y0 = np.zeros((4 * m, grid.size))
            base = np.exp(-knorm * grid)
            far = np.exp(-knorm * (2.0 * T - grid))
            y0[j] = (base - far) / den
            y0[2 * m + j] = knorm * (far - base) / den
            sol = solve_bvp(fun, bc, grid, y0, tol=tol, max_nodes=max_nodes)
            if sol.success:
                break
        if not sol.success:
            raise RuntimeError(
                "layered boundary solve failed (resonant rho, adjust shift): "
                + str(sol.message))
        amp = float(np.max(np.abs(sol.y[0:2 * m])))
        if amp > 1e12:
            raise RuntimeError(
                f"layered boundary solve near-singular (interior amplitude "
                f"{amp:.2e}): resonant rho, adjust shift")
        N[:, j] = -(sol.y[2 * m:3 * m, 0] + 1j * sol.y[3 * m:4 * m, 0])
    return N


def mesh_refinement_gap(prof, k=None, tol=1e-10, npts=None):
    """Relative change of N under halving the initial mesh spacing.

    Both solves adapt to the same tolerance, so the gap estimates the
    discretisation error actually achieved rather than the formal order.
    """
    if npts is None:
        kk = prof.k if k is None else np.atleast_1d(np.asarray(k, dtype=float))
        knorm = float(np.linalg.norm(kk)) if kk is not None else 1.0
        npts = int(min(1600, max(81, 10.0 * knorm * prof.depth)))
    coarse = layered_ode_dn(prof, k, tol=tol, npts=npts)
    fine = layered_ode_dn(prof, k, tol=tol, npts=2 * npts - 1)
    scale = max(np.max(np.abs(fine)), 1.0)
    return float(np.max(np.abs(coarse - fine)) / scale)


def asymptotic_dn(data, k, K=3, x_tangent=None, order=None):
    """Boundary trace of the truncated factor sum q_1 + ... + q_{2-K}.

    `data` is the symbol-assembly configuration; the sample sits on the
    boundary (normal coordinate zero), at tangential position `x_tangent`
    (origin by default) and tangential frequency k.
    """
    n = data.n
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.shape != (n - 1,):
        raise ValueError(f"k must have shape ({n - 1},)")
    x = np.zeros(n)
    if x_tangent is not None:
        x_tangent = np.atleast_1d(np.asarray(x_tangent, dtype=float))
        if x_tangent.shape != (n - 1,):
            raise ValueError(f"x_tangent must have shape ({n - 1},)")
        x[:n - 1] = x_tangent
    res = full_symbol(data, (x, k), K=K, order=order)
    return res.total_value()


def default_profiles(n=2, rho=1.0):
    """Catalog of stratified profiles whose remainder ladders decrease
    monotonically at every truncation depth (the K = 1 ladder tends to the
    constant size of the subprincipal term, so monotonicity there depends
    on the approach direction; these profiles approach from above)."""
    return [
        LayeredProfile("1 + 0.5*t", n=n, rho=rho, name="ramp"),
        LayeredProfile("1.2 + 0.4*sin(t)", n=n, rho=rho, name="sin-layer"),
        LayeredProfile("1.5 + 0.3*sin(2*t)", n=n, rho=rho, name="oscillatory"),
    ]


def constant_profile(value=2.0, n=2, rho=1.0):
    """Uniform viscosity; the factor terminates, so remainders are only
    the exponentially small far-wall correction."""
    return LayeredProfile(repr(float(value)), n=n, rho=rho, name="constant")


def _as_frequency(kv, n):
    kv = np.asarray(kv, dtype=float)
    if kv.ndim == 0:
        out = np.zeros(n - 1)
        out[0] = float(kv)
        return out
    if kv.shape != (n - 1,):
        raise ValueError(f"frequency entries must be scalars or shape ({n - 1},)")
    return kv


def convergence_report(profiles=None, ks=(8.0, 16.0, 32.0, 64.0),
                       Ks=(1, 2, 3), n=2, tol=1e-10):
    """Residual ladder |N(k) - sum q| with fitted decay exponents.

    For each profile and truncation depth K the report records the max-abs
    remainder at every frequency, the least-squares slope p of
    log-remainder against log |k| (reported as a decay exponent, so K terms
    should give p close to K - 1), whether the ladder decreases
    monotonically, and the worst step ratio.  Frequencies should satisfy
    depth * |k| >= 8 so the far wall stays below the truncation error;
    scalar entries in `ks` are placed along the first tangential axis.
    """
    if profiles is None:
        profiles = default_profiles(n)
    report = []
    for prof in profiles:
        data = prof.problem_data()
        rows = []
        for kv in ks:
            kvec = _as_frequency(kv, prof.n)
            N = layered_ode_dn(prof, kvec, tol=tol)
            row = {"k": float(np.linalg.norm(kvec)), "residuals": {}}
            for K in Ks:
                S = asymptotic_dn(data, kvec, K=K)
                row["residuals"][K] = float(np.max(np.abs(N - S)))
            rows.append(row)
        fitted, monotone, ratio = {}, {}, {}
        logk = np.log([row["k"] for row in rows])
        for K in Ks:
            r = np.array([row["residuals"][K] for row in rows])
            floor = np.maximum(r, 1e-300)
            fitted[K] = float(-np.polyfit(logk, np.log(floor), 1)[0])
            monotone[K] = bool(np.all(np.diff(r) < 0.0))
            ratio[K] = float(np.max(floor[1:] / floor[:-1]))
        report.append({
            "profile": prof.name,
            "n": prof.n,
            "rho": prof.rho,
            "depth": prof.depth,
            "rows": rows,
            "fitted_p": fitted,
            "monotone": monotone,
            "step_ratio": ratio,
        })
    return report
