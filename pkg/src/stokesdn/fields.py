"""Closed-form scalar and metric fields on a boundary collar.

Coordinates are x = (x_1, ..., x_{n-1}, x_n) with n in {2, 3}: the first n-1
are tangential, x_n >= 0 is the distance to the boundary {x_n = 0}.  Fields
are plain Python closures written against the :mod:`stokesdn.jets` helpers, so
the same expression evaluates on floats (values) and on jets (derivatives).

Metrics are expected in boundary-normal form, g_{nn} = 1 and g_{alpha n} = 0;
that is *verified*, not assumed, by :func:`stokesdn.geometry.verify_boundary_normal_form`.
"""

import numpy as np

from . import jets as jm


def check_point(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"expected a point with {n} coordinates, got shape {x.shape}")
    if x[-1] < 0:
        raise ValueError(f"collar coordinate x_n must be >= 0, got {x[-1]}")
    return x


class ScalarField:
    """A smooth scalar function of x, evaluated on numbers or jets.

    ``fn`` takes a sequence of n scalars (floats or Jets) and returns one
    scalar.  ``positive`` marks fields that must stay positive (viscosity);
    violations raise at evaluation time rather than corrupting downstream
    square roots.
    """

    def __init__(self, fn, n, positive=False, name=None):
        self.fn = fn
        self.n = n
        self.positive = positive
        self.name = name or getattr(fn, "__name__", "field")

    def __call__(self, xs):
        val = self.fn(xs)
        if self.positive:
            v = jm.value_of(val)
            if not (v.real > 0 and abs(v.imag) < 1e-13):
                raise ValueError(f"field '{self.name}' must be positive, got {v} ")
        return val

    def jet(self, x, order, space=None):
        """Taylor jet at the point x; derivatives up to total degree `order`."""
        x = check_point(x, self.n)
        sp = space or jm.space(self.n, order)
        return jm.as_jet(self(sp.variables(x)), sp)

    def at(self, x):
        return jm.value_of(self(list(np.asarray(x, dtype=float))))


class MetricField:
    """Riemannian metric g_{jk}(x) given by a closure returning an n x n array."""

    def __init__(self, fn, n, name=None):
        self.fn = fn
        self.n = n
        self.name = name or "metric"

    def jet(self, xs, space):
        """Evaluate at coordinate jets ``xs``; entries coerced into ``space``."""
        raw = self.fn(xs)
        g = np.empty((self.n, self.n), dtype=object)
        for j in range(self.n):
            for k in range(self.n):
                g[j, k] = jm.as_jet(raw[j][k], space)
        return g

    def at(self, x):
        x = check_point(x, self.n)
        raw = self.fn(list(x))
        return np.array([[jm.value_of(raw[j][k]) for k in range(self.n)]
                         for j in range(self.n)], dtype=float)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def metric_flat(n):
    def fn(x):
        return [[1.0 if j == k else 0.0 for k in range(n)] for j in range(n)]
    return MetricField(fn, n, name="flat")


def metric_hyperbolic(n):
    """Constant-curvature slab: g = diag(e^{2 x_n}, ..., e^{2 x_n}, 1)."""
    def fn(x):
        w = jm.exp(2.0 * x[n - 1])
        g = [[0.0] * n for _ in range(n)]
        for a in range(n - 1):
            g[a][a] = w
        g[n - 1][n - 1] = 1.0
        return g
    return MetricField(fn, n, name="hyperbolic")


def metric_curved(n, kappas, warp=0.0):
    """Curved-boundary family with prescribed principal curvatures.

    g_{aa} = (1 + kappa_a x_n)^2 up to an O(x_n^2) tangential warp, so the
    shape operator of {x_n = 0} is diag(kappa_1, ..., kappa_{n-1}) exactly.
    """
    kappas = list(kappas)
    if len(kappas) != n - 1:
        raise ValueError(f"need {n-1} principal curvatures, got {len(kappas)}")

    def fn(x):
        xn = x[n - 1]
        g = [[0.0] * n for _ in range(n)]
        for a in range(n - 1):
            gaa = (1.0 + kappas[a] * xn) ** 2
            if warp:
                gaa = gaa * (1.0 + warp * jm.sin(x[0] + float(a)) * xn * xn)
            g[a][a] = gaa
        if warp and n == 3:
            cross = 0.5 * warp * xn * xn * jm.sin(x[0] + x[1])
            g[0][1] = g[1][0] = cross
        g[n - 1][n - 1] = 1.0
        return g
    name = "curved(" + ",".join(f"{k:g}" for k in kappas)
    name += f";warp={warp:g})" if warp else ")"
    return MetricField(fn, n, name=name)


def metric_perturbed(n, rng=None, amplitude=0.15):
    """A generic smooth boundary-normal metric with tangential dependence.

    Draws a handful of trigonometric perturbation coefficients; amplitude
    small enough to keep the tangential block positive definite on the collar
    0 <= x_n <= 1, |x'| <= 2.
    """
    rng = np.random.default_rng(rng)
    m = n - 1
    coef = amplitude * rng.uniform(-1.0, 1.0, size=(m, m, 3))
    phase = rng.uniform(0.0, 2 * np.pi, size=(m, m, 3))

    def fn(x):
        xn = x[n - 1]
        g = [[0.0] * n for _ in range(n)]
        for a in range(m):
            for b in range(a, m):
                u = x[0] + (x[1] if n == 3 else 0.0)
                pert = (coef[a, b, 0] * jm.sin(u + phase[a, b, 0])
                        + coef[a, b, 1] * jm.sin(2.0 * u + phase[a, b, 1]) * xn
                        + coef[a, b, 2] * jm.cos(u + phase[a, b, 2]) * xn * xn)
                if a == b:
                    g[a][a] = 1.0 + pert
                else:
                    g[a][b] = g[b][a] = 0.5 * pert
        g[n - 1][n - 1] = 1.0
        return g
    return MetricField(fn, n, name="perturbed")


_METRICS = {
    "flat": lambda n, p: metric_flat(n),
    "hyperbolic": lambda n, p: metric_hyperbolic(n),
    "curved": lambda n, p: metric_curved(
        n, p.get("kappas", [0.5] * (n - 1)), warp=p.get("warp", 0.0)),
    "perturbed": lambda n, p: metric_perturbed(
        n, rng=p.get("seed"), amplitude=p.get("amplitude", 0.15)),
}


def get_metric(name, n, **params):
    if name not in _METRICS:
        raise KeyError(f"unknown catalog metric '{name}' (have {sorted(_METRICS)})")
    if n not in (2, 3):
        raise ValueError("dimension n must be 2 or 3")
    return _METRICS[name](n, params)


def catalog_metrics(n, seed=7):
    """The metrics every sweeping test runs over."""
    return [
        metric_flat(n),
        metric_hyperbolic(n),
        metric_curved(n, [0.5] + [-0.3] * (n - 2), warp=0.2),
        metric_perturbed(n, rng=seed),
    ]


# -- viscosity fields -------------------------------------------------------

def mu_constant(n, value=1.0):
    return ScalarField(lambda x: value + 0.0 * x[0], n, positive=True,
                       name=f"mu={value:g}")


def mu_boundary_sine(n, amp=0.3):
    """mu = 1 + amp * sin(x_1) e^{-x_n}: tangential and normal variation."""
    def fn(x):
        return 1.0 + amp * jm.sin(x[0]) * jm.exp(-x[n - 1])
    return ScalarField(fn, n, positive=True, name="mu_boundary_sine")


def mu_layered(n, base=2.0, amp=0.4, rate=1.0):
    """Stratified viscosity mu(x_n) = base + amp * e^{-rate x_n}."""
    def fn(x):
        return base + amp * jm.exp(-rate * x[n - 1])
    return ScalarField(fn, n, positive=True, name="mu_layered")


def scalar_from_expression(expr, n, positive=False, name=None):
    """Build a ScalarField from a sympy-parsable expression in x1..xn.

    Used by the CLI so config files can state viscosities in closed form.
    """
    import sympy

    syms = sympy.symbols(f"x1:{n + 1}")
    tree = sympy.sympify(expr)
    extra = tree.free_symbols - set(syms)
    if extra:
        raise ValueError(f"expression uses unknown symbols {sorted(map(str, extra))}")
    fn = sympy.lambdify(syms, tree, modules=[{
        "sin": jm.sin, "cos": jm.cos, "exp": jm.exp, "log": jm.log,
        "sqrt": jm.sqrt, "Abs": abs}, "math"])
    return ScalarField(lambda x: fn(*x), n, positive=positive,
                       name=name or f"expr:{expr}")
