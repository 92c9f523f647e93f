"""Submultiplicative weight functions and their directional growth data.

Each built-in family g >= 1 carries an analytic directional rate
beta(w) = lim ln g(r w) / r, and the support set
Pi_g = {xi : xi.w <= beta(w) for all unit w} is queried through half-space
membership tests.  A generic numerical rate estimator is provided for
cross-checking the analytic values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MEMBERSHIP_TOL = 1e-9

_KINDS = ("poly", "lambda", "stretched-exp", "half-exp", "log", "product")


@dataclass(frozen=True)
class GrowthFunction:
    """Weight g : R^n -> [1, inf) from a closed catalogue of families.

    poly(lam):            (1 + |x|)^lam
    lambda(beta):         (1 + |x|^2)^(beta/2)
    stretched-exp(a, gam): exp(a |x|^gam), gam in [0, 1]
    half-exp(v):          max(exp(x.v), 1)
    log(beta):            log^beta(|x| + e)
    product:              product of at most 3 factors
    """

    kind: str
    dim: int
    lam: float = 0.0
    beta: float = 0.0
    alpha: float = 0.0
    gamma: float = 0.0
    v: np.ndarray | None = None
    factors: tuple = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown growth kind {self.kind!r}")
        if self.kind in ("poly",) and self.lam < 0:
            raise ValueError("poly exponent must be >= 0")
        if self.kind in ("lambda", "log") and self.beta < 0:
            raise ValueError("weight exponent must be >= 0")
        if self.kind == "stretched-exp":
            if self.alpha < 0 or not 0.0 <= self.gamma <= 1.0:
                raise ValueError("need alpha >= 0 and gamma in [0, 1]")
        if self.kind == "half-exp":
            vv = np.atleast_1d(np.asarray(self.v, dtype=float))
            if vv.shape != (self.dim,):
                raise ValueError("half-exp direction has wrong dimension")
            object.__setattr__(self, "v", vv)
        if self.kind == "product":
            if not 1 <= len(self.factors) <= 3:
                raise ValueError("products take 1 to 3 factors")
            if any(f.dim != self.dim for f in self.factors):
                raise ValueError("product factors must share the dimension")
            if any(f.kind == "product" for f in self.factors):
                raise ValueError("nested products are not supported")

    # -- evaluation ----------------------------------------------------------

    def log_value(self, x):
        """ln g(x), vectorized over x of shape (..., n); never overflows."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError("point dimension mismatch")
        if self.kind == "product":
            return sum(f.log_value(x) for f in self.factors)
        r = np.linalg.norm(x, axis=-1)
        if self.kind == "poly":
            return self.lam * np.log1p(r)
        if self.kind == "lambda":
            return 0.5 * self.beta * np.log1p(r * r)
        if self.kind == "stretched-exp":
            return self.alpha * r ** self.gamma
        if self.kind == "half-exp":
            return np.maximum(x @ self.v, 0.0)
        return self.beta * np.log(np.log(r + np.e))

    def value(self, x):
        return np.exp(self.log_value(x))

    # -- analytic growth data -------------------------------------------------

    def beta_analytic(self, omega):
        """Directional rate beta(w) in closed form."""
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        if self.kind == "product":
            return sum(f.beta_analytic(omega) for f in self.factors)
        if self.kind == "stretched-exp" and self.gamma == 1.0:
            return self.alpha
        if self.kind == "half-exp":
            return max(float(omega @ self.v), 0.0)
        return 0.0

    def max_rate(self):
        """sup over directions of beta(w)."""
        if self.kind == "product":
            return sum(f.max_rate() for f in self.factors)
        if self.kind == "stretched-exp" and self.gamma == 1.0:
            return self.alpha
        if self.kind == "half-exp":
            return float(np.linalg.norm(self.v))
        return 0.0

    def is_superpolynomial(self):
        """True when g outgrows every polynomial along some direction."""
        if self.kind == "product":
            return any(f.is_superpolynomial() for f in self.factors)
        if self.kind == "stretched-exp":
            return self.alpha > 0 and self.gamma > 0
        if self.kind == "half-exp":
            return bool(np.any(self.v))
        return False

    def poly_degree(self):
        """Polynomial growth order (meaningful when not superpolynomial)."""
        if self.kind == "product":
            return sum(f.poly_degree() for f in self.factors)
        if self.kind == "poly":
            return self.lam
        if self.kind == "lambda":
            return self.beta
        return 0.0

    def is_radial(self):
        if self.kind == "product":
            return all(f.is_radial() for f in self.factors)
        return not (self.kind == "half-exp" and np.any(self.v))

    def log_radial(self, r):
        """ln g(x) as a function of r = |x|; only for radial families."""
        if not self.is_radial():
            raise ValueError("weight is not rotationally symmetric")
        if self.kind == "product":
            return sum(f.log_radial(r) for f in self.factors)
        r = np.asarray(r, dtype=float)
        if self.kind == "poly":
            return self.lam * np.log1p(r)
        if self.kind == "lambda":
            return 0.5 * self.beta * np.log1p(r * r)
        if self.kind == "stretched-exp":
            return self.alpha * r ** self.gamma
        if self.kind == "half-exp":
            return np.zeros_like(r)
        return self.beta * np.log(np.log(r + np.e))

    def submultiplicative_constant(self):
        """Analytic c with g(x + y) <= c g(x) g(y)."""
        if self.kind == "product":
            return float(np.prod([f.submultiplicative_constant()
                                  for f in self.factors]))
        if self.kind == "lambda":
            return 2.0 ** (self.beta / 2.0)
        if self.kind == "log":
            return 2.0 ** self.beta
        return 1.0

    def describe(self):
        if self.kind == "poly":
            return f"(1+|x|)^{self.lam:g}"
        if self.kind == "lambda":
            return f"(1+|x|^2)^({self.beta:g}/2)"
        if self.kind == "stretched-exp":
            return f"exp({self.alpha:g}|x|^{self.gamma:g})"
        if self.kind == "half-exp":
            return f"max(exp(x.{np.array2string(self.v, precision=3)}), 1)"
        if self.kind == "log":
            return f"log^{self.beta:g}(|x|+e)"
        return " * ".join(f.describe() for f in self.factors)


# -- constructors --------------------------------------------------------------

def poly_weight(lam, dim=1):
    return GrowthFunction("poly", dim, lam=lam)


def lambda_weight(beta, dim=1):
    return GrowthFunction("lambda", dim, beta=beta)


def stretched_exp_weight(alpha, gamma, dim=1):
    return GrowthFunction("stretched-exp", dim, alpha=alpha, gamma=gamma)


def exp_weight(alpha, dim=1):
    """exp(alpha |x|), the gamma = 1 stretched-exponential."""
    return GrowthFunction("stretched-exp", dim, alpha=alpha, gamma=1.0)


def half_exp_weight(v):
    v = np.atleast_1d(np.asarray(v, dtype=float))
    return GrowthFunction("half-exp", v.size, v=v)


def log_weight(beta, dim=1):
    return GrowthFunction("log", dim, beta=beta)


def product_weight(*factors):
    if not factors:
        raise ValueError("empty product")
    return GrowthFunction("product", factors[0].dim, factors=tuple(factors))


# -- direction sampling ---------------------------------------------------------

def sphere_directions(dim, count):
    """Deterministic, evenly spread unit vectors.

    1-d: {-1, +1}; 2-d: uniform angles; 3-d: Fibonacci sphere.
    """
    if dim == 1:
        return np.array([[-1.0], [1.0]])
    if dim == 2:
        th = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    if dim == 3:
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        phi = np.pi * (1.0 + np.sqrt(5.0)) * i
        s = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)
    raise ValueError("direction sampling supports dimensions 1..3")


# -- directional rate estimation -------------------------------------------------

@dataclass(frozen=True)
class BetaEstimate:
    value: float
    error_bar: float
    method: str


def beta_of_direction(g, omega, r_max=200.0, method="auto"):
    """Directional rate beta(w) = lim ln g(r w)/r.

    method="analytic" uses the family's closed form, "numeric" a model fit
    to exact log samples at dyadic radii r_max * 2^-j, "auto" prefers the
    closed form.  The numeric path reports the extrapolant together with a
    stability spread as its error bar.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    if abs(np.linalg.norm(omega) - 1.0) > 1e-12:
        raise ValueError("omega must be a unit vector")
    if method in ("auto", "analytic"):
        return BetaEstimate(float(g.beta_analytic(omega)), 0.0, "analytic")
    if method != "numeric":
        raise ValueError(f"unknown method {method!r}")
    return _beta_numeric(g, omega, r_max)


def _beta_numeric(g, omega, r_max, n_nodes=14):
    # ln g along the ray is fit with the exact log-shapes of the catalogue:
    # beta*r + c0 + c1 ln(1+r) + c2 ln(1+r^2) + c3 lnln(r+e) + A r^gamma,
    # with the stretch exponent gamma resolved by scanning.
    rs = r_max * 2.0 ** (-np.arange(n_nodes))
    y = np.array([float(g.log_value(r * omega)) for r in rs])

    def fit(radii, vals):
        base = [radii, np.ones_like(radii), np.log1p(radii),
                np.log1p(radii ** 2), np.log(np.log(radii + np.e))]
        best = (np.inf, 0.0)
        for gam in np.linspace(0.05, 0.97, 185):
            A = np.stack(base + [radii ** gam], axis=1)
            coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
            resid = vals - A @ coef
            rss = float(resid @ resid)
            if rss < best[0]:
                best = (rss, float(coef[0]))
        return best

    rss_full, beta_full = fit(rs, y)
    _, beta_top = fit(rs[:9], y[:9])
    bar = abs(beta_full - beta_top) + np.sqrt(rss_full / len(rs)) / r_max
    return BetaEstimate(beta_full, bar, "numeric")


# -- the envelope set -------------------------------------------------------------

@dataclass(frozen=True)
class EnvelopeSet:
    """Support data of Pi_g: exact shapes where known, sampled otherwise."""

    description: str  # point-origin | ball | segment | half-space-intersection
    dim: int
    radius: float = 0.0
    endpoint: np.ndarray | None = None
    directions: np.ndarray | None = None
    rates: np.ndarray | None = None
    tol: float = MEMBERSHIP_TOL

    def contains(self, xi):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if self.description == "point-origin":
            return bool(np.linalg.norm(xi) <= self.tol)
        if self.description == "ball":
            return bool(np.linalg.norm(xi) <= self.radius + self.tol)
        if self.description == "segment":
            e = self.endpoint
            t = float(xi @ e) / float(e @ e)
            t = min(max(t, 0.0), 1.0)
            return bool(np.linalg.norm(xi - t * e) <= self.tol)
        return bool(np.all(self.directions @ xi <= self.rates + self.tol))


def envelope_of(g, direction_count=256):
    """Build the envelope set for a growth function."""
    rate = g.max_rate()
    if rate == 0.0:
        return EnvelopeSet("point-origin", g.dim)
    # decompose into the radial exponential rate and half-exp directions
    halfs = [f for f in ([g] if g.kind != "product" else g.factors)
             if f.kind == "half-exp" and np.any(f.v)]
    radial_rate = rate - sum(float(np.linalg.norm(f.v)) for f in halfs)
    if not halfs:
        return EnvelopeSet("ball", g.dim, radius=radial_rate)
    if len(halfs) == 1 and radial_rate == 0.0:
        return EnvelopeSet("segment", g.dim, endpoint=halfs[0].v.copy())
    dirs = sphere_directions(g.dim, direction_count)
    rates = np.array([g.beta_analytic(w) for w in dirs])
    return EnvelopeSet("half-space-intersection", g.dim,
                       directions=dirs, rates=rates)


def pi_g_membership(g, xi, direction_count=256):
    """Whether xi.w <= beta(w) holds over a sampled set of directions.

    The directions of +-xi itself are always included so the supporting
    half-space of the query point is never missed.
    """
    if g.dim > 1 and direction_count < 64:
        raise ValueError("need at least 64 sampled directions")
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    dirs = sphere_directions(g.dim, direction_count)
    nrm = np.linalg.norm(xi)
    if nrm > 0:
        dirs = np.vstack([dirs, xi / nrm, -xi / nrm])
    rates = np.array([g.beta_analytic(w) for w in dirs])
    return bool(np.all(dirs @ xi <= rates + MEMBERSHIP_TOL))


# -- bound verification and the growth-condition gate ------------------------------

@dataclass(frozen=True)
class EnvelopeBoundReport:
    lower_bound_ok: bool
    violations: list
    upper_thresholds: dict  # eps -> smallest sampled r past which the bound holds
    beta: float


def envelope_bound_check(g, omega, r_samples, eps_values=(0.1, 0.01)):
    """Check ln g(r w) >= beta(w) r at samples; locate upper-bound onsets.

    Lower-bound violations indicate a broken family implementation and are
    returned explicitly.  For each eps the report carries the smallest
    sampled radius past which ln g(r w) <= (beta + eps) r holds at all
    larger samples (None if it fails through the last sample).
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    rs = np.asarray(sorted(r_samples), dtype=float)
    if np.any(rs <= 0):
        raise ValueError("radial samples must be positive")
    beta = float(g.beta_analytic(omega))
    lng = np.array([float(g.log_value(r * omega)) for r in rs])
    bad = [float(r) for r, v in zip(rs, lng) if v < beta * r - 1e-12]
    thresholds = {}
    for eps in eps_values:
        ok = lng <= (beta + eps) * rs + 1e-12
        holds_from = None
        for i in range(len(rs)):
            if np.all(ok[i:]):
                holds_from = float(rs[i])
                break
        thresholds[eps] = holds_from
    return EnvelopeBoundReport(not bad, bad, thresholds, beta)


def check_growth_condition(h, k):
    """Whether Lambda^-k h(x) -> 0 at infinity, decided per family.

    True exactly for polynomially dominated weights of total order < k.
    Weights passing this gate also satisfy the GRS condition used in
    weighted convolution-algebra arguments.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    if h.is_superpolynomial():
        return False
    return h.poly_degree() < k
