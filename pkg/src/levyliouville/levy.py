"""Levy triplets, characteristic exponents and evaluable multiplier symbols.

The exponent of a triplet (b, Q, nu) is

    psi(xi) = -i b.xi + (1/2) xi.Q xi
              + int_{0<|y|<1} (1 - e^{i y.xi} + i y.xi) nu(dy)
              + int_{|y|>=1}  (1 - e^{i y.xi}) nu(dy),

evaluated with atom sums exact and radial families by adaptive quadrature.
The same triplet can be continued to purely imaginary arguments xi = -i eta
whenever the exponential moment of nu in the direction eta is finite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .growth import GrowthFunction, half_exp_weight
from .jumps import (Atom, JumpMeasure, ProjectedFamily, RadialFamily, _quad,
                    plain_exp_term)

PSD_TOL = -1e-12


class ExtensionUndefinedError(ValueError):
    """The exponent cannot be continued in the requested direction."""


class PreconditionError(ValueError):
    """A documented precondition of an operation failed."""


@dataclass
class LevyTriplet:
    """Drift vector, Gaussian covariance and jump measure."""

    b: np.ndarray
    Q: np.ndarray
    nu: JumpMeasure | None = None

    def __post_init__(self):
        self.b = np.atleast_1d(np.asarray(self.b, dtype=float))
        n = self.b.size
        Q = np.asarray(self.Q, dtype=float).reshape(n, n)
        self.Q = 0.5 * (Q + Q.T)
        if np.linalg.eigvalsh(self.Q).min() < PSD_TOL:
            raise ValueError("Gaussian covariance must be positive semidefinite")
        if self.nu is None:
            self.nu = JumpMeasure(dim=n)
        if self.nu.dim != n:
            raise ValueError("jump measure dimension mismatch")

    @property
    def dim(self):
        return self.b.size

    def with_truncation(self, eps):
        """Copy with every radial family cut off below `eps` (atoms kept)."""
        fams = []
        for f in self.nu.families:
            if isinstance(f, ProjectedFamily):
                raise ValueError("cannot truncate a projected family")
            fams.append(RadialFamily(f.kind, f.dim, f.c, alpha=f.alpha,
                                     rate=f.rate, eps=max(f.eps, eps),
                                     rmax=f.rmax))
        return LevyTriplet(self.b.copy(), self.Q.copy(),
                           JumpMeasure(list(self.nu.atoms), fams, self.dim))


def evaluate_exponent(triplet, xi):
    """Characteristic exponent psi(xi); vectorized over xi of shape (..., n)."""
    xi = np.asarray(xi, dtype=float)
    scalar = xi.ndim == 1
    if xi.shape[-1] != triplet.dim:
        raise ValueError(f"xi has dimension {xi.shape[-1]}, "
                         f"triplet has {triplet.dim}")
    drift = -1j * (xi @ triplet.b)
    gauss = 0.5 * np.einsum("...i,ij,...j", xi, triplet.Q, xi)
    out = drift + gauss + triplet.nu.exponent_integral(xi)
    return complex(out) if scalar else out


def evaluate_extension(triplet, eta):
    """psi(-i eta), the real-valued continuation along imaginary frequencies.

    Requires a finite exponential moment int_{|y|>=1} e^{y.eta} nu(dy);
    checked through the weight-moment machinery with the half-exponential
    weight pointing along eta.
    """
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    if eta.shape != (triplet.dim,):
        raise ValueError("eta dimension mismatch")
    if np.any(eta):
        mc = check_weight_moment(triplet.nu, half_exp_weight(eta),
                                 compute_value=False)
        if not mc.finite:
            raise ExtensionUndefinedError(
                "extension undefined in this direction: "
                f"int e^(y.eta) d nu diverges for eta={eta}")
    val = (-float(eta @ triplet.b)
           - 0.5 * float(eta @ triplet.Q @ eta)
           + triplet.nu.extension_integral(eta))
    return float(val)


def extension_values(triplet, etas):
    """Vectorized guarded extension: NaN where the moment condition fails.

    Intended for zero-set scans over eta grids; single points should use
    evaluate_extension, which raises instead of masking.
    """
    etas = np.asarray(etas, dtype=float)
    out = (-(etas @ triplet.b)
           - 0.5 * np.einsum("...i,ij,...j", etas, triplet.Q, etas))
    if triplet.nu.is_empty():
        return out
    rho = np.linalg.norm(etas, axis=-1)
    thr = triplet.nu.exp_moment_threshold()
    ok = (rho == 0.0) | (rho < thr)
    part = np.full(out.shape, np.nan)
    if np.any(ok):
        part[ok] = triplet.nu.extension_integral(etas[ok])
    return np.where(ok, out + part, np.nan)


def project_triplet(triplet, x):
    """Triplet of the scalar projection x.X of the process.

    Q^x = x.Qx, nu^x is the image of nu under y -> x.y, and the drift picks
    up the compensator mismatch
    b^x = x.b + int x.z (1_{|x.z|<1} - 1_{|z|<1}) nu(dz),
    which is exactly what makes psi^x(t) = psi(t x).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (triplet.dim,):
        raise ValueError("projection vector dimension mismatch")
    if not np.any(x):
        raise ValueError("projection direction must be nonzero")
    bx = float(x @ triplet.b) + triplet.nu.drift_correction(x)
    qx = float(x @ triplet.Q @ x)
    return LevyTriplet(np.array([bx]), np.array([[qx]]), triplet.nu.project(x))


# -- generalized higher-order symbols -----------------------------------------

@dataclass
class GeneralizedKappa:
    """Polynomial-plus-jump symbol of order 2s.

    kappa(xi) = sum_{|a| <= 2s} c_a (i^|a|/a!) xi^a
                + int_{0<|y|<1} [1 - e^{i y.xi}
                                 + sum_{1<=|a|<=2s-1} (i^|a|/a!) y^a xi^a] nu(dy)
                + int_{|y|>=1} (1 - e^{i y.xi}) nu(dy)

    The compensating Taylor sum starts at |a| = 1; including the constant
    term would break both integrability of the small-jump integrand and the
    s = 1 reduction to the ordinary exponent.
    """

    order: int
    dim: int
    coefficients: dict = field(default_factory=dict)
    nu: JumpMeasure | None = None

    def __post_init__(self):
        if self.order < 1 or int(self.order) != self.order:
            raise ValueError("order s must be a positive integer")
        for alpha, c in self.coefficients.items():
            if len(alpha) != self.dim:
                raise ValueError(f"multi-index {alpha} has wrong length")
            if any(a < 0 or int(a) != a for a in alpha):
                raise ValueError(f"invalid multi-index {alpha}")
            if sum(alpha) > 2 * self.order:
                raise ValueError(f"multi-index {alpha} exceeds degree 2s")
        if self.nu is None:
            self.nu = JumpMeasure(dim=self.dim)
        for f in self.nu.families:
            fam = f.source if isinstance(f, ProjectedFamily) else f
            if fam.kind == "stable-like" and fam.eps == 0.0 \
                    and fam.alpha >= 2 * self.order:
                raise ValueError("jump measure lacks the required 2s-moment "
                                 "near the origin")


def evaluate_generalized(kappa, xi):
    """Evaluate a generalized symbol; vectorized like evaluate_exponent."""
    xi = np.asarray(xi, dtype=float)
    scalar = xi.ndim == 1
    if xi.shape[-1] != kappa.dim:
        raise ValueError("xi dimension mismatch")
    out = np.zeros(xi.shape[:-1], dtype=complex)
    for alpha, c in kappa.coefficients.items():
        k = sum(alpha)
        mono = np.ones(xi.shape[:-1])
        for j, a in enumerate(alpha):
            if a:
                mono = mono * xi[..., j] ** a
        fact = np.prod([special.factorial(a) for a in alpha])
        out = out + c * (1j ** k) / fact * mono
    out = out + kappa.nu.kappa_integral(xi, kappa.order)
    return complex(out) if scalar else out


def triplet_as_kappa(triplet):
    """Order-1 generalized symbol identical to the triplet's exponent."""
    n = triplet.dim
    coeffs = {}
    for j in range(n):
        e = tuple(1 if i == j else 0 for i in range(n))
        if triplet.b[j]:
            coeffs[e] = -triplet.b[j]
        e2 = tuple(2 if i == j else 0 for i in range(n))
        if triplet.Q[j, j]:
            coeffs[e2] = -triplet.Q[j, j]
    for j, k in itertools.combinations(range(n), 2):
        if triplet.Q[j, k]:
            idx = tuple(1 if i in (j, k) else 0 for i in range(n))
            coeffs[idx] = -triplet.Q[j, k]
    return GeneralizedKappa(1, n, coeffs, triplet.nu)


# -- moment checks --------------------------------------------------------------

@dataclass(frozen=True)
class MomentCheck:
    finite: bool
    value: float | None
    detail: str


def check_weight_moment(nu, weight: GrowthFunction, compute_value=True):
    """Finiteness (and value) of int_{|y| >= 1} g(y) nu(dy).

    Atoms are summed exactly.  For radial families the verdict is analytic:
    the weight's growth class is compared against the family's tail decay,
    and only convergent integrals are handed to quadrature.
    """
    if weight.dim != nu.dim:
        raise ValueError("weight dimension mismatch")
    pieces = []
    total = 0.0
    for a in nu.atoms:
        if np.linalg.norm(a.position) >= 1.0:
            total += a.mass * float(weight.value(a.position))
    for f in nu.families:
        finite, why = _family_moment_finite(f, weight)
        if not finite:
            return MomentCheck(False, None, why)
        pieces.append(f)
    if compute_value:
        for f in pieces:
            total += _family_moment_value(f, weight)
        return MomentCheck(True, total, "converged")
    return MomentCheck(True, None, "finiteness only")


def _family_moment_finite(f, weight):
    if isinstance(f, ProjectedFamily):
        src, scale = f.source, f.scale
        rmax = src.rmax * scale
        power = src.alpha if src.kind == "stable-like" else None
        rate = src.rate / scale if src.kind == "truncated-exponential" else None
    else:
        rmax = f.rmax
        power = f.alpha if f.kind == "stable-like" else None
        rate = f.rate if f.kind == "truncated-exponential" else None
    if np.isfinite(rmax):
        return True, "compact support"
    if power is not None:
        if weight.is_superpolynomial():
            return False, (f"int |y|>=1 of {weight.describe()} against a "
                           f"|y|^(-n-{power:g}) tail diverges: the weight "
                           "outgrows every polynomial")
        if weight.poly_degree() >= power:
            return False, (f"int |y|>=1 of {weight.describe()} diverges: "
                           f"growth order {weight.poly_degree():g} >= "
                           f"tail index {power:g}")
        return True, "polynomial domination"
    if weight.max_rate() >= rate:
        return False, (f"int |y|>=1 of {weight.describe()} diverges: "
                       f"exponential rate {weight.max_rate():g} >= "
                       f"tail rate {rate:g}")
    return True, "exponential domination"


def _family_moment_value(f, weight):
    if isinstance(f, ProjectedFamily):
        return f.integral(lambda u: float(weight.value(np.array([u]))), lo=1.0)
    lo = max(1.0, f.eps)
    if lo >= f.rmax:
        return 0.0
    n = f.dim

    def log_line(r):
        s = np.log(2.0 if n == 1 else (2 * np.pi if n == 2 else 4 * np.pi))
        s += np.log(f.c)
        if f.kind == "stable-like":
            return s + (-1.0 - f.alpha) * np.log(r)
        return s - f.rate * r + (n - 1) * np.log(r)

    if weight.is_radial():
        integrand = lambda r: np.exp(float(weight.log_radial(r)) + log_line(r))
    else:
        def integrand(r):
            lmax = _max_log_on_sphere(weight, r)
            avg = _angular_avg(lambda w: np.exp(
                float(weight.log_value(r * w)) - lmax), n)
            return np.exp(lmax + np.log(avg) + log_line(r))
    return _quad(integrand, lo, f.rmax if np.isfinite(f.rmax) else np.inf)


def _max_log_on_sphere(weight, r):
    from .growth import sphere_directions
    dirs = sphere_directions(weight.dim, 128)
    return float(np.max(weight.log_value(r * dirs)))


def _angular_avg(fn, n):
    if n == 1:
        return 0.5 * (fn(np.array([1.0])) + fn(np.array([-1.0])))
    if n == 2:
        val = _quad(lambda th: fn(np.array([np.cos(th), np.sin(th)])),
                    0.0, 2 * np.pi)
        return val / (2 * np.pi)
    val = _quad(lambda z: _quad(
        lambda ph, z=z: fn(np.array([np.sqrt(1 - z * z) * np.cos(ph),
                                     np.sqrt(1 - z * z) * np.sin(ph), z])),
        0.0, 2 * np.pi), -1.0, 1.0)
    return val / (4 * np.pi)


# -- subordination ---------------------------------------------------------------

@dataclass(frozen=True)
class BernsteinSpec:
    """Laplace exponent of a subordinator: sqrt, identity, or a + b x."""

    kind: str
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in ("sqrt", "identity", "affine"):
            raise ValueError(f"unknown Bernstein spec {self.kind!r}")
        if self.kind == "affine" and (self.a < 0 or self.b < 0):
            raise ValueError("affine Bernstein coefficients must be >= 0")

    def apply(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "identity":
            return z
        if self.kind == "affine":
            return self.a + self.b * z
        return np.sqrt(z)  # principal branch, cut on the negative real axis


def subordinate_symbol(bernstein, symbol, tau, xi):
    """f_S(-i tau + psi(xi)) for the subordinated space-time symbol.

    psi has nonnegative real part, so the argument stays in the closed right
    half-plane where the principal square root is continuous; arguments with
    negative real part are rejected.
    """
    psi = symbol.evaluate(xi) if hasattr(symbol, "evaluate") else symbol
    arg = -1j * float(tau) + np.asarray(psi, dtype=complex)
    if np.any(np.real(arg) < -1e-10):
        raise ValueError("argument left the closed right half-plane; "
                         "the symbol is not a valid exponent")
    out = bernstein.apply(arg)
    return complex(out) if np.ndim(out) == 0 else out


# -- evaluable symbols -------------------------------------------------------------

_CLOSED_FORMS = {}


def _closed_form(tag):
    def reg(fn):
        _CLOSED_FORMS[tag] = fn
        return fn
    return reg


@_closed_form("abs-power")
def _cf_abs_power(xi, params):
    rho = np.linalg.norm(xi, axis=-1)
    return rho ** params["alpha"] + 0j


@_closed_form("one-minus-exp")
def _cf_one_minus_exp(xi, params):
    return plain_exp_term(xi[..., 0])


@_closed_form("drift")
def _cf_drift(xi, params):
    return -1j * (xi @ np.asarray(params["b"], dtype=float))


@_closed_form("one-plus-square")
def _cf_one_plus_square(xi, params):
    return 1.0 + np.einsum("...i,...i", xi, xi) + 0j


@dataclass
class Symbol:
    """Evaluable multiplier m(xi): triplet-backed, generalized or closed-form.

    The reflected symbol m~(xi) = m(-xi) is always obtained by re-evaluation
    at -xi, never by conjugation, so drift-type asymmetries survive.
    """

    kind: str
    dim: int
    triplet: LevyTriplet | None = None
    kappa: GeneralizedKappa | None = None
    tag: str | None = None
    params: dict = field(default_factory=dict)
    maps_into_l1: bool = True
    name: str = ""

    def evaluate(self, xi):
        xi = np.asarray(xi, dtype=float)
        if xi.ndim == 0:
            xi = xi.reshape(1)
        if xi.shape[-1] != self.dim:
            raise ValueError("frequency dimension mismatch")
        if self.kind == "triplet":
            return evaluate_exponent(self.triplet, xi)
        if self.kind == "generalized":
            return evaluate_generalized(self.kappa, xi)
        out = _CLOSED_FORMS[self.tag](xi, self.params)
        return complex(out) if xi.ndim == 1 else out

    def reflected(self, xi):
        """m(-xi)."""
        return self.evaluate(-np.asarray(xi, dtype=float))


def symbol_from_triplet(triplet, name=""):
    return Symbol("triplet", triplet.dim, triplet=triplet, name=name)


def symbol_from_kappa(kappa, name=""):
    return Symbol("generalized", kappa.dim, kappa=kappa, name=name)


def closed_form_symbol(tag, dim=1, name="", maps_into_l1=True, **params):
    if tag not in _CLOSED_FORMS:
        raise ValueError(f"unknown closed-form symbol {tag!r}")
    if tag == "one-minus-exp" and dim != 1:
        raise ValueError("1 - e^(i xi) is one-dimensional")
    return Symbol("closed-form", dim, tag=tag, params=params,
                  maps_into_l1=maps_into_l1, name=name or tag)


# -- a small zoo of standard triplets ------------------------------------------------

def brownian_triplet(dim=1, diffusion=1.0):
    q = diffusion * np.eye(dim)
    return LevyTriplet(np.zeros(dim), q)


def drift_triplet(b):
    b = np.atleast_1d(np.asarray(b, dtype=float))
    return LevyTriplet(b, np.zeros((b.size, b.size)))


def drift_diffusion_triplet(b, Q):
    b = np.atleast_1d(np.asarray(b, dtype=float))
    return LevyTriplet(b, Q)


def poisson_triplet(position=1.0, mass=1.0, dim=1):
    pos = np.full(dim, 0.0)
    pos = np.atleast_1d(np.asarray(position, dtype=float)) \
        if np.ndim(position) else np.array([position])
    if pos.size != dim:
        pos = np.resize(pos, dim)
    nu = JumpMeasure([Atom(pos, mass)], [], dim)
    return LevyTriplet(np.zeros(dim), np.zeros((dim, dim)), nu)


def stable_like_triplet(alpha, c=1.0, eps=0.0, rmax=np.inf, dim=1):
    fam = RadialFamily("stable-like", dim, c, alpha=alpha, eps=eps, rmax=rmax)
    return LevyTriplet(np.zeros(dim), np.zeros((dim, dim)),
                       JumpMeasure([], [fam], dim))
