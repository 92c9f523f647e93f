"""FFT application of multiplier operators and weak-residual verification.

Functions live on regular grids over the box [-L, L]^n with N (a power of
two) points per axis.  A multiplier acts diagonally at the discrete
frequencies pi k / L, which makes the action exact for trigonometric
polynomials whose frequencies sit on that lattice; witnesses are built so
that they do.  The distributional pairing <f, m~(D) phi> is computed on a
spatially doubled grid so that the operator tails of the test function are
not wrapped back into its support.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np


class AliasingWarning(UserWarning):
    """The field carries spectral mass next to the Nyquist frequency."""


class MarginError(ValueError):
    """A test function violates its required support margin."""


def grid_axes(n_points, box):
    return -box + np.arange(n_points) * (2.0 * box / n_points)


def grid_frequencies(n_points, box):
    """Discrete frequencies pi k / L in FFT order."""
    return 2.0 * np.pi * np.fft.fftfreq(n_points, d=2.0 * box / n_points)


@dataclass
class GridField:
    """Complex samples on the regular grid over [-L, L]^n.

    tag is "real" or "complex"; `periodic` records whether the sampled
    function honestly wraps around the box (witnesses built from exact
    lattice frequencies do, polynomials and real exponentials do not).
    """

    dim: int
    n_points: int
    box: float
    samples: np.ndarray
    tag: str = "complex"
    periodic: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("grid fields support dimensions 1 and 2")
        n = self.n_points
        if n < 64 or n & (n - 1):
            raise ValueError("points per axis must be a power of two >= 64")
        want = (n,) * self.dim
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != want:
            raise ValueError(f"samples must have shape {want}")
        if self.tag not in ("real", "complex"):
            raise ValueError("tag must be 'real' or 'complex'")

    @property
    def spacing(self):
        return 2.0 * self.box / self.n_points

    def axes(self):
        return grid_axes(self.n_points, self.box)

    def points(self):
        ax = self.axes()
        mesh = np.meshgrid(*([ax] * self.dim), indexing="ij")
        return np.stack(mesh, axis=-1)

    def integral(self, other=None):
        """Trapezoid-rule integral on the periodic grid (plain Riemann sum)."""
        v = self.samples if other is None else self.samples * other
        return complex(np.sum(v) * self.spacing ** self.dim)


@dataclass(frozen=True)
class TestFunction:
    """Compactly supported smooth test function.

    mollifier:          exp(-1 / (1 - |x - c|^2 / a^2)) inside |x - c| < a
    gaussian-truncated: exp(-|x - c|^2 / (2 sigma^2)) inside |x - c| < radius
    """

    kind: str
    dim: int
    center: np.ndarray
    scale: float
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("mollifier", "gaussian-truncated"):
            raise ValueError(f"unknown test function kind {self.kind!r}")
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if c.shape != (self.dim,):
            raise ValueError("center dimension mismatch")
        object.__setattr__(self, "center", c)
        if self.scale <= 0:
            raise ValueError("support radius must be positive")

    @property
    def support_radius(self):
        return self.scale

    def sample(self, pts):
        """Values on points of shape (..., dim)."""
        pts = np.asarray(pts, dtype=float)
        d2 = np.sum((pts - self.center) ** 2, axis=-1)
        if self.kind == "mollifier":
            s = d2 / self.scale ** 2
            out = np.zeros_like(d2)
            inside = s < 1.0
            out[inside] = np.exp(-1.0 / (1.0 - s[inside]))
            return out
        out = np.exp(-d2 / (2.0 * self.sigma ** 2))
        out[d2 >= self.scale ** 2] = 0.0
        return out

    def require_margin(self, box, margin):
        reach = float(np.max(np.abs(self.center))) + self.support_radius
        if reach > box - margin:
            raise MarginError(
                f"test function reaches {reach:g} but needs margin "
                f"{margin:g} inside box {box:g}")


def mollifier(dim=1, center=0.0, scale=1.0):
    c = np.full(dim, float(center)) if np.ndim(center) == 0 \
        else np.asarray(center, dtype=float)
    return TestFunction("mollifier", dim, c, scale)


def truncated_gaussian(dim=1, center=0.0, sigma=0.5, radius=None):
    c = np.full(dim, float(center)) if np.ndim(center) == 0 \
        else np.asarray(center, dtype=float)
    return TestFunction("gaussian-truncated", dim, c,
                        radius if radius is not None else 4.0 * sigma,
                        sigma=sigma)


def _frequency_points(n_points, box, dim):
    k = grid_frequencies(n_points, box)
    mesh = np.meshgrid(*([k] * dim), indexing="ij")
    return np.stack(mesh, axis=-1)


def _check_aliasing(spectrum, n_points, dim):
    total = float(np.sum(np.abs(spectrum) ** 2))
    if total == 0.0:
        return
    idx = np.abs(np.fft.fftfreq(n_points) * n_points)
    near = idx >= n_points / 2 - 2
    mask = np.zeros(spectrum.shape, dtype=bool)
    for ax in range(dim):
        shape = [1] * dim
        shape[ax] = n_points
        mask |= near.reshape(shape)
    frac = float(np.sum(np.abs(spectrum[mask]) ** 2)) / total
    if frac > 1e-6:
        warnings.warn(f"spectral mass fraction {frac:.2e} within two bins "
                      "of the Nyquist frequency", AliasingWarning)


def apply_multiplier(symbol, f, reflect=False):
    """Pointwise multiplication by m (or m~ = m(-.)) on the frequency side.

    Exact for trigonometric polynomials with on-grid frequencies; warns if
    the field has spectral mass within two bins of the Nyquist frequency.
    """
    if symbol.dim != f.dim:
        raise ValueError("symbol and field dimensions differ")
    freq = _frequency_points(f.n_points, f.box, f.dim)
    mv = symbol.evaluate(-freq if reflect else freq)
    spec = np.fft.fftn(f.samples)
    _check_aliasing(spec, f.n_points, f.dim)
    out = np.fft.ifftn(mv * spec)
    return GridField(f.dim, f.n_points, f.box, out, tag="complex",
                     periodic=f.periodic)


def multiplier_on_test(symbol, phi, n_points, box):
    """m~(D) phi on the spatially doubled grid; returns diagnostics too.

    The doubled box keeps the slowly decaying tails of m~(D) phi from
    wrapping into the integration window.  Returned are the central-block
    samples (aligned with the [-L, L) grid), the L1 norm over the doubled
    box, and the L1 mass outside the central block (a truncation bound
    ingredient for non-periodic pairings).
    """
    n2 = 2 * n_points
    box2 = 2.0 * box
    ax2 = grid_axes(n2, box2)
    mesh = np.meshgrid(*([ax2] * phi.dim), indexing="ij")
    pts = np.stack(mesh, axis=-1)
    phi_vals = phi.sample(pts).astype(complex)
    freq = _frequency_points(n2, box2, phi.dim)
    mv = symbol.evaluate(-freq)
    out = np.fft.ifftn(mv * np.fft.fftn(phi_vals))
    dx = 2.0 * box / n_points
    i0 = n2 // 4
    sl = tuple(slice(i0, i0 + n_points) for _ in range(phi.dim))
    central = out[sl]
    norm1 = float(np.sum(np.abs(out)) * dx ** phi.dim)
    inner = np.zeros(out.shape, dtype=bool)
    inner[sl] = True
    tail1 = float(np.sum(np.abs(out[~inner])) * dx ** phi.dim)
    return central, norm1, tail1


def weak_residual(f, symbol, phi):
    """The pairing <f, m~(D) phi> over the field's box.

    phi must keep a margin of at least L/4 inside the box (L/2 when the
    field is tagged non-periodic, whose values near the boundary are not
    trustworthy under periodization).
    """
    if phi.dim != f.dim:
        raise ValueError("test function dimension mismatch")
    margin = f.box / 4.0 if f.periodic else f.box / 2.0
    phi.require_margin(f.box, margin)
    central, _, _ = multiplier_on_test(symbol, phi, f.n_points, f.box)
    return complex(np.sum(f.samples * central) * f.spacing ** f.dim)


# -- witness construction ----------------------------------------------------------

DEFAULT_POINTS = {1: 1024, 2: 256}


def _adjust_box(gamma, box_request):
    """Smallest box making every component of gamma a lattice frequency.

    The box must satisfy gamma_i L / pi in Z for all nonzero components.
    The leading component fixes L; remaining components are snapped to the
    nearest lattice frequency and the adjustment is reported.
    """
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    nz = np.nonzero(gamma)[0]
    info = {}
    if nz.size == 0:
        return (box_request or 8.0), gamma, info
    lead = nz[np.argmax(np.abs(gamma[nz]))]
    period = 2.0 * np.pi / abs(gamma[lead])
    want = box_request if box_request is not None else max(8.0, 4.0 * period)
    k = max(1, round(abs(gamma[lead]) * want / np.pi))
    box = np.pi * k / abs(gamma[lead])
    if box_request is not None and abs(box - box_request) > 1e-12:
        info["box_adjusted_from"] = box_request
    snapped = gamma.copy()
    for i in nz:
        ki = round(gamma[i] * box / np.pi)
        exact = np.pi * ki / box
        if abs(exact - gamma[i]) > 1e-9 * max(1.0, abs(gamma[i])):
            info.setdefault("snapped_components", {})[int(i)] = \
                (float(gamma[i]), float(exact))
        snapped[i] = exact
    return box, snapped, info


def _poly_samples(coefficients, pts, dim):
    if dim == 1 and not isinstance(coefficients, dict):
        x = pts[..., 0]
        out = np.zeros_like(x)
        for k, c in enumerate(coefficients):
            if c:
                out = out + c * x ** k
        return out
    out = np.zeros(pts.shape[:-1])
    for alpha, c in coefficients.items():
        mono = np.full(pts.shape[:-1], float(c))
        for j, a in enumerate(alpha):
            if a:
                mono = mono * pts[..., j] ** a
        out = out + mono
    return out


def make_witness(spec, dim=None, n_points=None, box=None):
    """Sample a witness candidate on a grid suited to its closed form.

    Oscillatory witnesses get their box stretched to an integer number of
    periods (adjustments reported in the field's meta); polynomial and
    real-exponential witnesses are tagged non-periodic.
    """
    if spec.kind in ("complex-exponential", "cosine-average"):
        gamma = np.atleast_1d(np.asarray(spec.gamma, dtype=float))
        dim = dim or gamma.size
        n = n_points or DEFAULT_POINTS[dim]
        box, gamma, info = _adjust_box(gamma, box)
        ax = grid_axes(n, box)
        mesh = np.meshgrid(*([ax] * dim), indexing="ij")
        pts = np.stack(mesh, axis=-1)
        phase = pts @ gamma
        if spec.kind == "complex-exponential":
            samples = np.exp(1j * phase)
            tag = "complex"
        else:
            samples = 0.5 * (1.0 + np.cos(phase)) + 0j
            tag = "real"
        return GridField(dim, n, box, samples, tag=tag, periodic=True,
                         meta=info)
    if spec.kind == "polynomial":
        coeff = spec.coefficients
        dim = dim or (1 if not isinstance(coeff, dict)
                      else len(next(iter(coeff))))
        n = n_points or DEFAULT_POINTS[dim]
        box = box or 8.0
        ax = grid_axes(n, box)
        mesh = np.meshgrid(*([ax] * dim), indexing="ij")
        pts = np.stack(mesh, axis=-1)
        samples = _poly_samples(coeff, pts, dim) + 0j
        return GridField(dim, n, box, samples, tag="real", periodic=False)
    if spec.kind == "real-exponential":
        theta = np.atleast_1d(np.asarray(spec.theta, dtype=float))
        dim = dim or theta.size
        n = n_points or DEFAULT_POINTS[dim]
        box = box or 8.0
        ax = grid_axes(n, box)
        mesh = np.meshgrid(*([ax] * dim), indexing="ij")
        pts = np.stack(mesh, axis=-1)
        samples = np.exp(pts @ theta) + 0j
        return GridField(dim, n, box, samples, tag="real", periodic=False,
                         meta={"margin_required": box / 2.0})
    raise ValueError(f"unknown witness kind {spec.kind!r}")


# -- harmonicity verification ---------------------------------------------------------

@dataclass
class HarmonicityReport:
    passed: bool
    threshold: float
    rows: list  # per test function: dict with residual, norm, normalized
    field_meta: dict


def verify_harmonicity(witness_spec, symbol, phis, rhs_polynomial=None,
                       threshold=1e-6, n_points=None, box=None):
    """Check <f, m~(D) phi> (= <p, phi> in inhomogeneous mode) over phis.

    The defect of each pairing is normalized by the L1 norm of m~(D) phi;
    the verdict is the maximum normalized defect against the threshold.
    Non-periodic witnesses additionally get a truncation bound
    max |f| * (L1 tail mass of m~(D) phi outside the box).
    """
    f = make_witness(witness_spec, dim=symbol.dim, n_points=n_points,
                     box=box)
    rows = []
    ok = True
    for phi in phis:
        margin = f.box / 4.0 if f.periodic else f.box / 2.0
        phi.require_margin(f.box, margin)
        central, norm1, tail1 = multiplier_on_test(symbol, phi, f.n_points,
                                                   f.box)
        dx = f.spacing ** f.dim
        resid = complex(np.sum(f.samples * central) * dx)
        target = 0.0
        if rhs_polynomial is not None:
            pv = _poly_samples(rhs_polynomial, f.points(), f.dim)
            target = complex(np.sum(pv * phi.sample(f.points())) * dx)
        normalized = abs(resid - target) / norm1
        row = {"residual": resid, "target": target, "norm1": norm1,
               "normalized": normalized}
        if not f.periodic:
            row["truncation_bound"] = \
                float(np.max(np.abs(f.samples))) * tail1
        rows.append(row)
        ok = ok and normalized <= threshold
    return HarmonicityReport(ok, threshold, rows, dict(f.meta))


# -- field export ------------------------------------------------------------------

_TAG_CODES = {"real": 0.0, "complex": 1.0}


def export_field_csv(f, path):
    """Columns: coordinates, Re, Im; one row per grid point."""
    pts = f.points().reshape(-1, f.dim)
    vals = f.samples.reshape(-1)
    with open(path, "w") as fh:
        cols = [f"x{i + 1}" for i in range(f.dim)] + ["re", "im"]
        fh.write("# " + ",".join(cols) + "\n")
        for p, v in zip(pts, vals):
            coords = ",".join(repr(float(c)) for c in p)
            fh.write(f"{coords},{v.real!r},{v.imag!r}\n")


def export_field_binary(f, path):
    """Little-endian float64 dump with an 8-value header.

    Header: (dim, N axis 1, N axis 2 or 0, L, spacing, tag code,
    periodic flag, 0).  Samples follow flattened C-order as (re, im) pairs.
    """
    header = np.array([f.dim, f.n_points,
                       f.n_points if f.dim == 2 else 0.0,
                       f.box, f.spacing, _TAG_CODES[f.tag],
                       1.0 if f.periodic else 0.0, 0.0], dtype="<f8")
    flat = f.samples.reshape(-1)
    data = np.empty(2 * flat.size, dtype="<f8")
    data[0::2] = flat.real
    data[1::2] = flat.imag
    with open(path, "wb") as fh:
        header.tofile(fh)
        data.tofile(fh)


def load_field_binary(path):
    raw = np.fromfile(path, dtype="<f8")
    dim = int(raw[0])
    n = int(raw[1])
    box = float(raw[3])
    tag = "real" if raw[5] == 0.0 else "complex"
    periodic = bool(raw[6])
    body = raw[8:]
    samples = (body[0::2] + 1j * body[1::2]).reshape((n,) * dim)
    return GridField(dim, n, box, samples, tag=tag, periodic=periodic)
