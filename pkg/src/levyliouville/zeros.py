"""Grid search and refinement for zero sets of multiplier symbols.

The scan evaluates |m| on a regular box grid, picks local minima that are
plausibly near a zero, drives each one down by coordinate-wise golden-section
descent, and classifies the surviving zeros as origin-only, a lattice (with
generators), or an unstructured set.  Everything a verdict later claims is
relative to the (box, grid step, tolerance) certificate stored in the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class ZeroSetReport:
    zeros: list  # of (point ndarray, residual float), lexicographically sorted
    classification: str  # origin-only | lattice | non-lattice | empty | undetermined
    generators: np.ndarray | None
    box_radius: float
    grid_step: float
    tol: float
    notes: list = field(default_factory=list)

    def nonzero_zeros(self):
        return [(p, r) for p, r in self.zeros
                if np.linalg.norm(p) > self.grid_step / 2.0]

    def certificate(self):
        return (f"box_radius={self.box_radius:g}, "
                f"grid_step={self.grid_step:g}, tol={self.tol:g}")


def default_grid_step(dim):
    return {1: 0.05, 2: 0.1, 3: 0.2}[dim]


def _golden_min(f, a, b, xtol):
    """Golden-section minimum of f on [a, b]."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > xtol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _refine(f, p0, h, tol):
    """Coordinate golden-section descent until |m| <= tol or step < 1e-12."""
    p = np.array(p0, dtype=float)
    val = f(p)
    delta = h
    while val > tol and delta >= 1e-12:
        moved = 0.0
        for i in range(p.size):
            def along(t, i=i):
                q = p.copy()
                q[i] = t
                return f(q)
            t, v = _golden_min(along, p[i] - delta, p[i] + delta,
                               max(delta / 64.0, 1e-13))
            if v < val:
                moved = max(moved, abs(t - p[i]))
                p[i], val = t, v
        if val <= tol:
            break
        delta = max(moved, delta * 0.25) if moved > 0.25 * delta \
            else delta * 0.25
    return p, val, val <= tol


def scan_zero_set(evaluate_many, evaluate_one, dim, box_radius, grid_step,
                  tol, max_candidates=20000):
    """Core zero-set search over [-R, R]^dim for a generic objective.

    evaluate_many maps an (..., dim) array to values whose modulus is
    minimized; evaluate_one is the scalar refinement path (may be identical).
    """
    if box_radius <= 0 or grid_step <= 0:
        raise ValueError("box radius and grid step must be positive")
    if dim > 3:
        raise ValueError("dense search supports dimensions 1..3")
    m = int(round(2 * box_radius / grid_step)) + 1
    axes = np.linspace(-box_radius, box_radius, m)
    mesh = np.meshgrid(*([axes] * dim), indexing="ij")
    pts = np.stack(mesh, axis=-1)
    vals = np.abs(np.asarray(evaluate_many(pts.reshape(-1, dim))))
    vals = vals.reshape(pts.shape[:-1])
    notes = []

    nan_frac = float(np.mean(~np.isfinite(vals)))
    if nan_frac > 0:
        notes.append(f"{nan_frac:.1%} of the grid was not evaluable "
                     "and was excluded")
        vals = np.where(np.isfinite(vals), vals, np.inf)

    below = vals <= tol
    if np.mean(below) > 0.2:
        # a set of positive measure, not isolated points
        reps = pts[below].reshape(-1, dim)
        order = np.argsort(np.linalg.norm(reps, axis=-1), kind="stable")
        reps = reps[order][:9]
        zeros = [(p.copy(), float(abs(evaluate_one(p)))) for p in reps]
        notes.append("zero set fills a positive fraction of the grid; "
                     "reporting representatives only")
        return ZeroSetReport(_sorted(zeros), "non-lattice", None,
                             box_radius, grid_step, tol, notes)

    minima = np.ones_like(vals, dtype=bool)
    grad2 = np.zeros_like(vals)
    for ax in range(dim):
        lo = np.roll(vals, 1, axis=ax)
        hi = np.roll(vals, -1, axis=ax)
        edge_lo = [slice(None)] * dim
        edge_lo[ax] = 0
        edge_hi = [slice(None)] * dim
        edge_hi[ax] = -1
        lo[tuple(edge_lo)] = np.inf
        hi[tuple(edge_hi)] = np.inf
        minima &= (vals <= lo) & (vals <= hi)
        d = np.where(np.isfinite(hi) & np.isfinite(lo),
                     (hi - lo) / (2 * grid_step), 0.0)
        grad2 += d * d
    gate = np.maximum(10.0 * tol, 1.5 * grid_step * np.sqrt(grad2))
    cand = minima & (vals <= gate) & np.isfinite(vals)
    cand_pts = pts[cand].reshape(-1, dim)
    if len(cand_pts) > max_candidates:
        notes.append(f"candidate count capped at {max_candidates}")
        cand_pts = cand_pts[:max_candidates]

    zeros, stalled = [], 0
    for p0 in cand_pts:
        p, v, ok = _refine(lambda q: abs(evaluate_one(q)), p0, grid_step, tol)
        if ok and np.max(np.abs(p)) <= box_radius + grid_step:
            zeros.append((p, v))
        elif not ok:
            stalled += 1
    if stalled:
        notes.append(f"{stalled} candidate(s) stalled during refinement")

    zeros = _dedup(zeros, grid_step / 2.0)
    zeros = _sorted(zeros)

    if not zeros:
        cls = "undetermined" if stalled else "empty"
        return ZeroSetReport(zeros, cls, None, box_radius, grid_step, tol,
                             notes)
    nonzero = [p for p, _ in zeros if np.linalg.norm(p) > grid_step / 2.0]
    if not nonzero:
        return ZeroSetReport(zeros, "origin-only", None, box_radius,
                             grid_step, tol, notes)
    gens = _lattice_fit(np.array(nonzero), grid_step, box_radius)
    if gens is not None:
        return ZeroSetReport(zeros, "lattice", gens, box_radius, grid_step,
                             tol, notes)
    return ZeroSetReport(zeros, "non-lattice", None, box_radius, grid_step,
                         tol, notes)


def find_zero_set(symbol, box_radius, grid_step=None, tol=1e-8):
    """Zero set of a multiplier symbol over [-R, R]^n."""
    if grid_step is None:
        grid_step = default_grid_step(symbol.dim)
    return scan_zero_set(symbol.evaluate, symbol.evaluate, symbol.dim,
                         box_radius, grid_step, tol)


def _sorted(zeros):
    return sorted(zeros, key=lambda zr: tuple(zr[0]))


def _dedup(zeros, radius):
    """Merge zeros closer than `radius`, keeping the smallest residual."""
    out = []
    for p, v in sorted(zeros, key=lambda zr: zr[1]):
        if all(np.linalg.norm(p - q) >= radius for q, _ in out):
            out.append((p, v))
    return out


def _lattice_fit(points, h, box_radius):
    """Generators if the points form (part of) a lattice through 0.

    Fit residuals must stay below h/10 and every lattice point inside the
    box (other than the origin) must be present; otherwise returns None.
    """
    resid_tol = h / 10.0
    norms = np.linalg.norm(points, axis=1)
    dim = points.shape[1]

    # collinear case first: rank-1 lattice in any dimension
    u = points[np.argmin(norms)]
    u = u / np.linalg.norm(u)
    t = points @ u
    perp = points - np.outer(t, u)
    if np.all(np.linalg.norm(perp, axis=1) < resid_tol):
        g = np.min(np.abs(t))
        k = np.round(t / g)
        if np.any(k == 0) or np.max(np.abs(t - k * g)) > resid_tol:
            return None
        expected = set()
        kmax = int(np.floor((box_radius - h) / g))
        for kk in range(1, kmax + 1):
            for s in (+1, -1):
                q = s * kk * g * u
                if np.max(np.abs(q)) <= box_radius - h:
                    expected.add((s, kk))
        found = {(int(np.sign(tt)), int(abs(round(tt / g)))) for tt in t}
        if not expected <= found:
            return None
        return (g * u).reshape(1, dim)

    if dim < 2:
        return None
    order = np.argsort(norms)
    v1 = points[order[0]]
    v2 = None
    for idx in order[1:]:
        cand = points[idx]
        if np.linalg.norm(np.cross(*_pad3(v1, cand))) > 1e-9:
            v2 = cand
            break
    if v2 is None or dim > 2:
        return None
    # Gauss reduction of the candidate basis
    for _ in range(50):
        if np.linalg.norm(v2) < np.linalg.norm(v1):
            v1, v2 = v2, v1
        mu = round(float(v2 @ v1) / float(v1 @ v1))
        if mu == 0:
            break
        v2 = v2 - mu * v1
    basis = np.stack([v1, v2])
    coeffs = points @ np.linalg.inv(basis)
    k = np.round(coeffs)
    if np.any(np.all(k == 0, axis=1)):
        return None
    resid = np.linalg.norm(points - k @ basis, axis=1)
    if np.max(resid) > resid_tol:
        return None
    kmax = int(np.ceil(2 * box_radius / np.linalg.norm(v1))) + 1
    found = {tuple(map(int, kk)) for kk in k}
    for k1 in range(-kmax, kmax + 1):
        for k2 in range(-kmax, kmax + 1):
            if k1 == 0 and k2 == 0:
                continue
            q = k1 * v1 + k2 * v2
            if np.max(np.abs(q)) <= box_radius - h and \
                    (k1, k2) not in found:
                return None
    return basis


def _pad3(a, b):
    a3 = np.zeros(3)
    b3 = np.zeros(3)
    a3[:a.size] = a
    b3[:b.size] = b
    return a3, b3


@dataclass(frozen=True)
class PeriodicityGroup:
    kind: str  # full-space | lattice-dual | not-computed
    generators: np.ndarray | None = None


def periodicity_group(report):
    """Common periods of all bounded solutions, from the zero-set report.

    An origin-only zero set leaves the full space; a full-rank zero lattice
    with generator matrix G dualizes to 2 pi (G^-1)^T.
    """
    if report.classification == "origin-only":
        return PeriodicityGroup("full-space")
    if report.classification != "lattice":
        raise ValueError("periodicity is only computed for origin-only or "
                         f"lattice zero sets, got {report.classification!r}")
    gens = report.generators
    if gens.shape[0] != gens.shape[1]:
        return PeriodicityGroup("not-computed")
    dual = 2.0 * np.pi * np.linalg.inv(gens).T
    return PeriodicityGroup("lattice-dual", dual)
