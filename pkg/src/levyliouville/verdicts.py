"""Liouville-type verdicts driven by numerical zero-set scans.

Every verdict records the (box, grid step, tolerance) certificate of the
search that produced it: a grid scan cannot prove that a zero set equals
{0}, it can only fail to find other zeros at the certified resolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .growth import lambda_weight, pi_g_membership
from .levy import (PreconditionError, check_weight_moment, evaluate_exponent,
                   evaluate_extension, extension_values, symbol_from_triplet)
from .zeros import ZeroSetReport, default_grid_step, scan_zero_set


@dataclass(frozen=True)
class SearchParams:
    box_radius: float = 20.0
    grid_step: float | None = None  # default depends on the dimension
    tol: float = 1e-8
    direction_count: int = 256

    def step(self, dim):
        return self.grid_step if self.grid_step is not None \
            else default_grid_step(dim)


@dataclass(frozen=True)
class WitnessSpec:
    """Closed-form counterexample candidate for the multiplier lab to sample.

    complex-exponential(gamma):  e^{i gamma.x}
    real-exponential(theta):     e^{theta.x}
    polynomial(coefficients):    sum c_k x^k (1-d) or multi-index dict
    cosine-average(gamma):       (1 + cos(gamma.x)) / 2
    """

    kind: str
    gamma: np.ndarray | None = None
    theta: np.ndarray | None = None
    coefficients: object = None

    def describe(self):
        if self.kind == "complex-exponential":
            return f"exp(i {_fmt(self.gamma)}.x)"
        if self.kind == "real-exponential":
            return f"exp({_fmt(self.theta)}.x)"
        if self.kind == "cosine-average":
            return f"(1 + cos({_fmt(self.gamma)}.x))/2"
        return f"polynomial with coefficients {self.coefficients}"


def _fmt(v):
    return np.array2string(np.atleast_1d(v), precision=6,
                           suppress_small=True)


@dataclass
class Verdict:
    kind: str  # liouville | polynomial-liouville | strong-liouville | coupling
    holds: object  # True / False / "conditional" / "undetermined"
    witness: WitnessSpec | None
    assumptions: list
    report: ZeroSetReport | None
    extra: dict = field(default_factory=dict)


def _scan_symbol(symbol, search):
    return scan_zero_set(symbol.evaluate, symbol.evaluate, symbol.dim,
                         search.box_radius, search.step(symbol.dim),
                         search.tol)


def _smallest_nonzero(report):
    cands = report.nonzero_zeros()
    if not cands:
        return None
    nmin = min(np.linalg.norm(p) for p, _ in cands)
    near = [p for p, _ in cands if np.linalg.norm(p) <= nmin + 1e-12]
    return max(near, key=lambda p: tuple(p))


def liouville_verdict(symbol, search=None):
    """Whether every bounded weak solution of m(D)f = 0 is a.e. constant.

    Holds exactly when the certified zero set of m lies in {0}; otherwise
    any nonzero zero gamma makes e^{i gamma.x} a bounded non-constant
    solution and is returned as the witness.
    """
    search = search or SearchParams()
    if not symbol.maps_into_l1:
        raise PreconditionError(
            "symbol is not flagged as mapping test functions into L^1")
    report = _scan_symbol(symbol, search)
    assumptions = [f"zero set certified on {report.certificate()}"]
    extra = {}
    if report.classification == "undetermined":
        return Verdict("liouville", "undetermined", None, assumptions, report)
    if report.classification in ("origin-only", "empty"):
        if report.classification == "empty":
            extra["annotation"] = ("the symbol never vanishes: "
                                   "f = 0 is the only constant solution")
        return Verdict("liouville", True, None, assumptions, report, extra)
    gamma = _smallest_nonzero(report)
    return Verdict("liouville", False,
                   WitnessSpec("complex-exponential", gamma=gamma),
                   assumptions, report)


def polynomial_liouville_verdict(symbol, beta, search=None):
    """Polynomially bounded solutions: constancy upgraded to degree <= [beta].

    Triplet- and generalized-kind symbols must have a finite beta-moment of
    their jump measure; one-dimensional exponents additionally cap the
    degree at 1 (positive quadratic solutions would contradict the strong
    verdict).
    """
    search = search or SearchParams()
    if beta < 0:
        raise ValueError("beta must be >= 0")
    nu = None
    if symbol.kind == "triplet":
        nu = symbol.triplet.nu
    elif symbol.kind == "generalized":
        nu = symbol.kappa.nu
    assumptions = []
    if nu is not None:
        mc = check_weight_moment(nu, lambda_weight(beta, symbol.dim),
                                 compute_value=False)
        if not mc.finite:
            raise PreconditionError(
                f"beta-moment precondition failed: {mc.detail}")
        assumptions.append(
            f"int (1+|y|^2)^({beta:g}/2) d nu over |y|>=1 is finite")
    report = _scan_symbol(symbol, search)
    assumptions.append(f"zero set certified on {report.certificate()}")
    if report.classification == "undetermined":
        return Verdict("polynomial-liouville", "undetermined", None,
                       assumptions, report)
    degree_cap = int(np.floor(beta))
    extra = {"degree_cap": degree_cap}
    if report.classification in ("origin-only", "empty"):
        if symbol.kind == "triplet" and symbol.dim == 1:
            extra["degree_cap"] = min(degree_cap, 1)
            assumptions.append("1-d exponent: polynomial solutions are "
                               "affine, degree cap tightened to 1")
        return Verdict("polynomial-liouville", True, None, assumptions,
                       report, extra)
    gamma = _smallest_nonzero(report)
    return Verdict("polynomial-liouville", False,
                   WitnessSpec("complex-exponential", gamma=gamma),
                   assumptions, report, extra)


def strong_liouville_verdict(triplet, g, search=None):
    """Positive g-bounded solutions: constancy needs both zero sets trivial.

    Requires int_{|y|>=1} g d nu < infinity.  Holds when the real zero set
    of the exponent is {0} and no nonzero root of the continued exponent
    eta -> psi(-i eta) lies inside the envelope Pi_g.  A member root theta
    defeats the property through the solution e^{theta.x}.
    """
    search = search or SearchParams()
    if g.dim != triplet.dim:
        raise ValueError("growth function dimension mismatch")
    mc = check_weight_moment(triplet.nu, g)
    if not mc.finite:
        raise PreconditionError(f"growth-moment precondition failed: "
                                f"{mc.detail}")
    symbol = symbol_from_triplet(triplet)
    report = _scan_symbol(symbol, search)
    assumptions = [
        f"int g d nu over |y|>=1 = {mc.value:.6g} (finite)",
        f"zero sets certified on {report.certificate()}",
        f"envelope membership tested on {search.direction_count} directions",
    ]

    thr = triplet.nu.exp_moment_threshold()

    def ext_one(p):
        rho = float(np.linalg.norm(p))
        if rho != 0.0 and rho >= thr:
            return np.inf
        return evaluate_extension(triplet, p)

    ext_report = scan_zero_set(lambda pts: extension_values(triplet, pts),
                               ext_one, triplet.dim, search.box_radius,
                               search.step(triplet.dim), search.tol)
    extra = {"extension_report": ext_report, "envelope": g.describe()}
    if report.classification == "undetermined":
        return Verdict("strong-liouville", "undetermined", None, assumptions,
                       report, extra)
    real_ok = report.classification in ("origin-only", "empty")
    members = [p for p, _ in ext_report.nonzero_zeros()
               if pi_g_membership(g, p, search.direction_count)]
    extra["extension_members"] = members
    if real_ok and not members:
        return Verdict("strong-liouville", True, None, assumptions, report,
                       extra)
    if not real_ok:
        gamma = _smallest_nonzero(report)
        return Verdict("strong-liouville", False,
                       WitnessSpec("complex-exponential", gamma=gamma),
                       assumptions, report, extra)
    theta = max(members, key=lambda p: (np.linalg.norm(p), tuple(p)))
    return Verdict("strong-liouville", False,
                   WitnessSpec("real-exponential", theta=theta),
                   assumptions, report, extra)


def coupling_verdict(triplet, strong_feller_declared, search=None):
    """Exact-coupling verdict via the zero set of Re psi.

    The computable condition is {xi : Re psi(xi) = 0} = {0}.  Equivalence
    with the coupling property additionally needs the strong Feller
    hypothesis, which is a user declaration, not something decidable from
    the triplet; without it a positive condition is reported as
    "conditional".
    """
    search = search or SearchParams()
    re_many = lambda pts: np.real(evaluate_exponent(triplet, pts))
    re_one = lambda p: float(np.real(evaluate_exponent(triplet, p)))
    report = scan_zero_set(re_many, re_one, triplet.dim, search.box_radius,
                           search.step(triplet.dim), search.tol)
    assumptions = [
        f"Re psi zero set certified on {report.certificate()}",
        f"strong Feller declared: {strong_feller_declared}",
    ]
    if report.classification == "undetermined":
        return Verdict("coupling", "undetermined", None, assumptions, report)
    condition = report.classification in ("origin-only", "empty")
    extra = {"condition_holds": condition}
    if not condition:
        gamma = _smallest_nonzero(report)
        return Verdict("coupling", False,
                       WitnessSpec("complex-exponential", gamma=gamma),
                       assumptions, report, extra)
    if strong_feller_declared:
        return Verdict("coupling", True, None, assumptions, report, extra)
    assumptions.append("condition holds but equivalence with coupling is "
                       "not asserted without the strong Feller hypothesis")
    return Verdict("coupling", "conditional", None, assumptions, report,
                   extra)
