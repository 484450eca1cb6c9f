"""Holomorphic functional calculus by trapezoidal quadrature on circles.

``f(T)`` is approximated by

    (1/N) sum_j f(lam_j) r e^{i theta_j} (lam_j I - T)^{-1},
    lam_j = c + r e^{i theta_j},  theta_j = 2 pi j / N,

which converges geometrically in ``N`` when ``f`` is analytic on an annulus
around the circle.  The logarithm is always the principal branch, so every
contour used for it must keep its disk off ``(-inf, 0]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    BranchCutError,
    CertificateError,
    ContourError,
    ExpOverflowError,
    RoundTripError,
    ValidationError,
)
from .operators import as_operator, operator_norm, operator_to_json, resolvent_apply, solve, spectral_radius, spectrum

DEFAULT_NODES = 128
#: eigenvalues closer than this to the circle are rejected
CONTAINMENT_GAP = 1e-8
EXP_NORM_LIMIT = 700.0


@dataclass(frozen=True)
class Contour:
    center: complex
    radius: float
    nodes: int = DEFAULT_NODES

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValidationError(f"contour radius must be positive, got {self.radius}")
        if int(self.nodes) != self.nodes or self.nodes < 8:
            raise ValidationError(f"contour needs at least 8 nodes, got {self.nodes}")
        object.__setattr__(self, "nodes", int(self.nodes))

    def points(self) -> np.ndarray:
        theta = 2.0 * np.pi * np.arange(self.nodes) / self.nodes
        return self.center + self.radius * np.exp(1j * theta)

    def origin_distance(self) -> float:
        return abs(abs(self.center) - self.radius)

    def meets_branch_cut(self) -> bool:
        """True if the closed disk intersects ``(-inf, 0]``."""
        c, r = self.center, self.radius
        if abs(c.imag) > r:
            return False
        return c.real - math.sqrt(r * r - c.imag * c.imag) <= 0.0

    def with_nodes(self, nodes: int) -> "Contour":
        return replace(self, nodes=nodes)


@dataclass(frozen=True)
class KappaCertificate:
    """A shift ``kappa`` and a circle enclosing the spectrum of ``U + kappa I``.

    ``spectral_margin`` is a lower bound on the gap between the shifted
    spectrum and the circle, ``origin_margin`` the gap between the circle and
    the origin.
    """

    kappa: complex
    contour: Contour
    spectral_margin: float
    origin_margin: float

    def __post_init__(self):
        object.__setattr__(self, "kappa", complex(self.kappa))
        if self.kappa == 0:
            raise CertificateError("kappa must be nonzero")

    def with_nodes(self, nodes: int) -> "KappaCertificate":
        return replace(self, contour=self.contour.with_nodes(nodes))

    def margins(self, U) -> tuple[float, float]:
        """Actual (spectral, origin) margins for ``U``; raises if either fails."""
        A = as_operator(U)
        z = spectrum(A + self.kappa * np.eye(A.shape[0]))
        spectral = self.contour.radius - float(np.max(np.abs(z - self.contour.center)))
        origin = abs(self.contour.center) - self.contour.radius
        if spectral <= CONTAINMENT_GAP:
            raise CertificateError(
                f"spectrum of U + kappa I escapes the contour (margin {spectral:.3g}); "
                "re-run choose_kappa over the whole time window"
            )
        if origin <= 0:
            raise CertificateError("contour encloses the origin")
        return spectral, origin

    def to_json(self) -> dict:
        return {
            "kappa": [self.kappa.real, self.kappa.imag],
            "center": [self.contour.center.real, self.contour.center.imag],
            "radius": self.contour.radius,
            "nodes": self.contour.nodes,
            "spectral_margin": self.spectral_margin,
            "origin_margin": self.origin_margin,
        }


@dataclass(frozen=True)
class AltGenerator:
    """``a = Log(U + kappa I)`` together with its certificate and round-trip residual."""

    a: np.ndarray = field(repr=False)
    certificate: KappaCertificate
    roundtrip_residual: float
    tolerance: float

    @property
    def certified(self) -> bool:
        return self.roundtrip_residual <= self.tolerance

    def to_json(self) -> dict:
        return {
            "a": operator_to_json(self.a),
            "certificate": self.certificate.to_json(),
            "roundtrip_residual": self.roundtrip_residual,
            "tolerance": self.tolerance,
        }


def certificate_for_radius(rho: float, margin: float | None = None, nodes: int = DEFAULT_NODES) -> KappaCertificate:
    """Certificate valid for every ``U`` with spectral radius at most ``rho``.

    ``kappa = rho + 1 + margin`` and the circle is centred at ``kappa`` with
    radius ``(rho + kappa) / 2``.  ``margin`` defaults to ``rho``, which keeps the
    quadrature convergence factor at or below 3/4 whatever the size of ``rho``.
    """
    rho = float(rho)
    if margin is None:
        margin = rho
    if margin < 0 or rho < 0:
        raise ValidationError("rho and margin must be nonnegative")
    kappa = rho + 1.0 + margin
    radius = (rho + kappa) / 2.0
    return KappaCertificate(
        kappa=kappa,
        contour=Contour(kappa, radius, nodes),
        spectral_margin=radius - rho,
        origin_margin=kappa - radius,
    )


def choose_kappa(U, margin: float | None = None, nodes: int = DEFAULT_NODES) -> KappaCertificate:
    """Pick a real positive ``kappa`` and a right-half-plane circle for ``U``."""
    return certificate_for_radius(spectral_radius(U), margin, nodes)


def fit_certificate(kappa: complex, points: Iterable[complex], nodes: int = DEFAULT_NODES) -> KappaCertificate:
    """Best real-centred circle for a caller-chosen ``kappa``.

    ``points`` are the eigenvalues of ``U + kappa I`` (possibly pooled over a
    time window).  The centre ``c`` minimises ``max |z - c| / c``, the ratio
    that governs trapezoid convergence when the nearest singularity of Log is
    the origin; the radius is the geometric mean of ``max |z - c|`` and ``c``.
    """
    z = np.asarray(list(points), dtype=complex)
    if np.any(z.real <= 0):
        raise CertificateError(f"kappa={complex(kappa)} leaves eigenvalues of U + kappa I outside the right half-plane")
    x, m2 = z.real, np.abs(z) ** 2

    # with u = 1/c each ratio^2 is the convex quadratic m2 u^2 - 2 x u + 1
    def worst(u):
        return float(np.max(m2 * u * u - 2.0 * x * u + 1.0))

    u_max = float(np.min(2.0 * x / m2))
    res = minimize_scalar(worst, bounds=(0.0, u_max), method="bounded", options={"xatol": 1e-12 * u_max})
    c = 1.0 / float(res.x)
    d = float(np.max(np.abs(z - c)))
    radius = max(math.sqrt(d * c), c / 2.0)
    return KappaCertificate(kappa, Contour(c, radius, nodes), radius - d, c - radius)


def dunford_apply(f: Callable[[complex], complex], T, contour: Contour) -> np.ndarray:
    """Trapezoidal Cauchy integral ``(1/2 pi i) oint f(lam) (lam I - T)^{-1} dlam``."""
    A = as_operator(T)
    dist = np.abs(spectrum(A) - contour.center)
    if np.any(dist > contour.radius - CONTAINMENT_GAP):
        raise ContourError(
            f"eigenvalue at distance {dist.max():.6g} from the centre, contour radius {contour.radius:.6g}"
        )
    n = A.shape[0]
    eye = np.eye(n, dtype=complex)
    acc = np.zeros((n, n), dtype=complex)
    # fixed summation order keeps results bit-reproducible
    for lam in contour.points():
        weight = f(lam) * (lam - contour.center) / contour.nodes
        acc += weight * resolvent_apply(A, lam, eye)
    return acc


def operator_log(U, cert: KappaCertificate, *, rtol: float = 1e-9, strict: bool = True) -> AltGenerator:
    """Principal ``Log(U + kappa I)`` with a round-trip certificate.

    The recorded residual is ``||exp(a) - (U + kappa I)||``.  With ``strict`` a
    residual above ``rtol * ||U + kappa I||`` raises :class:`RoundTripError`.
    """
    A = as_operator(U)
    if cert.contour.meets_branch_cut():
        raise BranchCutError(
            f"contour (centre {cert.contour.center}, radius {cert.contour.radius}) meets (-inf, 0]"
        )
    cert.margins(A)
    shifted = A + cert.kappa * np.eye(A.shape[0])
    a = dunford_apply(np.log, shifted, cert.contour)
    residual = operator_norm(operator_exp(a) - shifted)
    tolerance = rtol * operator_norm(shifted)
    if strict and residual > tolerance:
        raise RoundTripError(f"round-trip residual {residual:.3g} exceeds {tolerance:.3g}")
    return AltGenerator(a, cert, residual, tolerance)


# -- exponential -------------------------------------------------------------

# largest 1-norm for which the [m/m] Pade approximant reaches double precision
_PADE_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}


def _pade_coefficients(m: int) -> list[float]:
    f = math.factorial
    return [f(2 * m - j) * f(m) / (f(2 * m) * f(j) * f(m - j)) for j in range(m + 1)]


def _pade(A: np.ndarray, m: int) -> np.ndarray:
    c = _pade_coefficients(m)
    n = A.shape[0]
    A2 = A @ A
    powers = [np.eye(n, dtype=A.dtype)]
    for _ in range(m // 2):
        powers.append(powers[-1] @ A2)
    even = sum(c[2 * k] * powers[k] for k in range(m // 2 + 1))
    odd = A @ sum(c[2 * k + 1] * powers[k] for k in range((m - 1) // 2 + 1))
    return solve(even - odd, even + odd, what="Pade denominator")


def operator_exp(A) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a diagonal Pade approximant."""
    A = as_operator(A)
    if operator_norm(A) > EXP_NORM_LIMIT:
        raise ExpOverflowError(f"||A|| = {operator_norm(A):.4g} exceeds {EXP_NORM_LIMIT}")
    norm1 = np.linalg.norm(A, 1)
    for m in (3, 5, 7, 9):
        if norm1 <= _PADE_THETA[m]:
            return _pade(A, m)
    s = max(0, int(math.ceil(math.log2(norm1 / _PADE_THETA[13])))) if norm1 > 0 else 0
    E = _pade(A / 2.0**s, 13)
    for _ in range(s):
        E = E @ E
    return E
