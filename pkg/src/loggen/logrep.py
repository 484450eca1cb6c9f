"""Logarithmic representation of generators.

From the bounded operator ``a(t, s) = Log(U(t, s) + kappa I)`` the generator is
recovered as

    A(t) = (I - kappa exp(-a(t, s)))^{-1} d/dt a(t, s),

with ``d/dt`` taken by central differences.  One certificate (``kappa`` and
contour) must serve the whole stencil, so it is fitted once over the time
window ``[s, T_max]``; see :func:`window_certificate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .dunford import DEFAULT_NODES, AltGenerator, KappaCertificate, certificate_for_radius, fit_certificate, operator_exp, operator_log
from .errors import DomainError, HorizonError, NearSingularError, SingularFactorError, ValidationError
from .evolution import EvolutionFamily, evolution_operator
from .operators import as_vector, norm, operator_norm, solve, spectrum

#: Cauchy tolerance used by the pre-infinitesimal probe
PROBE_TOL = 1e-6
DEFAULT_H_SEQUENCE = tuple(10.0**-k for k in range(1, 9))


def window_certificate(
    fam: EvolutionFamily,
    s: float,
    kappa: complex | None = None,
    margin: float | None = None,
    nodes: int = DEFAULT_NODES,
    samples: int = 65,
) -> KappaCertificate:
    """A certificate valid for every ``U(t, s)`` with ``t`` in ``[s, T_max]``.

    Without ``kappa`` the rule of :func:`~loggen.dunford.choose_kappa` is
    applied to the largest sampled spectral radius; with ``kappa`` a contour
    is fitted around the pooled shifted spectra.
    """
    times = np.linspace(s, fam.T_max, samples)
    spectra = [spectrum(evolution_operator(fam, t, s).U) for t in times]
    if kappa is None:
        rho = max(float(np.max(np.abs(z))) for z in spectra)
        return certificate_for_radius(rho, margin, nodes)
    return fit_certificate(kappa, np.concatenate(spectra) + kappa, nodes)


def alt_generator(fam: EvolutionFamily, t: float, s: float, cert: KappaCertificate, strict: bool = True) -> AltGenerator:
    """``a(t, s) = Log(U(t, s) + kappa I)``."""
    return operator_log(evolution_operator(fam, t, s).U, cert, strict=strict)


def _check_stencil(fam: EvolutionFamily, t: float, s: float, h: float) -> None:
    if not h > 0:
        raise ValidationError("differencing step must be positive")
    if t - h < s or t + h > fam.T_max:
        raise DomainError(f"stencil [{t - h}, {t + h}] leaves [{s}, {fam.T_max}]")


def _central(fam, t, s, cert, h):
    return (alt_generator(fam, t + h, s, cert).a - alt_generator(fam, t - h, s, cert).a) / (2 * h)


def dt_alt_generator(
    fam: EvolutionFamily, t: float, s: float, cert: KappaCertificate, h: float, richardson: bool = False
) -> np.ndarray:
    """Central difference of ``a(., s)`` at ``t``; Richardson gives ``(4 D_{h/2} - D_h) / 3``."""
    _check_stencil(fam, t, s, h)
    D = _central(fam, t, s, cert, h)
    if richardson:
        D = (4.0 * _central(fam, t, s, cert, h / 2) - D) / 3.0
    return D


@dataclass(frozen=True)
class ReconstructionReport:
    t: float
    s: float
    h: float
    N: int
    kappa: complex
    richardson: bool
    A_hat: np.ndarray = field(repr=False)
    A_true: np.ndarray = field(repr=False)
    error: float
    roundtrip_residual: float
    order_estimate: float = math.nan


def _log_factor(a: np.ndarray, kappa: complex) -> np.ndarray:
    """``I - kappa exp(-a)``."""
    return np.eye(a.shape[0]) - kappa * operator_exp(-a)


def reconstruct_generator(
    fam: EvolutionFamily, t: float, s: float, cert: KappaCertificate, h: float, richardson: bool = False
) -> ReconstructionReport:
    """Recover ``A(t)`` from ``a(t, s)`` and compare with ``alpha(t) M``."""
    dA = dt_alt_generator(fam, t, s, cert, h, richardson)
    gen = alt_generator(fam, t, s, cert)
    try:
        A_hat = solve(_log_factor(gen.a, cert.kappa), dA, what="I - kappa exp(-a)")
    except NearSingularError as exc:
        raise SingularFactorError(
            f"I - kappa exp(-a) is singular at t={t}, s={s}: U(t, s) is (nearly) singular "
            f"or kappa={cert.kappa} collides with the spectrum of exp(a); change kappa",
            exc.condition,
        ) from exc
    A_true = fam.generator(t)
    return ReconstructionReport(
        t=t,
        s=s,
        h=h,
        N=cert.contour.nodes,
        kappa=cert.kappa,
        richardson=richardson,
        A_hat=A_hat,
        A_true=A_true,
        error=float(np.linalg.norm(A_hat - A_true, 2)),
        roundtrip_residual=gen.roundtrip_residual,
    )


def observed_order(h_prev: float, err_prev: float, h: float, err: float) -> float:
    if err_prev <= 0 or err <= 0:
        return math.nan
    return math.log(err_prev / err) / math.log(h_prev / h)


def reconstruction_sweep(
    fam: EvolutionFamily,
    t: float,
    s: float,
    cert: KappaCertificate,
    hs: Sequence[float],
    Ns: Sequence[int],
    richardson: bool = False,
) -> list[ReconstructionReport]:
    """Reports over the ``(N, h)`` grid, ``N`` outer; orders fitted along ``h``."""
    reports = []
    for N in Ns:
        c = cert.with_nodes(N)
        prev = None
        for h in hs:
            rep = reconstruct_generator(fam, t, s, c, h, richardson)
            if prev is not None:
                rep = replace(rep, order_estimate=observed_order(prev.h, prev.error, rep.h, rep.error))
            reports.append(rep)
            prev = rep
    return reports


@dataclass(frozen=True)
class GeneratorProbe:
    u_s: np.ndarray = field(repr=False)
    t: float
    h_sequence: tuple
    limits: np.ndarray = field(repr=False)  # one difference quotient per h
    converged: bool
    limit: np.ndarray | None = field(repr=False)
    reference: np.ndarray = field(repr=False)  # A(t) u_s
    tol: float = PROBE_TOL

    @property
    def error(self) -> float:
        if self.limit is None:
            return math.inf
        return norm(self.limit - self.reference)


def pre_infinitesimal(
    fam: EvolutionFamily, t: float, u_s, h_sequence: Sequence[float] = DEFAULT_H_SEQUENCE, tol: float = PROBE_TOL
) -> GeneratorProbe:
    """Difference quotients ``h^{-1}(U(t + h, t) - I) u_s`` at one fixed vector.

    Convergence is declared at the first pair of successive quotients that
    differ by at most ``tol`` times the norm of the later one; the later one
    is returned as the limit.  Failure is reported, not raised.
    """
    u_s = as_vector(u_s)
    if u_s.size != fam.dim:
        raise ValidationError(f"u_s has dimension {u_s.size}, family has {fam.dim}")
    if not np.any(u_s):
        raise ValidationError("u_s must be nonzero")
    hs = tuple(float(h) for h in h_sequence)
    if not hs or any(h <= 0 for h in hs) or any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValidationError("h_sequence must be positive and strictly decreasing")
    if t + hs[0] > fam.T_max:
        raise HorizonError(f"t + h = {t + hs[0]} exceeds T_max={fam.T_max}")

    images = np.array([(evolution_operator(fam, t + h, t).U @ u_s - u_s) / h for h in hs])
    limit = None
    for prev, cur in zip(images, images[1:]):
        if norm(cur - prev) <= tol * norm(cur):
            limit = cur
            break
    if limit is None and np.all(images == 0):
        limit = images[-1]
    return GeneratorProbe(u_s, t, hs, images, limit is not None, limit, fam.generator(t) @ u_s, tol)


def regularized_trajectory(fam: EvolutionFamily, t: float, s: float, cert: KappaCertificate, u_s) -> np.ndarray:
    """``(exp(a(t, s)) - kappa I) u_s``, which reproduces ``U(t, s) u_s``."""
    u_s = as_vector(u_s)
    a = alt_generator(fam, t, s, cert).a
    return (operator_exp(a) - cert.kappa * np.eye(a.shape[0])) @ u_s


def proof_chain_check(
    fam: EvolutionFamily, t: float, s: float, cert: KappaCertificate, h: float
) -> list[tuple[str, float]]:
    """Residuals of the identities that lead from ``U^{-1} dU/dt`` to the log form.

    * ``log_derivative``: ``(U + kappa I) da/dt`` against ``dU/dt``
    * ``chain_i``: ``U^{-1} dU/dt`` against ``(I + kappa (e^a - kappa I)^{-1}) da/dt``
    * ``chain_ii``: ``U^{-1} dU/dt`` against ``(I - kappa e^{-a})^{-1} da/dt``
    """
    _check_stencil(fam, t, s, h)
    n = fam.dim
    eye = np.eye(n)
    U = evolution_operator(fam, t, s).U
    dU = (evolution_operator(fam, t + h, s).U - evolution_operator(fam, t - h, s).U) / (2 * h)
    da = dt_alt_generator(fam, t, s, cert, h)
    a = alt_generator(fam, t, s, cert).a
    k = cert.kappa

    lhs = solve(U, dU, what="U(t, s)")
    chain_i = da + k * solve(operator_exp(a) - k * eye, da, what="exp(a) - kappa I")
    try:
        chain_ii = solve(_log_factor(a, k), da, what="I - kappa exp(-a)")
    except NearSingularError as exc:
        raise SingularFactorError(str(exc), exc.condition) from exc
    return [
        ("log_derivative", operator_norm((U + k * eye) @ da - dU)),
        ("chain_i", operator_norm(lhs - chain_i)),
        ("chain_ii", operator_norm(lhs - chain_ii)),
    ]
