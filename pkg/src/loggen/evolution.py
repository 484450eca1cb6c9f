"""Evolution operators for commuting generator families ``A(t) = alpha(t) M``.

Because every ``A(t)`` is a multiple of one matrix, the evolution operator has
the closed form ``U(t, s) = exp((int_s^t alpha) M)``; a fixed-step RK4
integrator of ``dU/dt = A(t) U`` is provided as an independent route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .dunford import operator_exp
from .errors import DimensionError, HorizonError, OrderingError, ValidationError
from .operators import as_operator, as_vector, operator_from_json, operator_to_json, vector_from_json, vector_to_json

PROFILE_KINDS = ("constant", "poly", "sin", "exp")
DEFAULT_STEPS = 256


@dataclass(frozen=True)
class Profile:
    """Named scalar time profile.

    ``constant``: c; ``poly``: sum coeffs[k] t^k; ``sin``: amplitude sin(omega t + phase);
    ``exp``: amplitude exp(gamma t).
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValidationError(f"unknown profile kind {self.kind!r}; expected one of {PROFILE_KINDS}")
        p = dict(self.params)
        if self.kind == "constant":
            p.setdefault("c", 0.0)
        elif self.kind == "poly":
            p["coeffs"] = [float(c) for c in p.get("coeffs", [0.0])]
            if not p["coeffs"]:
                raise ValidationError("poly profile needs at least one coefficient")
        elif self.kind == "sin":
            p.setdefault("omega", 1.0)
            p.setdefault("phase", 0.0)
            p.setdefault("amplitude", 1.0)
        else:
            p.setdefault("gamma", 1.0)
            p.setdefault("amplitude", 1.0)
        object.__setattr__(self, "params", p)

    def __call__(self, t: float) -> float:
        p = self.params
        if self.kind == "constant":
            return float(p["c"])
        if self.kind == "poly":
            return float(sum(c * t**k for k, c in enumerate(p["coeffs"])))
        if self.kind == "sin":
            return p["amplitude"] * math.sin(p["omega"] * t + p["phase"])
        return p["amplitude"] * math.exp(p["gamma"] * t)

    def antiderivative(self, t: float) -> float:
        """Closed-form primitive; used as an oracle against the quadrature route."""
        p = self.params
        if self.kind == "constant":
            return p["c"] * t
        if self.kind == "poly":
            return sum(c * t ** (k + 1) / (k + 1) for k, c in enumerate(p["coeffs"]))
        if self.kind == "sin":
            if p["omega"] == 0:
                return p["amplitude"] * math.sin(p["phase"]) * t
            return -p["amplitude"] * math.cos(p["omega"] * t + p["phase"]) / p["omega"]
        if p["gamma"] == 0:
            return p["amplitude"] * t
        return p["amplitude"] * math.exp(p["gamma"] * t) / p["gamma"]

    def to_json(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_json(cls, data: dict) -> "Profile":
        data = dict(data)
        kind = data.pop("kind", None)
        return cls(kind, data)


def constant(c: float) -> Profile:
    return Profile("constant", {"c": c})


def poly(*coeffs: float) -> Profile:
    return Profile("poly", {"coeffs": list(coeffs)})


@dataclass(frozen=True)
class EvolutionFamily:
    M: np.ndarray = field(repr=False)
    alpha: Profile
    T_max: float

    def __post_init__(self):
        object.__setattr__(self, "M", as_operator(self.M))
        if not self.T_max > 0:
            raise ValidationError("T_max must be positive")

    @property
    def dim(self) -> int:
        return self.M.shape[0]

    def generator(self, t: float) -> np.ndarray:
        """``A(t) = alpha(t) M``."""
        return self.alpha(t) * self.M

    def alpha_integral(self, s: float, t: float) -> float:
        if s == t:
            return 0.0
        val, _ = quad(self.alpha, s, t, epsabs=1e-14, epsrel=1e-13, limit=200)
        return float(val)

    def check_times(self, t: float, s: float) -> None:
        if not (0.0 <= s <= t):
            raise HorizonError(f"need 0 <= s <= t, got s={s}, t={t}")
        if t > self.T_max:
            raise HorizonError(f"t={t} exceeds the horizon T_max={self.T_max}")

    def to_json(self) -> dict:
        return {"M": operator_to_json(self.M), "alpha": self.alpha.to_json(), "T_max": self.T_max}

    @classmethod
    def from_json(cls, data: dict) -> "EvolutionFamily":
        return cls(operator_from_json(data["M"]), Profile.from_json(data["alpha"]), float(data["T_max"]))


def scalar_family(rate: float = 1.0, T_max: float = 2.0) -> EvolutionFamily:
    """``A(t) = rate`` on ``C^1``."""
    return EvolutionFamily(np.array([[1.0]]), constant(rate), T_max)


def nilpotent_family(T_max: float = 2.0) -> EvolutionFamily:
    """``A(t) = (1 + t) [[0, 1], [0, 0]]``."""
    return EvolutionFamily(np.array([[0.0, 1.0], [0.0, 0.0]]), poly(1.0, 1.0), T_max)


def rotation_family(T_max: float = 2.0) -> EvolutionFamily:
    """``A(t) = (1 + t) [[0, 1], [-1, 0]]``; RK4 is not exact here, unlike the nilpotent case."""
    return EvolutionFamily(np.array([[0.0, 1.0], [-1.0, 0.0]]), poly(1.0, 1.0), T_max)


def zero_family(dim: int = 2, T_max: float = 2.0) -> EvolutionFamily:
    return EvolutionFamily(np.eye(dim), constant(0.0), T_max)


PRESETS = {
    "scalar": scalar_family,
    "nilpotent": nilpotent_family,
    "rotation": rotation_family,
    "zero": zero_family,
}


@dataclass(frozen=True)
class EvolutionOperator:
    U: np.ndarray = field(repr=False)
    t: float
    s: float
    method: str
    step_count: int | None = None


def _rk4(fam: EvolutionFamily, t: float, s: float, h_step: float | None) -> tuple[np.ndarray, int]:
    n = fam.dim
    U = np.eye(n, dtype=complex)
    if t == s:
        return U, 0
    if h_step is None:
        steps = DEFAULT_STEPS
    else:
        if not h_step > 0:
            raise ValidationError("h_step must be positive")
        steps = max(1, math.ceil((t - s) / h_step - 1e-12))
    h = (t - s) / steps
    M = fam.M
    for k in range(steps):
        tk = s + k * h
        k1 = fam.alpha(tk) * (M @ U)
        k2 = fam.alpha(tk + h / 2) * (M @ (U + h / 2 * k1))
        k3 = fam.alpha(tk + h / 2) * (M @ (U + h / 2 * k2))
        k4 = fam.alpha(tk + h) * (M @ (U + h * k3))
        U = U + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return U, steps


def evolution_operator(
    fam: EvolutionFamily, t: float, s: float, method: str = "closed_form", h_step: float | None = None
) -> EvolutionOperator:
    """``U(t, s)`` by the closed form or by RK4.

    The stepped route uses ``ceil((t - s) / h_step)`` equal steps (256 when
    ``h_step`` is omitted).
    """
    fam.check_times(t, s)
    if method == "closed_form":
        if t == s:
            return EvolutionOperator(np.eye(fam.dim, dtype=complex), t, s, method)
        return EvolutionOperator(operator_exp(fam.alpha_integral(s, t) * fam.M), t, s, method)
    if method == "stepped":
        U, steps = _rk4(fam, t, s, h_step)
        return EvolutionOperator(U, t, s, method, steps)
    raise ValidationError(f"unknown method {method!r}")


def semigroup_defect(
    fam: EvolutionFamily, t: float, r: float, s: float, method: str = "closed_form", h_step: float | None = None
) -> float:
    """``||U(t, s) - U(t, r) U(r, s)||``."""
    if not (s <= r <= t):
        raise OrderingError(f"need s <= r <= t, got s={s}, r={r}, t={t}")

    def U(a, b):
        return evolution_operator(fam, a, b, method, h_step).U

    return float(np.linalg.norm(U(t, s) - U(t, r) @ U(r, s), 2))


@dataclass(frozen=True)
class Forcing:
    """``f(t) = profile(t) * vector``."""

    vector: np.ndarray = field(repr=False)
    profile: Profile

    def __post_init__(self):
        object.__setattr__(self, "vector", as_vector(self.vector))

    def __call__(self, t: float) -> np.ndarray:
        return self.profile(t) * self.vector

    def to_json(self) -> dict:
        return {"vector": vector_to_json(self.vector), "profile": self.profile.to_json()}

    @classmethod
    def from_json(cls, data: dict | None) -> "Forcing | None":
        if data is None:
            return None
        return cls(vector_from_json(data["vector"]), Profile.from_json(data["profile"]))


def forcing_at(f: Forcing | None, t: float, dim: int) -> np.ndarray:
    if f is None:
        return np.zeros(dim, dtype=complex)
    return f(t)


@dataclass(frozen=True)
class Trajectory:
    grid: np.ndarray
    states: np.ndarray  # shape (len(grid), dim)
    source: EvolutionFamily
    forcing: Forcing | None = None


def _simpson_duhamel(fam: EvolutionFamily, f: Forcing, a: float, b: float, refine: int) -> np.ndarray:
    """``int_a^b U(b, r) f(r) dr`` by composite Simpson on ``refine`` (even) panels."""
    nodes = np.linspace(a, b, refine + 1)
    w = np.ones(refine + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (b - a) / (3.0 * refine)
    acc = np.zeros(fam.dim, dtype=complex)
    for r, wr in zip(nodes, w):
        acc += wr * (evolution_operator(fam, b, r).U @ f(r))
    return acc


def solve_cauchy(
    fam: EvolutionFamily, u0, f: Forcing | None, grid: Sequence[float], refine: int = 4
) -> Trajectory:
    """Solve ``u' = A(t) u + f(t)``, ``u(0) = u0`` at the grid times.

    States are advanced interval by interval with the Duhamel formula
    ``u(t_{k+1}) = U(t_{k+1}, t_k) u(t_k) + int U(t_{k+1}, r) f(r) dr``, the
    integral taken by composite Simpson on each interval split ``refine`` times.
    """
    u0 = as_vector(u0)
    if u0.size != fam.dim:
        raise DimensionError(f"u0 has dimension {u0.size}, family has {fam.dim}")
    if f is not None and f.vector.size != fam.dim:
        raise DimensionError(f"forcing has dimension {f.vector.size}, family has {fam.dim}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValidationError("grid must be strictly increasing")
    if grid[0] < 0 or grid[-1] > fam.T_max:
        raise HorizonError(f"grid [{grid[0]}, {grid[-1]}] leaves [0, {fam.T_max}]")
    if refine < 2 or refine % 2:
        raise ValidationError("refine must be a positive even integer")

    def advance(u, a, b):
        out = evolution_operator(fam, b, a).U @ u
        if f is not None:
            out = out + _simpson_duhamel(fam, f, a, b, refine)
        return out

    u = u0 if grid[0] == 0 else advance(u0, 0.0, grid[0])
    states = [u]
    for a, b in zip(grid[:-1], grid[1:]):
        u = advance(u, a, b)
        states.append(u)
    return Trajectory(grid, np.array(states), fam, f)
