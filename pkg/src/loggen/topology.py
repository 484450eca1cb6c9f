"""Convergence checkers for operator sequences in four topologies.

Residual tables per index ``n = 1..n_max``:

* uniform: ``||T_n - T||`` (exact for dense matrices, a lower bound from probes
  and basis vectors for action-defined operators);
* strong: ``max_x ||(T_n - T) x|| / ||x||`` over the probe vectors;
* weak: ``max_{x, F} |F((T_n - T) x)| / (||x|| ||F||)`` over probe pairs;
* locally strong: ``||(T_n - T) xbar|| / ||xbar||`` at one fixed vector.

Strong and weak verdicts are relative to the probe set.  A divergence verdict
is a genuine certificate; a convergence verdict only covers the probes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import GridError, ValidationError
from .evolution import EvolutionFamily, Forcing, Trajectory, forcing_at
from .operators import (
    ActionOperator,
    Functional,
    apply_operator,
    as_vector,
    basis,
    dual_product,
    identity_action,
    left_shift,
    norm,
    rank_one,
    right_shift,
    seq_sub,
    zero_action,
)

TOPOLOGIES = ("uniform", "strong", "weak", "locally_strong")
DEFAULT_N_MAX = 64
DEFAULT_TOL = 1e-8
#: divergence needs residuals above DIVERGENCE_FACTOR * tol over the last quarter
DIVERGENCE_FACTOR = 10.0
#: a tail whose log-log slope is below this is treated as still decaying
DECAY_SLOPE = -0.5


@dataclass(frozen=True)
class OperatorSequence:
    generator: Callable[[int], object]
    limit: object
    descriptor: str

    def __getitem__(self, n: int):
        if n < 1:
            raise IndexError("sequences are indexed from 1")
        return self.generator(n)

    @property
    def is_dense(self) -> bool:
        return not isinstance(self.limit, ActionOperator)


@dataclass(frozen=True)
class ProbeSet:
    vectors: tuple
    functionals: tuple
    fixed_point: np.ndarray = field(repr=False)

    def __post_init__(self):
        vectors = tuple(as_vector(v) for v in self.vectors)
        fixed = as_vector(self.fixed_point)
        if not vectors:
            raise ValidationError("probe set needs at least one vector")
        if not any(v.shape == fixed.shape and np.array_equal(v, fixed) for v in vectors):
            raise ValidationError("fixed point must be one of the probe vectors")
        functionals = tuple(f if isinstance(f, Functional) else Functional(f) for f in self.functionals)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "functionals", functionals)
        object.__setattr__(self, "fixed_point", fixed)


@dataclass(frozen=True)
class ConvergenceReport:
    topology: str
    verdict: str  # converges | diverges | inconclusive
    residuals: np.ndarray = field(repr=False)  # residuals[n - 1] for n = 1..n_max
    n_max: int
    tol: float
    note: str = ""

    @property
    def final_residual(self) -> float:
        return float(self.residuals[-1])

    def witness(self) -> list[tuple[int, float]]:
        return [(n + 1, float(r)) for n, r in enumerate(self.residuals)]


def _difference(seq: OperatorSequence, n: int, x) -> np.ndarray:
    return seq_sub(apply_operator(seq[n], x), apply_operator(seq.limit, x))


def _tail_slope(res: np.ndarray) -> float:
    n = np.arange(1, res.size + 1)
    tail = slice(max(0, res.size - max(2, res.size // 4)), res.size)
    r, k = res[tail], n[tail]
    if np.any(r <= 0) or r.size < 2:
        return 0.0
    return float(np.polyfit(np.log(k), np.log(r), 1)[0])


def classify(residuals, tol: float, allow_converge: bool = True) -> str:
    """Verdict from a residual table.

    ``converges`` when the final residual is within ``tol``; ``diverges`` when
    every residual in the last quarter exceeds ``10 tol`` and the tail is not
    decaying like a power ``n^p`` with ``p < -1/2`` (or the tail grows without
    bound); otherwise ``inconclusive``.
    """
    res = np.asarray(residuals, dtype=float)
    if not np.all(np.isfinite(res)):
        return "diverges"
    if res[-1] <= tol:
        return "converges" if allow_converge else "inconclusive"
    quarter = res[-max(1, res.size // 4):]
    if np.min(quarter) >= DIVERGENCE_FACTOR * tol and _tail_slope(res) >= DECAY_SLOPE:
        return "diverges"
    return "inconclusive"


def _report(topology, residuals, n_max, tol, allow_converge=True, note=""):
    res = np.asarray(residuals, dtype=float)
    return ConvergenceReport(topology, classify(res, tol, allow_converge), res, n_max, tol, note)


def check_uniform(seq: OperatorSequence, probes: ProbeSet | None = None, n_max: int = DEFAULT_N_MAX, tol: float = DEFAULT_TOL) -> ConvergenceReport:
    """Operator-norm residuals.

    Dense sequences use the exact norm.  For action-defined operators the
    residual is ``max ||(T_n - T) x|| / ||x||`` over the probes and the basis
    vectors ``e_1 .. e_{2 n_max}``: a certified lower bound, so it can prove
    divergence but never convergence.
    """
    if seq.is_dense:
        limit = np.asarray(seq.limit, dtype=complex)
        res = [np.linalg.norm(np.asarray(seq[n], dtype=complex) - limit, 2) for n in range(1, n_max + 1)]
        return _report("uniform", res, n_max, tol, note="exact operator norm")
    candidates = [basis(k) for k in range(1, 2 * n_max + 1)]
    if probes is not None:
        candidates += list(probes.vectors)
    res = [max(norm(_difference(seq, n, x)) / norm(x) for x in candidates) for n in range(1, n_max + 1)]
    return _report("uniform", res, n_max, tol, allow_converge=False, note="lower bound from probes and e_1..e_2n_max")


def check_strong(seq: OperatorSequence, probes: ProbeSet, n_max: int = DEFAULT_N_MAX, tol: float = DEFAULT_TOL) -> ConvergenceReport:
    res = [max(norm(_difference(seq, n, x)) / norm(x) for x in probes.vectors) for n in range(1, n_max + 1)]
    return _report("strong", res, n_max, tol, note=f"relative to {len(probes.vectors)} probe vectors")


def check_weak(seq: OperatorSequence, probes: ProbeSet, n_max: int = DEFAULT_N_MAX, tol: float = DEFAULT_TOL) -> ConvergenceReport:
    if not probes.functionals:
        raise ValidationError("weak check needs at least one functional")
    res = []
    for n in range(1, n_max + 1):
        diffs = [(_difference(seq, n, x), norm(x)) for x in probes.vectors]
        res.append(max(abs(F(d)) / (nx * F.norm) for d, nx in diffs for F in probes.functionals))
    return _report("weak", res, n_max, tol, note=f"relative to {len(probes.vectors)}x{len(probes.functionals)} probe pairs")


def check_locally_strong(seq: OperatorSequence, xbar, n_max: int = DEFAULT_N_MAX, tol: float = DEFAULT_TOL) -> ConvergenceReport:
    xbar = as_vector(xbar)
    if not np.any(xbar):
        raise ValidationError("the fixed vector must be nonzero")
    res = [norm(_difference(seq, n, xbar)) / norm(xbar) for n in range(1, n_max + 1)]
    return _report("locally_strong", res, n_max, tol, note="exact at the fixed vector")


def run_all(seq: OperatorSequence, probes: ProbeSet, n_max: int = DEFAULT_N_MAX, tol: float = DEFAULT_TOL) -> dict[str, ConvergenceReport]:
    return {
        "uniform": check_uniform(seq, probes, n_max, tol),
        "strong": check_strong(seq, probes, n_max, tol),
        "weak": check_weak(seq, probes, n_max, tol),
        "locally_strong": check_locally_strong(seq, probes.fixed_point, n_max, tol),
    }


# -- canonical families --------------------------------------------------------


def left_shift_powers() -> OperatorSequence:
    return OperatorSequence(left_shift, zero_action(), "left_shift^n")


def right_shift_powers() -> OperatorSequence:
    return OperatorSequence(right_shift, zero_action(), "right_shift^n")


RANK_ONE_W = basis(2)
RANK_ONE_V = basis(3)


def scaled_rank_one() -> OperatorSequence:
    """``T_n x = n <x, e_2> e_3``."""
    return OperatorSequence(lambda n: rank_one(n, RANK_ONE_W, RANK_ONE_V), zero_action(), "scaled_rank_one")


def constant_identity() -> OperatorSequence:
    return OperatorSequence(lambda n: identity_action(), identity_action(), "identity")


@dataclass(frozen=True)
class SuiteEntry:
    family: OperatorSequence
    probes: ProbeSet
    expected: dict


def separation_suite() -> list[SuiteEntry]:
    """The three families separating the four topologies.

    * ``left_shift^n``: strong but not uniform convergence to 0;
    * ``right_shift^n``: weak but not strong convergence (fails at ``e_1``);
    * ``scaled_rank_one``: locally strong at ``e_1`` but not weak (pair ``(e_2, e_3)``).
    """
    e = [None] + [basis(k) for k in range(1, 5)]
    e1_e3 = np.array([1.0, 0.0, 1.0 / 3.0])
    return [
        SuiteEntry(
            left_shift_powers(),
            ProbeSet((e[1], e[2], e1_e3), tuple(e[1:5]), e[2]),
            {"uniform": "diverges", "strong": "converges", "weak": "converges", "locally_strong": "converges"},
        ),
        SuiteEntry(
            right_shift_powers(),
            ProbeSet(tuple(e[1:5]), tuple(e[1:5]), e[1]),
            {"uniform": "diverges", "strong": "diverges", "weak": "converges", "locally_strong": "diverges"},
        ),
        SuiteEntry(
            scaled_rank_one(),
            ProbeSet((e[1], e[2]), (RANK_ONE_V,), e[1]),
            {"uniform": "diverges", "strong": "diverges", "weak": "diverges", "locally_strong": "converges"},
        ),
    ]


@dataclass(frozen=True)
class SuiteResult:
    rows: list  # (family, topology, verdict, expected, final_residual, n_max)
    implications: list  # (family, check name, holds)

    @property
    def matches(self) -> bool:
        return all(r[2] == r[3] for r in self.rows) and all(ok for _, _, ok in self.implications)


def implication_checks(entry: SuiteEntry, reports: dict, n_max: int, tol: float) -> list[tuple[str, bool]]:
    """Residual dominance behind uniform => strong => weak and strong => locally strong."""
    u, s, w = reports["uniform"].residuals, reports["strong"].residuals, reports["weak"].residuals
    slack = 1e-12
    checks = [
        ("uniform_dominates_strong", bool(np.all(u + slack >= s))),
        ("strong_dominates_weak", bool(np.all(s + slack >= w))),
    ]
    if reports["uniform"].verdict == "converges":
        checks.append(("uniform_implies_strong", s.size > 0 and reports["strong"].verdict == "converges"))
    if reports["strong"].verdict == "converges":
        ok = True
        for x in entry.probes.vectors:
            ls = check_locally_strong(entry.family, x, n_max, tol)
            ok &= ls.verdict == "converges" and bool(np.all(ls.residuals <= s + slack))
        checks.append(("strong_implies_locally_strong", ok))
        checks.append(("strong_implies_weak", reports["weak"].verdict == "converges"))
    return checks


def run_suite(n_max: int = DEFAULT_N_MAX, tol: float = DEFAULT_TOL) -> SuiteResult:
    rows, implications = [], []
    for entry in separation_suite():
        reports = run_all(entry.family, entry.probes, n_max, tol)
        for topo in TOPOLOGIES:
            rep = reports[topo]
            rows.append((entry.family.descriptor, topo, rep.verdict, entry.expected[topo], rep.final_residual, n_max))
        for name, ok in implication_checks(entry, reports, n_max, tol):
            implications.append((entry.family.descriptor, name, ok))
    return SuiteResult(rows, implications)


# -- dual formalism ------------------------------------------------------------


def dual_residual(traj: Trajectory, fam: EvolutionFamily, f: Forcing | None, v) -> np.ndarray:
    """``|<Du, v> - <A u, v> - <f, v>|`` at each grid point for a constant functional ``v``.

    ``D`` is the second-order finite difference on the grid (central inside,
    one-sided at the ends).
    """
    grid = np.asarray(traj.grid, dtype=float)
    if grid.size < 3:
        raise GridError(f"dual residual needs at least 3 grid points, got {grid.size}")
    v = v.representer if isinstance(v, Functional) else as_vector(v)
    du = np.gradient(traj.states, grid, axis=0, edge_order=2)
    out = np.empty(grid.size)
    for k, t in enumerate(grid):
        u = traj.states[k]
        out[k] = abs(
            dual_product(du[k], v) - dual_product(fam.generator(t) @ u, v) - dual_product(forcing_at(f, t, fam.dim), v)
        )
    return out
