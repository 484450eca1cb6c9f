"""Complex linear algebra on ``X = C^n`` and on finitely supported sequences.

Dense operators and vectors are plain ``complex128`` numpy arrays; the
constructors here only validate shape and finiteness.  Operators that live on
the sequence space (shifts, rank-one maps) are :class:`ActionOperator`
instances defined by their action alone, so no truncation dimension is ever
fixed.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import DimensionError, NearSingularError, SpectrumError, ValidationError

SCHEMA_VERSION = 1

#: condition estimates above this abort a solve
COND_LIMIT = 1e12


def as_operator(T) -> np.ndarray:
    """Validate ``T`` as a square finite matrix and return a complex copy."""
    A = np.array(T, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionError(f"operator must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError("operator entries must be finite")
    return A


def as_vector(x) -> np.ndarray:
    v = np.array(x, dtype=complex)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"vector must be one-dimensional and non-empty, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("vector entries must be finite")
    return v


def basis(k: int, dim: int | None = None) -> np.ndarray:
    """Canonical basis vector ``e_k`` (1-indexed), length ``dim`` or ``k``."""
    if k < 1:
        raise ValidationError("basis index is 1-based")
    dim = k if dim is None else dim
    if dim < k:
        raise DimensionError(f"e_{k} does not fit in dimension {dim}")
    e = np.zeros(dim, dtype=complex)
    e[k - 1] = 1.0
    return e


def norm(x) -> float:
    return float(np.linalg.norm(x))


def operator_norm(T) -> float:
    """Euclidean operator norm, i.e. the largest singular value."""
    return float(np.linalg.norm(as_operator(T), 2))


def spectrum(T, vectors: bool = False):
    """Eigenvalues of ``T`` with multiplicity, optionally with eigenvectors."""
    A = as_operator(T)
    try:
        if vectors:
            return np.linalg.eig(A)
        return np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise SpectrumError(f"eigensolver did not converge: {exc}") from exc


def spectral_radius(T) -> float:
    return float(np.max(np.abs(spectrum(T))))


def solve(M, B, what: str = "matrix") -> np.ndarray:
    """LU solve of ``M X = B`` guarded by a 1-norm condition estimate.

    Raises :class:`NearSingularError` when the estimate exceeds
    :data:`COND_LIMIT`.
    """
    M = np.asarray(M, dtype=complex)
    B = np.asarray(B, dtype=complex)
    anorm = np.linalg.norm(M, 1)
    with warnings.catch_warnings():
        # exact singularity is reported below as NearSingularError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    if np.any(np.diag(lu) == 0):
        rcond = 0.0
    else:
        (gecon,) = lapack.get_lapack_funcs(("gecon",), (lu,))
        rcond, info = gecon(lu, anorm, norm="1")
        if info != 0:
            rcond = 0.0
    if rcond == 0.0 or 1.0 / rcond > COND_LIMIT:
        cond = np.inf if rcond == 0.0 else 1.0 / rcond
        raise NearSingularError(f"{what} is numerically singular (condition ~ {cond:.3g})", cond)
    return scipy.linalg.lu_solve((lu, piv), B, check_finite=False)


def resolvent_apply(T, lam: complex, B) -> np.ndarray:
    """Return ``(lam I - T)^{-1} B`` via a factorized solve."""
    A = as_operator(T)
    B = np.asarray(B, dtype=complex)
    if B.shape[0] != A.shape[0]:
        raise DimensionError(f"right-hand side has {B.shape[0]} rows, operator has dimension {A.shape[0]}")
    M = lam * np.eye(A.shape[0]) - A
    return solve(M, B, what=f"lambda I - T at lambda={complex(lam):.6g}")


def dual_product(x, y) -> complex:
    """Sesquilinear pairing ``sum_i x_i conj(y_i)``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        raise DimensionError(f"dual product of vectors with shapes {x.shape} and {y.shape}")
    return complex(np.vdot(y, x))


# -- finitely supported sequences -------------------------------------------


def pad(x, length: int) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.size >= length:
        return x
    out = np.zeros(length, dtype=complex)
    out[: x.size] = x
    return out


def seq_sub(x, y) -> np.ndarray:
    """``x - y`` for sequences of possibly different stored lengths."""
    n = max(np.size(x), np.size(y))
    return pad(x, n) - pad(y, n)


def seq_pair(x, y) -> complex:
    n = max(np.size(x), np.size(y))
    return dual_product(pad(x, n), pad(y, n))


@dataclass(frozen=True)
class ActionOperator:
    """Linear map on finitely supported sequences, known only by its action.

    Sequences are 1-d complex arrays with implicit zeros past the stored
    length; ``apply`` must return such an array.
    """

    apply: Callable[[np.ndarray], np.ndarray]
    descriptor: str

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.apply(np.asarray(x, dtype=complex)), dtype=complex)


def left_shift(n: int = 1) -> ActionOperator:
    """``L^n``: drops the first ``n`` coordinates, ``L^n e_{k} = e_{k-n}``."""
    return ActionOperator(lambda x: x[n:].copy(), f"left_shift_pow {n}")


def right_shift(n: int = 1) -> ActionOperator:
    """``R^n``: isometry, ``R^n e_k = e_{k+n}``."""
    return ActionOperator(lambda x: np.concatenate([np.zeros(n, dtype=complex), x]), f"right_shift_pow {n}")


def rank_one(scale: complex, w, v) -> ActionOperator:
    """``x -> scale * <x, w> v``."""
    w = as_vector(w)
    v = as_vector(v)
    return ActionOperator(lambda x: scale * seq_pair(x, w) * v, f"rank_one {scale} <.,w> v")


def identity_action() -> ActionOperator:
    return ActionOperator(lambda x: x.copy(), "identity")


def zero_action() -> ActionOperator:
    return ActionOperator(lambda x: np.zeros(max(x.size, 1), dtype=complex), "zero")


def dense_action(T) -> ActionOperator:
    """View a dense matrix as acting on the first ``dim`` coordinates."""
    A = as_operator(T)
    dim = A.shape[0]

    def apply(x):
        if x.size > dim and np.any(x[dim:]):
            raise DimensionError(f"sequence has support beyond dimension {dim}")
        return A @ pad(x[:dim], dim)

    return ActionOperator(apply, f"dense {dim}x{dim}")


def apply_operator(T, x) -> np.ndarray:
    """Apply a dense matrix or an :class:`ActionOperator` to a sequence."""
    if isinstance(T, ActionOperator):
        return T(x)
    return dense_action(T)(x)


@dataclass(frozen=True)
class Functional:
    """Continuous functional ``F(x) = <x, representer>``."""

    representer: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "representer", as_vector(self.representer))

    def __call__(self, x) -> complex:
        return seq_pair(x, self.representer)

    @property
    def norm(self) -> float:
        return norm(self.representer)


# -- JSON --------------------------------------------------------------------


def operator_to_json(T) -> dict:
    A = as_operator(T)
    return {
        "schema_version": SCHEMA_VERSION,
        "dim": A.shape[0],
        "re": A.real.tolist(),
        "im": A.imag.tolist(),
    }


def operator_from_json(data: dict) -> np.ndarray:
    try:
        dim = int(data["dim"])
        re = np.array(data["re"], dtype=float)
        im = np.array(data.get("im", np.zeros((dim, dim))), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed operator object: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise DimensionError(f"operator object declares dim={dim} but carries {re.shape} / {im.shape}")
    return as_operator(re + 1j * im)


def vector_to_json(x) -> dict:
    v = as_vector(x)
    return {"schema_version": SCHEMA_VERSION, "dim": v.size, "re": v.real.tolist(), "im": v.imag.tolist()}


def vector_from_json(data: dict) -> np.ndarray:
    try:
        dim = int(data["dim"])
        re = np.array(data["re"], dtype=float)
        im = np.array(data.get("im", np.zeros(dim)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed vector object: {exc}") from exc
    if re.shape != (dim,) or im.shape != (dim,):
        raise DimensionError(f"vector object declares dim={dim} but carries {re.shape} / {im.shape}")
    return as_vector(re + 1j * im)


def load_operator(path) -> np.ndarray:
    with open(path) as fh:
        return operator_from_json(json.load(fh))


def save_operator(T, path) -> None:
    with open(path, "w") as fh:
        json.dump(operator_to_json(T), fh)
