"""Command line: ``loggen {log,reconstruct,evolve,topology,gen-configs}``.

Every run writes CSV tables plus ``manifest.json`` into the output directory.
Exit codes: 0 success, 1 topology verdicts differ from expectations,
2 config schema violation, 3 numerical failure, 4 I/O failure.  Failures print
one JSON error object to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import os
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .dunford import DEFAULT_NODES, CONTAINMENT_GAP, choose_kappa, operator_log
from .errors import LoggenError, NumericalError
from .evolution import PRESETS, EvolutionFamily, Forcing, Profile, semigroup_defect, evolution_operator, solve_cauchy
from .logrep import (
    DEFAULT_H_SEQUENCE,
    PROBE_TOL,
    pre_infinitesimal,
    proof_chain_check,
    reconstruction_sweep,
    regularized_trajectory,
    window_certificate,
)
from .operators import COND_LIMIT, as_vector, operator_from_json, operator_norm, spectral_radius, vector_from_json
from .topology import DEFAULT_N_MAX, DEFAULT_TOL, dual_residual, run_suite

SCHEMA_VERSION = 1
KINDS = ("log", "reconstruct", "evolve", "topology")

EXIT_MISMATCH, EXIT_SCHEMA, EXIT_NUMERICAL, EXIT_IO = 1, 2, 3, 4

_number_list = {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1}
_vector = {
    "oneOf": [
        {"type": "array", "items": {"type": "number"}, "minItems": 1},
        {"type": "object", "required": ["dim", "re"]},
    ]
}
_operator = {"type": "object", "required": ["dim", "re"]}
_profile = {"type": "object", "required": ["kind"], "properties": {"kind": {"enum": ["constant", "poly", "sin", "exp"]}}}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"enum": list(KINDS)},
        "seed": {"type": "integer", "minimum": 0},
        "output_path": {"type": "string"},
        "family": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["preset"],
                    "properties": {"preset": {"enum": list(PRESETS)}, "T_max": {"type": "number", "exclusiveMinimum": 0}},
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "required": ["M", "alpha", "T_max"],
                    "properties": {"M": _operator, "alpha": _profile, "T_max": {"type": "number", "exclusiveMinimum": 0}},
                },
                {
                    "type": "object",
                    "required": ["random"],
                    "properties": {
                        "random": {
                            "type": "object",
                            "required": ["dim"],
                            "properties": {
                                "dim": {"type": "integer", "minimum": 1},
                                "scale": {"type": "number", "exclusiveMinimum": 0},
                            },
                        },
                        "alpha": _profile,
                        "T_max": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
            ]
        },
        "sweep": {
            "type": "object",
            "properties": {
                "h": _number_list,
                "N": {"type": "array", "items": {"type": "integer", "minimum": 8}, "minItems": 1},
            },
        },
        "operator": {"oneOf": [_operator, {"type": "string"}]},
        "random": {
            "type": "object",
            "properties": {
                "count": {"type": "integer", "minimum": 1},
                "dim": {"type": "integer", "minimum": 1},
                "spectral_radius": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "margin": {"type": "number", "minimum": 0},
        "kappa": {"type": "number", "not": {"const": 0}},
        "t": {"type": "number", "minimum": 0},
        "s": {"type": "number", "minimum": 0},
        "richardson": {"type": "boolean"},
        "probe": {
            "type": "object",
            "required": ["u_s"],
            "properties": {"u_s": _vector, "t": {"type": "number", "minimum": 0}, "h_sequence": _number_list},
        },
        "u0": _vector,
        "forcing": {"oneOf": [{"type": "null"}, {"type": "object", "required": ["vector", "profile"]}]},
        "grid": {
            "type": "object",
            "required": ["stop", "points"],
            "properties": {
                "start": {"type": "number", "minimum": 0},
                "stop": {"type": "number", "exclusiveMinimum": 0},
                "points": {"type": "integer", "minimum": 2},
            },
        },
        "functional": _vector,
        "semigroup": {
            "type": "object",
            "properties": {
                "random_triples": {"type": "integer", "minimum": 0},
                "order_triple": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
                "h_steps": _number_list,
            },
        },
        "n_max": {"type": "integer", "minimum": 4},
        "tol": {"type": "number", "exclusiveMinimum": 0},
    },
}

DEFAULTS = {
    "log": {"kind": "log", "seed": 0, "random": {"count": 1, "dim": 6, "spectral_radius": 1.0}, "sweep": {"N": [DEFAULT_NODES]}},
    "reconstruct": {
        "kind": "reconstruct",
        "seed": 0,
        "family": {"preset": "scalar"},
        "t": 1.0,
        "s": 0.0,
        "sweep": {"h": [1e-2, 5e-3, 2.5e-3], "N": [DEFAULT_NODES]},
    },
    "evolve": {
        "kind": "evolve",
        "seed": 0,
        "family": {"preset": "scalar"},
        "u0": [0.0],
        "forcing": {"vector": {"dim": 1, "re": [1.0]}, "profile": {"kind": "constant", "c": 1.0}},
        "grid": {"start": 0.0, "stop": 1.0, "points": 256},
        "functional": [1.0],
    },
    "topology": {"kind": "topology", "seed": 0, "n_max": DEFAULT_N_MAX, "tol": DEFAULT_TOL},
}


class CLIError(Exception):
    def __init__(self, code: int, kind: str, message: str, **extra):
        super().__init__(message)
        self.code = code
        self.kind = kind
        self.extra = extra

    def to_json(self) -> dict:
        return {"error": self.kind, "exit_code": self.code, "message": str(self), **self.extra}


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else ""


def validate_config(config: dict) -> None:
    """Schema check plus the ordering rule for sweep lists."""
    validator = jsonschema.Draft7Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise CLIError(EXIT_SCHEMA, "schema_violation", err.message, pointer=_pointer(err.absolute_path))
    for key, values in config.get("sweep", {}).items():
        inc = all(a < b for a, b in zip(values, values[1:]))
        dec = all(a > b for a, b in zip(values, values[1:]))
        if not (inc or dec):
            raise CLIError(EXIT_SCHEMA, "schema_violation", "sweep list must be strictly sorted", pointer=f"/sweep/{key}")


# -- building blocks from config ---------------------------------------------


def _vector_of(spec) -> np.ndarray:
    if isinstance(spec, dict):
        return vector_from_json(spec)
    return as_vector(spec)


def _random_operator(rng: np.random.Generator, dim: int, radius: float) -> np.ndarray:
    U = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return U * (radius * rng.uniform(0.5, 1.0) / spectral_radius(U))


def family_from_config(spec: dict, seed: int) -> EvolutionFamily:
    if "preset" in spec:
        kwargs = {"T_max": spec["T_max"]} if "T_max" in spec else {}
        return PRESETS[spec["preset"]](**kwargs)
    if "random" in spec:
        rng = np.random.default_rng(seed)
        dim = spec["random"]["dim"]
        M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        M *= spec["random"].get("scale", 0.5) / operator_norm(M)
        alpha = Profile.from_json(spec.get("alpha", {"kind": "sin", "omega": 2.0, "phase": 0.5}))
        return EvolutionFamily(M, alpha, float(spec.get("T_max", 1.0)))
    return EvolutionFamily.from_json(spec)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


class Run:
    """Output directory, timing, and manifest bookkeeping for one invocation."""

    def __init__(self, config: dict, out_dir: Path, quiet: bool):
        self.config = config
        self.out = out_dir
        self.quiet = quiet
        self.stages: dict[str, float] = {}
        self.results: dict = {}
        self.tolerances: dict = {"cond_limit": COND_LIMIT, "containment_gap": CONTAINMENT_GAP}
        self.outputs: list[str] = []
        try:
            self.out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CLIError(EXIT_IO, "io_failure", str(exc), path=str(self.out)) from exc

    @contextlib.contextmanager
    def stage(self, name: str, **params):
        start = time.perf_counter()
        try:
            yield
        except NumericalError as exc:
            raise CLIError(
                EXIT_NUMERICAL,
                "numerical_failure",
                str(exc),
                exception=type(exc).__name__,
                operation=name,
                parameters={k: _jsonable(v) for k, v in params.items()},
            ) from exc
        finally:
            self.stages[name] = self.stages.get(name, 0.0) + time.perf_counter() - start

    def write_csv(self, name: str, header: list[str], rows) -> None:
        path = self.out / name
        try:
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                for row in rows:
                    w.writerow([_fmt(x) for x in row])
        except OSError as exc:
            raise CLIError(EXIT_IO, "io_failure", str(exc), path=str(path)) from exc
        self.outputs.append(name)

    def write_json(self, name: str, payload) -> None:
        path = self.out / name
        try:
            with open(path, "w") as fh:
                json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
                fh.write("\n")
        except OSError as exc:
            raise CLIError(EXIT_IO, "io_failure", str(exc), path=str(path)) from exc
        if name != "manifest.json":
            self.outputs.append(name)

    def say(self, msg: str) -> None:
        if not self.quiet:
            print(msg)

    def finish(self) -> None:
        self.write_json(
            "manifest.json",
            {
                "schema_version": SCHEMA_VERSION,
                "toolkit_version": __version__,
                "config": self.config,
                "stages_seconds": self.stages,
                "tolerances": self.tolerances,
                "results": self.results,
                "outputs": self.outputs,
            },
        )


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


# -- experiments --------------------------------------------------------------


def _operators_for_log(config: dict, seed: int) -> list[np.ndarray]:
    if "operator" in config:
        spec = config["operator"]
        if isinstance(spec, str):
            try:
                with open(spec) as fh:
                    spec = json.load(fh)
            except OSError as exc:
                raise CLIError(EXIT_IO, "io_failure", str(exc), path=config["operator"]) from exc
            except json.JSONDecodeError as exc:
                raise CLIError(EXIT_SCHEMA, "schema_violation", f"operator file is not JSON: {exc}", pointer="/operator")
        try:
            return [operator_from_json(spec)]
        except LoggenError as exc:
            raise CLIError(EXIT_SCHEMA, "schema_violation", str(exc), pointer="/operator") from exc
    rnd = config.get("random", {})
    rng = np.random.default_rng(seed)
    return [_random_operator(rng, rnd.get("dim", 6), rnd.get("spectral_radius", 1.0)) for _ in range(rnd.get("count", 1))]


def run_log(run: Run, config: dict) -> int:
    seed = config.get("seed", 0)
    Ns = config.get("sweep", {}).get("N", [DEFAULT_NODES])
    margin = config.get("margin")
    rows, worst = [], 0.0
    summary = None
    for idx, U in enumerate(_operators_for_log(config, seed)):
        with run.stage("choose_kappa", sample=idx, margin=margin):
            cert = choose_kappa(U, margin)
        for N in Ns:
            with run.stage("operator_log", sample=idx, N=N, kappa=cert.kappa):
                gen = operator_log(U, cert.with_nodes(N), strict=False)
            scale = operator_norm(U + cert.kappa * np.eye(U.shape[0]))
            rel = gen.roundtrip_residual / scale
            worst = max(worst, rel)
            rows.append((idx, N, cert.kappa.real, cert.contour.radius, gen.roundtrip_residual, rel))
            summary = {
                "a": gen.to_json()["a"],
                "kappa": cert.kappa,
                "radius": cert.contour.radius,
                "N": N,
                "roundtrip_residual": gen.roundtrip_residual,
            }
    run.write_csv("log.csv", ["sample", "N", "kappa", "radius", "roundtrip_residual", "relative_residual"], rows)
    if len(rows) == 1 or "operator" in config:
        run.write_json("log.json", summary)
    run.tolerances["roundtrip_rtol"] = 1e-9
    run.results["worst_relative_residual"] = worst
    run.say(f"log: {len(rows)} evaluations, worst relative round-trip residual {worst:.3e}")
    return 0


def run_reconstruct(run: Run, config: dict) -> int:
    seed = config.get("seed", 0)
    fam = family_from_config(config.get("family", {"preset": "scalar"}), seed)
    t, s = float(config.get("t", 1.0)), float(config.get("s", 0.0))
    hs = config.get("sweep", {}).get("h", [1e-2, 5e-3, 2.5e-3])
    Ns = config.get("sweep", {}).get("N", [DEFAULT_NODES])
    richardson = bool(config.get("richardson", False))
    with run.stage("window_certificate", s=s, kappa=config.get("kappa"), margin=config.get("margin")):
        cert = window_certificate(fam, s, kappa=config.get("kappa"), margin=config.get("margin"))
    with run.stage("reconstruct_generator", t=t, s=s, h=hs, N=Ns, richardson=richardson):
        reports = reconstruction_sweep(fam, t, s, cert, hs, Ns, richardson)
    run.write_csv(
        "reconstruct.csv",
        ["h", "N", "error", "order_estimate", "roundtrip_residual"],
        [(r.h, r.N, r.error, r.order_estimate, r.roundtrip_residual) for r in reports],
    )
    chain_rows = []
    for N in Ns:
        for h in hs:
            with run.stage("proof_chain_check", t=t, s=s, h=h, N=N):
                for name, res in proof_chain_check(fam, t, s, cert.with_nodes(N), h):
                    chain_rows.append((h, N, name, res))
    run.write_csv("proof_chain.csv", ["h", "N", "identity", "residual"], chain_rows)
    run.results["kappa"] = cert.kappa
    run.results["contour"] = {"center": cert.contour.center, "radius": cert.contour.radius}
    run.results["max_error"] = max(r.error for r in reports)
    run.results["max_chain_residual"] = max(r[3] for r in chain_rows)
    if "probe" in config:
        p = config["probe"]
        pt = float(p.get("t", 0.0))
        hseq = p.get("h_sequence", list(DEFAULT_H_SEQUENCE))
        with run.stage("pre_infinitesimal", t=pt, h_sequence=hseq):
            probe = pre_infinitesimal(fam, pt, _vector_of(p["u_s"]), hseq)
        header = ["h"] + [c for i in range(fam.dim) for c in (f"re(q_{i + 1})", f"im(q_{i + 1})")]
        run.write_csv(
            "probe.csv",
            header,
            [(h, *[c for z in q for c in (z.real, z.imag)]) for h, q in zip(probe.h_sequence, probe.limits)],
        )
        run.results["probe"] = {"converged": probe.converged, "error": probe.error, "limit": probe.limit}
        run.tolerances["probe_cauchy_tol"] = PROBE_TOL
    run.say(f"reconstruct: {len(reports)} sweep points, max error {run.results['max_error']:.3e}")
    return 0


def run_evolve(run: Run, config: dict) -> int:
    seed = config.get("seed", 0)
    fam = family_from_config(config.get("family", {"preset": "scalar"}), seed)
    u0 = _vector_of(config.get("u0", [1.0] * fam.dim))
    forcing = Forcing.from_json(config.get("forcing"))
    g = config.get("grid", {"start": 0.0, "stop": fam.T_max, "points": 64})
    grid = np.linspace(g.get("start", 0.0), g["stop"], g["points"])
    with run.stage("solve_cauchy", points=g["points"]):
        traj = solve_cauchy(fam, u0, forcing, grid)
    header = ["t"] + [c for i in range(fam.dim) for c in (f"re(u_{i + 1})", f"im(u_{i + 1})")]
    run.write_csv("trajectory.csv", header, [(t, *[c for z in u for c in (z.real, z.imag)]) for t, u in zip(grid, traj.states)])

    check_cols, check_data = ["t"], [grid]
    if "functional" in config and traj.grid.size >= 3:
        with run.stage("dual_residual"):
            dres = dual_residual(traj, fam, forcing, _vector_of(config["functional"]))
        check_cols.append("dual_residual")
        check_data.append(dres)
        run.results["max_dual_residual"] = float(dres.max())
    if forcing is None and grid[0] == 0.0:
        with run.stage("window_certificate", kappa=config.get("kappa")):
            cert = window_certificate(fam, 0.0, kappa=config.get("kappa"), margin=config.get("margin"))
        reg = []
        for t, u in zip(grid, traj.states):
            with run.stage("regularized_trajectory", t=t):
                reg.append(float(np.linalg.norm(regularized_trajectory(fam, t, 0.0, cert, u0) - u)))
        check_cols.append("regularized_residual")
        check_data.append(reg)
        run.results["max_regularized_residual"] = max(reg)
        run.results["kappa"] = cert.kappa
    run.write_csv("checks.csv", check_cols, zip(*check_data))

    sg = config.get("semigroup")
    if sg is not None:
        rng = np.random.default_rng(seed)
        rows = []
        for _ in range(sg.get("random_triples", 20)):
            s, r, t = np.sort(rng.uniform(0.0, fam.T_max, 3))
            with run.stage("semigroup_defect", t=t, r=r, s=s):
                rows.append(("closed_form", t, r, s, "", semigroup_defect(fam, t, r, s)))
        t, r, s = sg.get("order_triple", [0.975 * fam.T_max, 0.3625 * fam.T_max, 0.0])
        for h in sg.get("h_steps", [1 / 8, 1 / 16, 1 / 32]):
            with run.stage("semigroup_defect", t=t, r=r, s=s, h_step=h):
                rows.append(("stepped", t, r, s, h, semigroup_defect(fam, t, r, s, "stepped", h)))
                diff = evolution_operator(fam, t, s).U - evolution_operator(fam, t, s, "stepped", h).U
                rows.append(("closed_vs_stepped", t, "", s, h, float(np.linalg.norm(diff, 2))))
        run.write_csv("semigroup.csv", ["check", "t", "r", "s", "h_step", "defect"], rows)
        run.results["max_closed_defect"] = max((row[5] for row in rows if row[0] == "closed_form"), default=0.0)
    run.say(f"evolve: {grid.size} grid points written")
    return 0


def run_topology(run: Run, config: dict) -> int:
    n_max = config.get("n_max", DEFAULT_N_MAX)
    tol = config.get("tol", DEFAULT_TOL)
    with run.stage("separation_suite", n_max=n_max, tol=tol):
        result = run_suite(n_max, tol)
    run.write_csv(
        "verdicts.csv",
        ["family", "topology", "verdict", "final_residual", "n_max"],
        [(fam, topo, verdict, res, n) for fam, topo, verdict, _, res, n in result.rows],
    )
    run.write_csv("implications.csv", ["family", "check", "holds"], result.implications)
    run.tolerances.update({"tol": tol, "divergence_factor": 10.0})
    run.results["matches_expectations"] = result.matches
    run.results["mismatches"] = [r[:4] for r in result.rows if r[2] != r[3]]
    run.say("topology: verdict matrix " + ("matches" if result.matches else "DOES NOT match") + " expectations")
    return 0 if result.matches else EXIT_MISMATCH


RUNNERS = {"log": run_log, "reconstruct": run_reconstruct, "evolve": run_evolve, "topology": run_topology}


def run(config: dict, out_dir: str | os.PathLike | None = None, quiet: bool = True) -> int:
    """Validate ``config``, execute it, write the report files and manifest."""
    config = {"schema_version": SCHEMA_VERSION, **config}
    validate_config(config)
    out = Path(out_dir if out_dir is not None else config.get("output_path", f"out/{config['kind']}"))
    config["output_path"] = str(out)
    r = Run(config, out, quiet)
    try:
        code = RUNNERS[config["kind"]](r, config)
    except LoggenError as exc:
        # numerical errors are wrapped by Run.stage; anything left is bad input
        raise CLIError(EXIT_SCHEMA, "schema_violation", str(exc), exception=type(exc).__name__) from exc
    r.finish()
    return code


# -- example configs ------------------------------------------------------------

EXAMPLE_CONFIGS = {
    "c01_roundtrip": {"kind": "log", "seed": 1, "random": {"count": 100, "dim": 6, "spectral_radius": 1.0}, "sweep": {"N": [128]}},
    "c02_quadrature_decay": {"kind": "log", "seed": 2, "random": {"count": 1, "dim": 6, "spectral_radius": 1.0}, "sweep": {"N": [16, 32, 64, 128]}},
    "c03_reconstruct_scalar": {"kind": "reconstruct", "seed": 3, "family": {"preset": "scalar"}, "t": 1.0, "s": 0.0, "sweep": {"h": [1e-2, 5e-3, 2.5e-3, 1e-3], "N": [128]}},
    "c03_reconstruct_nilpotent": {"kind": "reconstruct", "seed": 3, "family": {"preset": "nilpotent"}, "t": 1.0, "s": 0.0, "kappa": 1.0, "sweep": {"h": [1e-2, 5e-3, 2.5e-3, 1e-3], "N": [128]}},
    "c03_reconstruct_richardson": {"kind": "reconstruct", "seed": 3, "family": {"preset": "scalar"}, "t": 1.0, "s": 0.0, "richardson": True, "sweep": {"h": [1e-1, 5e-2, 2.5e-2], "N": [128]}},
    "c04_proof_chain": {"kind": "reconstruct", "seed": 4, "family": {"preset": "nilpotent"}, "t": 1.0, "s": 0.0, "sweep": {"h": [1e-3], "N": [128]}},
    "c05_semigroup": {
        "kind": "evolve",
        "seed": 5,
        "family": {"preset": "rotation", "T_max": 1.0},
        "u0": [0.0, 1.0],
        "forcing": None,
        "grid": {"start": 0.0, "stop": 1.0, "points": 16},
        "semigroup": {"random_triples": 20, "order_triple": [0.975, 0.3625, 0.0], "h_steps": [0.125, 0.0625, 0.03125]},
    },
    "c06_regularized_trajectory": {
        "kind": "evolve",
        "seed": 6,
        "family": {"random": {"dim": 4, "scale": 0.5}, "alpha": {"kind": "sin", "omega": 2.0, "phase": 0.5}, "T_max": 1.0},
        "u0": [1.0, -0.5, 0.25, 2.0],
        "forcing": None,
        "grid": {"start": 0.0, "stop": 1.0, "points": 64},
        "functional": [1.0, 0.0, 1.0, 0.0],
    },
    "c07_topology": {"kind": "topology", "seed": 7, "n_max": 64, "tol": 1e-8},
    "c08_dual_residual": {
        "kind": "evolve",
        "seed": 8,
        "family": {"preset": "scalar", "T_max": 1.0},
        "u0": [0.0],
        "forcing": {"vector": {"dim": 1, "re": [1.0]}, "profile": {"kind": "constant", "c": 1.0}},
        "grid": {"start": 0.0, "stop": 1.0, "points": 256},
        "functional": [1.0],
    },
    "c09_pre_infinitesimal": {
        "kind": "reconstruct",
        "seed": 9,
        "family": {"preset": "nilpotent"},
        "t": 1.0,
        "s": 0.0,
        "sweep": {"h": [1e-3], "N": [128]},
        "probe": {"u_s": [0.0, 1.0], "t": 0.0},
    },
    "c10_determinism": {"kind": "log", "seed": 10, "random": {"count": 5, "dim": 6, "spectral_radius": 1.0}, "sweep": {"N": [32, 64, 128]}},
}


def generate_example_configs(directory) -> list[Path]:
    """Write one ready-to-run config per acceptance criterion into ``directory``."""
    d = Path(directory)
    paths = []
    try:
        d.mkdir(parents=True, exist_ok=True)
        for name, cfg in EXAMPLE_CONFIGS.items():
            cfg = {"schema_version": SCHEMA_VERSION, **cfg, "output_path": f"out/{name}"}
            path = d / f"{name}.json"
            with open(path, "w") as fh:
                json.dump(cfg, fh, indent=2)
                fh.write("\n")
            paths.append(path)
    except OSError as exc:
        raise CLIError(EXIT_IO, "io_failure", str(exc), path=str(d)) from exc
    return paths


# -- entry point ------------------------------------------------------------------


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CLIError(EXIT_IO, "io_failure", str(exc), path=path) from exc
    except json.JSONDecodeError as exc:
        raise CLIError(EXIT_SCHEMA, "schema_violation", f"config is not valid JSON: {exc}", pointer="")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loggen", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON experiment config")
    common.add_argument("--out", metavar="DIR", help="output directory (LOGGEN_OUT overrides)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--nodes", type=int, help="override the quadrature node sweep with one value")
    common.add_argument("--step", type=float, help="override the differencing step sweep with one value")
    common.add_argument("--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p_log = sub.add_parser("log", parents=[common], help="operator logarithm with round-trip certificate")
    p_log.add_argument("operator", nargs="?", help="operator JSON file")
    sub.add_parser("reconstruct", parents=[common], help="recover A(t) from Log(U + kappa I)")
    sub.add_parser("evolve", parents=[common], help="solve the Cauchy problem and audit it")
    sub.add_parser("topology", parents=[common], help="run the topology separation suite")
    sub.add_parser("gen-configs", parents=[common], help="write example configs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = os.environ.get("LOGGEN_OUT") or args.out
    try:
        if args.command == "gen-configs":
            paths = generate_example_configs(out or "configs")
            if not args.quiet:
                print("\n".join(str(p) for p in paths))
            return 0
        config = _load_config(args.config) if args.config else json.loads(json.dumps(DEFAULTS[args.command]))
        if config.get("kind", args.command) != args.command:
            raise CLIError(EXIT_SCHEMA, "schema_violation", f"config kind {config.get('kind')!r} does not match subcommand", pointer="/kind")
        config.setdefault("kind", args.command)
        if args.seed is not None:
            config["seed"] = args.seed
        if args.nodes is not None:
            config.setdefault("sweep", {})["N"] = [args.nodes]
        if args.step is not None:
            config.setdefault("sweep", {})["h"] = [args.step]
        if getattr(args, "operator", None):
            config["operator"] = args.operator
            config.pop("random", None)
        return run(config, out, quiet=args.quiet)
    except CLIError as exc:
        print(json.dumps(_jsonable(exc.to_json())), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
