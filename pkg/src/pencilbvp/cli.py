"""Batch front end: certify / solve / verify / sweep from a JSON config.

Reports are JSON with floats at full 17-significant-digit precision, solution
and sweep tables are CSV, and each mode renders its figures next to the
delimited output.  Exit codes: 0 success, 1 input error, 2 inadmissible
weight, 3 non-contractive iteration.
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import plots
from .certificates import certify, constants, critical_sweep, gamma
from .errors import ConfigInvalid, InadmissibleWeight, NotContractive, PencilBVPError
from .grids import (default_truncation, grid_function, l2k_norm, make_grid,
                    sobolev_norm)
from .operators import (make_operator, make_perturbations, operator_from_spectrum,
                        zero_perturbations)
from .perturbed import apply_P1, neumann_solve
from .principal import apply_P0
from .verification import (check_aux_estimates, check_energy_identity,
                           check_estimate_16, check_norm_equivalence,
                           check_P0_boundedness, random_operator,
                           random_wbar4_function, random_zero_value_function)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INADMISSIBLE = 2
EXIT_NOT_CONTRACTIVE = 3


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _jsonify(obj, indent=0):
    """Minimal JSON emitter with .17g floats and stable key order."""
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  "{k}": {_jsonify(v, indent + 2)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_jsonify(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if x != x:
            return '"nan"'
        if x == float("inf"):
            return '"inf"'
        if x == float("-inf"):
            return '"-inf"'
        return _fmt(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj)}")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(_jsonify(payload) + "\n")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v
                             for v in row])


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigInvalid("config root must be a JSON object")
    for key in ("dimension", "operator_A", "kappa"):
        if key not in cfg:
            raise ConfigInvalid(f"config is missing required key '{key}'")
    return cfg


def _build_operator(cfg):
    n = cfg["dimension"]
    spec = cfg["operator_A"]
    try:
        if "rows" in spec:
            A = make_operator(np.array(spec["rows"], dtype=float))
        elif "eigenvalues" in spec:
            A = operator_from_spectrum(np.array(spec["eigenvalues"], dtype=float),
                                       spec.get("eigenbasis"))
        else:
            raise ConfigInvalid("operator_A needs 'rows' or 'eigenvalues'")
    except PencilBVPError:
        raise
    except Exception as exc:
        raise ConfigInvalid(f"operator_A is malformed: {exc}") from exc
    if A.n != n:
        raise ConfigInvalid(f"operator_A has dimension {A.n}, config says {n}")
    return A


def _build_perturbations(cfg, A):
    spec = cfg.get("perturbations") or {}
    normalized = bool(spec.get("normalized", False))
    prefix = "B" if normalized else "A"
    mats = []
    for j in (1, 2, 3, 4):
        key = f"{prefix}{j}"
        mats.append(np.array(spec[key], dtype=float) if key in spec else None)
    if all(m is None for m in mats):
        return zero_perturbations(A)
    return make_perturbations(A, mats, normalized=normalized)


def _build_grid(cfg, A):
    spec = cfg.get("grid") or {}
    N = int(spec.get("N", 1024))
    kappa = float(cfg["kappa"])
    if spec.get("T") is not None and not spec.get("auto_T", False):
        T = float(spec["T"])
    else:
        T = default_truncation(A.lambda0, kappa)
    return make_grid(T, N, kappa)


def _manufactured_reference(spec, A, grid):
    profile_kind = spec.get("profile", "cubic-exp")
    if profile_kind != "cubic-exp":
        raise ConfigInvalid(f"unknown manufactured profile '{profile_kind}'")
    rate = float(spec.get("rate", A.lambda0))
    poly = np.array(spec.get("poly", [1.0]), dtype=float)
    direction = np.array(spec.get("direction", [1.0] * A.n), dtype=float)
    if direction.size != A.n:
        raise ConfigInvalid(f"direction has length {direction.size}, expected {A.n}")
    direction = direction / np.linalg.norm(direction)
    t = grid.nodes
    shape = np.polyval(poly[::-1], t) * t ** 3 * np.exp(-rate * t)
    return grid_function(grid, np.outer(shape, direction))


def _build_forcing(cfg, A, P, grid):
    """Returns (f, u_reference or None)."""
    spec = cfg.get("forcing") or {"kind": "manufactured"}
    kind = spec.get("kind", "manufactured")
    if kind == "manufactured":
        u_star = _manufactured_reference(spec, A, grid)
        f = apply_P0(u_star, A)
        f = f.with_samples(f.samples + apply_P1(u_star, P).samples)
        return f, u_star
    if kind == "expression":
        expr = spec.get("expr")
        if not expr:
            raise ConfigInvalid("expression forcing needs 'expr'")
        direction = np.array(spec.get("direction", [1.0] * A.n), dtype=float)
        if direction.size != A.n:
            raise ConfigInvalid(f"direction has length {direction.size}, expected {A.n}")
        try:
            values = eval(expr, {"__builtins__": {}}, {"np": np, "t": grid.nodes})
        except Exception as exc:
            raise ConfigInvalid(f"expression failed to evaluate: {exc}") from exc
        values = np.asarray(values, dtype=float)
        if values.shape != grid.nodes.shape:
            raise ConfigInvalid("expression must return one value per grid node")
        return grid_function(grid, np.outer(values, direction)), None
    if kind == "samples-file":
        path = spec.get("path")
        if not path:
            raise ConfigInvalid("samples-file forcing needs 'path'")
        try:
            data = np.loadtxt(path, delimiter=",", skiprows=1)
        except OSError as exc:
            raise ConfigInvalid(f"cannot read samples file: {exc}") from exc
        data = np.atleast_2d(data)
        if data.shape[0] != grid.N or data.shape[1] != A.n + 1:
            raise ConfigInvalid(
                f"samples file shape {data.shape} does not match grid {grid.N} x {A.n + 1}")
        if np.abs(data[:, 0] - grid.nodes).max() > 1e-9 * grid.T:
            raise ConfigInvalid("samples file nodes do not match the grid")
        return grid_function(grid, data[:, 1:]), None
    raise ConfigInvalid(f"unknown forcing kind '{kind}'")


def run_certify(cfg, outdir, make_figures=True):
    A = _build_operator(cfg)
    P = _build_perturbations(cfg, A)
    cert = certify(A, P, float(cfg["kappa"]))
    write_json(outdir / "certificate.json", cert.as_dict())
    if make_figures:
        plots.save_certificate_figure(outdir / "certificate.png", cert)
    return EXIT_INADMISSIBLE if not cert.admissible else EXIT_OK


def run_solve(cfg, outdir, make_figures=True):
    A = _build_operator(cfg)
    P = _build_perturbations(cfg, A)
    grid = _build_grid(cfg, A)
    f, u_star = _build_forcing(cfg, A, P, grid)
    solver = cfg.get("solver") or {}
    report, cert = neumann_solve(
        f, A, P,
        tol=float(solver.get("tol", 1e-10)),
        max_iter=int(solver.get("max_iter", 200)),
        residual_tol=float(solver.get("residual_tol", 1e-3)),
    )
    u = report.u
    payload = {
        "certificate": cert.as_dict(),
        "grid": {"T": grid.T, "N": grid.N, "kappa": grid.kappa},
        "residual_rel": report.residual_rel,
        "trace_norms": list(report.trace_norms),
        "sobolev_norm": report.sobolev_norm,
        "forcing_norm": report.forcing_norm,
        "bound_ratio": report.bound_ratio,
        "iterations": report.iterations,
        "contraction_ratio": report.contraction_ratio,
        "converged": report.converged,
    }
    if u_star is not None:
        err = u.with_samples(u.samples - u_star.samples)
        denom = sobolev_norm(u_star, A)
        payload["manufactured_error_rel"] = (
            sobolev_norm(err, A) / denom if denom > 0 else 0.0)
    write_json(outdir / "report.json", payload)
    write_csv(outdir / "solution.csv",
              ["t"] + [f"u_{i + 1}" for i in range(u.n)],
              [[grid.nodes[k]] + list(u.samples[k]) for k in range(grid.N)])
    if make_figures:
        plots.save_solution_figure(outdir / "solution.png", grid, u.samples,
                                   report.residual_rel)
    return EXIT_OK


def run_verify(cfg, outdir, make_figures=True):
    A = _build_operator(cfg)
    kappa = float(cfg["kappa"])
    grid = _build_grid(cfg, A)
    trials = int((cfg.get("verify") or {}).get("trials", 100))
    rng = np.random.default_rng(int(cfg.get("seed", 0)))
    margins = {"energy": [], "aux12": [], "aux13": [], "e16_j1": [], "e16_j2": [],
               "e16_j3": [], "e16_j4": [], "bounded": []}
    rows = []
    for k in range(trials):
        uz = random_zero_value_function(rng, A, grid)
        lhs, rhs, gap = check_energy_identity(uz, A)
        margins["energy"].append((kappa / A.lambda0, max(gap, 1e-18)))
        aux = check_aux_estimates(uz, A)
        margins["aux12"].append((kappa / A.lambda0, aux["A2w"] / max(aux["A2w_bound"], 1e-300)))
        margins["aux13"].append((kappa / A.lambda0, aux["Awp_sq"] / max(aux["Awp_sq_bound"], 1e-300)))
        u = random_wbar4_function(rng, A, grid)
        e16 = check_estimate_16(u, A)
        for j in (1, 2, 3, 4):
            l, r, _ = e16[f"j{j}"]
            margins[f"e16_j{j}"].append((kappa / A.lambda0, l / max(r, 1e-300)))
        bl, br = check_P0_boundedness(u, A)
        margins["bounded"].append((kappa / A.lambda0, bl / max(br, 1e-300)))
        rows.append([k, gap] + [e16[f"j{j}"][0] / max(e16[f"j{j}"][1], 1e-300)
                                for j in (1, 2, 3, 4)])
    mn, mx = check_norm_equivalence(min(trials, 100), A, kappa, rng=rng, N=grid.N)
    worst16 = max(max(r[2:]) for r in rows)
    payload = {
        "trials": trials,
        "kappa": kappa,
        "energy_gap_max": max(r[1] for r in rows),
        "estimate16_worst_ratio": worst16,
        "estimate16_all_hold": bool(worst16 <= 1.0 + 1e-4),
        "norm_equivalence_min": mn,
        "norm_equivalence_max": mx,
    }
    write_json(outdir / "verify.json", payload)
    write_csv(outdir / "verify.csv",
              ["trial", "energy_gap", "e16_j1", "e16_j2", "e16_j3", "e16_j4"],
              rows)
    if make_figures:
        plots.save_verification_figure(outdir / "verify.png", margins)
    return EXIT_OK


def run_sweep(cfg, outdir, make_figures=True):
    A = _build_operator(cfg)
    P = _build_perturbations(cfg, A)
    spec = cfg.get("sweep") or {}
    lo = float(spec.get("kappa_min", -2.2 * A.lambda0))
    hi = float(spec.get("kappa_max", 2.2 * A.lambda0))
    count = int(spec.get("count", 45))
    kappas = spec.get("kappa_values")
    kappas = (np.array(kappas, dtype=float) if kappas is not None
              else np.linspace(lo, hi, count))
    rows = critical_sweep(A, kappas, P)
    table = []
    for r in rows:
        c = r["constants"] or [float("nan")] * 4
        q = r["q"] if r["q"] is not None else float("nan")
        table.append([r["kappa"], r["gamma"], c[0], c[1], c[2], c[3], q, r["verdict"]])
    write_csv(outdir / "sweep.csv",
              ["kappa", "gamma", "c1", "c2", "c3", "c4", "q", "verdict"], table)
    write_json(outdir / "sweep.json", {"lambda0": A.lambda0, "rows": rows})
    if make_figures:
        plots.save_sweep_figure(outdir / "sweep.png", rows, A.lambda0)
    return EXIT_OK


def run(config_path, mode, outdir, seed=None, make_figures=True) -> int:
    cfg = load_config(config_path)
    if seed is not None:
        cfg["seed"] = int(seed)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    runners = {"certify": run_certify, "solve": run_solve,
               "verify": run_verify, "sweep": run_sweep}
    if mode not in runners:
        raise ConfigInvalid(f"unknown mode '{mode}'")
    return runners[mode](cfg, outdir, make_figures=make_figures)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pencilbvp",
        description="Solve and certify fourth-order operator ODEs on the half-line.")
    parser.add_argument("--config", required=True, help="path to the JSON problem file")
    parser.add_argument("--mode", required=True,
                        choices=["certify", "solve", "verify", "sweep"])
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config's random seed")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip rendering PNG figures")
    args = parser.parse_args(argv)
    try:
        return run(args.config, args.mode, args.out, seed=args.seed,
                   make_figures=not args.no_figures)
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InadmissibleWeight as exc:
        print(f"inadmissible weight: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except NotContractive as exc:
        print(f"not contractive: {exc}", file=sys.stderr)
        return EXIT_NOT_CONTRACTIVE
    except PencilBVPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
