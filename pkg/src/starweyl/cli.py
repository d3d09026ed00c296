"""Configuration ingestion, grid validation, command dispatch and CSV output.

The config is a single JSON document::

    {
      "order": 2,
      "edges": [{"length": 1.0, "collar": 0.05, "nu": [0.0], "potentials": [[]]}],
      "gamma": "identity",                # or a list of p lower-triangular n x n matrices
      "grid": {"type": "linspace", "start": 2.0, "stop": 6.0, "count": 10},
      "params": {"s": 1, "k": 1, "N": 3, "tolerance": 1e-6}
    }

Grids also accept ``{"type": "list", "points": [[re, im], ...]}`` and
``{"type": "rect", "re": [a, b, m], "im": [c, d, k]}`` (sampled row-major).
Floats are printed with 17 significant digits so parse -> serialize -> parse
is the identity on the validated model and output files are byte-stable.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass

import numpy as np

from .asymptotics import asymptotic_check
from .errors import GuardViolation, SchemaError, StarWeylError
from .exponents import CollaredPolynomial, EdgeModel
from .propagate import integrate_basis
from .reconstruct import cross_validate, forward_weyl_grids, reconstruct_mN
from .stargraph import (
    GraphModel,
    direct_internal_weyl,
    eigen_scan,
    graph_basis,
    star_graph,
    weyl_record,
)

COLLAR_GUARD = 4.0      # |lambda|^{1/n} * x0_j
LENGTH_GUARD = 60.0     # |lambda|^{1/n} * (l_j - x0_j)

COMMANDS = ("validate", "basis", "weyl", "internal", "eigs", "asym",
            "reconstruct", "roundtrip")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


@dataclass(frozen=True)
class RunConfig:
    """Validated model + lambda grid + command parameters."""

    model: GraphModel
    grid: np.ndarray
    params: dict
    raw: dict

    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented
        return config_dict(self) == config_dict(other)


# --- parsing -----------------------------------------------------------------

def _require(mapping, key, kind, where):
    if key not in mapping:
        raise SchemaError(f"missing field '{key}' in {where}")
    value = mapping[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise SchemaError(
            f"field '{key}' in {where} must be {kind.__name__}, got {type(value).__name__}"
        )
    return value


def _float_list(values, where):
    if not isinstance(values, list) or not all(isinstance(v, (int, float)) for v in values):
        raise SchemaError(f"{where} must be a list of reals")
    return [float(v) for v in values]


def _parse_grid(spec):
    if not isinstance(spec, dict):
        raise SchemaError("'grid' must be an object")
    kind = _require(spec, "type", str, "grid")
    if kind == "list":
        pts = spec.get("points")
        if not isinstance(pts, list) or not pts:
            raise SchemaError("grid.points must be a nonempty list")
        out = []
        for p in pts:
            if isinstance(p, (int, float)):
                out.append(complex(p))
            elif isinstance(p, list) and len(p) == 2:
                out.append(complex(float(p[0]), float(p[1])))
            else:
                raise SchemaError("grid points are reals or [re, im] pairs")
        return np.array(out, dtype=complex)
    if kind == "linspace":
        a = _require(spec, "start", float, "grid")
        b = _require(spec, "stop", float, "grid")
        m = _require(spec, "count", int, "grid")
        if m < 1:
            raise SchemaError("grid.count must be >= 1")
        return np.linspace(a, b, m).astype(complex)
    if kind == "rect":
        re = _float_list(_require(spec, "re", list, "grid"), "grid.re")
        im = _float_list(_require(spec, "im", list, "grid"), "grid.im")
        if len(re) != 3 or len(im) != 3:
            raise SchemaError("grid.re and grid.im must be [start, stop, count]")
        res = np.linspace(re[0], re[1], int(re[2]))
        ims = np.linspace(im[0], im[1], int(im[2]))
        # row-major over the rectangle: imaginary part varies slowest
        return np.array([complex(r, i) for i in ims for r in res])
    raise SchemaError(f"unknown grid type '{kind}'")


def _check_guards(model: GraphModel, grid):
    n = model.order
    for lam in grid:
        mag = abs(lam) ** (1.0 / n)
        for e in model.edges:
            if mag * e.collar > COLLAR_GUARD:
                raise GuardViolation(
                    f"|lambda|^(1/n) * x0 = {mag * e.collar:.3g} > {COLLAR_GUARD}"
                    f" on edge {e.index} at lambda = {lam}"
                )
            if mag * (e.length - e.collar) > LENGTH_GUARD:
                raise GuardViolation(
                    f"|lambda|^(1/n) * (l - x0) = {mag * (e.length - e.collar):.3g}"
                    f" > {LENGTH_GUARD} on edge {e.index} at lambda = {lam}"
                )


def parse_config(text: str) -> RunConfig:
    """Parse + fully validate a JSON config (schema, admissibility, guards)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("config root must be an object")

    n = _require(doc, "order", int, "config")
    if n < 2:
        raise SchemaError("order must be >= 2")
    edges_spec = _require(doc, "edges", list, "config")
    if len(edges_spec) < 2:
        raise SchemaError("a star graph needs at least 2 edges")

    edges = []
    for j, espec in enumerate(edges_spec, start=1):
        where = f"edges[{j - 1}]"
        if not isinstance(espec, dict):
            raise SchemaError(f"{where} must be an object")
        length = _require(espec, "length", float, where)
        collar = _require(espec, "collar", float, where)
        nu = _float_list(_require(espec, "nu", list, where), f"{where}.nu")
        if len(nu) != n - 1:
            raise SchemaError(f"{where}.nu must have {n - 1} entries (mu = 0..n-2)")
        pots_spec = _require(espec, "potentials", list, where)
        if len(pots_spec) != n - 1:
            raise SchemaError(f"{where}.potentials must have {n - 1} entries")
        pots = tuple(
            CollaredPolynomial(collar, tuple(_float_list(c, f"{where}.potentials[{m}]")))
            for m, c in enumerate(pots_spec)
        )
        try:
            edges.append(EdgeModel(j, length, n, tuple(nu), pots, collar))
        except ValueError as exc:
            raise SchemaError(f"{where}: {exc}") from exc

    gamma_spec = doc.get("gamma", "identity")
    if gamma_spec == "identity":
        gamma = None
    elif isinstance(gamma_spec, list):
        if len(gamma_spec) != len(edges):
            raise SchemaError("gamma must hold one matrix per edge")
        gamma = tuple(
            np.array([_float_list(row, f"gamma[{j}]") for row in mat], dtype=float)
            for j, mat in enumerate(gamma_spec)
        )
        for j, g in enumerate(gamma):
            if g.shape != (n, n):
                raise SchemaError(f"gamma[{j}] must be {n} x {n}")
    else:
        raise SchemaError("gamma must be 'identity' or a list of matrices")

    try:
        model = star_graph(tuple(edges), gamma)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    from .errors import AdmissibilityViolation
    from .exponents import edge_exponents

    for e in edges:
        try:
            edge_exponents(e)
        except AdmissibilityViolation as exc:
            raise AdmissibilityViolation(
                exc.reason, f"edge {e.index}: {exc}"
            ) from exc

    grid = _parse_grid(_require(doc, "grid", dict, "config"))
    _check_guards(model, grid)

    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("'params' must be an object")
    return RunConfig(model, grid, dict(params), doc)


def config_dict(config: RunConfig) -> dict:
    """Canonical JSON-ready form of the validated model (serialization basis)."""
    model, grid = config.model, config.grid
    n = model.order
    return {
        "order": n,
        "edges": [
            {
                "length": e.length,
                "collar": e.collar,
                "nu": [v.real for v in e.nu],
                "potentials": [[c.real for c in q.coeffs] for q in e.potentials],
            }
            for e in model.edges
        ],
        "gamma": [[[complex(v).real for v in row] for row in g] for g in model.gamma],
        "grid": {
            "type": "list",
            "points": [[z.real, z.imag] for z in grid.tolist()],
        },
        "params": config.params,
    }


def serialize_config(config: RunConfig) -> str:
    return json.dumps(config_dict(config), indent=2, sort_keys=True) + "\n"


# --- CSV helpers ---------------------------------------------------------------

def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def _matrix_columns(prefix, n):
    cols = []
    for k in range(1, n + 1):
        for mu in range(1, n + 1):
            cols += [f"{prefix}_k{k}_mu{mu}_re", f"{prefix}_k{k}_mu{mu}_im"]
    return cols


def _matrix_values(M):
    out = []
    for row in np.asarray(M):
        for v in row:
            out += [_fmt(v.real), _fmt(v.imag)]
    return out


# --- commands -----------------------------------------------------------------

def _param(config, key, kind, default=None):
    if key not in config.params:
        if default is not None:
            return default
        raise SchemaError(f"command requires params.{key}")
    v = config.params[key]
    if kind is float and isinstance(v, int):
        v = float(v)
    if not isinstance(v, kind):
        raise SchemaError(f"params.{key} must be {kind.__name__}")
    return v


def _cmd_validate(config, outdir):
    rows = []
    for e, exps in zip(config.model.edges, config.model.exponent_sets):
        rows.append([e.index]
                    + [_fmt(x.real) for x in exps.roots]
                    + [_fmt(exps.theta)])
    n = config.model.order
    header = ["edge"] + [f"xi{k}_re" for k in range(1, n + 1)] + ["theta"]
    _write_csv(f"{outdir}/validate.csv", header, rows)
    return EXIT_OK, ["validate.csv"]


def _cmd_basis(config, outdir):
    model = config.model
    n = model.order
    header = ["lambda_re", "lambda_im", "edge"] + _matrix_columns("S", n) + ["wronskian_drift"]
    rows = []
    for lam in config.grid:
        for e, exps in zip(model.edges, model.exponent_sets):
            bv = integrate_basis(e, lam, exps=exps)
            rows.append([_fmt(lam.real), _fmt(lam.imag), e.index]
                        + _matrix_values(bv.matrix) + [_fmt(bv.wronskian_drift)])
    _write_csv(f"{outdir}/basis.csv", header, rows)
    return EXIT_OK, ["basis.csv"]


def _cmd_weyl(config, outdir):
    model = config.model
    n = model.order
    s = _param(config, "s", int)
    header = (["lambda_re", "lambda_im"] + _matrix_columns(f"M_s{s}", n)
              + [f"delta_k{k}_{p}" for k in range(1, n) for p in ("re", "im")]
              + ["flag", "cond"])
    rows = []
    for lam in config.grid:
        basis = graph_basis(model, lam)
        rec = weyl_record(model, s, lam, basis)
        flag = int(any(r.near_pole for r in rec.rows))
        cond = max(r.cond for r in rec.rows)
        deltas = []
        for r in rec.rows:
            deltas += [_fmt(r.delta.real), _fmt(r.delta.imag)]
        rows.append([_fmt(lam.real), _fmt(lam.imag)]
                    + _matrix_values(rec.matrix(n)) + deltas + [flag, _fmt(cond)])
    _write_csv(f"{outdir}/weyl.csv", header, rows)
    return EXIT_OK, ["weyl.csv"]


def _cmd_internal(config, outdir):
    model = config.model
    n = model.order
    j = _param(config, "N", int, default=model.p)
    header = ["lambda_re", "lambda_im"] + _matrix_columns(f"m_j{j}", n)
    rows = []
    for lam in config.grid:
        m = direct_internal_weyl(model, j, lam)
        rows.append([_fmt(lam.real), _fmt(lam.imag)] + _matrix_values(m.matrix))
    _write_csv(f"{outdir}/internal.csv", header, rows)
    return EXIT_OK, ["internal.csv"]


def _cmd_eigs(config, outdir):
    model = config.model
    s = _param(config, "s", int, default=1)
    k = _param(config, "k", int, default=1)
    interval = config.params.get("interval")
    if (not isinstance(interval, list) or len(interval) != 2
            or not all(isinstance(v, (int, float)) for v in interval)):
        raise SchemaError("params.interval must be [a, b]")
    grid_size = _param(config, "grid_size", int, default=200)
    zeros = eigen_scan(model, s, k, float(interval[0]), float(interval[1]), grid_size)
    rows = [[_fmt(z.lam.real), _fmt(z.lam.imag), _fmt(z.residual), int(z.converged)]
            for z in zeros]
    _write_csv(f"{outdir}/eigs.csv",
               ["lambda_re", "lambda_im", "residual", "converged"], rows)
    return EXIT_OK, ["eigs.csv"]


def _cmd_asym(config, outdir):
    model = config.model
    s = _param(config, "s", int)
    k = _param(config, "k", int)
    arg_rho = _param(config, "arg_rho", float)
    mags = _float_list(_param(config, "rho_mags", list), "params.rho_mags")
    x_probe = _param(config, "x_probe", float)
    devs = asymptotic_check(model, s, k, arg_rho, mags, x_probe)
    rows = [[_fmt(m), _fmt(d)] for m, d in zip(mags, devs)]
    _write_csv(f"{outdir}/asym.csv", ["rho_mag", "deviation"], rows)
    return EXIT_OK, ["asym.csv"]


def _report_rows(report, n):
    rows = []
    for i, lam in enumerate(report.grid):
        flagged = report.flags[i] is not None
        vals = (["nan", "nan"] * (n * n) if flagged
                else _matrix_values(report.entries[i]))
        rows.append([_fmt(lam.real), _fmt(lam.imag)] + vals
                    + [report.flags[i] or ""])
    return rows


def _cmd_reconstruct(config, outdir):
    model = config.model
    n = model.order
    N = _param(config, "N", int, default=model.p)
    source = _param(config, "s", int, default=1 if N != 1 else 2)
    weyl_grids, _ = forward_weyl_grids(model, N, config.grid)
    report = reconstruct_mN(model, weyl_grids, N, source, config.grid)
    header = (["lambda_re", "lambda_im"] + _matrix_columns(f"m_N{N}", n) + ["flag"])
    _write_csv(f"{outdir}/reconstruct.csv", header, _report_rows(report, n))
    return EXIT_OK, ["reconstruct.csv"]


def _cmd_roundtrip(config, outdir):
    model = config.model
    n = model.order
    N = _param(config, "N", int, default=model.p)
    tol = _param(config, "tolerance", float, default=1e-6)
    result = cross_validate(model, N, config.grid)
    ok = result["max_discrepancy"] <= tol
    frac = max(r.flagged_fraction for r in result["reports"].values())
    _write_csv(
        f"{outdir}/roundtrip.csv",
        ["max_discrepancy", "source_spread", "flagged_fraction", "tolerance", "passed"],
        [[_fmt(result["max_discrepancy"]), _fmt(result["source_spread"]),
          _fmt(frac), _fmt(tol), int(ok)]],
    )
    return (EXIT_OK if ok else EXIT_NUMERICAL), ["roundtrip.csv"]


_DISPATCH = {
    "validate": _cmd_validate,
    "basis": _cmd_basis,
    "weyl": _cmd_weyl,
    "internal": _cmd_internal,
    "eigs": _cmd_eigs,
    "asym": _cmd_asym,
    "reconstruct": _cmd_reconstruct,
    "roundtrip": _cmd_roundtrip,
}


def run_command(config: RunConfig, command: str, outdir: str = ".",
                plot: bool = False):
    """Dispatch one subcommand; returns (exit_code, list of written files)."""
    if command not in _DISPATCH:
        raise SchemaError(f"unknown command '{command}'")
    code, files = _DISPATCH[command](config, outdir)
    if plot:
        from . import plotting

        files = files + plotting.render(command, outdir)
    return code, files


def _error_record(code, exc):
    return json.dumps({"error": type(exc).__name__, "message": str(exc),
                       "exit": code}, sort_keys=True)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="starweyl",
        description="Weyl-type matrices and inverse reconstruction on star graphs",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("config", help="path to JSON configuration")
    ap.add_argument("--out", default=".", help="output directory (default: cwd)")
    ap.add_argument("--plot", action="store_true",
                    help="also render figures next to the CSV output")
    args = ap.parse_args(argv)

    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        print(_error_record(EXIT_IO, exc), file=sys.stderr)
        return EXIT_IO

    try:
        config = parse_config(text)
    except StarWeylError as exc:
        print(_error_record(EXIT_VALIDATION, exc), file=sys.stderr)
        return EXIT_VALIDATION

    try:
        code, files = run_command(config, args.command, args.out, args.plot)
    except (SchemaError, GuardViolation) as exc:
        print(_error_record(EXIT_VALIDATION, exc), file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(_error_record(EXIT_IO, exc), file=sys.stderr)
        return EXIT_IO
    except (StarWeylError, np.linalg.LinAlgError, ValueError) as exc:
        print(_error_record(EXIT_NUMERICAL, exc), file=sys.stderr)
        return EXIT_NUMERICAL
    for f in files:
        print(f"{args.out}/{f}")
    return code


if __name__ == "__main__":
    sys.exit(main())
