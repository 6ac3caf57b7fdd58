"""Command-line front end: solve, sweep-p, sweep-beta, verify, export."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import RunConfig, parse_config
from .continuation import beta_sweep, certify_triple, p_sweep
from .energy import sobolev_check
from .mesh import build_interval_mesh, build_rect_mesh, write_mesh
from .mpass import MpassConfig, SolveError, find_endpoint, mountain_pass_solve
from .nonlinearity import ProblemParams
from .runio import (RECORD_COLUMNS, read_field_snapshot, record_rows,
                    write_csv, write_field_snapshot, write_flux_snapshot,
                    write_json, write_manifest)

__all__ = ["main"]


def _build(cfg: RunConfig):
    if cfg.kind == "interval":
        mesh = build_interval_mesh(cfg.lx, cfg.nx)
    else:
        mesh = build_rect_mesh(cfg.lx, cfg.ly, cfg.nx, cfg.ny)
    P = ProblemParams(dim=cfg.dim, q=cfg.q, beta=cfg.beta, p=cfg.p,
                      p_bar=cfg.p_bar)
    mp = MpassConfig(m=cfg.m, max_outer=cfg.max_outer, eps_g=cfg.eps_g,
                     degree=cfg.degree)
    return mesh, P, mp


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve(args) -> int:
    cfg = parse_config(args.config)
    mesh, P, mp = _build(cfg)
    out = _out_dir(args)
    e = find_endpoint(P, mesh, cfg=mp)
    try:
        res = mountain_pass_solve(P, mesh, e, mp)
    except SolveError as err:
        if err.result is None:
            print(f"solve failed: {err}", file=sys.stderr)
            return 1
        res = err.result
        print(f"solve did not converge: {err}", file=sys.stderr)
    files = [
        write_csv(out / "solve_trace.csv", ["iteration", "level", "residual"],
                  res.trace),
        write_field_snapshot(out / "solution.field", res.u),
        write_json(out / "summary.json", {
            "p": P.p, "beta": P.beta, "q": P.q, "p_bar": P.p_bar,
            "level": res.c, "grad_residual": res.grad_residual,
            "lambda_proxy": res.lambda_proxy, "iterations": res.iterations,
            "status": res.status,
        }),
    ]
    if args.snapshots:
        from .bv_pairing import extract_flux

        files.append(write_flux_snapshot(out / "solution.flux",
                                         extract_flux(res.u, P.p)))
    files.append(write_manifest(out, files))
    print(f"level={res.c:.12g} residual={res.grad_residual:.3e} "
          f"status={res.status}")
    return 0 if res.ok else 1


def _sweep_common(args, run):
    cfg = parse_config(args.config)
    mesh, P, mp = _build(cfg)
    out = _out_dir(args)
    return run(cfg, mesh, P, mp, out, args)


def cmd_sweep_p(args) -> int:
    def run(cfg, mesh, P, mp, out, args):
        p_values = cfg.p_values or [P.p]
        sweep = p_sweep(P, mesh, p_values, mp)
        files = [write_csv(out / "sweep_p.csv", RECORD_COLUMNS,
                           record_rows(sweep.records))]
        if args.snapshots:
            for r in sweep.records:
                files.append(write_field_snapshot(
                    out / f"p_{r.p:.6g}.field", r.u))
        files.append(write_manifest(out, files))
        for msg in sweep.failures:
            print(msg, file=sys.stderr)
        print(f"{len(sweep.records)} records -> {out / 'sweep_p.csv'}")
        return 0 if sweep.ok else 1

    return _sweep_common(args, run)


def cmd_sweep_beta(args) -> int:
    def run(cfg, mesh, P, mp, out, args):
        beta_values = cfg.beta_values or [P.beta]
        result = beta_sweep(P, mesh, beta_values, cfg.p_values or None, mp)
        rows = record_rows(result["records"])
        for row, d in zip(rows, result["l1_to_final"]):
            row.append(d)
        files = [write_csv(out / "sweep_beta.csv",
                           RECORD_COLUMNS + ["l1_to_final"], rows)]
        if args.snapshots:
            for r in result["records"]:
                files.append(write_field_snapshot(
                    out / f"beta_{r.beta:.6g}.field", r.u))
        files.append(write_manifest(out, files))
        for msg in result["failures"]:
            print(msg, file=sys.stderr)
        print(f"{len(result['records'])} records -> {out / 'sweep_beta.csv'}")
        return 0 if result["ok"] else 1

    return _sweep_common(args, run)


def cmd_verify(args) -> int:
    """Solve at (p, beta) and emit the flux/selection certificate."""
    cfg = parse_config(args.config)
    mesh, P, mp = _build(cfg)
    out = _out_dir(args)
    e = find_endpoint(P, mesh, cfg=mp)
    try:
        res = mountain_pass_solve(P, mesh, e, mp)
    except SolveError as err:
        if err.result is None:
            print(f"verify: solve failed: {err}", file=sys.stderr)
            return 1
        res = err.result
    cert = certify_triple(res.u, P, degree=mp.degree)
    sob = sobolev_check(res.u, P, mp.degree)
    payload = {
        "p": P.p, "beta": P.beta, "level": res.c,
        "grad_residual": res.grad_residual,
        "residual_max": cert.residual_max,
        "flux_sup": cert.flux_sup,
        "min_ratio": cert.min_ratio,
        "mean_ratio": cert.mean_ratio,
        "clarke_violations": cert.clarke_violations,
        "boundary_defect": cert.boundary_defect,
        "max_normal_trace": cert.max_normal_trace,
        "sobolev_lhs": sob.lhs, "sobolev_rhs": sob.rhs, "sobolev_ok": sob.ok,
    }
    files = [write_json(out / "verify.json", payload)]
    files.append(write_manifest(out, files))
    ok = (res.ok and cert.residual_max <= mp.eps_g
          and cert.clarke_violations == 0 and sob.ok)
    print(f"residual={cert.residual_max:.3e} flux_sup={cert.flux_sup:.6g} "
          f"clarke_violations={cert.clarke_violations} "
          f"{'OK' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_export(args) -> int:
    """Write the mesh as text and, if given, a field snapshot as a table."""
    cfg = parse_config(args.config)
    mesh, _, _ = _build(cfg)
    out = _out_dir(args)
    mesh_path = out / "mesh.txt"
    write_mesh(mesh, mesh_path)
    files = [mesh_path]
    if args.field:
        u = read_field_snapshot(args.field, mesh)
        header = ["x", "u"] if mesh.dim == 1 else ["x", "y", "u"]
        rows = [list(xy) + [v] for xy, v in zip(mesh.nodes, u.values)]
        files.append(write_csv(out / "field.csv", header, rows))
    files.append(write_manifest(out, files))
    print(f"exported {len(files)} files to {out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="onelap",
        description="Mountain-pass continuation for a threshold 1-Laplacian problem")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap BLAS/OpenMP thread counts")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, doc):
        sp = sub.add_parser(name, help=doc)
        sp.add_argument("--config", required=True, help="key=value config file")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--snapshots", action="store_true",
                        help="also write field/flux snapshots")
        sp.set_defaults(fn=fn)
        return sp

    add("solve", cmd_solve, "single mountain-pass solve at (p, beta)")
    add("sweep-p", cmd_sweep_p, "continuation along the p schedule")
    add("sweep-beta", cmd_sweep_beta, "continuation along the beta schedule")
    add("verify", cmd_verify, "solve and certify the (u, z, rho) triple")
    ex = add("export", cmd_export, "write mesh and field tables")
    ex.add_argument("--field", default=None, help="field snapshot to export")

    args = parser.parse_args(argv)
    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
