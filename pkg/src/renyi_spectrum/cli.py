"""Command line harness.

Subcommands
-----------
entropy      all four representations of a spectrum plus its entropies
gradient     exact derivatives of the von Neumann entropy
reconstruct  recover a spectrum from integer Renyi entropies
verify       randomized certification sweep, machine-readable report

Exit codes: 0 success, 1 a computation judged the input infeasible or a
sweep failed, 2 invalid input or configuration.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .entropy import (
    RenyiVector,
    entropy_gradient,
    renyi_vector,
    von_neumann_direct,
)
from .exceptions import Infeasible, SpectrumError
from .invariants import (
    elem_sym_direct,
    make_spectrum,
    power_sums,
)
from .reconstruct import RECON_TOL, reconstruct_spectrum
from .verify import CHECK_NAMES, SweepConfig, run_sweep

__all__ = ["main"]


def _parse_floats(text: str, what: str) -> np.ndarray:
    try:
        return np.array([float(p) for p in text.split(",") if p.strip() != ""])
    except ValueError:
        raise SpectrumError(f"could not parse {what} {text!r} as comma separated floats") from None


def _parse_dims(text: str) -> tuple[int, ...]:
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(p) for p in text.split(",") if p.strip() != "")
    except ValueError:
        raise SpectrumError(f"could not parse dimensions {text!r}") from None


def _load_input(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpectrumError(f"could not read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise SpectrumError(f"{path} must hold a JSON object")
    return data


def _spectrum_from_args(args) -> np.ndarray:
    if args.input:
        data = _load_input(args.input)
        if "spectrum" not in data:
            raise SpectrumError(f"{args.input} has no 'spectrum' field")
        return np.asarray(data["spectrum"], dtype=float)
    if args.spectrum is None:
        raise SpectrumError("provide --spectrum or --input")
    return _parse_floats(args.spectrum, "spectrum")


def _emit(payload: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return
    # csv: one row per scalar, sections flattened as name,order,value
    out.write("quantity,order,value\n")
    for key in sorted(payload):
        value = payload[key]
        if isinstance(value, list):
            for i, item in enumerate(value):
                order = payload.get(key + "_orders", [None] * len(value))[i]
                out.write(f"{key},{i if order is None else order},{item!r}\n")
        elif isinstance(value, (int, float, bool)):
            out.write(f"{key},,{value!r}\n")
        else:
            out.write(f"{key},,{value}\n")


def _cmd_entropy(args) -> int:
    values = _spectrum_from_args(args)
    sp = make_spectrum(values)
    payload = {
        "dim": sp.dim,
        "spectrum": sp.values.tolist(),
        "power_sums": power_sums(sp).r.tolist(),
        "elementary": elem_sym_direct(sp).e.tolist(),
        "renyi_orders": list(range(2, sp.dim + 1)),
        "renyi": renyi_vector(sp).values.tolist(),
        "von_neumann": von_neumann_direct(sp),
    }
    _emit(payload, args.format, sys.stdout)
    return 0


def _cmd_gradient(args) -> int:
    values = _spectrum_from_args(args)
    sp = make_spectrum(values)
    grad = entropy_gradient(elem_sym_direct(sp), abs_tol=args.abs_tol)
    payload = {
        "dim": sp.dim,
        "spectrum": sp.values.tolist(),
        "orders": list(range(2, sp.dim + 1)),
        "dS_de": grad.dS_de.tolist(),
        "dS_dr": grad.dS_dr.tolist(),
        "dS_dSq": grad.dS_dSq.tolist(),
    }
    _emit(payload, args.format, sys.stdout)
    return 0


def _cmd_reconstruct(args) -> int:
    if args.input:
        data = _load_input(args.input)
        if "renyi" not in data:
            raise SpectrumError(f"{args.input} has no 'renyi' field")
        renyi = np.asarray(data["renyi"], dtype=float)
        dim = int(data.get("dim", renyi.size + 1))
    else:
        if args.renyi is None:
            raise SpectrumError("provide --renyi or --input")
        renyi = _parse_floats(args.renyi, "renyi entropies")
        dim = args.dim if args.dim is not None else renyi.size + 1
    if renyi.size != dim - 1:
        raise SpectrumError(
            f"expected {dim - 1} entropies S_2..S_{dim} for dimension {dim}, "
            f"got {renyi.size}"
        )
    vec = RenyiVector(dim=dim, values=renyi)
    try:
        result = reconstruct_spectrum(vec, recon_tol=args.recon_tol)
    except Infeasible as exc:
        _emit(
            {"feasible": False, "stage": exc.stage, "message": str(exc)},
            args.format,
            sys.stdout,
        )
        print(f"reconstruct: {exc}", file=sys.stderr)
        return 1
    payload = {
        "dim": dim,
        "renyi_requested": renyi.tolist(),
        "spectrum": result.spectrum.values.tolist(),
        "von_neumann": result.von_neumann,
        "residuals": result.residuals.tolist(),
        "max_residual": float(result.residuals.max()),
        "feasible": result.feasible,
    }
    _emit(payload, args.format, sys.stdout)
    if not result.feasible:
        print(
            f"reconstruct: residual {float(result.residuals.max()):.3e} above "
            f"recon_tol {args.recon_tol:.3e}",
            file=sys.stderr,
        )
        return 1
    return 0


def _cmd_verify(args) -> int:
    tolerances = {}
    for spec in args.tolerance or []:
        if "=" not in spec:
            raise SpectrumError(f"--tolerance expects NAME=VALUE, got {spec!r}")
        name, _, raw = spec.partition("=")
        try:
            tolerances[name.strip()] = float(raw)
        except ValueError:
            raise SpectrumError(f"could not parse tolerance value {raw!r}") from None
    config = SweepConfig(
        dims=_parse_dims(args.dims),
        samples=args.samples,
        seed=args.seed,
        checks=tuple(args.checks.split(",")) if args.checks else CHECK_NAMES,
        tolerances=tolerances,
        threads=args.threads,
    )
    report = run_sweep(config)
    text = report.to_json(include_timings=args.timings)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="renyi-spectrum",
        description="Finite probability spectra, their symmetric invariants, "
        "integer Renyi entropies and exact entropy derivatives.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_entropy = sub.add_parser(
        "entropy", help="all representations and entropies of a spectrum"
    )
    p_entropy.add_argument("--spectrum", help="comma separated probabilities")
    p_entropy.add_argument("--input", help="JSON file with a 'spectrum' field")
    p_entropy.add_argument("--format", choices=("json", "csv"), default="json")
    p_entropy.set_defaults(func=_cmd_entropy)

    p_grad = sub.add_parser(
        "gradient", help="derivatives of the von Neumann entropy"
    )
    p_grad.add_argument("--spectrum", help="comma separated probabilities")
    p_grad.add_argument("--input", help="JSON file with a 'spectrum' field")
    p_grad.add_argument("--abs-tol", type=float, default=1e-10)
    p_grad.add_argument("--format", choices=("json", "csv"), default="json")
    p_grad.set_defaults(func=_cmd_gradient)

    p_rec = sub.add_parser(
        "reconstruct", help="recover a spectrum from Renyi entropies"
    )
    p_rec.add_argument("--dim", type=int, help="dimension d (default: inferred)")
    p_rec.add_argument("--renyi", help="comma separated S_2..S_d")
    p_rec.add_argument("--input", help="JSON file with 'renyi' (and 'dim') fields")
    p_rec.add_argument("--recon-tol", type=float, default=RECON_TOL)
    p_rec.add_argument("--format", choices=("json", "csv"), default="json")
    p_rec.set_defaults(func=_cmd_reconstruct)

    p_verify = sub.add_parser("verify", help="randomized certification sweep")
    p_verify.add_argument("--dims", default="2..8", help="e.g. 2..8 or 2,4,6")
    p_verify.add_argument("--samples", type=int, default=10_000)
    p_verify.add_argument("--seed", type=int, default=1)
    p_verify.add_argument("--checks", help="comma separated subset of checks")
    p_verify.add_argument("--threads", type=int, default=None)
    p_verify.add_argument(
        "--tolerance",
        action="append",
        metavar="NAME=VALUE",
        help="override a default tolerance (repeatable)",
    )
    p_verify.add_argument(
        "--timings", action="store_true", help="include wall times in the report"
    )
    p_verify.add_argument("--out", help="write the report here instead of stdout")
    p_verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpectrumError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2
