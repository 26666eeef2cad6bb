"""Command-line front-end.

Three subcommands:

  verify  -- run a named property suite with a deterministic seed
  flow    -- produce a renormalization-flow table for a configured theory
  wtilde  -- tabulate generating-function values at requested points

Configuration is a single JSON document with a versioned schema; outputs
are JSON for full flow records and CSV for value tables.  Identical config
and seed produce byte-identical outputs.

Exit codes: 0 success, 1 check/computation failure, 2 config error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, OscRenormError
from .functions import FieldFunction
from .renorm import (
    DilationFamily,
    PropagatorFamily,
    heat_kernel_base,
    project_polynomial,
    renorm_step,
    w_full,
    wtilde,
)
from .tensors import Sym2Tensor, is_positive_definite
from .verify import SUITES, run_suite

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration for flow/wtilde commands."""

    dimension: int
    family: PropagatorFamily
    interaction: FieldFunction
    scale_ladder: tuple
    sample_points: tuple
    quadrature_order: int | None = None
    projection_degree: int = 4
    semigroup_check_c: float | None = None
    raw: dict = field(default=None, repr=False)


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _grid_points(spec: dict, dim: int):
    _require(
        {"lo", "hi", "count"} <= set(spec), "grid needs 'lo', 'hi' and 'count'"
    )
    _require(dim == 1, "grid shorthand is only available in dimension 1")
    return [[x] for x in np.linspace(spec["lo"], spec["hi"], int(spec["count"]))]


def load_config(path: str, order_override: int | None = None) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc

    _require(isinstance(raw, dict), "config must be a JSON object")
    _require(
        raw.get("schema_version") == SCHEMA_VERSION,
        f"schema_version must be {SCHEMA_VERSION}",
    )
    dim = raw.get("dimension")
    _require(isinstance(dim, int) and 1 <= dim <= 4, "dimension must be in 1..4")

    prop_spec = raw.get("propagator")
    _require(isinstance(prop_spec, dict), "propagator spec is required")
    fiducial = float(raw.get("fiducial_scale", 1.0))
    _require(fiducial > 0.0, "fiducial_scale must be positive")
    try:
        if "base" in prop_spec:
            base = Sym2Tensor.from_json(prop_spec["base"])
        elif "heat_kernel" in prop_spec:
            hk = prop_spec["heat_kernel"]
            base = heat_kernel_base(
                hk["spatial_dim"], hk["sites"], fiducial, hk.get("mass", 0.0)
            )
        else:
            raise ConfigError("propagator needs either 'base' or 'heat_kernel'")
    except OscRenormError as exc:
        raise ConfigError(f"invalid propagator: {exc}") from exc
    _require(base.dim == dim, "propagator dimension does not match 'dimension'")
    _require(
        is_positive_definite(base), "propagator base must be positive definite"
    )

    if "dilation_generator" in raw:
        dilation = DilationFamily(np.asarray(raw["dilation_generator"], dtype=float))
        _require(dilation.dim == dim, "dilation generator has wrong dimension")
    else:
        dilation = DilationFamily.default(dim)
    family = PropagatorFamily(base, dilation, fiducial)

    inter_spec = raw.get("interaction")
    _require(
        isinstance(inter_spec, dict) and "terms" in inter_spec,
        "interaction must carry a 'terms' table",
    )
    try:
        interaction = FieldFunction.polynomial_from_json(inter_spec, dim)
    except OscRenormError as exc:
        raise ConfigError(f"invalid interaction: {exc}") from exc
    _require(
        interaction.integrable,
        "interaction is not integrable: it needs even maximal degree with a "
        "negative-definite leading form",
    )

    ladder = raw.get("scale_ladder", [])
    _require(
        isinstance(ladder, list) and len(ladder) >= 1,
        "scale_ladder must be a non-empty list",
    )
    ladder = tuple(float(c) for c in ladder)
    _require(all(c >= 1.0 for c in ladder), "scale_ladder values must be >= 1")
    _require(list(ladder) == sorted(ladder), "scale_ladder must be sorted")

    pts_spec = raw.get("sample_points")
    _require(pts_spec is not None, "sample_points is required")
    if isinstance(pts_spec, dict) and "grid" in pts_spec:
        points = _grid_points(pts_spec["grid"], dim)
    else:
        _require(isinstance(pts_spec, list), "sample_points must be a list or grid")
        points = pts_spec
    points = tuple(tuple(float(v) for v in p) for p in points)
    _require(
        all(len(p) == dim for p in points),
        "every sample point must match the configured dimension",
    )

    order = raw.get("quadrature_order")
    if order_override is not None:
        order = order_override
    if order is not None:
        order = int(order)
        _require(order >= 2, "quadrature_order must be >= 2")

    degree = int(raw.get("projection_degree", 4))
    _require(1 <= degree <= 8, "projection_degree must be in 1..8")

    check_c = raw.get("semigroup_check_c")
    if check_c is not None:
        check_c = float(check_c)
        _require(check_c > 1.0, "semigroup_check_c must exceed 1")

    return RunConfig(
        dimension=dim,
        family=family,
        interaction=interaction,
        scale_ladder=ladder,
        sample_points=points,
        quadrature_order=order,
        projection_degree=degree,
        semigroup_check_c=check_c,
        raw=raw,
    )


def _fmt(value: float) -> float:
    """Round-trip through repr so output bytes do not depend on platform
    float printing quirks."""
    return float(repr(float(value)))


def cmd_verify(suite: str, seed: int, stream=None) -> int:
    stream = stream or sys.stdout
    results = run_suite(suite, seed)
    failed = [r for r in results if not r.passed]
    for result in results:
        print(result.line(), file=stream)
    print(
        f"{len(results) - len(failed)}/{len(results)} checks passed "
        f"(suite={suite}, seed={seed})",
        file=stream,
    )
    return 1 if failed else 0


def _flow_record(config: RunConfig, c: float) -> dict:
    flowed = (
        config.interaction
        if c == 1.0
        else renorm_step(config.family, c, config.interaction,
                         order=config.quadrature_order)
    )
    samples = [
        {"x": list(p), "value": _fmt(flowed(p))} for p in config.sample_points
    ]
    projected, residual = project_polynomial(
        flowed, config.sample_points, config.projection_degree
    )
    projection = {
        "terms": [
            {"exponents": list(e), "coeff": _fmt(coeff)}
            for e, coeff in projected.terms
        ]
    }
    return {
        "c": _fmt(c),
        "interaction_projection": projection,
        "residual": _fmt(residual),
        "samples": samples,
    }


def cmd_flow(config: RunConfig, seed: int, out_path: str) -> int:
    records = [_flow_record(config, c) for c in config.scale_ladder]
    payload = {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "dimension": config.dimension,
        "records": records,
    }
    if config.semigroup_check_c is not None:
        c = config.semigroup_check_c
        half = math.sqrt(c)
        direct = renorm_step(config.family, c, config.interaction,
                             order=config.quadrature_order)
        twice = renorm_step(
            config.family,
            half,
            renorm_step(config.family, half, config.interaction,
                        order=config.quadrature_order),
            order=config.quadrature_order,
        )
        max_rel = 0.0
        for p in config.sample_points:
            a, b = direct(p), twice(p)
            max_rel = max(max_rel, abs(a - b) / max(abs(a), 1e-12))
        payload["semigroup_check"] = {"c": _fmt(c), "max_rel_error": _fmt(max_rel)}
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    with open(out_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    return 0


def cmd_wtilde(config: RunConfig, out_path: str) -> int:
    P = config.family.base
    wt = wtilde(P, config.interaction, order=config.quadrature_order)
    lines = []
    header = [f"x{i}" for i in range(config.dimension)] + ["wtilde", "w"]
    lines.append(",".join(header))
    for p in config.sample_points:
        row = [f"{v:.12g}" for v in p]
        row.append(f"{wt(p):.12g}")
        row.append(
            f"{w_full(P, config.interaction, p, order=config.quadrature_order):.12g}"
        )
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscrenorm",
        description="Oscillator-group renormalization numerics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a property suite")
    p_verify.add_argument("--suite", default="all", help=f"one of {SUITES}")
    p_verify.add_argument("--seed", type=int, default=0)

    p_flow = sub.add_parser("flow", help="emit a renormalization-flow table")
    p_flow.add_argument("--config", required=True)
    p_flow.add_argument("--seed", type=int, default=0)
    p_flow.add_argument("--out", required=True)
    p_flow.add_argument("--quadrature-order", type=int, default=None)

    p_wt = sub.add_parser("wtilde", help="tabulate generating-function values")
    p_wt.add_argument("--config", required=True)
    p_wt.add_argument("--out", default="-")
    p_wt.add_argument("--quadrature-order", type=int, default=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            if args.suite not in SUITES:
                print(f"error: unknown suite {args.suite!r}", file=sys.stderr)
                return 2
            return cmd_verify(args.suite, args.seed)
        config = load_config(args.config, args.quadrature_order)
        if args.command == "flow":
            return cmd_flow(config, args.seed, args.out)
        return cmd_wtilde(config, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OscRenormError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
