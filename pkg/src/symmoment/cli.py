"""Command-line front end."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import acceptance, critical_arc, deformation, polytope
from .errors import InvalidInput, SymMomentError
from .interpolation import is_face
from .trigpoly import RakedTrigPoly, circle_roots

OUTPUT_DIR_ENV = "SYMMOMENT_OUTPUT_DIR"
SUBCOMMANDS = ("phi", "face", "polytope", "conjecture", "beta", "deform", "roots", "repro")
FORMATS = ("json", "csv", "text")
CONJECTURE_MATCH_TOL = 1e-8

EXIT_OK, EXIT_COMPUTATION, EXIT_INVALID = 0, 1, 2


@dataclass
class RunConfig:
    subcommand: str
    k: int = 2
    tol: float = critical_arc.DEFAULT_TOL
    output_format: str = "text"
    output_path: Optional[Path] = None
    seed: Optional[int] = None
    options: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise InvalidInput(f"unknown subcommand {self.subcommand!r}")
        if self.output_format not in FORMATS:
            raise InvalidInput(f"unknown output format {self.output_format!r}")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise InvalidInput("tol must be a positive number")
        if self.k < 1:
            raise InvalidInput("k must be at least 1")


@dataclass
class Output:
    """One result in all three renderings."""

    payload: object
    rows: list
    columns: list
    text: str


# formatting


def _csv_cell(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".12g")
    if x is None:
        return ""
    return str(x)


def render(out: Output, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(out.payload, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(out.columns)
        for row in out.rows:
            writer.writerow([_csv_cell(row.get(c)) for c in out.columns])
        return buf.getvalue()
    return out.text.rstrip("\n") + "\n"


def _g(x: float) -> str:
    return format(x, ".12g")


# angle parsing


def parse_angles(text: str, degrees: bool = False) -> list[float]:
    try:
        values = [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise InvalidInput(f"cannot parse angle list {text!r}") from exc
    return [math.radians(v) for v in values] if degrees else values


def read_angle_file(path: str, degrees: bool = False) -> list[float]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read angle file {path}: {exc}") from exc
    if not isinstance(data, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in data):
        raise InvalidInput("angle file must contain a JSON array of numbers")
    return [math.radians(v) for v in data] if degrees else [float(v) for v in data]


def parse_criteria(text: str) -> list[int]:
    known = {c[0] for c in acceptance.CRITERIA}
    try:
        numbers = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidInput(f"cannot parse criteria list {text!r}") from exc
    unknown = [n for n in numbers if n not in known]
    if unknown or not numbers:
        raise InvalidInput(f"unknown criteria {unknown}")
    return numbers


def parse_poly(text: str) -> RakedTrigPoly:
    source = text
    if not text.lstrip().startswith("{"):
        try:
            source = Path(text).read_text()
        except OSError as exc:
            raise InvalidInput(f"--poly is neither JSON nor a readable file: {exc}") from exc
    try:
        return RakedTrigPoly.from_dict(json.loads(source))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed polynomial JSON: {exc}") from exc


# subcommands


def cmd_phi(cfg: RunConfig) -> Output:
    jobs = cfg.options.get("jobs", 1)
    results = critical_arc.critical_lengths(cfg.k, cfg.tol, jobs)
    best = min(results, key=lambda r: r.length)
    shown = results if cfg.options.get("per_split") else [best]
    rows = [
        {
            "k": r.k,
            "m_a": r.split.m_a,
            "m_b": r.split.m_b,
            "L_star": r.length,
            "extra_root": r.extra_root.angle,
            "bisection_width": r.bisection_width,
        }
        for r in shown
    ]
    payload = {"k": cfg.k, "phi": best.length, "split": list(best.split.as_tuple()), "results": rows}
    if cfg.options.get("per_split"):
        lines = [f"phi_{cfg.k} = {_g(best.length)}  split {best.split.as_tuple()}"]
        lines += [f"  split ({r['m_a']}, {r['m_b']}): L* = {_g(r['L_star'])}" for r in rows]
        text = "\n".join(lines)
    else:
        text = _g(best.length)
    return Output(payload, rows, ["k", "m_a", "m_b", "L_star", "extra_root", "bisection_width"], text)


def cmd_face(cfg: RunConfig) -> Output:
    pts = cfg.options.get("points")
    if not pts:
        raise InvalidInput("face needs --points or --angles")
    verdict = is_face(cfg.k, pts)
    payload = {"k": cfg.k, "points": pts, **verdict.to_dict()}
    row = {"status": verdict.status.value, "margin": payload["margin"], "witness": payload["witness"]}
    text = verdict.status.value
    if payload["margin"] is not None:
        text += f"  margin {_g(payload['margin'])}"
    if payload["witness"] is not None:
        text += f"  witness {_g(payload['witness'])}"
    return Output(payload, [row], ["status", "margin", "witness"], text)


def cmd_polytope(cfg: RunConfig) -> Output:
    o = cfg.options
    dim = o.get("dim")
    dim = cfg.k - 1 if dim is None else dim
    if o.get("angles"):
        config = polytope.VertexConfig.of(cfg.k, o["angles"])
        bound = None
    else:
        m = o.get("m") or 5
        config = polytope.clustered_config(cfg.k, m, o.get("spread"))
        bound = polytope.clustered_bound(cfg.k, m) if dim == cfg.k - 1 else None
    count = polytope.count_faces(config, dim, jobs=o.get("jobs", 1))
    row = {**count.to_dict(), "bound_from_paper": bound}
    payload = {"k": cfg.k, "n": len(config.angles), "symmetric": config.symmetric, **row}
    text = (
        f"dim {dim}: {count.verified_count} verified, {count.unknown_count} unknown, "
        f"{count.not_face_count} not faces, {count.total_subsets} subsets"
    )
    if bound is not None:
        text += f"; lower bound {bound}"
    return Output(payload, [row], ["dim", "verified", "unknown", "not_face", "total", "bound_from_paper"], text)


def cmd_conjecture(cfg: RunConfig) -> Output:
    alpha = deformation.alpha_conjecture(cfg.k)
    phi_k, _ = critical_arc.phi(cfg.k, cfg.tol, cfg.options.get("jobs", 1))
    residual = abs(2 * alpha - phi_k)
    row = {
        "alpha_k": alpha,
        "two_alpha_k": 2 * alpha,
        "phi_k": phi_k,
        "match": residual < CONJECTURE_MATCH_TOL,
        "residual": residual,
    }
    text = f"2*alpha_{cfg.k} = {_g(2 * alpha)}  phi_{cfg.k} = {_g(phi_k)}  residual {residual:.3g}  match {row['match']}"
    return Output(row, [row], list(row), text)


def cmd_beta(cfg: RunConfig) -> Output:
    kmax = cfg.options.get("kmax") or cfg.k
    if kmax < 2:
        raise InvalidInput("--kmax must be at least 2")
    rows = []
    for k in range(2, kmax + 1):
        b = deformation.beta(k)
        rows.append({"k": k, "beta_k": b, "sin2_beta_k": math.sin(b) ** 2, "bound": (2 * k - 2) / (2 * k - 1)})
    text = "\n".join(f"{r['k']:3d}  {_g(r['beta_k'])}  {_g(r['sin2_beta_k'])} > {_g(r['bound'])}" for r in rows)
    return Output(rows, rows, ["k", "beta_k", "sin2_beta_k", "bound"], text)


def cmd_deform(cfg: RunConfig) -> Output:
    f = cfg.options.get("poly")
    lam = cfg.options.get("lam")
    if f is None or lam is None:
        raise InvalidInput("deform needs --poly and --lam")
    g = deformation.lambda_deform(f, lam)
    payload = g.to_dict()
    rows = [{"harmonic": 0, "cos": g.c, "sin": 0.0}]
    rows += [{"harmonic": 2 * j + 1, "cos": float(g.a[j]), "sin": float(g.b[j])} for j in range(g.k)]
    return Output(payload, rows, ["harmonic", "cos", "sin"], json.dumps(payload))


def cmd_roots(cfg: RunConfig) -> Output:
    f = cfg.options.get("poly")
    if f is None:
        raise InvalidInput("roots needs --poly")
    roots = circle_roots(f, tol=cfg.options.get("root_tol", 1e-7))
    rows = [r.to_dict() for r in roots]
    text = "\n".join(f"{_g(r['angle'])}  x{r['mult']}" for r in rows) or "no roots"
    return Output(rows, rows, ["angle", "mult"], text)


def cmd_repro(cfg: RunConfig) -> Output:
    tol = cfg.options.get("repro_tol")
    seed = acceptance.DEFAULT_SEED if cfg.seed is None else cfg.seed
    results = acceptance.repro_all(tol=tol, golden=cfg.options.get("golden"), seed=seed, only=cfg.options.get("criteria"))
    rows = [r.to_dict() for r in results]
    out = Output(rows, rows, ["criterion", "name", "passed", "measured", "expected", "deviation"], acceptance.format_table(results))
    out.failed = [r.number for r in results if not r.passed]
    return out


HANDLERS = {
    "phi": cmd_phi,
    "face": cmd_face,
    "polytope": cmd_polytope,
    "conjecture": cmd_conjecture,
    "beta": cmd_beta,
    "deform": cmd_deform,
    "roots": cmd_roots,
    "repro": cmd_repro,
}


def _destination(cfg: RunConfig) -> Optional[Path]:
    if cfg.output_path is not None:
        return Path(cfg.output_path)
    default_dir = os.environ.get(OUTPUT_DIR_ENV)
    if default_dir:
        ext = {"json": "json", "csv": "csv", "text": "txt"}[cfg.output_format]
        return Path(default_dir) / f"{cfg.subcommand}.{ext}"
    return None


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute one subcommand; returns 0 on success, 1 on computation error, 2 on invalid input."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        cfg.validate()
        out = HANDLERS[cfg.subcommand](cfg)
    except (InvalidInput, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    except SymMomentError as exc:
        print(f"computation failed: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_COMPUTATION
    text = render(out, cfg.output_format)
    dest = _destination(cfg)
    if dest is None:
        stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text)
    failed = getattr(out, "failed", None)
    if failed:
        print(f"failing criteria: {', '.join(map(str, failed))}", file=stderr)
        return EXIT_COMPUTATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=2, help="half the curve dimension")
    common.add_argument("--tol", type=float, default=critical_arc.DEFAULT_TOL, help="bisection tolerance")
    common.add_argument("--out", choices=FORMATS, default="text", help="output format")
    common.add_argument("--output", type=Path, help=f"output file (default: stdout, or ${OUTPUT_DIR_ENV}/<command>.<ext>)")
    common.add_argument("--seed", type=int, help="seed for randomized suites")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--degrees", action="store_true", help="read angles in degrees")

    parser = argparse.ArgumentParser(prog="symmoment", description="Faces of the convex hull of the symmetric moment curve.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("phi", parents=[common], help="neighborliness threshold phi_k")
    p.add_argument("--per-split", action="store_true", help="report every endpoint split")

    p = sub.add_parser("face", parents=[common], help="face test for points on the curve")
    p.add_argument("--points", help="comma-separated angles")
    p.add_argument("--angles", help="JSON file with an array of angles")

    p = sub.add_parser("polytope", parents=[common], help="face counts of a vertex configuration")
    p.add_argument("--m", type=int, help="points per cluster")
    p.add_argument("--spread", type=float, help="cluster width")
    p.add_argument("--dim", type=int, help="face dimension (default k-1)")
    p.add_argument("--angles", help="JSON file with an array of angles instead of clusters")

    sub.add_parser("conjecture", parents=[common], help="compare 2*alpha_k with phi_k for even k")

    p = sub.add_parser("beta", parents=[common], help="table of beta_k")
    p.add_argument("--kmax", type=int, help="largest k (default --k)")

    p = sub.add_parser("deform", parents=[common], help="pair-sum deformation of an even polynomial")
    p.add_argument("--poly", required=True, help='JSON {"k", "c", "a", "b"} or a path to such a file')
    p.add_argument("--lam", type=float, required=True, help="deformation factor")

    p = sub.add_parser("roots", parents=[common], help="roots on the circle with multiplicities")
    p.add_argument("--poly", required=True, help='JSON {"k", "c", "a", "b"} or a path to such a file')
    p.add_argument("--root-tol", type=float, default=1e-7, help="cluster acceptance tolerance")

    p = sub.add_parser("repro", parents=[common], help="run every acceptance criterion")
    p.add_argument("--golden", type=Path, help="golden values JSON")
    p.add_argument("--repro-tol", type=float, help="loosen every stated tolerance to at least this")
    p.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    opts: dict = {"jobs": args.jobs}
    deg = args.degrees
    if getattr(args, "per_split", False):
        opts["per_split"] = True
    if getattr(args, "points", None):
        opts["points"] = parse_angles(args.points, deg)
    if getattr(args, "angles", None):
        angles = read_angle_file(args.angles, deg)
        if args.subcommand == "face":
            opts["points"] = angles
        else:
            opts["angles"] = angles
    for name in ("m", "spread", "dim", "kmax", "lam", "root_tol", "golden", "repro_tol"):
        value = getattr(args, name, None)
        if value is not None:
            opts[name] = value
    if getattr(args, "poly", None):
        opts["poly"] = parse_poly(args.poly)
    if getattr(args, "criteria", None):
        opts["criteria"] = parse_criteria(args.criteria)
    return RunConfig(args.subcommand, args.k, args.tol, args.out, args.output, args.seed, opts)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except InvalidInput as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
