"""Command-line front end.

Exit codes: 0 all checks pass, 1 a mathematical violation was found,
2 usage or parse error, 3 an enumeration cap was hit on a required check.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .bleiverify import BOOLEAN, COMPLEX, VARIANTS, blei_sides
from .boundcalc import (
    BoundConfig,
    aa_regimes,
    bound_boolean,
    bound_bps,
    bound_complex,
    chebyshev_L,
    hc_constant,
    optimal_k_complex,
)
from .indexcomb import (
    CapExceeded,
    IndexSpace,
    binomial,
    check_strange,
    extension_mean_brute_force,
    extension_mean_closed_form,
    iter_values,
    orbit_size,
)
from .norms import (
    EXHAUSTIVE_CAP,
    GRID_MAX_N,
    bh_exponent,
    bh_ratio,
    coeff_lp_norm,
    supnorm_cube_exact,
    supnorm_torus_estimate,
    supnorm_torus_grid,
)
from .polyform import CUBE, TORUS, PolynomialFormatError, load_polynomial

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


def fmt(x) -> str:
    """17 significant digits for floats; exact text for ints and fractions."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _jsonable(obj):
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else fmt(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        return _jsonable(obj.item())
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int | None = None
    versions: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "versions": self.versions,
            "outputs": self.outputs,
        }


def _config_hash(cfg: BoundConfig | None) -> str:
    blob = json.dumps(cfg.as_dict() if cfg else {}, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _emit(text: str, out: str | None, manifest: RunManifest) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        manifest.outputs.append(out)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------ verify-lemmas

_FAULTS = ("ext", "strange", "win")


def run_verify_lemmas(d_max: int, n_max: int, fault: str | None = None):
    """Rows (check, d, n, k, S, lhs, rhs, ok) plus the number of capped sub-checks."""
    rows, capped = [], 0
    for d in range(1, d_max + 1):
        for n in range(1, n_max + 1):
            total = sum(orbit_size(v) for v in iter_values(IndexSpace(d, n)))
            rows.append(("orbit_partition", d, n, "", "", total, n**d, total == n**d))
            for k in range(1, d + 1):
                closed = extension_mean_closed_form(d, k, n)
                if fault == "ext":
                    closed += Fraction(1, 997)
                for S in itertools.combinations(range(1, d + 1), d - k):
                    try:
                        brute = extension_mean_brute_force(d, n, S)
                    except CapExceeded:
                        capped += 1
                        rows.append(("extension_mean", d, n, k, _slots(S), "capped", closed, ""))
                        continue
                    rows.append(("extension_mean", d, n, k, _slots(S), brute, closed, brute == closed))
                if k <= d <= n:
                    w = check_strange(k, d, n)
                    ok = w.holds and fault != "strange"
                    rows.append(("strange", d, n, k, "", w.lhs, w.rhs, ok))
                    ratio = Fraction(binomial(n, d), binomial(n - k, d - k) * binomial(n, k))
                    target = Fraction(1, binomial(d, k))
                    if fault == "win":
                        target += Fraction(1, 997)
                    rows.append(("win_ratio", d, n, k, "", ratio, target, ratio == target))
    return rows, capped


def _slots(S) -> str:
    return " ".join(str(s) for s in S) if S else "-"


def cmd_verify_lemmas(args, manifest) -> int:
    rows, capped = run_verify_lemmas(args.d_max, args.n_max, args.inject_fault)
    header = ("check", "d", "n", "k", "S", "lhs", "rhs", "ok")
    _emit(dump_csv(header, rows), args.out, manifest)
    failed = [r for r in rows if r[-1] is False]
    for r in failed[:10]:
        print(f"violation: {r[0]} d={r[1]} n={r[2]} k={r[3]} S={r[4]}", file=sys.stderr)
    if failed:
        return EXIT_VIOLATION
    if capped:
        print(f"{capped} sub-checks skipped: enumeration cap", file=sys.stderr)
        return EXIT_CAP
    return EXIT_OK


# -------------------------------------------------------------------- blei


def cmd_blei(args, manifest) -> int:
    P = load_polynomial(args.file)
    variant = args.variant or (COMPLEX if P.domain == TORUS else BOOLEAN)
    sides = blei_sides(P.coefficients, args.k, variant)
    _emit(dump_json(sides.to_dict()), args.out, manifest)
    if not sides.holds:
        print(f"lhs {sides.lhs!r} exceeds rhs {sides.rhs!r}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


# ----------------------------------------------------------------- supnorm


def _estimate(P, args):
    method = args.method
    if method == "auto":
        if P.domain == CUBE and P.n <= EXHAUSTIVE_CAP:
            method = "exhaustive"
        else:
            method = "ascent"
    if method == "exhaustive":
        return supnorm_cube_exact(P)
    if method == "grid":
        if P.n > GRID_MAX_N:
            raise CapExceeded(args.grid**P.n, args.grid**GRID_MAX_N, "phase grid")
        return supnorm_torus_grid(P, args.grid)
    return supnorm_torus_estimate(P, args.restarts, args.iters, args.tol, args.seed)


def cmd_supnorm(args, manifest) -> int:
    P = load_polynomial(args.file)
    est = _estimate(P, args)
    _emit(dump_json(est.to_dict()), args.out, manifest)
    return EXIT_OK


def cmd_bh_ratio(args, manifest) -> int:
    P = load_polynomial(args.file)
    est = _estimate(P, args)
    p = bh_exponent(P.d)
    report = {
        "n": P.n,
        "d": P.d,
        "domain": P.domain,
        "exponent": p,
        "coeff_norm": coeff_lp_norm(P, p),
        "supnorm": est.to_dict(),
        "ratio": bh_ratio(P, est),
        "ratio_is_upper_bound": not est.certified_exact,
    }
    _emit(dump_json(report), args.out, manifest)
    return EXIT_OK


# ------------------------------------------------------------------ bounds


def _parse_grid(text: str) -> list[int]:
    try:
        vals = [int(float(v)) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("grid is empty")
    return vals


_CFG_FLAGS = ("c0", "a", "tau", "C_tau", "C0", "C1", "C", "c_abs", "K", "epsilon", "promise_C")


def _config(args) -> BoundConfig:
    overrides = {name: getattr(args, name) for name in _CFG_FLAGS if getattr(args, name, None) is not None}
    if args.config:
        return BoundConfig.from_json(args.config, **overrides)
    return BoundConfig.from_mapping(overrides)


BOUNDS_HEADER = (
    "d",
    "bound_complex",
    "log_bound_complex",
    "bound_bps",
    "log_bound_bps",
    "log_boolean_strengthened",
    "log_boolean_unstrengthened",
    "k_formula",
    "k_exhaustive",
    "k_boolean",
    "hc_at_k_exhaustive",
    "L_at_k_boolean",
)


def bounds_rows(grid, cfg):
    rows = []
    for d in grid:
        if d < 2:
            raise ValueError("bounds grid needs d >= 2")
        bc, bb, bo = bound_complex(d, cfg), bound_bps(d, cfg), bound_boolean(d, cfg)
        kf, ke = optimal_k_complex(d, cfg)
        kb = bo.components["k_opt"]
        rows.append(
            (
                d,
                bc.value,
                bc.log_value,
                bb.value,
                bb.log_value,
                bo.log_value,
                bo.components["log_unstrengthened"],
                kf,
                ke,
                kb,
                hc_constant(d, ke),
                chebyshev_L(d, kb),
            )
        )
    return rows


def cmd_bounds(args, manifest) -> int:
    cfg = _config(args)
    manifest.versions["config_hash"] = _config_hash(cfg)
    _emit(dump_csv(BOUNDS_HEADER, bounds_rows(args.d_grid, cfg)), args.out, manifest)
    return EXIT_OK


# ---------------------------------------------------------------------- aa

AA_HEADER = (
    "n",
    "d_star",
    "log_trivial_bound",
    "log_sidon_bound",
    "log_required_bound",
    "gap_low",
    "gap_high",
    "gap_nonempty",
)


def cmd_aa(args, manifest) -> int:
    cfg = _config(args)
    manifest.versions["config_hash"] = _config_hash(cfg)
    rows = []
    for n in args.n_grid:
        r = aa_regimes(n, cfg)
        rows.append(
            (r.n, r.d_star, r.log_trivial_bound, r.log_sidon_bound, r.log_required_bound,
             r.gap_low, float(r.gap_high), r.gap_nonempty)
        )
    _emit(dump_csv(AA_HEADER, rows), args.out, manifest)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _add_supnorm_flags(p):
    p.add_argument("--method", choices=("auto", "exhaustive", "grid", "ascent"), default="auto")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--grid", type=int, default=64, help="phase grid points per angle")
    p.add_argument("--seed", type=int, default=0)


def _add_config_flags(p):
    p.add_argument("--config", help="JSON file with BoundConfig fields")
    for name in _CFG_FLAGS:
        p.add_argument(f"--{name}", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sidonlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--manifest", help="write a run manifest JSON here")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-lemmas", help="exact combinatorial identities")
    p.add_argument("--d-max", type=int, default=6)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--out")
    p.add_argument("--inject-fault", choices=_FAULTS, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify_lemmas)

    p = sub.add_parser("blei", help="both sides of Blei's inequality")
    p.add_argument("file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument(
        "--variant", choices=VARIANTS, default=None, help="default: complex on the torus, boolean on the cube"
    )
    p.add_argument("--out")
    p.set_defaults(func=cmd_blei)

    p = sub.add_parser("supnorm", help="sup-norm estimate with witness")
    p.add_argument("file")
    _add_supnorm_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_supnorm)

    p = sub.add_parser("bh-ratio", help="coefficient norm over sup-norm estimate")
    p.add_argument("file")
    _add_supnorm_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bh_ratio)

    p = sub.add_parser("bounds", help="bound curves over a degree grid")
    p.add_argument("--d-grid", type=_parse_grid, default=_parse_grid("10,100,1000"))
    _add_config_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("aa", help="regime table for the influence conjecture")
    p.add_argument("--n-grid", type=_parse_grid, default=_parse_grid("1e3,1e4,1e5,1e6,1e7"))
    _add_config_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_aa)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "manifest", "command")}
    manifest = RunManifest(
        args.command,
        _jsonable(params),
        seed=getattr(args, "seed", None),
        versions={"sidonlab": __version__},
    )
    try:
        code = args.func(args, manifest)
    except PolynomialFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(dump_json(manifest.to_dict()))
    return code


if __name__ == "__main__":
    sys.exit(main())
