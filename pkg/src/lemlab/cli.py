"""Command-line front end: run one harness, write a JSON report, replay it.

Each subcommand maps onto one harness.  The report holds the config echo,
the harness payload, the wall-clock time, the artifact list and the schema
version.  The payload depends only on the config (input document, parameters
and seed), so ``lemlab replay`` can re-run a report and demand byte equality.

Exit codes: 0 when the payload status is ``pass`` or ``inconclusive``, 2 when
it is ``fail`` (a bound was violated), 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import artifacts
from .ball.harness import lemma51_harness, prop52_harness, theorem53_harness
from .cover import BallCover, ExclusionReport
from .errors import DomainError
from .io import Problem, load_document, parse_problem
from .points import as_point, encode_point, norm, uniform_ball
from .potentials import default_quadrature, from_function
from .principles.capacity import capacity_1d, corollary44_check
from .principles.cartan import cartan_cover, min_modulus_1d, verify_lemniscate_cover
from .principles.lelong_class import corollary43_bound, corollary43_harness, theorem42_harness
from .principles.three_circle import (ThreeCircleParams, ball_sup, corollary64_harness,
                                      essential_lower_bound,
                                      lelong_bound_check, nu_constant, rho_constant,
                                      three_circle_max_check, three_circle_min_harness)

SCHEMA_VERSION = "1.0"
PLOT_GRID = 128

log = logging.getLogger("lemlab")


class CliError(Exception):
    """Operational failure: bad arguments, unreadable input, schema mismatch."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# -- JSON hygiene -------------------------------------------------------------

def clean(obj):
    """Plain JSON types; non-finite floats become the strings ``inf``/``-inf``/``nan``."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "value"):
        return clean(obj.value)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(clean(obj), sort_keys=True, separators=(",", ":"))


# -- run context --------------------------------------------------------------

class Context:
    def __init__(self, cfg: dict, problem: Problem):
        self.cfg = cfg
        self.p = cfg["params"]
        self.problem = problem
        self.seed = int(cfg["seed"])
        self.rng = np.random.default_rng(self.seed)

    def param(self, name, default=None, required=False):
        v = self.p.get(name)
        if v is None:
            if required:
                raise DomainError(f"parameter --{name.replace('_', '-')} is required for "
                                  f"'{self.cfg['command']}'")
            return default
        return v

    def grid(self, default: int) -> int:
        return int(self.cfg.get("grid") or default)

    def samples(self, default: int = 2000) -> int:
        return int(self.cfg.get("samples") or default)

    def quad(self, dim: int):
        nodes = self.cfg.get("quad_nodes")
        return default_quadrature(dim, nodes, self.seed)

    def potential(self):
        V = self.problem.potential
        if V is None:
            raise DomainError(f"'{self.cfg['command']}' needs a potential, measure or polynomial input")
        return V

    def roots(self):
        poly = self.problem.polynomial
        if poly is None:
            raise DomainError(f"'{self.cfg['command']}' needs a factored polynomial input")
        return poly

    def ball_samples(self, dim: int, radius: float, m: Optional[int] = None):
        return uniform_ball(self.rng, m or self.samples(), dim, radius)


class Result:
    """Harness outcome before it becomes a payload."""

    def __init__(self, status: str, constants: dict, counts: dict, content_sum=None, paper_bound=None,
                 details: Optional[dict] = None, plot: Optional[dict] = None):
        self.status = status
        self.constants = constants
        self.counts = counts
        self.content_sum = content_sum
        self.paper_bound = paper_bound
        self.details = details or {}
        self.plot = plot


def _exclusion_result(rep: ExclusionReport, constants: dict, plot: Optional[dict] = None) -> Result:
    d = rep.to_dict()
    d.pop("good_points")
    counts = {"samples": len(rep.good_points) + len(rep.bad_points), "good": len(rep.good_points),
              "bad": len(rep.bad_points), "selected": len(rep.selected_disjoint),
              "expanded": len(rep.expanded_cover)}
    for k, v in rep.extras.items():
        if k.endswith("violations"):
            counts[k] = v
    return Result("pass" if rep.passed else "fail", constants, counts, rep.content_sum, rep.paper_bound,
                  d, plot)


def _plane_plot(values: Callable, cover: BallCover, extent: float, unit_circle: bool = False,
                points=None) -> dict:
    return {"values": values, "cover": cover, "extent": extent, "unit_circle": unit_circle,
            "points": points}


# -- harness runners ----------------------------------------------------------

def run_cartan(ctx: Context) -> Result:
    poly = ctx.roots()
    eps = float(ctx.param("epsilon", required=True))
    alpha = float(ctx.param("alpha", 1.0))
    roots = poly.all_roots
    cover = cartan_cover(roots, eps, alpha)
    grid = ctx.grid(512)
    ok_grid = verify_lemniscate_cover(roots, eps, cover, grid)
    radii = cover.radii
    bound_a = math.e * (2 * eps) ** alpha
    sum_a = float(np.sum(radii ** alpha))
    sum_1 = float(radii.sum())
    cov = bool(np.all(cover.contains(roots[:, None])))
    ok = ok_grid and sum_a <= bound_a * (1 + 1e-12) and cov
    extent = max(4.0, float(np.max(np.abs(roots))) + 2 * math.e * eps + 1)
    d = roots.size
    return Result("pass" if ok else "fail",
                  {"epsilon": eps, "alpha": alpha, "bound_alpha": bound_a, "bound_one": 2 * math.e * eps},
                  {"roots": d, "discs": len(cover), "grid": grid},
                  sum_a, bound_a,
                  {"discs": cover.to_list(), "radius_sum": sum_1, "lemniscate_verified": ok_grid,
                   "roots_covered": cov},
                  _plane_plot(lambda z: poly.log_abs(z[:, 0]) / d, cover, extent))


def run_min_modulus(ctx: Context) -> Result:
    poly = ctx.roots()
    R = float(ctx.param("R", 1.0))
    eta = float(ctx.param("eta", required=True))
    rep = min_modulus_1d(poly, R, eta, ctx.grid(401))
    d = rep.to_dict()
    return Result("pass" if rep.passed else "fail", {"H": rep.H, "log_M": rep.log_M, "R": R, "eta": eta},
                  {"grid_points_checked": rep.grid_points_checked, "violations": rep.violations,
                   "discs": len(rep.cover), "zeros_used": rep.zeros_used},
                  rep.radius_sum, rep.radius_bound, d,
                  _plane_plot(lambda z: poly.log_abs(z[:, 0]), rep.cover, R))


def run_thm42(ctx: Context) -> Result:
    V = ctx.potential()
    eta = float(ctx.param("eta", required=True))
    alpha = float(ctx.param("alpha", 1.0))
    R = float(ctx.param("R", 1.0))
    slack = float(ctx.param("slack", 0.0))
    pts = ctx.ball_samples(V.dim, R)
    rep = theorem42_harness(V, eta, alpha, R, pts, ctx.quad(V.dim), slack)
    plot = _plane_plot(V, rep.expanded_cover, R) if V.dim == 1 else None
    return _exclusion_result(rep, {"lower_bound": -math.log(5 * math.e / eta), "expansion": 5.0,
                                   "epsilon": eta / 5, "amplitude": alpha * (eta / 5) ** -alpha}, plot)


def run_cor43(ctx: Context) -> Result:
    V = ctx.potential()
    eps = float(ctx.param("epsilon", required=True))
    alpha = float(ctx.param("alpha", 1.0))
    R = float(ctx.param("R", 1.0))
    samples = None if V.dim == 1 else ctx.ball_samples(V.dim, R)
    rep = corollary43_harness(V, eps, alpha, R, ctx.grid(201), ctx.quad(V.dim), ctx.seed, samples)
    plot = _plane_plot(V, rep.expanded_cover, R) if V.dim == 1 else None
    return _exclusion_result(rep, {"eta": 5 * math.e * eps, "log_epsilon": math.log(eps),
                                   "bound": corollary43_bound(V.dim, R, eps, alpha)}, plot)


def run_capacity(ctx: Context) -> Result:
    K = ctx.problem.capacity_set
    if K is None:
        raise DomainError("'capacity' needs a set input")
    est = capacity_1d(K)
    return Result("pass", {"value": est.value}, {"node_count": est.node_count}, details=est.to_dict())


def run_cor44(ctx: Context) -> Result:
    K = ctx.problem.capacity_set
    if K is None:
        raise DomainError("'cor44' needs a set input")
    alpha = float(ctx.param("alpha", 1.0))
    rep = corollary44_check(K, alpha, ctx.samples(4000))
    return Result(rep.status, {"capacity": rep.capacity.value, "alpha": alpha},
                  {"node_count": rep.capacity.node_count}, rep.lhs_upper, rep.rhs, rep.to_dict())


def _sigma_tau(ctx: Context):
    sigma = float(ctx.param("sigma", required=True))
    tau = float(ctx.param("tau", required=True))
    return sigma, tau


def run_three_circle_max(ctx: Context) -> Result:
    V = ctx.potential()
    sigma, tau = _sigma_tau(ctx)
    R = float(ctx.param("R", 1.0))
    pts = ctx.ball_samples(V.dim, tau * R)
    rep = three_circle_max_check(V, sigma, tau, R, pts, ctx.quad(V.dim))
    return Result("pass" if rep.passed else "fail", {"rho": rep.rho, "sup_inner": rep.sup_inner,
                                                     "sup_outer": rep.sup_outer},
                  {"samples": rep.samples, "violations": rep.violations}, details=rep.to_dict())


def run_lelong_bound(ctx: Context) -> Result:
    """Lelong numbers of the normalized ``u`` at the given point or at every singular point in ``B_tau``."""
    V = ctx.potential()
    sigma, tau = _sigma_tau(ctx)
    q = ctx.quad(V.dim)
    ms, _ = ball_sup(V, sigma, q)
    m1, _ = ball_sup(V, 1.0, q)
    if not m1 - ms > 1e-12:
        raise DomainError("V is constant on the unit ball: cannot normalize")
    f = V.func
    u = from_function(V.dim, lambda p: (f(p) - ms) / (m1 - ms), label="normalized")
    point = ctx.param("point")
    if point is not None:
        zs = [as_point(np.array(point[0::2]) + 1j * np.array(point[1::2]), V.dim)]
    else:
        sing = ctx.problem.singular_points
        zs = [z for z in sing if norm(z) <= tau] or [np.zeros(V.dim, dtype=complex)]
    reports = [lelong_bound_check(u, sigma, tau, z) for z in zs]
    est = max(r.estimate for r in reports)
    nu = nu_constant(sigma, tau)
    ok = all(r.holds for r in reports)
    return Result("pass" if ok else "fail", {"nu": nu, "sup_inner": ms, "sup_outer": m1},
                  {"points": len(reports), "violations": sum(not r.holds for r in reports)},
                  details={"estimate_max": est, "bound": nu + 0.05,
                           "points": [{"point": encode_point(z), **r.to_dict()} for z, r in zip(zs, reports)]})


def run_three_circle_min(ctx: Context) -> Result:
    V = ctx.potential()
    sigma, tau = _sigma_tau(ctx)
    nu0 = nu_constant(sigma, tau)
    params = ThreeCircleParams(sigma, tau, float(ctx.param("nu", nu0 + 0.05)),
                               float(ctx.param("eta", required=True)), float(ctx.param("alpha", 1.0)),
                               float(ctx.param("R", 1.0)), int(ctx.param("patches", 1)))
    pts = ctx.ball_samples(V.dim, tau * params.R)
    rep = three_circle_min_harness(V, params, pts, ctx.quad(V.dim), ctx.param("c_n"))
    ex = rep.extras
    plot = _plane_plot(lambda w: V(w * params.R), rep.expanded_cover, 1.0, True) if V.dim == 1 else None
    return _exclusion_result(rep, {"nu": params.nu, "nu_sigma_tau": nu0, "rho": rho_constant(sigma, tau),
                                   "C": ex["C"], "s": ex["s"], "kappa": ex["kappa"],
                                   "c_n": ex["c_n_estimate"], "lower_bound": ex["lower_bound"]}, plot)


def run_cor64(ctx: Context) -> Result:
    V = ctx.potential()
    eta = float(ctx.param("eta", required=True))
    alpha = float(ctx.param("alpha", 1.0))
    R = float(ctx.param("R", 1.0))
    sigma = float(ctx.param("sigma", 1e-3))
    pts = ctx.ball_samples(V.dim, R)
    rep = corollary64_harness(V, eta, alpha, R, pts, ctx.quad(V.dim), sigma, ctx.param("c_n"))
    Rt = 2 * math.e * R
    plot = _plane_plot(lambda w: V(w * Rt), rep.expanded_cover, 1.0, True) if V.dim == 1 else None
    return _exclusion_result(rep, {"R_tilde": Rt, "tau": 1 / (2 * math.e), "sigma": sigma,
                                   "C": rep.extras.get("C")}, plot)


def run_essential(ctx: Context) -> Result:
    V = ctx.potential()
    alpha = float(ctx.param("alpha", 1.0))
    tau = float(ctx.param("tau", 0.5))
    R = float(ctx.param("R", 1.0))
    eps_list = ctx.param("eps_content", required=True)
    eps_list = sorted(float(e) for e in (eps_list if isinstance(eps_list, list) else [eps_list]))
    p = 2 * V.dim - 2 + alpha
    pts = ctx.ball_samples(V.dim, tau * R)
    rows = []
    for e in eps_list:
        b = essential_lower_bound(V, p, e, pts)
        ratio = b.value / math.log(e) if 0 < e < 1 else None
        rows.append({"eps_content": e, "value": b.value, "removed": b.removed, "content": b.content,
                     "ratio_to_log_eps": ratio})
    vals = [r["value"] for r in rows]
    monotone = all(a <= b for a, b in zip(vals, vals[1:]))
    return Result("pass" if monotone else "fail", {"p": p}, {"samples": len(pts), "levels": len(rows)},
                  details={"levels": rows, "nondecreasing": monotone})


def _green(ctx: Context):
    if ctx.problem.green is None:
        raise DomainError(f"'{ctx.cfg['command']}' needs a unit-ball Green potential input")
    return ctx.problem.green


def run_lemma51(ctx: Context) -> Result:
    spec = _green(ctx)
    s = float(ctx.param("s", required=True))
    eta = float(ctx.param("eta", required=True))
    alpha = float(ctx.param("alpha", 1.0))
    pts = ctx.ball_samples(spec.dim, 1.0)
    rep = lemma51_harness(spec, s, eta, alpha, pts, ctx.param("c_n"), ctx.quad(spec.dim))
    V = ctx.problem.potential
    plot = _plane_plot(V, rep.expanded_cover, 1.0, True) if spec.dim == 1 else None
    return _exclusion_result(rep, {"c_n": rep.extras["c_n_estimate"], "mass": spec.total_weight}, plot)


def run_prop52(ctx: Context) -> Result:
    spec = _green(ctx)
    eta = float(ctx.param("eta", required=True))
    alpha = float(ctx.param("alpha", 1.0))
    pts = ctx.ball_samples(spec.dim, 1.0)
    rep = prop52_harness(spec, eta, alpha, pts, ctx.param("c_n"))
    V = ctx.problem.potential
    plot = _plane_plot(V, rep.expanded_cover, 1.0, True) if spec.dim == 1 else None
    return _exclusion_result(rep, {"C": rep.extras["C"], "c_n": rep.extras["c_n_estimate"]}, plot)


def run_thm53(ctx: Context) -> Result:
    V = ctx.potential()
    rho = float(ctx.param("rho", required=True))
    s = float(ctx.param("s", required=True))
    eta = float(ctx.param("eta", required=True))
    alpha = float(ctx.param("alpha", 1.0))
    pts = ctx.ball_samples(V.dim, rho)
    rep = theorem53_harness(V, rho, s, eta, alpha, pts, ctx.param("c_n"), ctx.quad(V.dim))
    plot = _plane_plot(V, rep.expanded_cover, 1.0, True) if V.dim == 1 else None
    return _exclusion_result(rep, {"kappa": rep.extras.get("kappa"), "c_n": rep.extras.get("c_n_estimate")},
                             plot)


# name: (runner, help, math parameters)
COMMANDS = {
    "cartan": (run_cartan, "Cartan discs of a polynomial lemniscate", ["epsilon", "alpha"]),
    "min-modulus": (run_min_modulus, "one-variable minimum modulus outside Cartan discs", ["R", "eta"]),
    "thm42": (run_thm42, "Euclidean exclusion for a logarithmic potential", ["eta", "alpha", "R", "slack"]),
    "cor43": (run_cor43, "lemniscate content of a logarithmic potential", ["epsilon", "alpha", "R"]),
    "capacity": (run_capacity, "logarithmic capacity of a planar set", []),
    "cor44": (run_cor44, "content against capacity, one-sided", ["alpha"]),
    "three-circle-max": (run_three_circle_max, "three-circle maximum principle", ["sigma", "tau", "R"]),
    "lelong-bound": (run_lelong_bound, "Lelong numbers against nu(sigma, tau)", ["sigma", "tau", "point"]),
    "three-circle-min": (run_three_circle_min, "three-circle minimum principle",
                         ["sigma", "tau", "nu", "eta", "alpha", "R", "patches", "c_n"]),
    "cor64": (run_cor64, "minimum principle on B_R from the maximum on B_2eR",
              ["eta", "alpha", "R", "sigma", "c_n"]),
    "essential": (run_essential, "content-essential lower bound as eps shrinks",
                  ["alpha", "eps_content", "tau", "R"]),
    "lemma51": (run_lemma51, "invariant exclusion for a Green potential", ["s", "eta", "alpha", "c_n"]),
    "prop52": (run_prop52, "Green potential bound with total weight <= 1", ["eta", "alpha", "c_n"]),
    "thm53": (run_thm53, "Poisson-Szego plus Green split on the unit ball",
              ["rho", "s", "eta", "alpha", "c_n"]),
}

_PARAM_TYPES = {"patches": int, "point": float, "eps_content": float}
_PARAM_NARGS = {"point": "+", "eps_content": "+"}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lemlab", description="Run a minimum-principle harness and write a JSON report.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, help_, params) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--input", help="JSON input document")
        sp.add_argument("--out", default="lemlab-out", help="output directory")
        sp.add_argument("--seed", type=int, help="random seed (mandatory)")
        sp.add_argument("--grid", type=int, help="grid resolution")
        sp.add_argument("--samples", type=int, help="number of random samples")
        sp.add_argument("--quad-nodes", type=int, help="sphere quadrature nodes")
        sp.add_argument("--no-artifacts", action="store_true", help="skip CSV and SVG output")
        for p in params:
            sp.add_argument(f"--{p.replace('_', '-')}", dest=p, type=_PARAM_TYPES.get(p, float),
                            nargs=_PARAM_NARGS.get(p))
    rp = sub.add_parser("replay", help="re-run a report and compare payloads byte for byte")
    rp.add_argument("report")
    rp.add_argument("--out", help="also write the replayed report here")
    return parser


def config_from_args(args) -> dict:
    if args.seed is None:
        raise CliError("--seed is mandatory (no entropy defaults)")
    if args.input is None:
        raise CliError("--input is mandatory")
    _, _, params = COMMANDS[args.command]
    return {"command": args.command, "input": str(args.input), "document": load_document(args.input),
            "params": {p: getattr(args, p) for p in params}, "seed": args.seed, "grid": args.grid,
            "samples": args.samples, "quad_nodes": args.quad_nodes, "out": str(args.out),
            "artifacts": not args.no_artifacts}


def compute_payload(cfg: dict) -> tuple[dict, Result]:
    """Run the configured harness; the payload depends on ``cfg`` alone."""
    runner = COMMANDS[cfg["command"]][0]
    problem = parse_problem(cfg["document"])
    res = runner(Context(cfg, problem))
    payload = {"command": cfg["command"], "params": {k: v for k, v in sorted(cfg["params"].items())},
               "constants": res.constants, "counts": res.counts, "content_sum": res.content_sum,
               "paper_bound": res.paper_bound, "status": res.status, "seed": cfg["seed"],
               "details": res.details}
    return clean(payload), res


def _write_artifacts(out: Path, cfg: dict, res: Result) -> list[str]:
    if not cfg.get("artifacts", True) or res.plot is None:
        return []
    plot = res.plot
    stem = cfg["command"]
    csv_path = artifacts.write_grid_csv(out / f"{stem}_grid.csv", plot["values"], plot["extent"], PLOT_GRID,
                                        plot["cover"])
    svg_path = artifacts.write_cover_svg(out / f"{stem}_cover.svg", plot["cover"], plot["extent"] * 1.05,
                                         plot.get("points"), unit_circle=plot["unit_circle"])
    return [csv_path.name, svg_path.name]


def run(cfg: dict, out: Optional[Path] = None) -> dict:
    """Execute one harness and return the report; writes it when ``out`` is given."""
    t0 = time.perf_counter()
    payload, res = compute_payload(cfg)
    wall = time.perf_counter() - t0
    files = []
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        files = _write_artifacts(out, cfg, res)
    report = {"schema_version": SCHEMA_VERSION, "config": clean(cfg), "payload": payload,
              "wall_clock": wall, "artifacts": files}
    if out is not None:
        path = out / f"{cfg['command']}_report.json"
        report["artifacts"] = files + [path.name]
        path.write_text(json.dumps(report, sort_keys=True, indent=1) + "\n")
    return report


def replay(path, out: Optional[Path] = None) -> dict:
    """Re-run a report's config and check the payload is byte-identical."""
    report = json.loads(Path(path).read_text())
    version = report.get("schema_version")
    if version != SCHEMA_VERSION:
        raise CliError(f"schema version {version!r} is not {SCHEMA_VERSION!r}; refusing to replay")
    cfg = report["config"]
    cfg = dict(cfg, artifacts=out is not None and cfg.get("artifacts", True))
    new = run(cfg, out)
    if dumps(new["payload"]) != dumps(report["payload"]):
        raise CliError("replay payload differs from the stored payload")
    return new


def exit_code(status: str) -> int:
    return 2 if status == "fail" else 0


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command is None:
            raise CliError("a subcommand is required")
        if args.command == "replay":
            report = replay(args.report, Path(args.out) if args.out else None)
            print(f"replay ok: {report['payload']['command']} status={report['payload']['status']}")
        else:
            cfg = config_from_args(args)
            report = run(cfg, Path(cfg["out"]))
            pl = report["payload"]
            print(f"{pl['command']}: {pl['status']} (content {pl['content_sum']}, bound {pl['paper_bound']}) "
                  f"-> {Path(cfg['out']) / (cfg['command'] + '_report.json')}")
        return exit_code(report["payload"]["status"])
    except (CliError, DomainError, ValueError, TypeError, KeyError, OSError) as exc:
        print(f"lemlab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
