"""Command-line front end.

Subcommands: ``project``, ``fiber-bruteforce``, ``descend``, ``section``.
Exit codes: 0 success, 1 a mathematical check failed, 2 bad input.
Reports are JSON with sorted keys and no timestamps, so identical inputs
give byte-identical files.
"""
import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields

from . import descent, hypersection, segre
from .errors import (
    CocycleViolation,
    ConfigError,
    GenericityViolation,
    NoEquationFound,
    PermDimMismatch,
    SegreError,
)
from .rng import Stream
from .scalars import parse_field, prime_field

EXIT_OK, EXIT_MATH, EXIT_INPUT = 0, 1, 2

# execution settings that must not change report bytes
_NOT_ECHOED = ("workers", "out")

_TAG_FIBER_POINTS = 0xF1B


@dataclass
class RunConfig:
    """Every input of a run; all randomness derives from ``seed``."""

    subcommand: str = "project"
    seed: int = 0
    workers: int = 1
    out: str = None
    field: str = "Fp:101"
    dims: list = None
    trials: int = 100
    hyperplanes: object = "random"
    height: int = 10
    # fiber-bruteforce
    n: int = 2
    p: int = 5
    p_point: list = None
    q_point: list = None
    # descend
    k: int = 2
    perm: list = None
    matrices: object = None
    seeds: list = None
    # section
    a: int = 1
    b: int = 2
    H: object = "random"
    samples: int = None
    max_degree: int = hypersection.DEFAULT_MAX_DEGREE

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def echo(self):
        """Config as echoed in reports, without execution settings."""
        return {k: v for k, v in self.to_dict().items() if k not in _NOT_ECHOED}

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown config keys {unknown}")
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)


# ---- argument parsing helpers


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _point_list(text):
    """``"0,1;1,2"`` -> ``[[0, 1], [1, 2]]``."""
    try:
        return [[int(v) for v in part.split(",")] for part in text.split(";") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected points like '0,1;1,2', got {text!r}") from None


def _json_or_word(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def build_parser():
    parser = argparse.ArgumentParser(prog="segreproj", description="Birational projections of Segre varieties.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON RunConfig; command-line flags override it")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--out", help="report path (default: stdout)")

    sp = sub.add_parser("project", help="build pi_L and verify birationality")
    common(sp)
    sp.add_argument("--dims", type=_int_list)
    sp.add_argument("--field")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--hyperplanes", type=_json_or_word, help='"coordinate", "random" or a JSON list of forms')
    sp.add_argument("--height", type=int, help="height bound for random rationals")

    sp = sub.add_parser("fiber-bruteforce", help="enumerate (P^1(F_p))^n and check the fiber identity")
    common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=int)
    sp.add_argument("--p-point", dest="p_point", type=_point_list, help="e.g. '0,1;0,1'")
    sp.add_argument("--q-point", dest="q_point", type=_point_list, help="e.g. '1,1;1,2'")
    sp.add_argument("--hyperplanes", type=_json_or_word)

    sp = sub.add_parser("descend", help="twisted form, invariant center and descent")
    common(sp)
    sp.add_argument("--p", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--dims", type=_int_list)
    sp.add_argument("--perm", type=_int_list, help="1-based image list, e.g. 2,1")
    sp.add_argument("--matrices", type=_json_or_word, help='"identity", "random:<seed>" or a JSON list')

    sp = sub.add_parser("section", help="hyperplane section of P^a x P^b and its image Q_H")
    common(sp)
    sp.add_argument("--a", type=int)
    sp.add_argument("--b", type=int)
    sp.add_argument("--field")
    sp.add_argument("--H", dest="H", type=_json_or_word, help='"random" or a JSON coefficient list')
    sp.add_argument("--hyperplanes", type=_json_or_word)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--max-degree", dest="max_degree", type=int)
    return parser


def config_from_args(args):
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = RunConfig.from_json(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    else:
        cfg = RunConfig()
    cfg.subcommand = args.subcommand
    for name, value in vars(args).items():
        if name in ("config", "subcommand") or value is None:
            continue
        setattr(cfg, name, value)
    return cfg


# ---- runners


def _hyperplanes(cfg, field, dims, path=()):
    spec = cfg.hyperplanes
    if spec is None or spec == "random":
        return segre.FactorHyperplanes.random(field, dims, cfg.seed, path)
    if spec == "coordinate":
        return segre.FactorHyperplanes.coordinate(field, dims)
    if isinstance(spec, list):
        return segre.FactorHyperplanes(field, spec)
    raise ConfigError(f"unrecognised hyperplane spec {spec!r}")


def run_project(cfg):
    if not cfg.dims:
        raise ConfigError("project needs --dims")
    dims = segre.ProductDims(cfg.dims)
    field = parse_field(cfg.field, cfg.seed)
    c = segre.center_L(dims, _hyperplanes(cfg, field, dims))
    report = segre.verify_birational(c, trials=cfg.trials, seed=cfg.seed, workers=cfg.workers, height=cfg.height)
    ok = report["passes"] == report["trials"] and c.certificates["verified"]
    return report, ok


def _random_generic_pair(F, n, seed):
    stream = Stream(seed, _TAG_FIBER_POINTS)
    p_pts, q_pts = [], []
    for i in range(n):
        pi = segre.random_point(F, 1, stream)
        while True:
            qi = segre.random_point(F, 1, stream)
            if qi != pi:
                break
        p_pts.append(pi)
        q_pts.append(qi)
    return segre.MultiPoint(p_pts), segre.MultiPoint(q_pts)


def run_fiber(cfg):
    F = prime_field(cfg.p)
    if (cfg.p_point is None) != (cfg.q_point is None):
        raise ConfigError("give both --p-point and --q-point, or neither")
    if cfg.p_point is None:
        p_pt, q_pt = _random_generic_pair(F, cfg.n, cfg.seed)
    else:
        p_pt = segre.MultiPoint.from_coords(F, cfg.p_point)
        q_pt = segre.MultiPoint.from_coords(F, cfg.q_point)
    hyper = None
    if isinstance(cfg.hyperplanes, list):
        hyper = segre.FactorHyperplanes(F, cfg.hyperplanes)
    report = segre.fiber_bruteforce(cfg.n, cfg.p, (p_pt, q_pt), hyperplanes=hyper, workers=cfg.workers)
    return report, report["passed"]


def run_descend(cfg):
    if not cfg.dims:
        raise ConfigError("descend needs --dims")
    t = descent.make_twist(cfg.p, cfg.k, cfg.dims, perm=cfg.perm, matrices=cfg.matrices, seed=cfg.seed, modulus_seed=cfg.seed)
    seeds = []
    for s in cfg.seeds or []:
        seeds.append(descent.DivisorClassRep(t.field, int(s["factor"]) - 1, t.field.array(s["form"])))
    report = descent.verify_descent(t, rng_seed=cfg.seed, seeds=seeds, workers=cfg.workers)
    ok = (
        report["stability"]
        and report["equivariance_failures"] == 0
        and report["target_identity_holds"]
        and report["oracle_count"] in (None, report["fixed_point_count"])
        and report["fixed_point_count"] == report["predicted_count"]
        and (report["roundtrip"] is None or report["roundtrip"]["passed"])
        and report.get("descended_projection_rational", True)
    )
    return report, bool(ok)


def run_section(cfg):
    field = parse_field(cfg.field, cfg.seed)
    dims = segre.ProductDims((cfg.a, cfg.b))
    hyper = _hyperplanes(cfg, field, dims) if cfg.hyperplanes != "coordinate" else None
    report = hypersection.analyze_section(
        cfg.a, cfg.b, field, cfg.seed, H=cfg.H, hyperplanes=hyper, n_samples=cfg.samples, max_degree=cfg.max_degree, workers=cfg.workers
    )
    ok = report.get("degree_candidate") is not None and report.get("degrees_agree") and report.get("samples_satisfy_equation")
    return report, bool(ok)


RUNNERS = {"project": run_project, "fiber-bruteforce": run_fiber, "descend": run_descend, "section": run_section}

# errors that mean the input itself is unusable
INPUT_ERRORS = (ConfigError, PermDimMismatch, CocycleViolation, GenericityViolation, ValueError, TypeError, KeyError)


def run(cfg):
    """Execute a config; returns ``(exit_code, report_or_None)``."""
    try:
        report, ok = RUNNERS[cfg.subcommand](cfg)
    except NoEquationFound as exc:
        return EXIT_MATH, {"schema_version": segre.SCHEMA_VERSION, "kind": cfg.subcommand, "error": str(exc)}
    except INPUT_ERRORS as exc:
        print(f"segreproj: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    except SegreError as exc:
        return EXIT_MATH, {"schema_version": segre.SCHEMA_VERSION, "kind": cfg.subcommand, "error": f"{type(exc).__name__}: {exc}"}
    report["config"] = cfg.echo()
    return (EXIT_OK if ok else EXIT_MATH), report


def dump_report(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"segreproj: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code, report = run(cfg)
    if report is not None:
        text = dump_report(report)
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
