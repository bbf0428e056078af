"""Command-line front end.

Exit codes: 0 success / affine, 1 negative verdict, 2 usage or input error,
3 conjecture counterexample or violation found.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import affine, car_rep, covariance, golden
from .errors import PreconditionError, ResourceError, ValidationError
from .numerics import dump_matrix, load_matrix

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_FOUND = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: list = field(default_factory=list)
    gamma: str = None
    tol: float = None
    seed: int = 0
    trials: int = 100
    lambda_grid: list = None
    dim: int = None
    modes: list = None
    output: str = None
    format: str = "text"
    workers: int = 1
    parity: str = "even"
    dump_dir: str = None

    def __post_init__(self):
        if self.tol is not None and self.tol <= 0:
            raise InputError(f"--tol must be positive, got {self.tol}")
        if self.trials < 1:
            raise InputError(f"--trials must be >= 1, got {self.trials}")
        for lam in self.lambda_grid or []:
            if not 0 < lam < 1:
                raise InputError(f"--lambda values must lie in (0, 1), got {lam}")


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.15g}"
    if isinstance(x, complex):
        return f"{x.real:.15g}{x.imag:+.15g}j"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in x.items()) + "}"
    return str(x)


def _emit(cfg, payload, lines):
    if cfg.format == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_json_matrix(path):
    try:
        return load_matrix(path)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    except OSError as exc:
        raise InputError(f"{path}: {exc}")
    except ValidationError as exc:
        raise InputError(f"{path}: {exc}")


def _read_gamma(path, k):
    if path is None:
        return covariance.swap_involution(k)
    try:
        g = covariance.load_involution(path)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    except OSError as exc:
        raise InputError(f"{path}: {exc}")
    except ValidationError as exc:
        raise InputError(f"{path}: {exc}")
    if g.k != k:
        raise InputError(f"involution has size {g.k}, operator has size {k}")
    return g


def cmd_validate(cfg):
    if len(cfg.inputs) != 1:
        raise InputError("validate takes exactly one operator file")
    S = _read_json_matrix(cfg.inputs[0])
    if S.shape[0] != S.shape[1]:
        raise InputError(f"operator is not square: {S.shape}")
    gamma = _read_gamma(cfg.gamma, S.shape[0])
    res = covariance.residuals(S, gamma)
    try:
        covariance.validate(S, gamma, cfg.tol)
        ok, failed = True, []
    except ValidationError as exc:
        ok, failed = False, sorted(exc.violations)
    names = {
        "hermitian": "S = S^*",
        "spectral_range": "0 <= S <= 1",
        "gamma_relation": "Gamma S Gamma = 1 - S",
    }
    lines = [f"valid: {ok}"]
    for key, r in res.items():
        mark = "FAIL" if key in failed else "ok"
        lines.append(f"  {names[key]:<24} residual {_fmt(r)}  {mark}")
    _emit(cfg, {"schema": "1", "valid": ok, "residuals": res, "violated": failed}, lines)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _load_pair(cfg):
    if len(cfg.inputs) != 2:
        raise InputError("affine takes exactly two operator files")
    a, b = (_read_json_matrix(p) for p in cfg.inputs)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise InputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    gamma = _read_gamma(cfg.gamma, a.shape[0])
    try:
        return covariance.validate(a, gamma), covariance.validate(b, gamma)
    except ValidationError as exc:
        raise InputError(str(exc))


def cmd_affine(cfg):
    s, s2 = _load_pair(cfg)
    if cfg.lambda_grid:
        rep = affine.numeric_test(s, s2, cfg.lambda_grid, decision_tol=cfg.tol or affine.DECISION_TOL)
    elif affine.is_commuting(s, s2):
        rep = affine.decide_commuting(s, s2, cfg.tol or affine.ALPHA_TOL)
    else:
        rep = affine.numeric_test(s, s2, decision_tol=cfg.tol or affine.DECISION_TOL)
    nec, nec_res = affine.necessary_check(s, s2)
    payload = rep.to_json()
    payload["necessary_check"] = nec
    payload["necessary_residual"] = nec_res
    lines = [
        f"verdict: {rep.verdict}",
        f"method: {rep.method}",
        f"commuting: {rep.commuting}",
        f"max_discrepancy: {_fmt(rep.max_discrepancy)}",
        f"diff_rank: {rep.diff_rank}",
        f"necessary_check: {nec} (residual {_fmt(nec_res)})",
    ]
    if rep.witness_monomial is not None:
        lines.append(f"witness: monomial {list(rep.witness_monomial)} at lambda {_fmt(rep.witness_lambda)}")
    if rep.joint_alphas is not None:
        lines.append(f"joint_alphas: {_fmt(rep.joint_alphas)}")
    _emit(cfg, payload, lines)
    return EXIT_OK if rep.verdict == "affine" else EXIT_NEGATIVE


def cmd_example38(cfg):
    r = golden.report()
    lines = [
        f"eigenvalues S:  {_fmt(r['eigenvalues_S'])}",
        f"eigenvalues S': {_fmt(r['eigenvalues_S2'])}",
        f"phi (own adapted basis): {_fmt(r['phi_own_basis'])}",
        f"  discrepancy from these values: {_fmt(r['own_basis_discrepancy'])}",
        f"phi (b fixed in S's basis): {_fmt(r['phi_fixed_basis'])}",
        f"  discrepancy: {_fmt(r['fixed_basis_discrepancy'])}",
        f"commutator norm: {_fmt(r['commutator_norm'])}",
        f"diff_rank: {r['diff_rank']}",
        f"necessary_check: {r['necessary_check']}",
        f"verdict: {r['affine']['verdict']} ({r['affine']['method']}, "
        f"max_discrepancy {_fmt(r['affine']['max_discrepancy'])})",
        f"golden values match: {r['values_match']}",
        f"passed: {r['passed']}",
    ]
    _emit(cfg, r, lines)
    return EXIT_OK if r["passed"] else EXIT_NEGATIVE


def cmd_conjecture(cfg):
    k = cfg.dim
    if k is None:
        raise InputError("conjecture requires --dim")
    gamma = _read_gamma(cfg.gamma, k)
    out_dir = cfg.dump_dir
    report = affine.explore_conjecture(
        k,
        gamma,
        trials=cfg.trials,
        seed=cfg.seed,
        modes=cfg.modes or affine.MODES,
        lambdas=cfg.lambda_grid,
        out_dir=out_dir,
        workers=cfg.workers,
    )
    lines = [f"k = {k}, trials = {cfg.trials}, seed = {cfg.seed}, modes = {report['modes']}"]
    for h in report["histogram"]:
        lines.append(f"  {h['mode']:<20} {h['verdict']:<11} rank {h['rank']}: {h['count']}")
    lines.append(f"counterexamples: {len(report['counterexamples'])}")
    lines.append(f"violations (rank 1): {len(report['violations'])}")
    lines.append(f"not affine although one lambda passed: {report['one_lambda_insufficient']}")
    _emit(cfg, report, lines)
    return EXIT_FOUND if report["flags"] else EXIT_OK


def cmd_rep(cfg):
    if cfg.dim is None:
        raise InputError("rep requires --dim (number of paired modes n)")
    rep = car_rep.build_rep(cfg.dim, cfg.parity)
    check = car_rep.verify_car(rep, cfg.trials, cfg.seed)
    if cfg.dump_dir:
        os.makedirs(cfg.dump_dir, exist_ok=True)
        for i, g in enumerate(rep.generators, start=1):
            dump_matrix(g, os.path.join(cfg.dump_dir, f"b_eps{i}.json"))
        if rep.zero_mode is not None:
            dump_matrix(rep.zero_mode, os.path.join(cfg.dump_dir, "b_eps0.json"))
    payload = {
        "schema": "1",
        "n": rep.n,
        "parity": rep.parity,
        "rep_dim": rep.rep_dim,
        "car_passed": check.passed,
        "anticommutator_residual": check.anticommutator_residual,
        "involution_residual": check.involution_residual,
    }
    lines = [f"{k}: {_fmt(v)}" for k, v in payload.items() if k != "schema"]
    _emit(cfg, payload, lines)
    return EXIT_OK if check.passed else EXIT_NEGATIVE


COMMANDS = {
    "validate": cmd_validate,
    "affine": cmd_affine,
    "example38": cmd_example38,
    "conjecture": cmd_conjecture,
    "rep": cmd_rep,
}


def build_parser():
    p = argparse.ArgumentParser(prog="carlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--tol", type=float)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--out", dest="output")
        return sp

    v = common(sub.add_parser("validate", help="check a covariance operator file"))
    v.add_argument("inputs", nargs=1)
    v.add_argument("--gamma", help="involution file (default: pairwise swap)")

    a = common(sub.add_parser("affine", help="decide the affine property of two operators"))
    a.add_argument("inputs", nargs=2)
    a.add_argument("--gamma")
    a.add_argument("--lambda", dest="lambda_grid", type=float, action="append")

    common(sub.add_parser("example38", help="reproduce the built-in C^3 example"))

    c = common(sub.add_parser("conjecture", help="search pairs for rank/affine counterexamples"))
    c.add_argument("--dim", type=int, required=True)
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--mode", dest="modes", action="append", choices=affine.MODES)
    c.add_argument("--lambda", dest="lambda_grid", type=float, action="append")
    c.add_argument("--gamma")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--dump-dir", help="directory for counterexample pair files")

    r = common(sub.add_parser("rep", help="build and check a Jordan-Wigner representation"))
    r.add_argument("--dim", type=int, required=True, help="number of paired modes n")
    r.add_argument("--parity", choices=("even", "odd"), default="even")
    r.add_argument("--trials", type=int, default=100)
    r.add_argument("--dump-dir", help="write generator matrices as JSON files here")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = RunConfig(**{k: v for k, v in vars(ns).items() if v is not None or k in ("tol",)})
        return COMMANDS[cfg.subcommand](cfg)
    except (InputError, ResourceError, PreconditionError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
