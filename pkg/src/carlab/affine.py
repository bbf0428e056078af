"""Affine property of pairs of covariance operators.

A pair ``(S, S2)`` is affine when ``phi_{lS + (1-l)S2} = l phi_S + (1-l) phi_S2``
for every ``l`` in ``[0, 1]``.  Commuting pairs are decided from their joint
spectral data; arbitrary pairs by sweeping the full Majorana monomial basis
over a lambda grid that is exact for the polynomial degree involved.
"""

import json
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from . import car_rep
from .covariance import (
    COMMUTE_TOL,
    Involution,
    adapted_diagonalize,
    covariance_from_basis,
    difference_rank,
    gamma_real_basis,
    gamma_form_matrix,
    random_covariance,
    simultaneous_adapted_diagonalize,
    validate,
)
from .errors import PreconditionError, ResourceError, ValidationError
from .numerics import adjoint, commutator_norm, matrix_to_json, max_abs
from .quasifree import MajoranaEvaluator

DECISION_TOL = 1e-8
ALPHA_TOL = 1e-8
NECESSARY_TOL = 1e-10
MAX_NUMERIC_DIM = 7
MODES = ("random", "commuting", "rank2-perturbation")


@dataclass
class AffineReport:
    verdict: str
    method: str
    max_discrepancy: float
    diff_rank: int
    commuting: bool
    witness_monomial: tuple = None
    witness_lambda: float = None
    witness_value: complex = None
    joint_alphas: list = None

    def to_json(self):
        d = asdict(self)
        d["schema"] = "1"
        if self.witness_monomial is not None:
            d["witness_monomial"] = list(self.witness_monomial)
        if self.witness_value is not None:
            d["witness_value"] = [self.witness_value.real, self.witness_value.imag]
        if self.joint_alphas is not None:
            d["joint_alphas"] = [list(p) for p in self.joint_alphas]
        return d

    @classmethod
    def from_json(cls, d):
        d = dict(d)
        d.pop("schema", None)
        if d.get("witness_monomial") is not None:
            d["witness_monomial"] = tuple(d["witness_monomial"])
        if d.get("witness_value") is not None:
            d["witness_value"] = complex(*d["witness_value"])
        if d.get("joint_alphas") is not None:
            d["joint_alphas"] = [tuple(p) for p in d["joint_alphas"]]
        return cls(**d)


def _same_space(cov, cov2):
    if cov.k != cov2.k:
        raise ValidationError(f"dimension mismatch: {cov.k} vs {cov2.k}")
    if max_abs(cov.gamma.G - cov2.gamma.G) > 1e-12:
        raise ValidationError("operators use different involutions")


def mixture(cov, cov2, lam):
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"lambda = {lam} outside [0, 1]")
    _same_space(cov, cov2)
    return validate(lam * cov.S + (1 - lam) * cov2.S, cov.gamma)


def default_lambdas(k):
    m = k // 2
    return [j / (m + 2) for j in range(1, m + 2)]


def is_commuting(cov, cov2, tol=COMMUTE_TOL):
    return commutator_norm(cov.S, cov2.S) <= tol


def decide_commuting(cov, cov2, alpha_tol=ALPHA_TOL):
    _same_space(cov, cov2)
    try:
        basis = simultaneous_adapted_diagonalize(cov, cov2)
    except PreconditionError as exc:
        raise PreconditionError(
            f"{exc}; use numeric_test for non-commuting pairs", exc.residual
        ) from exc
    pairs = [(float(a), float(b)) for a, b in zip(basis.alphas, basis.alphas2)]
    delta = [a - b for a, b in pairs]
    differing = [i for i, d in enumerate(delta) if abs(d) > alpha_tol]
    worst, witness = 0.0, None
    for i, j in combinations(range(len(delta)), 2):
        # discrepancy of the quartic monomial on modes i, j at lambda = 1/2
        d = abs(delta[i] * delta[j])
        if d > worst:
            worst = d
            witness = (2 * i + 1, 2 * i + 2, 2 * j + 1, 2 * j + 2)
    return AffineReport(
        verdict="affine" if len(differing) <= 1 else "not_affine",
        method="analytic",
        max_discrepancy=worst,
        diff_rank=difference_rank(cov, cov2),
        commuting=True,
        witness_monomial=witness if len(differing) > 1 else None,
        witness_lambda=0.5 if len(differing) > 1 else None,
        joint_alphas=pairs,
    )


def discrepancies(cov, cov2, lambdas, ref_basis):
    """``{(lambda, index_set): D}`` over every Majorana monomial."""
    rep = car_rep.build_rep(ref_basis.n, ref_basis.parity)
    ev1 = MajoranaEvaluator(cov, ref_basis, rep).all_monomials()
    ev2 = MajoranaEvaluator(cov2, ref_basis, rep).all_monomials()
    out = {}
    for lam in lambdas:
        mix = MajoranaEvaluator(mixture(cov, cov2, lam), ref_basis, rep).all_monomials()
        for idx in sorted(mix, key=lambda s: (len(s), s)):
            out[(lam, idx)] = lam * ev1[idx] + (1 - lam) * ev2[idx] - mix[idx]
    return out


def numeric_test(cov, cov2, lambdas=None, ref_basis=None, decision_tol=DECISION_TOL):
    _same_space(cov, cov2)
    if cov.k > MAX_NUMERIC_DIM:
        raise ResourceError(f"k = {cov.k} exceeds the numeric sweep cap {MAX_NUMERIC_DIM}")
    lambdas = default_lambdas(cov.k) if lambdas is None else list(lambdas)
    for lam in lambdas:
        if not 0.0 <= lam <= 1.0:
            raise ValidationError(f"lambda = {lam} outside [0, 1]")
    if ref_basis is None:
        ref_basis = adapted_diagonalize(cov)
    disc = discrepancies(cov, cov2, lambdas, ref_basis)
    worst_key = max(disc, key=lambda key: abs(disc[key])) if disc else None
    worst = abs(disc[worst_key]) if disc else 0.0
    affine = worst <= decision_tol
    return AffineReport(
        verdict="affine" if affine else "not_affine",
        method="numeric",
        max_discrepancy=float(worst),
        diff_rank=difference_rank(cov, cov2),
        commuting=is_commuting(cov, cov2),
        witness_monomial=None if affine else worst_key[1],
        witness_lambda=None if affine else float(worst_key[0]),
        witness_value=None if affine else complex(disc[worst_key]),
    )


def per_lambda_max(cov, cov2, lambdas, ref_basis=None):
    if ref_basis is None:
        ref_basis = adapted_diagonalize(cov)
    disc = discrepancies(cov, cov2, lambdas, ref_basis)
    return [max(abs(v) for (lam, _), v in disc.items() if lam == l) for l in lambdas]


def decide(cov, cov2):
    """Analytic decision for commuting pairs, numeric sweep otherwise."""
    if is_commuting(cov, cov2):
        return decide_commuting(cov, cov2)
    return numeric_test(cov, cov2)


def symmetrized_form(cov):
    b = gamma_form_matrix(cov)
    return b + b.T


def necessary_check(cov, cov2, tol=NECESSARY_TOL):
    """``(S xi, Gamma xi) == (S2 xi, Gamma xi)`` for all ``xi``, by polarization."""
    _same_space(cov, cov2)
    res = max_abs(symmetrized_form(cov) - symmetrized_form(cov2))
    return res <= tol, res


# --- samplers ---------------------------------------------------------------

def _scale(rng):
    return float(rng.uniform(0.1, 0.95))


def _seed(rng):
    return int(rng.integers(2 ** 63))


def random_frame(k, gamma, rng):
    return adapted_diagonalize(random_covariance(k, gamma, 0.9, _seed(rng)))


def commuting_pair(k, gamma, rng, differ=None):
    """Two operators diagonal in one random adapted frame.

    ``differ`` fixes how many alphas are redrawn for the second operator;
    by default a random count in ``1..n``.
    """
    frame = random_frame(k, gamma, rng)
    n = frame.n
    a1 = rng.uniform(0.0, 1.0, n)
    a2 = a1.copy()
    if n:
        d = int(rng.integers(1, n + 1)) if differ is None else differ
        idx = rng.choice(n, size=d, replace=False)
        a2[idx] = rng.uniform(0.0, 1.0, d)
    return covariance_from_basis(frame, a1), covariance_from_basis(frame, a2)


def rank2_perturbation(cov, rng, max_halvings=60):
    """``S + t (v v^H - Gv Gv^H)`` with ``v`` orthogonal to ``Gamma v``, shrunk to stay valid."""
    k, gamma = cov.k, cov.gamma
    real = gamma_real_basis(np.eye(k, dtype=complex), gamma)
    q, _ = np.linalg.qr(rng.standard_normal((k, 2)))
    u1, u2 = real @ q[:, 0], real @ q[:, 1]
    v = (u1 + 1j * u2) / np.sqrt(2)
    gv = gamma.apply(v)
    bump = np.outer(v, np.conj(v)) - np.outer(gv, np.conj(gv))
    t = float(rng.uniform(0.05, 0.5))
    for _ in range(max_halvings):
        s2 = cov.S + t * bump
        w = np.linalg.eigvalsh(0.5 * (s2 + adjoint(s2)))
        if w[0] >= 0 and w[-1] <= 1:
            return validate(s2, gamma)
        t *= 0.5
    return cov


def sample_pair(mode, k, gamma, rng):
    if mode == "random":
        return (
            random_covariance(k, gamma, _scale(rng), _seed(rng)),
            random_covariance(k, gamma, _scale(rng), _seed(rng)),
        )
    if mode == "commuting":
        return commuting_pair(k, gamma, rng)
    if mode == "rank2-perturbation":
        base = random_covariance(k, gamma, _scale(rng), _seed(rng))
        return base, rank2_perturbation(base, rng)
    raise ValidationError(f"unknown mode {mode!r}")


def asymmetric_form_pair(k, gamma, seed, size=0.05):
    """Raw matrices ``(S, S + size * P)`` whose symmetrized Gamma-forms differ.

    ``P`` is a Hermitian bump with a nonzero Gamma-even part, the only way to
    move ``G^H S + (G^H S)^T``.  The second matrix is returned unvalidated.
    """
    rng = np.random.default_rng(seed)
    cov = random_covariance(k, gamma, 0.5, _seed(rng))
    h = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    h = 0.5 * (h + adjoint(h))
    even = 0.5 * (h + gamma.conjugate(h))
    return cov.S, cov.S + size * even / np.linalg.norm(even, 2)


# --- conjecture explorer ----------------------------------------------------

def _trial(args):
    k, g, seed, trial, mode_idx, lambdas = args
    gamma = Involution(g)
    mode = MODES[mode_idx]
    rng = np.random.default_rng(np.random.SeedSequence([seed, trial, mode_idx]))
    cov, cov2 = sample_pair(mode, k, gamma, rng)
    rep = numeric_test(cov, cov2, lambdas)
    rank = difference_rank(cov, cov2)
    per_lam = per_lambda_max(cov, cov2, lambdas)
    return {
        "trial": trial,
        "mode": mode,
        "verdict": rep.verdict,
        "rank": rank,
        "max_discrepancy": rep.max_discrepancy,
        "per_lambda": per_lam,
        "commuting": rep.commuting,
        "S": cov.S,
        "S2": cov2.S,
    }


def explore_conjecture(k, gamma, trials=100, seed=0, modes=MODES, lambdas=None,
                       out_dir=None, workers=1, decision_tol=DECISION_TOL):
    """Sample pairs, decide them numerically, and tally ``(verdict, rank)``.

    Flags a COUNTEREXAMPLE for an affine pair with ``S != S2`` whose
    difference rank is not 2, and a VIOLATION for any difference of rank 1.
    """
    if k > MAX_NUMERIC_DIM:
        raise ResourceError(f"k = {k} exceeds the explorer cap {MAX_NUMERIC_DIM}")
    modes = tuple(modes)
    for m in modes:
        if m not in MODES:
            raise ValidationError(f"unknown mode {m!r}")
    lambdas = default_lambdas(k) if lambdas is None else list(lambdas)
    jobs = [
        (k, gamma.G, seed, t, MODES.index(m), lambdas)
        for t in range(trials)
        for m in modes
    ]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_trial, jobs, chunksize=8))
    else:
        results = [_trial(j) for j in jobs]

    hist = Counter()
    counterexamples, violations = [], []
    one_lambda_insufficient = 0
    for r in results:
        hist[(r["mode"], r["verdict"], r["rank"])] += 1
        if r["verdict"] == "not_affine" and min(r["per_lambda"]) <= decision_tol:
            one_lambda_insufficient += 1
        entry = {
            "trial": r["trial"],
            "mode": r["mode"],
            "verdict": r["verdict"],
            "rank": r["rank"],
            "max_discrepancy": r["max_discrepancy"],
            "per_lambda": r["per_lambda"],
        }
        if r["rank"] == 1:
            violations.append(entry)
        if r["verdict"] == "affine" and r["rank"] not in (0, 2):
            if out_dir is not None:
                os.makedirs(out_dir, exist_ok=True)
                stem = os.path.join(out_dir, f"counterexample_{r['mode']}_{r['trial']}")
                files = []
                for tag in ("S", "S2"):
                    path = f"{stem}_{tag}.json"
                    with open(path, "w") as fh:
                        json.dump(matrix_to_json(r[tag]), fh)
                    files.append(path)
                entry["files"] = files
            counterexamples.append(entry)

    histogram = [
        {"mode": m, "verdict": v, "rank": rk, "count": c}
        for (m, v, rk), c in sorted(hist.items())
    ]
    return {
        "schema": "1",
        "k": k,
        "seed": seed,
        "trials": trials,
        "modes": list(modes),
        "lambdas": lambdas,
        "histogram": histogram,
        "counterexamples": counterexamples,
        "violations": violations,
        "one_lambda_insufficient": one_lambda_insufficient,
        "flags": (["COUNTEREXAMPLE"] if counterexamples else [])
        + (["VIOLATION"] if violations else []),
    }
