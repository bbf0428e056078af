"""Dense complex matrix helpers.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. This module
adds the tolerance policy, a deterministic Hermitian eigendecomposition and
the JSON matrix file format used by every other module.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


def tol_for(k):
    """Default Hermiticity / eigen tolerance for dimension ``k``."""
    return 1e-9 * max(int(k), 1)


def as_matrix(m):
    a = np.array(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValidationError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix contains NaN or Inf entries")
    return a


def adjoint(m):
    return np.conj(np.transpose(m))


def kron(a, b):
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(factors):
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def trace(m):
    return complex(np.trace(m))


def max_abs(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def hermitian_residual(m):
    return max_abs(m - adjoint(m))


def commutator_norm(a, b):
    return max_abs(a @ b - b @ a)


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def groups(self, tol):
        """Index blocks of eigenvalues that lie within ``tol`` of their neighbour."""
        out = []
        start = 0
        w = self.eigenvalues
        for j in range(1, len(w) + 1):
            if j == len(w) or w[j] - w[j - 1] > tol:
                out.append(list(range(start, j)))
                start = j
        return out


def fix_phase(v):
    """Rotate ``v`` so its largest-magnitude entry is real and positive."""
    j = int(np.argmax(np.abs(v)))
    if abs(v[j]) == 0:
        return v
    return v * (abs(v[j]) / v[j])


def herm_eig(m, herm_tol=None):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises ValidationError for non-square input or when the asymmetry
    ``max|M - M^H|`` exceeds ``herm_tol`` (default ``1e-9 * k``).
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValidationError(f"matrix is not square: {m.shape}")
    k = m.shape[0]
    tol = tol_for(k) if herm_tol is None else herm_tol
    asym = hermitian_residual(m)
    if asym > tol:
        raise ValidationError(
            f"matrix is not Hermitian: max asymmetry {asym:.3e} > {tol:.1e}",
            {"hermitian": asym},
        )
    w, v = np.linalg.eigh(0.5 * (m + adjoint(m)))
    v = np.column_stack([fix_phase(v[:, j]) for j in range(k)])
    return EigenDecomposition(w, v)


def random_hermitian(k, rng):
    a = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    return 0.5 * (a + adjoint(a))


# JSON matrix file format: {"rows", "cols", "entries": [[re, im], ...]} row-major.

def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def matrix_from_json(obj):
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1:
        raise ValidationError("rows and cols must be >= 1")
    if len(entries) != rows * cols:
        raise ValidationError(
            f"entry count {len(entries)} does not match rows*cols = {rows * cols}"
        )
    vals = []
    for pos, e in enumerate(entries):
        try:
            re, im = (float(x) for x in e)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"entry {pos} is not a [re, im] pair") from exc
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ValidationError(f"entry {pos} is not finite")
        vals.append(complex(re, im))
    return np.array(vals, dtype=complex).reshape(rows, cols)


def load_matrix(path):
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def dump_matrix(m, path):
    with open(path, "w") as fh:
        json.dump(matrix_to_json(m), fh)
