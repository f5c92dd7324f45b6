"""Dense real linear-algebra kernel.

Kronecker products, column-major vectorization, spectral radii of
nonsymmetric matrices, symmetric eigendecomposition, SVD null spaces and
pivot-checked linear solves. Everything is a pure function of ndarrays;
all routines reject NaN/Inf input.

Eigenvalues of nonsymmetric matrices come from LAPACK's Hessenberg
reduction + implicitly shifted QR (real Schur form); solves are LU with
partial pivoting. Dense only: problem sizes here are s*n^2 at desk scale.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NotSymmetric, Singular

__all__ = [
    "kron",
    "vec",
    "unvec",
    "spectral_radius",
    "spectral_norm_sq",
    "sym_spectral_norm",
    "sym_eig",
    "solve",
    "null_space_basis",
    "DEFAULT_EIG_TOL",
]

DEFAULT_EIG_TOL = 1e-9


def _as_matrix(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product: block (i, j) of the result is a[i, j] * b."""
    return np.kron(_as_matrix(a, "a"), _as_matrix(b, "b"))


def vec(m) -> np.ndarray:
    """Stack the columns of m into a 1-d vector (column-major).

    Satisfies vec(A B C) = kron(C.T, A) @ vec(B).
    """
    return _as_matrix(m).flatten(order="F")


def unvec(v, rows: int, cols: int) -> np.ndarray:
    """Inverse of vec: reshape a length rows*cols vector column-major."""
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.size != rows * cols:
        raise ValueError(f"cannot unvec length {a.size} into {rows}x{cols}")
    return a.reshape((rows, cols), order="F")


def spectral_radius(m, tol: float = DEFAULT_EIG_TOL) -> float:
    """Largest |eigenvalue| of a square real matrix.

    Uses the QR eigensolver (Hessenberg + implicitly shifted QR); for
    matrices at this library's scale the achieved eigenvalue error is
    machine precision, well inside tol*(1+||m||) for any tol >= 1e-12.
    Raises NoConvergence if the QR iteration fails to deflate.
    """
    a = _as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    try:
        w = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - pathological
        raise NoConvergence(f"eigenvalue iteration failed: {exc}") from exc
    return float(np.max(np.abs(w))) if w.size else 0.0


def spectral_norm_sq(m) -> float:
    """Squared L2-induced norm: lambda_max(m.T m) = sigma_max(m)^2."""
    a = _as_matrix(m)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0] ** 2)


def sym_spectral_norm(m) -> float:
    """L2 norm of a symmetric matrix: max |eigenvalue| via eigvalsh.

    Cheaper than the SVD route; used on covariance blocks in hot loops.
    """
    w = np.linalg.eigvalsh(np.asarray(m, dtype=float))
    return float(max(abs(w[0]), abs(w[-1])))


def sym_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending.

    Raises NotSymmetric if the relative asymmetry exceeds 1e-12.
    Reconstruction V diag(w) V.T matches m to 1e-10*(1+||m||).
    """
    a = _as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    scale = 1.0 + np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > 1e-12 * scale:
        raise NotSymmetric(
            f"asymmetry {np.linalg.norm(a - a.T):.3e} exceeds 1e-12 relative"
        )
    w, v = np.linalg.eigh((a + a.T) / 2.0)
    return w, v


def solve(a, b) -> np.ndarray:
    """Solve a @ x = b by LU with partial pivoting.

    Raises Singular when any pivot magnitude falls below 1e-12*||a||
    (Frobenius norm). b may be a vector or a matrix of right-hand sides.
    """
    am = _as_matrix(a, "a")
    if am.shape[0] != am.shape[1]:
        raise ValueError(f"coefficient matrix must be square, got {am.shape}")
    bv = np.asarray(b, dtype=float)
    if not np.all(np.isfinite(bv)):
        raise ValueError("right-hand side contains NaN or Inf entries")
    with warnings.catch_warnings():
        # the pivot check below raises a typed Singular instead
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(am, check_finite=False)
    pivots = np.abs(np.diag(lu))
    floor = 1e-12 * np.linalg.norm(am)
    if am.shape[0] and pivots.min() <= floor:
        raise Singular(
            f"pivot {pivots.min():.3e} below tolerance {floor:.3e}"
        )
    return scipy.linalg.lu_solve((lu, piv), bv, check_finite=False)


def null_space_basis(m, rank_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the null space {x : m x = 0}, as columns.

    Rank is decided by singular values above rank_tol * sigma_max, with
    rank_tol defaulting to max(rows, cols) * machine epsilon. Returns an
    n x 0 matrix when m has full column rank.
    """
    a = _as_matrix(m)
    if rank_tol is None:
        rank_tol = max(a.shape) * np.finfo(float).eps
    _, sv, vt = np.linalg.svd(a)
    if sv.size == 0 or sv[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(sv > rank_tol * sv[0]))
    return vt[rank:].T.copy()
