"""Dense linear-algebra substrate.

Everything here is a pure function of its inputs. Eigenvectors are
sign-normalized (first significant coordinate positive) so that repeated
calls give bitwise-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotCommuting, NotSymmetric


@dataclass(frozen=True)
class Tolerance:
    """Residual threshold plus relative eigenvalue clustering gap.

    ``eig_gap`` is relative: the absolute clustering threshold for a
    spectrum is ``eig_gap * spectral_radius``.
    """

    identity_tol: float = 1e-10
    eig_gap: float = 1e-8

    def __post_init__(self):
        if not (self.identity_tol > 0 and self.eig_gap > 0):
            raise ValueError("tolerances must be strictly positive")
        if not (np.isfinite(self.identity_tol) and np.isfinite(self.eig_gap)):
            raise ValueError("tolerances must be finite")

    def abs_gap(self, values) -> float:
        values = np.asarray(values, dtype=float)
        radius = float(np.max(np.abs(values))) if values.size else 0.0
        return self.eig_gap * radius

    @property
    def epsilon_window(self) -> float:
        return max(self.eig_gap, 100.0 * self.identity_tol)


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Subspace:
    """Orthonormal basis stored as the columns of an ``(n, k)`` array.

    ``k = 0`` is a legal, empty subspace.
    """

    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError("basis must be a 2-d array of column vectors")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def empty(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0)))

    @classmethod
    def span(cls, vectors, rank_tol: float = 1e-8) -> "Subspace":
        """Orthonormalize a spanning list (given as columns), dropping dependents."""
        return cls(orthonormalize(vectors, rank_tol))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def project(self, v: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.T @ v)

    def orthonormality_error(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.basis.T @ self.basis - np.eye(self.dim))))


def _sign_normalize(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so that the first significant coordinate is positive."""
    out = np.array(vectors, dtype=float, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        scale = np.max(np.abs(col)) if col.size else 0.0
        if scale == 0.0:
            continue
        idx = int(np.argmax(np.abs(col) > 1e-8 * scale))
        if col[idx] < 0:
            out[:, j] = -col
    return out


def is_symmetric(A: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    A = np.asarray(A, dtype=float)
    return np.linalg.norm(A - A.T) <= tol.identity_tol * np.linalg.norm(A)


def _check_square(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def sym_eig(A: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, Subspace]:
    """Ascending eigenvalues and an orthonormal eigenbasis of a symmetric operator."""
    A = _check_square(A)
    if not is_symmetric(A, tol):
        raise NotSymmetric(
            f"|A - A^T| = {np.linalg.norm(A - A.T):.3e} exceeds "
            f"{tol.identity_tol:.1e} * |A|"
        )
    if A.shape[0] == 0:
        return np.zeros(0), Subspace.empty(0)
    w, V = np.linalg.eigh(0.5 * (A + A.T))
    return w, Subspace(_sign_normalize(V))


def cluster(values: np.ndarray, gap: float) -> list[np.ndarray]:
    """Split sorted values into index groups; consecutive values closer than
    ``gap`` share a group (transitive closure)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    groups = [[0]]
    for i in range(1, values.size):
        if values[i] - values[i - 1] <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return [np.array(g) for g in groups]


def simultaneous_diag(
    A: np.ndarray, B: np.ndarray, tol: Tolerance = DEFAULT_TOL
) -> tuple[Subspace, np.ndarray, np.ndarray]:
    """Common orthonormal eigenbasis of two commuting symmetric operators.

    Diagonalizes ``A``, groups its eigenvalues with the clustering gap and
    diagonalizes ``B`` inside each group. Returns the basis together with the
    ``A`` and ``B`` eigenvalue of every basis vector.
    """
    A = _check_square(A)
    B = _check_square(B)
    if A.shape != B.shape:
        raise ValueError("A and B must have the same shape")
    comm = np.linalg.norm(A @ B - B @ A)
    if comm > tol.identity_tol * np.linalg.norm(A) * np.linalg.norm(B):
        raise NotCommuting(f"|AB - BA| = {comm:.3e}")

    w, V = sym_eig(A, tol)
    n = A.shape[0]
    vecs = np.zeros((n, n))
    a_vals = np.zeros(n)
    b_vals = np.zeros(n)
    col = 0
    for group in cluster(w, tol.abs_gap(w)):
        Vg = V.basis[:, group]
        Bg = Vg.T @ B @ Vg
        bw, W = sym_eig(0.5 * (Bg + Bg.T), tol)
        block = Vg @ W.basis
        k = len(group)
        vecs[:, col:col + k] = block
        a_vals[col:col + k] = np.einsum("ij,ij->j", block, A @ block)
        b_vals[col:col + k] = bw
        col += k
    return Subspace(_sign_normalize(vecs)), a_vals, b_vals


def orthonormalize(vectors, rank_tol: float = 1e-8) -> np.ndarray:
    """Modified Gram-Schmidt (two passes) over the columns, in order.

    Columns whose residual norm falls to ``rank_tol`` or below are dropped, so
    the number of returned columns is the numerical rank.
    """
    V = np.asarray(vectors, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    kept: list[np.ndarray] = []
    for j in range(V.shape[1]):
        v = V[:, j].copy()
        for _ in range(2):
            for q in kept:
                v -= (q @ v) * q
        nrm = np.linalg.norm(v)
        if nrm > rank_tol:
            kept.append(v / nrm)
    if not kept:
        return np.zeros((V.shape[0], 0))
    return np.column_stack(kept)


def orthocomplement(S: Subspace) -> Subspace:
    """Orthonormal basis of the orthogonal complement of ``S`` in its ambient space."""
    n, k = S.ambient_dim, S.dim
    if k == 0:
        return Subspace(np.eye(n))
    if k >= n:
        return Subspace.empty(n)
    Q, _ = np.linalg.qr(S.basis, mode="complete")
    C = Q[:, k:]
    # Re-project once so the complement is orthogonal to S at machine precision.
    C = C - S.basis @ (S.basis.T @ C)
    C, _ = np.linalg.qr(C)
    return Subspace(_sign_normalize(C))


def subspace_image_contained(
    A: np.ndarray, S: Subspace, T: Subspace, tol: Tolerance = DEFAULT_TOL
) -> tuple[bool, float]:
    """Whether ``A`` maps ``S`` into ``T``; also the largest out-of-``T`` component."""
    A = _check_square(A)
    if not (A.shape[0] == S.ambient_dim == T.ambient_dim):
        raise ValueError("A, S and T must share the ambient dimension")
    if S.dim == 0:
        return True, 0.0
    images = A @ S.basis
    leaks = images - T.basis @ (T.basis.T @ images)
    max_leak = float(np.max(np.linalg.norm(leaks, axis=0)))
    return max_leak <= tol.identity_tol, max_leak


def op_norm(M: np.ndarray) -> float:
    """Spectral norm, 0 for empty operators."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def compress(M: np.ndarray, S: Subspace) -> np.ndarray:
    """Matrix of ``P_S M`` restricted to ``S`` in the basis of ``S``."""
    return S.basis.T @ M @ S.basis
