"""Type-A model shape operators and the pointwise identities they satisfy.

A type-A hypersurface is a tube of radius r around a totally geodesic
G2(C^{m+1}). Its shape operator has the constant principal curvatures

    alpha = sqrt(8) cot(sqrt(8) r)   on span{xi}
    beta  = sqrt(2) cot(sqrt(2) r)   on span{xi_2, xi_3}
    lambda = -sqrt(2) tan(sqrt(2) r) on {X in H : JX = J_1 X}
    mu = 0                           on {X in H : JX = -J_1 X}

for 0 < r < pi/sqrt(8).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ambient import build_ambient
from .errors import DegenerateEigenspace, HypothesisViolated, RadiusOutOfRange
from .hypersurface import HypersurfacePoint, induce
from .numeric import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    cluster,
    op_norm,
    subspace_image_contained,
    sym_eig,
)

SQRT2 = math.sqrt(2.0)
SQRT8 = math.sqrt(8.0)
R_MAX = math.pi / SQRT8
R_THREE = math.pi / (2.0 * SQRT8)
DISTINCT_TOL = 1e-6


@dataclass(frozen=True)
class SpectrumA:
    r: float
    alpha: float
    beta: float
    lambda_: float
    mu: float
    distinct_count: int

    @property
    def three_distinct(self) -> bool:
        return self.distinct_count == 3

    def values(self) -> tuple[float, float, float, float]:
        return self.alpha, self.beta, self.lambda_, self.mu

    def to_json(self) -> dict:
        return {
            "r": self.r, "alpha": self.alpha, "beta": self.beta,
            "lambda": self.lambda_, "mu": self.mu,
            "distinct_count": self.distinct_count,
        }


def spectrum_type_a(r: float, distinct_tol: float = DISTINCT_TOL) -> SpectrumA:
    """Closed-form principal curvatures of the tube of radius ``r``.

    Values closer than ``distinct_tol`` count as one principal curvature.
    """
    r = float(r)
    if not (0.0 < r < R_MAX):
        raise RadiusOutOfRange(f"r = {r!r} outside (0, pi/sqrt(8) = {R_MAX:.7f})")
    alpha = SQRT8 / math.tan(SQRT8 * r)
    beta = SQRT2 / math.tan(SQRT2 * r)
    lam = -SQRT2 * math.tan(SQRT2 * r)
    vals = np.sort([alpha, beta, lam, 0.0])
    distinct = len(cluster(vals, distinct_tol))
    return SpectrumA(r, alpha, beta, lam, 0.0, distinct)


@dataclass(frozen=True)
class TypeAModel:
    hp: HypersurfacePoint
    A: np.ndarray
    spectrum: SpectrumA
    T_alpha: Subspace
    T_beta: Subspace
    T_lambda: Subspace
    T_mu: Subspace

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return self.T_alpha.dim, self.T_beta.dim, self.T_lambda.dim, self.T_mu.dim

    @property
    def betas(self) -> np.ndarray:
        return betas_of(self.hp, self.A)


def betas_of(hp: HypersurfacePoint, A: np.ndarray) -> np.ndarray:
    """Rayleigh quotients g(A xi_a, xi_a), a = 1, 2, 3."""
    return np.array([hp.xi_(a) @ A @ hp.xi_(a) for a in (1, 2, 3)])


def singular_normal(m: int) -> np.ndarray:
    """N = e1 (x) f1; it satisfies J_1 N = J N in the model triple."""
    N = np.zeros(4 * m)
    N[0] = 1.0
    return N


def build_type_a(m: int, r: float, tol: Tolerance = DEFAULT_TOL) -> TypeAModel:
    spec = spectrum_type_a(r)
    amb = build_ambient(m)
    hp = induce(amb, singular_normal(m))
    if np.linalg.norm(hp.xi - hp.xi_(1)) > tol.identity_tol:
        raise DegenerateEigenspace("model normal does not satisfy J_1 N = J N")

    T_alpha = Subspace.span(hp.xi[:, None])
    T_beta = Subspace.span(np.column_stack([hp.xi_(2), hp.xi_(3)]))
    # JX = +-J_1X on H  <=>  JJ_1X = -+X; JJ_1 is a symmetric involution
    HB = hp.B @ hp.H.basis
    involution = HB.T @ (amb.J @ amb.Ja(1)) @ HB
    w, V = sym_eig(involution, tol)
    if np.max(np.abs(np.abs(w) - 1.0), initial=0.0) > tol.identity_tol:
        raise DegenerateEigenspace("JJ_1 restricted to H is not an involution")
    T_lambda = Subspace(hp.H.basis @ V.basis[:, w < 0])
    T_mu = Subspace(hp.H.basis @ V.basis[:, w > 0])

    expected = (1, 2, 2 * m - 2, 2 * m - 2)
    got = (T_alpha.dim, T_beta.dim, T_lambda.dim, T_mu.dim)
    if got != expected:
        raise DegenerateEigenspace(f"eigenspace dimensions {got}, expected {expected}")

    A = spec.alpha * T_alpha.projector() + spec.beta * T_beta.projector()
    A = A + spec.lambda_ * T_lambda.projector() + spec.mu * T_mu.projector()
    A = 0.5 * (A + A.T)
    A.setflags(write=False)
    model = TypeAModel(hp, A, spec, T_alpha, T_beta, T_lambda, T_mu)

    scale = max(1.0, abs(spec.alpha), abs(spec.beta), abs(spec.lambda_))
    if np.linalg.norm(A @ hp.xi - spec.alpha * hp.xi) > tol.identity_tol * scale:
        raise DegenerateEigenspace("A xi != alpha xi")
    gram = np.column_stack([S.basis for S in (T_alpha, T_beta, T_lambda, T_mu)])
    if np.max(np.abs(gram.T @ gram - np.eye(hp.dim))) > tol.identity_tol:
        raise DegenerateEigenspace("eigenspaces are not mutually orthogonal")
    return model


# ---------------------------------------------------------------------------
# hypotheses shared by the identity checks and the Hopf certifier


def hypothesis_leaks(hp: HypersurfacePoint, A: np.ndarray, tol: Tolerance = DEFAULT_TOL):
    """(A D in D leak, A D^perp in D^perp leak, distance of xi from D^perp)."""
    A = np.asarray(A, dtype=float)
    _, d_leak = subspace_image_contained(A, hp.D, hp.D, tol)
    _, dp_leak = subspace_image_contained(A, hp.Dperp, hp.Dperp, tol)
    return d_leak, dp_leak, hp.xi_in_dperp_gap


def principal_leaks(hp: HypersurfacePoint, A: np.ndarray, betas) -> np.ndarray:
    return np.array([
        np.linalg.norm(A @ hp.xi_(a) - betas[a - 1] * hp.xi_(a)) for a in (1, 2, 3)
    ])


def _require(hp, A, betas, tol):
    d_leak, _, gap = hypothesis_leaks(hp, A, tol)
    if d_leak > tol.identity_tol:
        raise HypothesisViolated("A D in D", d_leak)
    if gap > tol.identity_tol:
        raise HypothesisViolated("xi in D^perp", gap)
    if betas is not None:
        p = float(np.max(principal_leaks(hp, A, betas)))
        if p > tol.identity_tol:
            raise HypothesisViolated("A xi_a = beta_a xi_a", p)


# ---------------------------------------------------------------------------
# The Codazzi identity on D and the phi_a A phi_a commutator


def d_identity_operator(hp: HypersurfacePoint, A: np.ndarray, beta_a: float, a: int) -> np.ndarray:
    """2 eta(xi_a) phi + 2 phi_a + beta_a (phi_a A + A phi_a) - 2 A phi_a A."""
    fa = hp.phi_(a)
    return 2.0 * hp.eta_xi(a) * hp.phi + 2.0 * fa + beta_a * (fa @ A + A @ fa) - 2.0 * A @ fa @ A


def d_identity_residuals(hp: HypersurfacePoint, A: np.ndarray, betas) -> np.ndarray:
    """Per a, the largest norm of the d_identity operator applied to a basis vector of D."""
    A = np.asarray(A, dtype=float)
    out = np.zeros(3)
    if hp.D.dim == 0:
        return out
    for a in (1, 2, 3):
        images = d_identity_operator(hp, A, betas[a - 1], a) @ hp.D.basis
        out[a - 1] = np.max(np.linalg.norm(images, axis=0))
    return out


def verify_d_identity(hp: HypersurfacePoint, A, betas, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    _require(hp, A, betas, tol)
    return d_identity_residuals(hp, A, betas)


def commutator_residuals(hp: HypersurfacePoint, A: np.ndarray) -> np.ndarray:
    """Per a, |(phi_a A phi_a A - A phi_a A phi_a) P_D|."""
    A = np.asarray(A, dtype=float)
    out = np.zeros(3)
    for a in (1, 2, 3):
        fa = hp.phi_(a)
        C = fa @ A @ fa @ A - A @ fa @ A @ fa
        out[a - 1] = op_norm(C @ hp.D.basis)
    return out


def verify_commutator(hp: HypersurfacePoint, A, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    _require(hp, A, None, tol)
    return commutator_residuals(hp, A)


# ---------------------------------------------------------------------------
# The q-form identity: the beta-derivative-free relation and its connection forms


def _qform_fixed(hp: HypersurfacePoint, A: np.ndarray, beta_a: float, a: int) -> np.ndarray:
    """q-independent part of LHS - RHS as a matrix M[i, j] = form(e_i, e_j)."""
    phi, xi = hp.phi, hp.xi
    fa = hp.phi_(a)
    x0, x1, x2 = hp.xi_(a), hp.xi_(a + 1), hp.xi_(a + 2)
    # covectors X -> eta_b(phi X)
    p0, p1, p2 = phi.T @ x0, phi.T @ x1, phi.T @ x2
    lhs = (2.0 * hp.eta_xi(a) * phi + 2.0 * fa + beta_a * (fa @ A + A @ fa) - 2.0 * A @ fa @ A).T

    def wedge(u, v):
        return np.outer(u, v) - np.outer(v, u)

    w = 2.0 * hp.eta_xi(a) * p0 - hp.eta_xi(a + 1) * p1 - hp.eta_xi(a + 2) * p2
    rhs = 2.0 * wedge(xi, p0) + 2.0 * wedge(x1, x2) + 2.0 * wedge(p1, p2) + 2.0 * wedge(w, x0)
    return lhs - rhs


def _qform_q_part(hp: HypersurfacePoint, betas, q: np.ndarray, a: int, coef_floor: float) -> np.ndarray:
    """q-dependent part of the right-hand side; ``q`` has shape (3, n)."""
    x0, x1, x2 = hp.xi_(a), hp.xi_(a + 1), hp.xi_(a + 2)
    qa1, qa2 = q[a % 3], q[(a + 1) % 3]  # q_(a+1), q_(a+2)
    c1 = betas[a - 1] - betas[a % 3]  # beta_a - beta_(a+1)
    c2 = betas[a - 1] - betas[(a + 1) % 3]  # beta_a - beta_(a+2)
    c1 = 0.0 if abs(c1) <= coef_floor else c1
    c2 = 0.0 if abs(c2) <= coef_floor else c2

    def wedge(u, v):
        return np.outer(u, v) - np.outer(v, u)

    return (
        c1 * (qa2 @ x0) * wedge(x0, x1)
        + c2 * (qa1 @ x0) * wedge(x2, x0)
        - c1 * wedge(qa2, x1)
        + c2 * wedge(qa1, x2)
    )


def qform_matrix(hp: HypersurfacePoint, A, betas, q, a: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    q = np.asarray(q, dtype=float).reshape(3, hp.dim)
    floor = tol.abs_gap(betas)
    return _qform_fixed(hp, np.asarray(A, dtype=float), betas[a - 1], a) - _qform_q_part(hp, betas, q, a, floor)


def qform_residual(hp: HypersurfacePoint, A, betas, q, a: int, tol: Tolerance = DEFAULT_TOL) -> float:
    """Largest |LHS - RHS| of the identity over pairs of basis vectors of T."""
    p = float(np.max(principal_leaks(hp, np.asarray(A, dtype=float), betas)))
    if p > tol.identity_tol:
        raise HypothesisViolated("A xi_a = beta_a xi_a", p)
    return float(np.max(np.abs(qform_matrix(hp, A, betas, q, a, tol))))


def fit_qforms(hp: HypersurfacePoint, A, betas, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Least-squares connection forms q_1, q_2, q_3 (rows of the result).

    The identity is linear in q, so the three values of a are stacked into
    one system. Components with no constraint come back as zero.
    """
    A = np.asarray(A, dtype=float)
    p = float(np.max(principal_leaks(hp, A, betas)))
    if p > tol.identity_tol:
        raise HypothesisViolated("A xi_a = beta_a xi_a", p)
    n = hp.dim
    floor = tol.abs_gap(betas)
    const = np.concatenate([_qform_fixed(hp, A, betas[a - 1], a).ravel() for a in (1, 2, 3)])
    cols = []
    unit = np.zeros(3 * n)
    for k in range(3 * n):
        unit[k] = 1.0
        q = unit.reshape(3, n)
        cols.append(np.concatenate([_qform_q_part(hp, betas, q, a, floor).ravel() for a in (1, 2, 3)]))
        unit[k] = 0.0
    L = np.column_stack(cols)
    sol, *_ = np.linalg.lstsq(L, const, rcond=None)
    q = sol.reshape(3, n)
    resid = max(qform_residual(hp, A, betas, q, a, tol) for a in (1, 2, 3))
    return q, resid
