"""Decision procedure: A D in D and xi in D^perp imply that xi is principal.

:func:`certify_hopf` runs the argument step by step on concrete data and
records the residual of every step it reaches. The codazzi-derived identity
(``d_identity``) cannot be evaluated from one tangent space, so it is checked as an
input condition; genuine hypersurface data always satisfies it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ambient import rotate_triple
from .errors import HypothesisViolated, NotCommuting, NotSymmetric
from .hypersurface import HypersurfacePoint, induce, theta_eigenspaces
from .numeric import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    cluster,
    compress,
    orthonormalize,
    simultaneous_diag,
    subspace_image_contained,
    sym_eig,
)
from .type_a import (
    d_identity_operator,
    d_identity_residuals,
    hypothesis_leaks,
    commutator_residuals,
    principal_leaks,
)

CERTIFIED = "CERTIFIED"
HYPOTHESIS_FAILED = "HYPOTHESIS_FAILED"
STEP_FAILED = "STEP_FAILED"

STEPS = (
    "hypotheses",
    "principalize",
    "select_index",
    "d_identity",
    "commutator",
    "simultaneous_diag",
    "epsilon",
    "partition",
    "eta_vanish",
    "hopf",
)

SCHEMA = "g2lab/1"


@dataclass
class HypothesisReport:
    ad_in_d_leak: float
    adperp_in_dperp_leak: float
    xi_in_dperp_gap: float
    tol: float
    consistent: bool = True

    @property
    def pass_(self) -> bool:
        return max(self.ad_in_d_leak, self.adperp_in_dperp_leak, self.xi_in_dperp_gap) <= self.tol

    def failing(self) -> list[str]:
        names = {
            "A D in D": self.ad_in_d_leak,
            "A D^perp in D^perp": self.adperp_in_dperp_leak,
            "xi in D^perp": self.xi_in_dperp_gap,
        }
        return [k for k, v in names.items() if not v <= self.tol]

    def to_json(self) -> dict:
        return {
            "ad_in_d_leak": self.ad_in_d_leak,
            "adperp_in_dperp_leak": self.adperp_in_dperp_leak,
            "xi_in_dperp_gap": self.xi_in_dperp_gap,
            "consistent": self.consistent,
            "pass": self.pass_,
        }


def check_hypotheses(hp: HypersurfacePoint, A, tol: Tolerance = DEFAULT_TOL) -> HypothesisReport:
    d_leak, dp_leak, gap = hypothesis_leaks(hp, A, tol)
    # both leaks are column/row maxima of the same block P_Dperp A P_D
    bound = math.sqrt(max(hp.D.dim, 1)) * d_leak
    consistent = dp_leak <= bound * (1 + 1e-9) + 1e-14
    return HypothesisReport(d_leak, dp_leak, gap, tol.identity_tol, consistent)


def principalize_triple(
    hp: HypersurfacePoint, A, tol: Tolerance = DEFAULT_TOL
) -> tuple[HypersurfacePoint, np.ndarray, np.ndarray]:
    """Rotate the canonical triple so that xi_1, xi_2, xi_3 are principal.

    Inside a repeated eigenvalue of A on D^perp the frame is turned so that
    xi has a nonzero component along at most one of the new xi_a.
    """
    A = np.asarray(A, dtype=float)
    report = check_hypotheses(hp, A, tol)
    if not report.pass_:
        raise HypothesisViolated(", ".join(report.failing()))
    Xi = hp.xi_a.T
    M = Xi.T @ A @ Xi
    w, V = sym_eig(0.5 * (M + M.T), tol)
    V = np.array(V.basis)
    c = Xi.T @ hp.xi
    for group in cluster(w, tol.abs_gap(w)):
        if len(group) < 2:
            continue
        Vg = V[:, group]
        proj = Vg.T @ c
        if np.linalg.norm(proj) <= tol.identity_tol:
            continue
        lead = Vg @ proj / np.linalg.norm(proj)
        V[:, group] = orthonormalize(np.column_stack([lead, Vg]))[:, : len(group)]
    if np.linalg.det(V) < 0:
        V[:, -1] = -V[:, -1]
    R = V.T
    hp2 = induce(rotate_triple(hp.ambient, R), hp.N)
    betas = np.array([hp2.xi_(a) @ A @ hp2.xi_(a) for a in (1, 2, 3)])
    return hp2, betas, R


@dataclass
class HopfCertificate:
    status: str
    failing_step: str | None = None
    reason: str | None = None
    rotation: np.ndarray | None = None
    betas: np.ndarray | None = None
    chosen_a: int | None = None
    eigenpairs: list[tuple[float, float]] = field(default_factory=list)
    epsilons: list[tuple[float, float]] = field(default_factory=list)
    eta_xi: np.ndarray | None = None
    alpha: float | None = None
    residual_hopf: float | None = None
    step_residuals: dict[str, float] = field(default_factory=dict)
    hypotheses: HypothesisReport | None = None

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def to_json(self) -> dict:
        def arr(x):
            return None if x is None else [float(v) for v in np.ravel(x)]

        return {
            "schema": SCHEMA,
            "status": self.status,
            "failing_step": self.failing_step,
            "reason": self.reason,
            "rotation": None if self.rotation is None else np.asarray(self.rotation).tolist(),
            "betas": arr(self.betas),
            "chosen_a": self.chosen_a,
            "eigenpairs": [[float(a), float(b)] for a, b in self.eigenpairs],
            "epsilons": [{"epsilon": float(e), "distance": float(d)} for e, d in self.epsilons],
            "eta_xi": arr(self.eta_xi),
            "alpha": self.alpha,
            "residual_hopf": self.residual_hopf,
            "step_residuals": {k: float(v) for k, v in self.step_residuals.items()},
            "hypotheses": None if self.hypotheses is None else self.hypotheses.to_json(),
        }


def _cyclic_shift(chosen: int) -> np.ndarray:
    """Rotation relabelling the triple so that index ``chosen`` becomes 1."""
    P = np.zeros((3, 3))
    for a in range(3):
        P[a, (chosen - 1 + a) % 3] = 1.0
    return P


def certify_hopf(hp: HypersurfacePoint, A, tol: Tolerance = DEFAULT_TOL) -> HopfCertificate:
    A = np.asarray(A, dtype=float)
    itol = tol.identity_tol
    cert = HopfCertificate(status=CERTIFIED)
    steps = cert.step_residuals

    def fail(step, reason, status=STEP_FAILED):
        cert.status = status
        cert.failing_step = step
        cert.reason = reason
        return cert

    if A.shape != (hp.dim, hp.dim):
        return fail("hypotheses", f"shape operator is {A.shape}, expected {hp.dim}x{hp.dim}",
                    HYPOTHESIS_FAILED)
    sym_err = float(np.linalg.norm(A - A.T))
    if sym_err > itol * max(1.0, float(np.linalg.norm(A))):
        return fail("hypotheses", f"shape operator not symmetric ({sym_err:.3e})", HYPOTHESIS_FAILED)

    # (1) A D in D, A D^perp in D^perp, xi in D^perp
    hyp = check_hypotheses(hp, A, tol)
    cert.hypotheses = hyp
    steps["hypotheses"] = max(hyp.ad_in_d_leak, hyp.adperp_in_dperp_leak, hyp.xi_in_dperp_gap)
    if not hyp.pass_:
        return fail("hypotheses", "violated: " + ", ".join(hyp.failing()), HYPOTHESIS_FAILED)

    # (2) make xi_1, xi_2, xi_3 principal
    hp1, betas, R = principalize_triple(hp, A, tol)
    steps["principalize"] = float(np.max(principal_leaks(hp1, A, betas)))
    cert.rotation, cert.betas = R, betas
    if steps["principalize"] > itol:
        return fail("principalize", "xi_a not principal after rotation")

    # (3) choose the index with the largest |eta(xi_a)| and move it to slot 1
    etas = np.array([hp1.eta_xi(a) for a in (1, 2, 3)])
    steps["select_index"] = abs(float(etas @ etas) - 1.0)
    chosen = int(np.argmax(np.abs(etas))) + 1
    cert.chosen_a = chosen
    if np.max(np.abs(etas)) <= 10.0 * itol:
        cert.eta_xi = etas
        return fail("select_index", "xi not in D^perp numerically")
    P = _cyclic_shift(chosen)
    hp2 = induce(rotate_triple(hp1.ambient, P), hp.N)
    betas = P @ betas
    cert.rotation, cert.betas = P @ R, betas
    cert.eta_xi = np.array([hp2.eta_xi(a) for a in (1, 2, 3)])
    if steps["select_index"] > itol:
        return fail("select_index", "eta(xi_a) do not form a unit vector")

    # (4) the codazzi-derived identity on D, checked as an input condition
    steps["d_identity"] = float(np.max(d_identity_residuals(hp2, A, betas)))
    if steps["d_identity"] > itol:
        return fail("d_identity", "d_identity identity fails on D")

    # (5) phi_a A phi_a commutes with A on D
    steps["commutator"] = float(np.max(commutator_residuals(hp2, A)))
    if steps["commutator"] > itol:
        return fail("commutator", "phi_a A phi_a A != A phi_a A phi_a on D")

    # (6) common eigenvectors of A and phi_1 A phi_1 on H
    H = hp2.H
    if H.dim == 0:
        return fail("simultaneous_diag", "H is empty")
    phi1 = hp2.phi_(1)
    try:
        common, lam, _ = simultaneous_diag(compress(A, H), compress(phi1 @ A @ phi1, H), tol)
    except (NotCommuting, NotSymmetric) as exc:
        steps["simultaneous_diag"] = math.inf
        return fail("simultaneous_diag", str(exc))
    X = H.basis @ common.basis
    pX = phi1 @ X
    mu = np.einsum("ij,ij->j", pX, A @ pX)
    eig_res = max(
        float(np.max(np.linalg.norm(A @ X - X * lam, axis=0))),
        float(np.max(np.linalg.norm(A @ pX - pX * mu, axis=0))),
    )
    steps["simultaneous_diag"] = eig_res
    cert.eigenpairs = [(float(a), float(b)) for a, b in zip(lam, mu)]
    if eig_res > itol:
        return fail("simultaneous_diag", "A phi_1 X_j is not mu_j phi_1 X_j")

    # (7) phi X_j + eps_j phi_1 X_j = 0 forces theta_1 X_j = eps_j X_j, eps_j = +-1
    eta1 = hp2.eta_xi(1)
    eps = (2.0 + betas[0] * (lam + mu) - 2.0 * lam * mu) / (2.0 * eta1)
    dist = np.minimum(np.abs(eps - 1.0), np.abs(eps + 1.0))
    cert.epsilons = [(float(e), float(d)) for e, d in zip(eps, dist)]
    theta_res = float(np.max(np.linalg.norm(hp2.theta_(1) @ X - X * eps, axis=0)))
    phi_res = float(np.max(np.linalg.norm(hp2.phi @ X + pX * eps, axis=0)))
    steps["epsilon"] = max(theta_res, phi_res)
    if np.max(dist) > tol.epsilon_window:
        return fail("epsilon", f"eps_j off +-1 by {np.max(dist):.3e}")
    if steps["epsilon"] > itol:
        return fail("epsilon", "theta_1 X_j != eps_j X_j")

    # (8) split H = H_1(+1) + H_1(-1); A preserves H_1(+1)
    plus = Subspace(X[:, eps > 0])
    minus = Subspace(X[:, eps < 0])
    if plus.dim == 0:
        steps["partition"] = math.inf
        return fail("partition", "empty H_1(+1)")
    _, inv_leak = subspace_image_contained(A, plus, plus, tol)
    ref_plus, _ = theta_eigenspaces(hp2, 1, tol)
    steps["partition"] = inv_leak
    if ref_plus.dim != plus.dim:
        return fail("partition", "dim H_1(+1) disagrees with theta_1 eigenspace")
    if inv_leak > itol:
        return fail("partition", "A does not preserve H_1(+1)")

    # (9) on H_1(+1) the phi and phi_b components of d_identity are orthogonal,
    #     so eta(xi_b) = 0 for b = 2, 3
    worst = 0.0
    for b in (2, 3):
        fb = hp2.phi_(b)
        try:
            cb, _, _ = simultaneous_diag(compress(A, plus), compress(fb @ A @ fb, plus), tol)
        except (NotCommuting, NotSymmetric) as exc:
            steps["eta_vanish"] = math.inf
            return fail("eta_vanish", f"b={b}: {exc}")
        Xb = plus.basis @ cb.basis
        v = d_identity_operator(hp2, A, betas[b - 1], b) @ Xb
        pXb = hp2.phi @ Xb
        eta_hat = float(np.max(np.abs(np.einsum("ij,ij->j", v, pXb)))) / 2.0
        phi_leak = subspace_image_contained(hp2.phi, Subspace(Xb), plus, tol)[1]
        phib_leak = subspace_image_contained(fb, Subspace(Xb), minus, tol)[1]
        worst = max(worst, eta_hat, abs(hp2.eta_xi(b)), phi_leak, phib_leak)
    steps["eta_vanish"] = worst
    if worst > itol:
        return fail("eta_vanish", "eta(xi_2) or eta(xi_3) does not vanish")

    # (10) xi = +-xi_1, so A xi = beta_1 xi
    sign = 1.0 if eta1 > 0 else -1.0
    xi_gap = float(np.linalg.norm(hp2.xi - sign * hp2.xi_(1)))
    cert.alpha = float(betas[0])
    cert.residual_hopf = float(np.linalg.norm(A @ hp2.xi - betas[0] * hp2.xi))
    steps["hopf"] = max(cert.residual_hopf, xi_gap)
    if steps["hopf"] > itol:
        return fail("hopf", "A xi != beta_1 xi")
    return cert


def perturb_shape(hp: HypersurfacePoint, A, size: float, rng: np.random.Generator,
                  preserve_hypotheses: bool = True) -> np.ndarray:
    """Symmetric perturbation of spectral norm ``size``.

    With ``preserve_hypotheses`` the perturbation is block-diagonal for
    T = D + D^perp, so A D in D survives and only the finer identities break.
    """
    n = hp.dim
    E = rng.standard_normal((n, n))
    E = 0.5 * (E + E.T)
    if preserve_hypotheses:
        PD, PDp = hp.D.projector(), hp.Dperp.projector()
        E = PD @ E @ PD + PDp @ E @ PDp
    E *= size / np.linalg.norm(E, 2)
    return np.asarray(A, dtype=float) + E
