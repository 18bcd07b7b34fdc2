"""Induced structures on a real hypersurface, evaluated at a single point.

A point is described by its unit normal ``N``. All tangent operators live in
an orthonormal basis of ``T = N^perp`` fixed by :func:`tangent_basis`, so a
tangent vector is an array of length ``4m - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .ambient import AmbientSpace, curvature
from .errors import DimensionMismatch, NotUnit, SpectrumLeak
from .numeric import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    compress,
    op_norm,
    orthocomplement,
    subspace_image_contained,
    sym_eig,
)

HPERP_RANK_TOL = 1e-8


def tangent_basis(N: np.ndarray) -> np.ndarray:
    """Orthonormal basis of N^perp as the columns of a ``(4m, 4m-1)`` array.

    Householder convention: let p be the first index of largest |N_p| and
    s = sign(N_p). The reflection H fixing the hyperplane orthogonal to
    w = N - s e_p sends N to s e_p; the columns of H other than p span N^perp.
    If N = s e_p exactly, H is the identity.
    """
    N = np.asarray(N, dtype=float)
    n = N.size
    p = int(np.argmax(np.abs(N)))
    s = 1.0 if N[p] >= 0 else -1.0
    w = N.copy()
    w[p] -= s
    H = np.eye(n)
    ww = w @ w
    if ww > 0.0:
        H -= (2.0 / ww) * np.outer(w, w)
    return np.delete(H, p, axis=1)


@dataclass(frozen=True)
class HypersurfacePoint:
    """Unit normal plus the induced almost contact (3-)structure on T.

    Vectors (``xi``, ``xi_a``) and operators (``phi``, ``phi_a``, ``theta_a``)
    are expressed in the basis ``B`` of T. ``eta`` is not stored; it is
    ``X -> X @ xi``.
    """

    ambient: AmbientSpace
    N: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    xi: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    xi_a: np.ndarray = field(repr=False)  # (3, n), row a-1 is xi_a
    phi_a: np.ndarray = field(repr=False)  # (3, n, n)
    theta_a: np.ndarray = field(repr=False)  # (3, n, n), from phi_a phi - eta (x) xi_a
    theta_a_alt: np.ndarray = field(repr=False)  # (3, n, n), from phi phi_a - eta_a (x) xi
    Dperp: Subspace
    D: Subspace
    Hperp: Subspace
    H: Subspace

    @property
    def m(self) -> int:
        return self.ambient.m

    @property
    def dim(self) -> int:
        return self.B.shape[1]

    def xi_(self, a: int) -> np.ndarray:
        return self.xi_a[(a - 1) % 3]

    def phi_(self, a: int) -> np.ndarray:
        return self.phi_a[(a - 1) % 3]

    def theta_(self, a: int) -> np.ndarray:
        return self.theta_a[(a - 1) % 3]

    def eta(self, X) -> float:
        return float(np.asarray(X) @ self.xi)

    def eta_(self, a: int, X) -> float:
        return float(np.asarray(X) @ self.xi_(a))

    def eta_xi(self, a: int) -> float:
        """eta(xi_a)."""
        return float(self.xi @ self.xi_(a))

    def to_ambient(self, X) -> np.ndarray:
        return self.B @ np.asarray(X, dtype=float)

    def to_tangent(self, v) -> np.ndarray:
        return self.B.T @ np.asarray(v, dtype=float)

    @property
    def xi_in_dperp_gap(self) -> float:
        return float(np.linalg.norm(self.xi - self.Dperp.project(self.xi)))

    def to_json(self) -> dict:
        return {"ambient": self.ambient.to_json(), "N": self.N.tolist()}


def induce(amb: AmbientSpace, N, unit_tol: float = 1e-12) -> HypersurfacePoint:
    N = np.asarray(N, dtype=float)
    if N.shape != (amb.dim,):
        raise DimensionMismatch(f"normal must have length {amb.dim}, got {N.shape}")
    if abs(np.linalg.norm(N) - 1.0) > unit_tol:
        raise NotUnit(f"|N| = {np.linalg.norm(N):.15f}")
    B = tangent_basis(N)
    # J and J_a are skew, so JN and J_aN are automatically tangent
    xi = -B.T @ (amb.J @ N)
    phi = B.T @ amb.J @ B
    xi_a = np.stack([-B.T @ (amb.Ja(a) @ N) for a in (1, 2, 3)])
    phi_a = np.stack([B.T @ amb.Ja(a) @ B for a in (1, 2, 3)])
    theta = np.stack([phi_a[i] @ phi - np.outer(xi_a[i], xi) for i in range(3)])
    theta_alt = np.stack([phi @ phi_a[i] - np.outer(xi, xi_a[i]) for i in range(3)])

    Dperp = Subspace.span(xi_a.T, HPERP_RANK_TOL)
    span = np.column_stack([xi, *xi_a, *(phi @ v for v in xi_a)])
    Hperp = Subspace.span(span, HPERP_RANK_TOL)
    for arr in (N, B, xi, phi, xi_a, phi_a, theta, theta_alt):
        arr.setflags(write=False)
    return HypersurfacePoint(
        ambient=amb, N=N, B=B, xi=xi, phi=phi, xi_a=xi_a, phi_a=phi_a,
        theta_a=theta, theta_a_alt=theta_alt,
        Dperp=Dperp, D=orthocomplement(Dperp), Hperp=Hperp, H=orthocomplement(Hperp),
    )


def jitter_phi(hp: HypersurfacePoint, size: float, rng: np.random.Generator, a: int = 1):
    """Copy of ``hp`` with the entries of phi_a perturbed by ``size`` (negative control)."""
    phi_a = np.array(hp.phi_a)
    phi_a[a - 1] += size * rng.uniform(-1.0, 1.0, phi_a[a - 1].shape)
    phi_a.setflags(write=False)
    return replace(hp, phi_a=phi_a)


@dataclass
class StructureReport:
    residuals: dict[str, float]
    tol: float

    @property
    def pass_(self) -> bool:
        return all(v <= self.tol for v in self.residuals.values())

    @property
    def failing(self) -> list[str]:
        return [k for k, v in self.residuals.items() if not v <= self.tol]

    def worst(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def to_json(self) -> dict:
        out = {k: float(v) for k, v in self.residuals.items()}
        out["pass"] = self.pass_
        return out


def _vec(v) -> float:
    return float(np.linalg.norm(v))


def verify_structure_relations(hp: HypersurfacePoint, tol: Tolerance = DEFAULT_TOL) -> StructureReport:
    n = hp.dim
    eye = np.eye(n)
    xi, phi = hp.xi, hp.phi
    res: dict[str, float] = {
        "phi^2=-I+eta(x)xi": op_norm(phi @ phi + eye - np.outer(xi, xi)),
        "|xi|=1": abs(xi @ xi - 1.0),
        "g(xi_a,xi_b)=delta_ab": float(np.max(np.abs(hp.xi_a @ hp.xi_a.T - np.eye(3)))),
    }
    for a in (1, 2, 3):
        fa, fb, fc = hp.phi_(a), hp.phi_(a + 1), hp.phi_(a + 2)
        xa, xb, xc = hp.xi_(a), hp.xi_(a + 1), hp.xi_(a + 2)
        res[f"phi_{a}^2=-I+eta_a(x)xi_a"] = op_norm(fa @ fa + eye - np.outer(xa, xa))
        res[f"phi_{a}phi_(a+1)-xi_a(x)eta_(a+1)=phi_(a+2)[a={a}]"] = op_norm(
            fa @ fb - np.outer(xa, xb) - fc)
        res[f"phi_(a+2)=-phi_(a+1)phi_a+xi_(a+1)(x)eta_a[a={a}]"] = op_norm(
            fc + fb @ fa - np.outer(xb, xa))
        res[f"phi_a xi_(a+1)=xi_(a+2)[a={a}]"] = _vec(fa @ xb - xc)
        res[f"xi_(a+2)=-phi_(a+1)xi_a[a={a}]"] = _vec(xc + fb @ xa)
        res[f"phi_a phi-xi_a(x)eta=phi phi_a-xi(x)eta_a[a={a}]"] = op_norm(
            fa @ phi - np.outer(xa, xi) - phi @ fa + np.outer(xi, xa))
        res[f"phi xi_a=phi_a xi[a={a}]"] = _vec(phi @ xa - fa @ xi)
        res[f"theta_a two formulas agree[a={a}]"] = op_norm(hp.theta_(a) - hp.theta_a_alt[a - 1])
        # the tangential decomposition itself: J_a X = phi_a X + eta_a(X) N
        Ja_B = hp.ambient.Ja(a) @ hp.B
        rebuilt = hp.B @ fa + np.outer(hp.N, xa)
        res[f"J_aX=phi_aX+eta_a(X)N[a={a}]"] = op_norm(Ja_B - rebuilt)
    return StructureReport(res, tol.identity_tol)


def verify_triple_identities(hp: HypersurfacePoint, tol: Tolerance = DEFAULT_TOL) -> StructureReport:
    """Properties of theta_a, reading the garbled phi_{xi_a} as phi xi_a.

    Item (f) is checked as theta_a phi xi_(a+1) = -xi_(a+2) + eta(xi_(a+1)) phi xi_a.
    """
    n = hp.dim
    eye = np.eye(n)
    phi, xi = hp.phi, hp.xi
    res: dict[str, float] = {}
    for a in (1, 2, 3):
        th, th1 = hp.theta_(a), hp.theta_(a + 1)
        xa, xb, xc = hp.xi_(a), hp.xi_(a + 1), hp.xi_(a + 2)
        pxa, pxb, pxc = phi @ xa, phi @ xb, phi @ xc
        res[f"theta_a symmetric[a={a}]"] = op_norm(th - th.T)
        res[f"Trace(theta_a)=eta(xi_a)[a={a}]"] = abs(np.trace(th) - hp.eta_xi(a))
        res[f"theta_a^2=I-g(.,phi xi_a)phi xi_a[a={a}]"] = op_norm(th @ th - eye + np.outer(pxa, pxa))
        res[f"theta_a xi=-xi_a[a={a}]"] = _vec(th @ xi + xa)
        res[f"theta_a xi_a=-xi[a={a}]"] = _vec(th @ xa + xi)
        res[f"theta_a phi xi_a=eta(xi_a)phi xi_a[a={a}]"] = _vec(th @ pxa - hp.eta_xi(a) * pxa)
        res[f"theta_a xi_(a+1)=phi xi_(a+2)[a={a}]"] = _vec(th @ xb - pxc)
        res[f"phi xi_(a+2)=-theta_(a+1)xi_a[a={a}]"] = _vec(pxc + th1 @ xa)
        res[f"theta_a phi xi_(a+1)=-xi_(a+2)+eta(xi_(a+1))phi xi_a[a={a}]"] = _vec(
            th @ pxb + xc - hp.eta_xi(a + 1) * pxa)
        res[f"theta_(a+1)phi xi_a=xi_(a+2)+eta(xi_a)phi xi_(a+1)[a={a}]"] = _vec(
            th1 @ pxa - xc - hp.eta_xi(a) * pxb)
    return StructureReport(res, tol.identity_tol)


def theta_eigenspaces(
    hp: HypersurfacePoint, a: int, tol: Tolerance = DEFAULT_TOL
) -> tuple[Subspace, Subspace]:
    """The +1 and -1 eigenspaces of theta_a restricted to H (as subspaces of T)."""
    H = hp.H
    if H.dim == 0:
        return Subspace.empty(hp.dim), Subspace.empty(hp.dim)
    w, V = sym_eig(compress(hp.theta_(a), H), tol)
    window = max(tol.eig_gap, tol.identity_tol)
    off = np.min(np.abs(np.abs(w)[:, None] - 1.0), axis=1)
    if np.any(off > window):
        raise SpectrumLeak(f"theta_{a}|H has eigenvalue {w[np.argmax(off)]:.6g} off +-1")
    plus = H.basis @ V.basis[:, w > 0]
    minus = H.basis @ V.basis[:, w < 0]
    return Subspace(plus), Subspace(minus)


def verify_theta_eigenspaces(hp: HypersurfacePoint, tol: Tolerance = DEFAULT_TOL) -> StructureReport:
    """Eigenspace structure of theta_a on H; dimension facts enter as 0/1 residuals."""
    res: dict[str, float] = {}
    H = hp.H
    for a in (1, 2, 3):
        for name, op in (("theta", hp.theta_(a)), ("phi", hp.phi), ("phi_a", hp.phi_(a))):
            res[f"H invariant under {name}_{a}"] = subspace_image_contained(op, H, H, tol)[1]
        w = np.linalg.eigvalsh(compress(hp.theta_(a), H)) if H.dim else np.zeros(0)
        res[f"spec theta_a|H in +-1[a={a}]"] = float(np.max(np.abs(np.abs(w) - 1.0), initial=0.0))
        try:
            Hp, Hm = theta_eigenspaces(hp, a, tol)
        except SpectrumLeak:
            res[f"dim H_a(1)=dim H_a(-1) even[a={a}]"] = 1.0
            continue
        spaces = {1: Hp, -1: Hm}
        res[f"dim H_a(1)=dim H_a(-1) even[a={a}]"] = float(
            Hp.dim != Hm.dim or Hp.dim % 2 != 0)
        for eps, S in spaces.items():
            res[f"phi H_a({eps:+d}) in H_a({eps:+d})[a={a}]"] = subspace_image_contained(
                hp.phi, S, S, tol)[1]
            for b in (1, 2, 3):
                if b == a:
                    continue
                other = spaces[-eps]
                res[f"theta_{b} H_a({eps:+d}) in H_a({-eps:+d})[a={a}]"] = subspace_image_contained(
                    hp.theta_(b), S, other, tol)[1]
                res[f"phi_{b} H_a({eps:+d}) in H_a({-eps:+d})[a={a}]"] = subspace_image_contained(
                    hp.phi_(b), S, other, tol)[1]
    return StructureReport(res, tol.identity_tol)


def hperp_classification(hp: HypersurfacePoint, tol: Tolerance = DEFAULT_TOL) -> dict:
    """dim H^perp against the xi-in-D^perp test; the two must agree."""
    in_dperp = hp.xi_in_dperp_gap <= tol.identity_tol
    return {
        "dim_Hperp": hp.Hperp.dim,
        "xi_in_Dperp_gap": hp.xi_in_dperp_gap,
        "xi_in_Dperp": in_dperp,
        "consistent": (hp.Hperp.dim == 3) == in_dperp,
    }


def _check_tangent(hp: HypersurfacePoint, *vs):
    for v in vs:
        if np.shape(v) != (hp.dim,):
            raise DimensionMismatch(f"expected tangent vectors of length {hp.dim}, got {np.shape(v)}")


def gauss_curvature(hp: HypersurfacePoint, A: np.ndarray, X, Y, Z) -> np.ndarray:
    """Intrinsic curvature R(X, Y)Z of the hypersurface from the Gauss equation."""
    X, Y, Z = (np.asarray(v, dtype=float) for v in (X, Y, Z))
    _check_tangent(hp, X, Y, Z)
    A = np.asarray(A, dtype=float)
    if A.shape != (hp.dim, hp.dim):
        raise DimensionMismatch(f"shape operator must be {hp.dim}x{hp.dim}")
    phi = hp.phi
    out = (Y @ Z) * X - (X @ Z) * Y + (A @ Y @ Z) * (A @ X) - (A @ X @ Z) * (A @ Y)
    out += (phi @ Y @ Z) * (phi @ X) - (phi @ X @ Z) * (phi @ Y) - 2.0 * (phi @ X @ Y) * (phi @ Z)
    for a in (1, 2, 3):
        fa, th = hp.phi_(a), hp.theta_(a)
        out += (fa @ Y @ Z) * (fa @ X) - (fa @ X @ Z) * (fa @ Y) - 2.0 * (fa @ X @ Y) * (fa @ Z)
        out += (th @ Y @ Z) * (th @ X) - (th @ X @ Z) * (th @ Y)
    return out


def codazzi_rhs(hp: HypersurfacePoint, X, Y) -> np.ndarray:
    """Algebraic side of the Codazzi equation, (nabla_X A)Y - (nabla_Y A)X."""
    X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
    _check_tangent(hp, X, Y)
    phi, xi = hp.phi, hp.xi
    out = hp.eta(X) * (phi @ Y) - hp.eta(Y) * (phi @ X) - 2.0 * (phi @ X @ Y) * xi
    pX, pY = phi @ X, phi @ Y
    for a in (1, 2, 3):
        fa, xa, th = hp.phi_(a), hp.xi_(a), hp.theta_(a)
        out += (X @ xa) * (fa @ Y) - (Y @ xa) * (fa @ X) - 2.0 * (fa @ X @ Y) * xa
        out += (pX @ xa) * (th @ Y) - (pY @ xa) * (th @ X)
    return out


def codazzi_xi_component(hp: HypersurfacePoint, a: int, X, Y) -> float:
    """Closed form of g(codazzi_rhs(X, Y), xi_a) used to start the Hopf argument."""
    X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
    phi = hp.phi
    pX, pY = phi @ X, phi @ Y
    x0, x1, x2 = hp.xi_(a), hp.xi_(a + 1), hp.xi_(a + 2)
    return float(
        -2.0 * hp.eta_xi(a) * (pX @ Y) - 2.0 * (hp.phi_(a) @ X @ Y)
        + 2.0 * hp.eta(X) * (pY @ x0) - 2.0 * hp.eta(Y) * (pX @ x0)
        + 2.0 * (X @ x1) * (Y @ x2) - 2.0 * (Y @ x1) * (X @ x2)
        + 2.0 * (pX @ x1) * (pY @ x2) - 2.0 * (pY @ x1) * (pX @ x2)
    )
