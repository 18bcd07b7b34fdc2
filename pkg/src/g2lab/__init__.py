"""Pointwise geometry of real hypersurfaces in complex two-plane Grassmannians."""

from .ambient import AmbientSpace, build_ambient, curvature, rotate_triple
from .hopf import HopfCertificate, certify_hopf, check_hypotheses, principalize_triple
from .hypersurface import HypersurfacePoint, induce
from .numeric import Subspace, Tolerance
from .type_a import SpectrumA, TypeAModel, build_type_a, spectrum_type_a

__all__ = [
    "AmbientSpace",
    "HopfCertificate",
    "HypersurfacePoint",
    "SpectrumA",
    "Subspace",
    "Tolerance",
    "TypeAModel",
    "build_ambient",
    "build_type_a",
    "certify_hopf",
    "check_hypotheses",
    "curvature",
    "induce",
    "principalize_triple",
    "rotate_triple",
    "spectrum_type_a",
]

__version__ = "0.1.0"
