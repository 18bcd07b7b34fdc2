"""JSON/CSV formats shared by the command line and the tests."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .ambient import AmbientSpace
from .hypersurface import HypersurfacePoint, induce
from .type_a import SpectrumA

SCHEMA = "g2lab/1"
SPECTRUM_COLUMNS = ("r", "alpha", "beta", "lambda", "mu", "distinct_count")


class FormatError(ValueError):
    """Input file does not match the expected schema."""


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, allow_nan=True) + "\n"


def write_json(path, payload) -> None:
    Path(path).write_text(dumps(payload), encoding="utf-8")


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from exc


def hyperpoint_to_json(hp: HypersurfacePoint) -> dict:
    return hp.to_json()


def hyperpoint_from_json(payload) -> HypersurfacePoint:
    try:
        amb = AmbientSpace.from_json(payload["ambient"])
        N = np.asarray(payload["N"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed hyperpoint: {exc}") from exc
    if N.shape != (amb.dim,):
        raise FormatError(f"N has shape {N.shape}, expected ({amb.dim},)")
    # files carry ~17 significant digits; renormalize what survives the round trip
    nrm = np.linalg.norm(N)
    if abs(nrm - 1.0) > 1e-9:
        raise FormatError(f"N is not a unit vector (|N| = {nrm:.12f})")
    return induce(amb, N / nrm)


def shape_to_json(A: np.ndarray) -> dict:
    A = np.asarray(A, dtype=float)
    return {"dim": int(A.shape[0]), "entries": [float(x) for x in A.ravel()]}


def shape_from_json(payload) -> np.ndarray:
    try:
        dim = int(payload["dim"])
        entries = np.asarray(payload["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed shape operator: {exc}") from exc
    if entries.size != dim * dim:
        raise FormatError(f"shape operator has {entries.size} entries, expected {dim * dim}")
    return entries.reshape(dim, dim)


def fmt17(x: float) -> str:
    return f"{x:.17g}"


def write_spectrum_csv(path, spectra: list[SpectrumA]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SPECTRUM_COLUMNS)
        for s in spectra:
            writer.writerow([fmt17(s.r), fmt17(s.alpha), fmt17(s.beta),
                             fmt17(s.lambda_), fmt17(s.mu), s.distinct_count])
