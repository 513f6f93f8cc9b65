"""JSON formats for subspaces, channels, distributions, code bundles and reports.

Vectors use interleaved (x_1, z_1, ..., x_n, z_n) order.  Complex matrices are
row-major nested lists of [re, im] pairs.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import ErrorDistribution, KrausChannel
from .codes import SymplecticCodeFamily, build_code
from .fflin import FSubspace, HyperbolicFrame


class ParseError(ValueError):
    def __init__(self, source, field: str, message: str):
        self.source, self.field = str(source), field
        super().__init__(f"{source}: field {field!r}: {message}")


def complex_to_json(M) -> list:
    M = np.asarray(M, dtype=complex)
    if M.ndim == 0:
        return [float(M.real), float(M.imag)]
    return [complex_to_json(row) for row in M]


def complex_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _load(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(path, "<document>", f"invalid JSON at line {exc.lineno}, column {exc.colno}") from exc


def _require(data: dict, key: str, source):
    if key not in data:
        raise ParseError(source, key, "missing")
    return data[key]


def subspace_to_json(L: FSubspace) -> dict:
    return {"d": L.d, "n": L.n, "basis": L.basis.tolist()}


def subspace_from_json(data: dict, source="<subspace>") -> FSubspace:
    d, n = int(_require(data, "d", source)), int(_require(data, "n", source))
    basis = _require(data, "basis", source)
    try:
        return FSubspace(d, n, np.asarray(basis, dtype=np.int64).reshape(-1, 2 * n))
    except ValueError as exc:
        raise ParseError(source, "basis", str(exc)) from exc


def load_subspace(path) -> FSubspace:
    return subspace_from_json(_load(path), path)


def channel_to_json(B: KrausChannel) -> dict:
    return {"d": B.d, "n": B.n, "kraus": [complex_to_json(K) for K in B.kraus]}


def channel_from_json(data: dict, source="<channel>", tol: float = 1e-8) -> KrausChannel:
    d, n = int(_require(data, "d", source)), int(_require(data, "n", source))
    try:
        K = complex_from_json(_require(data, "kraus", source))
        B = KrausChannel(d, n, K)
    except ValueError as exc:
        raise ParseError(source, "kraus", str(exc)) from exc
    if B.completeness_defect() > tol:
        raise ParseError(source, "kraus", "Kraus operators are not trace preserving")
    return B


def load_channel(path) -> KrausChannel:
    return channel_from_json(_load(path), path)


def distribution_to_json(P: ErrorDistribution) -> dict:
    return {"d": P.d, "m": P.m, "probs": P.to_dict()}


def distribution_from_json(data: dict, source="<distribution>", tol: float = 1e-9) -> ErrorDistribution:
    d, m = int(_require(data, "d", source)), int(_require(data, "m", source))
    try:
        P = ErrorDistribution.from_dict(d, m, _require(data, "probs", source))
    except ValueError as exc:
        raise ParseError(source, "probs", str(exc)) from exc
    if not P.is_normalized(tol):
        raise ParseError(source, "probs", f"probabilities sum to {P.probs.sum():.12g}, not 1")
    return P


def load_distribution(path) -> ErrorDistribution:
    return distribution_from_json(_load(path), path)


def code_to_json(code: SymplecticCodeFamily, vectors: bool = True, seed: int | None = None) -> dict:
    out = {
        "d": code.d,
        "n": code.n,
        "k": code.k,
        "L": code.L.basis.tolist(),
        "frame": {"g": code.frame.g.tolist(), "h": code.frame.h.tolist()},
        "transversal": None if code.transversal is None else code.transversal.tolist(),
        "subspace_dims": [code.d**code.k] * code.num_syndromes,
    }
    if seed is not None:
        out["seed"] = seed
    if vectors:
        out["basis_vectors"] = complex_to_json(code.basis.T)
    return out


def code_from_json(data: dict, source="<code>") -> SymplecticCodeFamily:
    d, n = int(_require(data, "d", source)), int(_require(data, "n", source))
    L = FSubspace(d, n, np.asarray(_require(data, "L", source), dtype=np.int64).reshape(-1, 2 * n))
    fr = _require(data, "frame", source)
    frame = HyperbolicFrame(
        d=d,
        g=np.asarray(fr["g"], dtype=np.int64),
        h=np.asarray(fr["h"], dtype=np.int64),
        code_k=n - L.dim,
    )
    transversal = data.get("transversal")
    try:
        code = build_code(L, seed=int(data.get("seed", 0)), frame=frame, transversal=None)
    except ValueError as exc:
        raise ParseError(source, "frame", str(exc)) from exc
    if "basis_vectors" in data:
        basis = complex_from_json(data["basis_vectors"]).T
        basis.setflags(write=False)
        code = SymplecticCodeFamily(L=L, frame=frame, basis=basis)
    if transversal is not None:
        try:
            code = code.with_transversal(transversal)
        except ValueError as exc:
            raise ParseError(source, "transversal", str(exc)) from exc
    return code


def load_code(path) -> SymplecticCodeFamily:
    return code_from_json(_load(path), path)


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj))
