"""Hamiltonian spec files: parsing, validation and MPO / Pauli-term construction.

Format (JSON)::

    {"model": "ising" | "heisenberg" | "xy" | "pauli_product" | "custom",
     "L": int, ...parameters..., "zeta": float,
     "normalization": "uniform" | "per_site", "N": float (optional)}

Ising takes ``J``, ``g``; a positive ``zeta`` selects the shifted chi = 4
form. Heisenberg takes ``JX, JY, JZ, gX, gY, gZ`` and XY ``JX, JY, gX, gY``.
Pauli-product takes ``coeffs``, one ``[alpha, beta, gamma, delta]`` per site.
Custom takes ``sites`` (each a chi_l x chi_r grid of 2x2 operators), ``R``
and ``C``; complex entries are written ``[re, im]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import lcu
from .mpo import (
    Mpo,
    SiteTensor,
    build_heisenberg,
    build_ising,
    build_ising_shifted,
    build_pauli_product,
    build_xy,
)

MODELS = ("ising", "heisenberg", "xy", "pauli_product", "custom")

_PARAMS = {
    "ising": ("J", "g"),
    "heisenberg": ("JX", "JY", "JZ", "gX", "gY", "gZ"),
    "xy": ("JX", "JY", "gX", "gY"),
    "pauli_product": (),
    "custom": (),
}


@dataclass(frozen=True)
class ModelSpec:
    model: str
    L: int
    params: dict[str, float] = field(default_factory=dict)
    zeta: float = 0.0
    normalization: str = "uniform"
    N: float | None = None
    coeffs: tuple[tuple[float, ...], ...] = ()
    custom: dict[str, Any] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"model spec: field 'model' must be one of {MODELS}, got {self.model!r}")
        if self.normalization not in ("uniform", "per_site"):
            raise ValueError("model spec: field 'normalization' must be 'uniform' or 'per_site'")
        if self.N is not None and not self.N > 0:
            raise ValueError("model spec: field 'N' must be positive")
        if self.zeta < 0:
            raise ValueError("model spec: field 'zeta' must be >= 0")


def _number(data: dict, key: str, default: float | None = None) -> float:
    if key not in data:
        if default is None:
            raise ValueError(f"model spec: missing field {key!r}")
        return default
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
        raise ValueError(f"model spec: field {key!r} must be a finite number")
    return float(v)


def _complex(v: Any, where: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(p, (int, float)) for p in v):
        return complex(v[0], v[1])
    raise ValueError(f"model spec: {where} must be a number or [re, im]")


def _operator(op: Any, where: str) -> np.ndarray:
    if op == 0:
        return np.zeros((2, 2), dtype=np.complex128)
    if not isinstance(op, list) or len(op) != 2 or any(not isinstance(r, list) or len(r) != 2 for r in op):
        raise ValueError(f"model spec: {where} must be a 2x2 operator")
    return np.array([[_complex(op[i][j], where) for j in range(2)] for i in range(2)])


def spec_from_dict(data: Any) -> ModelSpec:
    if not isinstance(data, dict):
        raise ValueError("model spec must be a JSON object")
    model = data.get("model")
    if model not in MODELS:
        raise ValueError(f"model spec: field 'model' must be one of {MODELS}, got {model!r}")
    zeta = _number(data, "zeta", 0.0)
    norm = data.get("normalization", "uniform")
    n_override = _number(data, "N") if "N" in data else None
    if model == "custom":
        sites = data.get("sites")
        if not isinstance(sites, list) or not sites:
            raise ValueError("model spec: field 'sites' must be a non-empty list")
        L = int(data.get("L", len(sites)))
        if L != len(sites):
            raise ValueError(f"model spec: field 'L' ({L}) does not match {len(sites)} sites")
        for key in ("R", "C"):
            if not isinstance(data.get(key), list):
                raise ValueError(f"model spec: missing field {key!r}")
        return ModelSpec(model, L, zeta=zeta, normalization=norm, N=n_override, custom=data)
    if "L" not in data or isinstance(data["L"], bool) or not isinstance(data["L"], int):
        raise ValueError("model spec: field 'L' must be an integer")
    L = data["L"]
    if model == "pauli_product":
        coeffs = data.get("coeffs")
        if not isinstance(coeffs, list) or len(coeffs) != L:
            raise ValueError(f"model spec: field 'coeffs' must list {L} quadruples")
        quads = []
        for k, c in enumerate(coeffs):
            if not isinstance(c, list) or len(c) != 4:
                raise ValueError(f"model spec: coeffs[{k}] must be [alpha, beta, gamma, delta]")
            quads.append(tuple(_number({"v": v}, "v") for v in c))
        return ModelSpec(model, L, zeta=zeta, normalization=norm, N=n_override, coeffs=tuple(quads))
    if model != "ising" and zeta:
        raise ValueError(f"model spec: field 'zeta' is not supported for {model}")
    required = {"ising": ("J", "g"), "heisenberg": ("JX", "JY", "JZ"), "xy": ("JX", "JY")}[model]
    params = {k: _number(data, k, None if k in required else 0.0) for k in _PARAMS[model]}
    return ModelSpec(model, L, params, zeta=zeta, normalization=norm, N=n_override)


def load_model(path: str | Path) -> ModelSpec:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"model spec is not valid JSON: {exc}") from exc
    return spec_from_dict(data)


def _custom_mpo(data: dict[str, Any]) -> Mpo:
    sites = []
    for l, grid in enumerate(data["sites"]):
        if not isinstance(grid, list) or not grid or not all(isinstance(r, list) for r in grid):
            raise ValueError(f"model spec: sites[{l}] must be a grid of operators")
        sites.append(
            SiteTensor.from_grid(
                [[_operator(op, f"sites[{l}][{a}][{b}]") for b, op in enumerate(row)] for a, row in enumerate(grid)]
            )
        )
    row = [_complex(v, "R entry") for v in data["R"]]
    col = [_complex(v, "C entry") for v in data["C"]]
    return Mpo(tuple(sites), row=row, col=col, label=str(data.get("label", "custom")))


def mpo_from_spec(spec: ModelSpec) -> Mpo:
    p = spec.params
    if spec.model == "ising":
        if spec.zeta > 0:
            return build_ising_shifted(spec.L, p["J"], p["g"], spec.zeta)
        return build_ising(spec.L, p["J"], p["g"])
    if spec.model == "heisenberg":
        return build_heisenberg(spec.L, **p)
    if spec.model == "xy":
        return build_xy(spec.L, **p)
    if spec.model == "pauli_product":
        return build_pauli_product(spec.coeffs, spec.zeta)
    assert spec.custom is not None
    return _custom_mpo(spec.custom)


def terms_from_spec(spec: ModelSpec) -> lcu.PauliTermList:
    p = spec.params
    if spec.model == "ising":
        return lcu.ising_terms(spec.L, p["J"], p["g"], spec.zeta)
    if spec.model == "heisenberg":
        return lcu.heisenberg_terms(spec.L, **p)
    if spec.model == "xy":
        return lcu.heisenberg_terms(spec.L, p["JX"], p["JY"], 0.0, p["gX"], p["gY"], 0.0)
    if spec.model == "pauli_product":
        return lcu.pauli_product_terms(spec.coeffs, spec.zeta)
    raise ValueError("Pauli terms are not available for custom MPO specs")
