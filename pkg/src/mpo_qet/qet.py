"""Quantum eigenvalue transformation on top of an MPO block encoding.

For phases ``phi_1..phi_d`` the transformed operator is

    Pi_1 W_1 Pi_2 W_2 ... Pi_d W_d,    W_j = U if d - j is even else U^dag,

so ``W_d = U`` acts first. For even ``d`` this is the product of factors
``Pi_{2k-1} U^dag Pi_{2k} U``; for odd ``d`` an extra ``Pi_1 U`` leads. The
scalar companion replaces ``U`` by the reflection ``[[x, s], [s, -x]]`` with
``s = sqrt(1 - x^2)`` and evaluates the ``(0, 0)`` entry.

In this convention all-zero phases give ``x`` (odd ``d``) or ``1`` (even
``d``); the Chebyshev polynomial ``T_d`` comes from :func:`chebyshev_phases`.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import expm
from scipy.optimize import least_squares

from .circuit import BlockEncoding, Circuit, WireLayout, ancilla_block, circuit_unitary
from .numerics import CMatrix, as_cmatrix, eigh
from .signal import processing_operator

Parity = Literal["even", "odd"]

DEFAULT_CONVENTION = "reflection"
MAX_FIT_PHASES = 80
DEFAULT_FIT_BOUND = 1e-6


class FitWarning(UserWarning):
    """The phase fit did not reach the requested residual bound."""


@dataclass(frozen=True)
class PhaseSequence:
    phases: tuple[float, ...]
    parity: Parity
    convention: str = DEFAULT_CONVENTION

    def __post_init__(self) -> None:
        phases = tuple(float(p) for p in self.phases)
        if not phases:
            raise ValueError("a phase sequence needs at least one phase")
        if not all(np.isfinite(phases)):
            raise ValueError("phases must be finite")
        if self.parity not in ("even", "odd"):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if (len(phases) % 2 == 0) != (self.parity == "even"):
            raise ValueError(f"{len(phases)} phases give degree {len(phases)}, inconsistent with {self.parity} parity")
        object.__setattr__(self, "phases", phases)

    @classmethod
    def of(cls, phases: Sequence[float], convention: str = DEFAULT_CONVENTION) -> PhaseSequence:
        return cls(tuple(phases), "even" if len(phases) % 2 == 0 else "odd", convention)

    @property
    def degree(self) -> int:
        return len(self.phases)


@dataclass(frozen=True)
class FilterSpec:
    degree: int
    gap: float

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise ValueError("filter degree must be >= 1")
        if not 0 < self.gap < 1:
            raise ValueError("gap must lie in (0, 1)")


# --- polynomials ------------------------------------------------------------------


def chebyshev_t(d: int, y: ArrayLike) -> NDArray[np.float64]:
    """``T_d(y)`` by the three-term recurrence; valid for any real ``y``."""
    y = np.asarray(y, dtype=float)
    if d < 0:
        raise ValueError("degree must be >= 0")
    t0, t1 = np.ones_like(y), y.copy()
    if d == 0:
        return t0
    for _ in range(d - 1):
        t0, t1 = t1, 2 * y * t1 - t0
    return t1


def filter_target(x: ArrayLike, spec: FilterSpec) -> NDArray[np.float64]:
    """``T_d(-1 + 2 (x^2 - gap^2)/(1 - gap^2)) / T_d(-1 - 2 gap^2/(1 - gap^2))``.

    An even polynomial of degree ``2d`` in ``x``, equal to 1 at ``x = 0``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1 + 1e-12):
        raise ValueError("filter_target expects |x| <= 1")
    g2 = spec.gap**2
    num = chebyshev_t(spec.degree, -1 + 2 * (x**2 - g2) / (1 - g2))
    den = chebyshev_t(spec.degree, np.asarray(-1 - 2 * g2 / (1 - g2)))
    return num / den


def filter_bound(spec: FilterSpec) -> float:
    """Sup of ``|f_d|`` on ``gap <= |x| <= 1``."""
    g2 = spec.gap**2
    return float(1 / abs(chebyshev_t(spec.degree, np.asarray(-1 - 2 * g2 / (1 - g2)))))


def scalar_qsp(ph: PhaseSequence | Sequence[float], x: ArrayLike) -> NDArray[np.complex128] | complex:
    """``<0| Pi_1 R Pi_2 R ... Pi_d R |0>`` with ``R = [[x, s], [s, -x]]``."""
    phases = ph.phases if isinstance(ph, PhaseSequence) else tuple(ph)
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.abs(x_arr) > 1 + 1e-12):
        raise ValueError("scalar_qsp expects |x| <= 1")
    s = np.sqrt(np.clip(1 - x_arr**2, 0, None))
    v0 = np.ones_like(x_arr, dtype=np.complex128)
    v1 = np.zeros_like(x_arr, dtype=np.complex128)
    for phi in reversed(phases):
        v0, v1 = x_arr * v0 + s * v1, s * v0 - x_arr * v1
        v0 = v0 * np.exp(-1j * phi)
        v1 = v1 * np.exp(1j * phi)
    return complex(v0) if v0.ndim == 0 else v0


# --- circuits ---------------------------------------------------------------------


def _products(d: int) -> list[bool]:
    """Operator-order flags for ``W_1 .. W_d``; ``True`` means ``U^dag``."""
    return [(d - j) % 2 == 1 for j in range(1, d + 1)]


def build_qet_circuit(be: BlockEncoding, ph: PhaseSequence) -> Circuit:
    """Gate-level QET: alternating ``U'``, ``U'^dag`` and ``Pi_phi`` cascades.

    ``U' = P_R^dag U P_C`` so the encoded block sits at all-ancilla ``|0...0>``.
    After ``U'`` the cascade runs over ``dil_L .. dil_1`` then the bond wires,
    after ``U'^dag`` over ``dil_1 .. dil_L`` then the bond wires; each order
    starts on the wires the preceding gates free first.
    """
    layout = be.layout
    u = be.referenced()
    u_dag = u.adjoint()
    n_anc = len(layout.ancillas)
    after_u = tuple(reversed(layout.dilation)) + layout.bond
    after_udag = layout.dilation + layout.bond
    gates: list = []
    # temporal order is the reverse of the operator product
    for phi, dag in reversed(list(zip(ph.phases, _products(ph.degree)))):
        gates.extend(u_dag.gates if dag else u.gates)
        order = after_udag if dag else after_u
        gates.extend(processing_operator(n_anc, phi, order, layout.n_wires).gates)
    return Circuit(layout.n_wires, tuple(gates))


def qet_block(c: Circuit, layout: WireLayout) -> CMatrix:
    """Physical-register block of a referenced circuit at all-ancilla ``|0...0>``."""
    return ancilla_block(circuit_unitary(c), layout.n_wires, layout.bond + layout.dilation, layout.physical)


def ancilla_projector(layout: WireLayout) -> CMatrix:
    """``|0...0><0...0|`` on the ancillas tensored with identity, in global wire order."""
    n = layout.n_wires
    idx = np.arange(2**n)
    mask = np.ones(2**n, dtype=bool)
    for w in layout.ancillas:
        mask &= ((idx >> (n - 1 - w)) & 1) == 0
    return np.diag(mask.astype(np.complex128))


def qet_dense_oracle(u_be: ArrayLike, layout: WireLayout, ph: PhaseSequence) -> CMatrix:
    """Dense product with ``Pi_phi = expm(-i phi (2P - I))`` and ``U``, ``U^dag``.

    ``u_be`` must be the referenced unitary (block at all-ancilla ``|0>``).
    """
    u = as_cmatrix(u_be, "U")
    p = ancilla_projector(layout)
    refl = 2 * p - np.eye(p.shape[0])
    total = np.eye(u.shape[0], dtype=np.complex128)
    for phi, dag in zip(ph.phases, _products(ph.degree)):
        total = total @ expm(-1j * phi * refl) @ (u.conj().T if dag else u)
    return ancilla_block(total, layout.n_wires, layout.bond + layout.dilation, layout.physical)


def hermitian_part(m: ArrayLike) -> CMatrix:
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("hermitian_part expects a square matrix")
    return (m + m.conj().T) / 2


def eigenbasis_values(block: ArrayLike, h: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.complex128], float]:
    """Eigenvalues of ``h``, the diagonal of ``block`` in that eigenbasis, and the largest off-diagonal."""
    vals, vecs = eigh(h)
    rotated = vecs.conj().T @ np.asarray(block) @ vecs
    off = rotated - np.diag(np.diagonal(rotated))
    return vals, np.diagonal(rotated).copy(), float(np.max(np.abs(off))) if off.size else 0.0


# --- phase fitting ----------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    sequence: PhaseSequence
    residual: float
    warning: bool
    restarts: int
    message: str = ""
    grid: NDArray[np.float64] = field(default=None, repr=False)  # type: ignore[assignment]


def chebyshev_nodes(k: int) -> NDArray[np.float64]:
    """``k`` Chebyshev nodes on ``(0, 1)`` (the positive half of the usual ``2k`` nodes)."""
    return np.cos(np.pi * (np.arange(k) + 0.5) / (2 * k))


def wrap_phases(ph: ArrayLike) -> NDArray[np.float64]:
    """Reduce angles to ``(-pi, pi]``; the products only see ``exp(+-i phi)``."""
    ph = np.asarray(ph, dtype=float)
    return np.pi - np.mod(np.pi - ph, 2 * np.pi)


def initial_phases(n_phases: int) -> NDArray[np.float64]:
    """Fit start ``(0, pi/2, ..., pi/2)``, giving ``scalar_qsp = (-i)**(d-1) T_d``.

    The inner phases turn each ``Pi R`` into ``-i Z R``, a rotation whose
    powers generate ``T_d``. For even ``d`` the real part starts at zero,
    which is a better-conditioned start for high-degree fits than ``T_d``.
    """
    ph = np.full(n_phases, np.pi / 2)
    ph[0] = 0.0
    return ph


def chebyshev_phases(d: int) -> PhaseSequence:
    """Phases with ``scalar_qsp = T_d`` exactly: the first phase absorbs ``(-i)**(d-1)``."""
    ph = initial_phases(d)
    ph[0] = -(d - 1) * np.pi / 2
    return PhaseSequence.of(tuple(wrap_phases(ph)))


def sup_residual(
    ph: PhaseSequence, target: Callable[[NDArray], NDArray], lo: float = 0.0, hi: float = 1.0, points: int = 4001
) -> float:
    """``max |Re P(x) - target(x)|`` on a uniform grid of ``[lo, hi]``."""
    x = np.linspace(lo, hi, points)
    return float(np.max(np.abs(np.real(scalar_qsp(ph, x)) - target(x))))


def fit_phases(
    target: Callable[[NDArray], NDArray],
    parity: Parity,
    n_phases: int,
    seed: int = 0,
    bound: float = DEFAULT_FIT_BOUND,
    max_restarts: int = 4,
    n_nodes: int | None = None,
) -> FitResult:
    """Least-squares fit of ``Re scalar_qsp`` to a definite-parity ``target``.

    Nodes are Chebyshev points on ``(0, 1)``; parity extends the fit to
    ``[-1, 0]``. The start is :func:`initial_phases`; if the sup-norm
    residual on ``[0, 1]`` exceeds ``bound``, restarts from seeded random
    perturbations. The best result is returned with ``warning`` set (and a
    :class:`FitWarning` issued) when it still misses the bound.
    """
    if n_phases < 1 or n_phases > MAX_FIT_PHASES:
        raise ValueError(f"n_phases must be in 1..{MAX_FIT_PHASES}")
    if (n_phases % 2 == 0) != (parity == "even"):
        raise ValueError(f"{parity} target needs an {'even' if parity == 'even' else 'odd'} number of phases")
    x = chebyshev_nodes(n_nodes or 2 * n_phases)
    y = np.asarray(target(x), dtype=float)
    rng = np.random.default_rng(seed)

    def resid(p: NDArray) -> NDArray:
        return np.real(scalar_qsp(p, x)) - y

    best: tuple[float, NDArray] | None = None
    start = initial_phases(n_phases)
    restarts = 0
    for attempt in range(max_restarts + 1):
        p0 = start if attempt == 0 else start + 0.1 * rng.standard_normal(n_phases)
        sol = least_squares(resid, p0, method="lm" if n_phases <= x.size else "trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        seq = PhaseSequence(tuple(wrap_phases(sol.x)), parity)
        r = sup_residual(seq, target)
        if best is None or r < best[0]:
            best = (r, wrap_phases(sol.x))
        restarts = attempt
        if r <= bound:
            break
    assert best is not None
    seq = PhaseSequence(tuple(best[1]), parity)
    warn = best[0] > bound
    msg = ""
    if warn:
        msg = f"fit residual {best[0]:.3g} exceeds bound {bound:.3g}"
        warnings.warn(msg, FitWarning, stacklevel=2)
    return FitResult(seq, best[0], warn, restarts, msg)


def fit_filter_phases(
    spec: FilterSpec, seed: int = 0, n_phases: int | None = None, bound: float = DEFAULT_FIT_BOUND
) -> FitResult:
    """Fit the eigenstate filter; by default with ``2 d`` phases, its exact degree."""
    n = 2 * spec.degree if n_phases is None else n_phases
    return fit_phases(lambda x: filter_target(x, spec), "even", n, seed=seed, bound=bound)


# --- phase files ------------------------------------------------------------------


def phases_to_dict(ph: PhaseSequence) -> dict:
    return {"convention": ph.convention, "parity": ph.parity, "degree": ph.degree, "phases": list(ph.phases)}


def save_phases(ph: PhaseSequence, path: str | Path) -> None:
    Path(path).write_text(json.dumps(phases_to_dict(ph), indent=1, sort_keys=True) + "\n")


def phases_from_dict(data: object) -> PhaseSequence:
    if not isinstance(data, dict):
        raise ValueError("phase file must hold a JSON object")
    if "phases" not in data:
        raise ValueError("phase file: missing field 'phases'")
    phases = data["phases"]
    if not isinstance(phases, list) or not phases or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in phases):
        raise ValueError("phase file: field 'phases' must be a non-empty list of numbers")
    parity = data.get("parity", "even" if len(phases) % 2 == 0 else "odd")
    if parity not in ("even", "odd"):
        raise ValueError("phase file: field 'parity' must be 'even' or 'odd'")
    if "degree" in data:
        deg = data["degree"]
        if not isinstance(deg, int) or deg != len(phases):
            raise ValueError(f"phase file: field 'degree' ({deg}) does not match {len(phases)} phases")
    if (len(phases) % 2 == 0) != (parity == "even"):
        raise ValueError(f"phase file: field 'parity' ({parity}) does not match {len(phases)} phases")
    convention = data.get("convention", DEFAULT_CONVENTION)
    if not isinstance(convention, str):
        raise ValueError("phase file: field 'convention' must be a string")
    return PhaseSequence(tuple(float(p) for p in phases), parity, convention)


def load_phases(path: str | Path) -> PhaseSequence:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"phase file is not valid JSON: {exc}") from exc
    return phases_from_dict(data)
