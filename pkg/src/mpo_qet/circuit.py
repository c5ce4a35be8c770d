"""Gate-level circuits, a dense simulator and the MPO block-encoding assembly.

Wire convention: wire 0 is the most significant qubit of every state or
matrix index (big-endian). A gate's ``wires`` tuple lists its qubits from
most to least significant with respect to its local matrix. The standard
block-encoding layout puts the bond wires first, then the dilation wires,
then the physical wires (site 1 first).

Rotation convention: ``RZ(w, a)`` is ``diag(exp(-ia), exp(ia))``; the angle
multiplies ``Z`` directly, there is no half-angle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, ClassVar, Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .dilation import DilationResult, unitary_dilation
from .mpo import Mpo, PaddedMpo, normalize, pad_to_power_of_two, reshape_site
from .numerics import H as _H
from .numerics import X as _X
from .numerics import CMatrix, DimensionError, unitarity_error

MAX_SIM_WIRES = 14

_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)


class Gate:
    """Common interface of all gates."""

    kind: ClassVar[str] = "gate"
    diagonal: ClassVar[bool] = False
    wires: tuple[int, ...]

    @property
    def matrix(self) -> CMatrix:
        raise NotImplementedError

    def adjoint(self) -> Gate:
        raise NotImplementedError

    def params(self) -> dict[str, Any]:
        return {}


@dataclass(frozen=True, eq=False)
class DenseUnitary(Gate):
    unitary: CMatrix
    wires: tuple[int, ...]
    label: str = ""
    kind: ClassVar[str] = "dense"

    def __post_init__(self) -> None:
        u = np.asarray(self.unitary, dtype=np.complex128)
        wires = tuple(int(w) for w in self.wires)
        if u.shape != (2 ** len(wires),) * 2:
            raise ValueError(f"{len(wires)}-wire gate needs a {2 ** len(wires)}-dim matrix, got {u.shape}")
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "wires", wires)

    @property
    def matrix(self) -> CMatrix:
        return self.unitary

    def adjoint(self) -> DenseUnitary:
        label = self.label[:-4] if self.label.endswith("^dag") else self.label + "^dag"
        return type(self)(self.unitary.conj().T, self.wires, label)

    def params(self) -> dict[str, Any]:
        return {"label": self.label} if self.label else {}


@dataclass(frozen=True, eq=False)
class StatePrep(DenseUnitary):
    """A unitary whose first column is a prescribed state."""

    kind: ClassVar[str] = "state_prep"

    def __post_init__(self) -> None:
        super().__post_init__()
        if unitarity_error(self.unitary) > 1e-10:
            raise ValueError("state-preparation matrix is not unitary")


@dataclass(frozen=True)
class CNOT(Gate):
    control: int
    target: int
    kind: ClassVar[str] = "cnot"

    def __post_init__(self) -> None:
        if self.control == self.target:
            raise ValueError("CNOT control and target coincide")

    @property
    def wires(self) -> tuple[int, ...]:  # type: ignore[override]
        return (self.control, self.target)

    @property
    def matrix(self) -> CMatrix:
        return _CNOT

    def adjoint(self) -> CNOT:
        return self


@dataclass(frozen=True)
class RZ(Gate):
    wire: int
    angle: float
    kind: ClassVar[str] = "rz"
    diagonal: ClassVar[bool] = True

    @property
    def wires(self) -> tuple[int, ...]:  # type: ignore[override]
        return (self.wire,)

    @property
    def matrix(self) -> CMatrix:
        return np.diag([np.exp(-1j * self.angle), np.exp(1j * self.angle)])

    def adjoint(self) -> RZ:
        return RZ(self.wire, -self.angle)

    def params(self) -> dict[str, Any]:
        return {"angle": self.angle}


@dataclass(frozen=True)
class MCRZ(Gate):
    """``diag(exp(-ia), exp(ia))`` on ``target`` when every control reads its polarity.

    ``polarity`` defaults to all zeros, i.e. open controls.
    """

    controls: tuple[int, ...]
    target: int
    angle: float
    polarity: tuple[int, ...] | None = None
    kind: ClassVar[str] = "mcrz"
    diagonal: ClassVar[bool] = True

    def __post_init__(self) -> None:
        controls = tuple(int(c) for c in self.controls)
        pol = (0,) * len(controls) if self.polarity is None else tuple(int(p) for p in self.polarity)
        if len(pol) != len(controls) or any(p not in (0, 1) for p in pol):
            raise ValueError("polarity must give 0 or 1 for each control")
        if self.target in controls or len(set(controls)) != len(controls):
            raise ValueError("controls and target must be distinct wires")
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "polarity", pol)

    @property
    def wires(self) -> tuple[int, ...]:  # type: ignore[override]
        return self.controls + (self.target,)

    def diag(self) -> NDArray[np.complex128]:
        k = len(self.controls)
        d = np.ones(2 ** (k + 1), dtype=np.complex128)
        base = 0
        for p in self.polarity:  # type: ignore[union-attr]
            base = 2 * base + p
        d[2 * base] = np.exp(-1j * self.angle)
        d[2 * base + 1] = np.exp(1j * self.angle)
        return d

    @property
    def matrix(self) -> CMatrix:
        return np.diag(self.diag())

    def adjoint(self) -> MCRZ:
        return MCRZ(self.controls, self.target, -self.angle, self.polarity)

    def params(self) -> dict[str, Any]:
        return {"angle": self.angle, "polarity": list(self.polarity)}  # type: ignore[arg-type]


@dataclass(frozen=True)
class PauliX(Gate):
    wire: int
    kind: ClassVar[str] = "x"

    @property
    def wires(self) -> tuple[int, ...]:  # type: ignore[override]
        return (self.wire,)

    @property
    def matrix(self) -> CMatrix:
        return _X

    def adjoint(self) -> PauliX:
        return self


@dataclass(frozen=True)
class Hadamard(Gate):
    wire: int
    kind: ClassVar[str] = "h"

    @property
    def wires(self) -> tuple[int, ...]:  # type: ignore[override]
        return (self.wire,)

    @property
    def matrix(self) -> CMatrix:
        return _H

    def adjoint(self) -> Hadamard:
        return self


@dataclass(frozen=True)
class GlobalPhase(Gate):
    """Scalar ``exp(i angle)``; acts on no wire."""

    angle: float
    kind: ClassVar[str] = "global_phase"
    diagonal: ClassVar[bool] = True

    @property
    def wires(self) -> tuple[int, ...]:  # type: ignore[override]
        return ()

    @property
    def matrix(self) -> CMatrix:
        return np.array([[np.exp(1j * self.angle)]])

    def adjoint(self) -> GlobalPhase:
        return GlobalPhase(-self.angle)

    def params(self) -> dict[str, Any]:
        return {"angle": self.angle}


@dataclass(frozen=True)
class Circuit:
    n_wires: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        gates = tuple(self.gates)
        for g in gates:
            ws = g.wires
            if len(set(ws)) != len(ws):
                raise ValueError(f"{g.kind} gate repeats a wire: {ws}")
            if any(w < 0 or w >= self.n_wires for w in ws):
                raise ValueError(f"{g.kind} gate wires {ws} out of range for {self.n_wires} wires")
        object.__setattr__(self, "gates", gates)

    def __add__(self, other: Circuit) -> Circuit:
        return Circuit(max(self.n_wires, other.n_wires), self.gates + other.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def adjoint(self) -> Circuit:
        return Circuit(self.n_wires, tuple(g.adjoint() for g in reversed(self.gates)))

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def widened(self, n_wires: int) -> Circuit:
        return Circuit(max(n_wires, self.n_wires), self.gates)


# --- simulation ---------------------------------------------------------------


def _apply(psi: NDArray, gate: Gate) -> NDArray:
    """Apply ``gate`` to a tensor of shape ``(2,)*n + batch``."""
    ws = gate.wires
    k = len(ws)
    if k == 0:
        return psi * gate.matrix[0, 0]
    psi = np.moveaxis(psi, ws, tuple(range(k)))
    shape = psi.shape
    flat = psi.reshape(2**k, -1)
    if isinstance(gate, MCRZ):
        flat = gate.diag()[:, None] * flat
    elif gate.diagonal:
        flat = np.diagonal(gate.matrix)[:, None] * flat
    else:
        flat = gate.matrix @ flat
    return np.moveaxis(flat.reshape(shape), tuple(range(k)), ws)


def _check_size(n: int, cap: int) -> None:
    if n > cap:
        raise DimensionError(f"dense simulation capped at {cap} wires, got {n}")


def circuit_unitary(c: Circuit, cap: int = MAX_SIM_WIRES) -> CMatrix:
    """Dense unitary of ``c``; the first gate in the list acts first."""
    n = c.n_wires
    _check_size(n, cap)
    dim = 2**n
    psi = np.eye(dim, dtype=np.complex128).reshape((2,) * n + (dim,))
    for g in c.gates:
        psi = _apply(psi, g)
    return psi.reshape(dim, dim)


def simulate(c: Circuit, state: ArrayLike, cap: int = MAX_SIM_WIRES) -> NDArray[np.complex128]:
    """Apply ``c`` to a state vector of length ``2**n_wires``."""
    n = c.n_wires
    _check_size(n, cap)
    psi = np.asarray(state, dtype=np.complex128).reshape((2,) * n)
    for g in c.gates:
        psi = _apply(psi, g)
    return psi.reshape(-1)


# --- layout and block extraction ------------------------------------------------


@dataclass(frozen=True)
class WireLayout:
    bond: tuple[int, ...]
    dilation: tuple[int, ...]
    physical: tuple[int, ...]

    def __post_init__(self) -> None:
        for name in ("bond", "dilation", "physical"):
            object.__setattr__(self, name, tuple(int(w) for w in getattr(self, name)))
        everything = self.bond + self.dilation + self.physical
        if len(self.dilation) != len(self.physical):
            raise ValueError("need one dilation wire per physical wire")
        if sorted(everything) != list(range(len(everything))):
            raise ValueError("bond, dilation and physical wires must partition 0..n-1")

    @classmethod
    def standard(cls, length: int, D: int) -> WireLayout:
        return cls(
            bond=tuple(range(D)),
            dilation=tuple(range(D, D + length)),
            physical=tuple(range(D + length, D + 2 * length)),
        )

    @property
    def n_wires(self) -> int:
        return len(self.bond) + len(self.dilation) + len(self.physical)

    @property
    def ancillas(self) -> tuple[int, ...]:
        return self.dilation + self.bond


def _unit(v: ArrayLike, name: str, tol: float = 1e-10) -> NDArray[np.complex128]:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError(f"{name} must be a unit vector (norm {np.linalg.norm(v):.6g})")
    return v


def ancilla_block(
    u: ArrayLike,
    n_wires: int,
    ancillas: Sequence[int],
    physical: Sequence[int],
    ket_in: ArrayLike | None = None,
    ket_out: ArrayLike | None = None,
) -> CMatrix:
    """``<out| U |in>`` on the ancillas, returned as an operator on ``physical``.

    ``ket_in`` and ``ket_out`` default to ``|0...0>``; both are kets.
    """
    na, nphys = len(ancillas), len(physical)
    if ket_in is None:
        ket_in = np.eye(2**na)[0]
    if ket_out is None:
        ket_out = np.eye(2**na)[0]
    ket_in = _unit(ket_in, "input ancilla state")
    ket_out = _unit(ket_out, "output ancilla state")
    order = list(ancillas) + list(physical)
    t = np.asarray(u, dtype=np.complex128).reshape((2,) * (2 * n_wires))
    t = t.transpose(order + [n_wires + w for w in order])
    t = t.reshape(2**na, 2**nphys, 2**na, 2**nphys)
    return np.einsum("a,aibj,b->ij", ket_out.conj(), t, ket_in)


def _ancilla_states(layout: WireLayout, prep_col: ArrayLike, prep_row: ArrayLike):
    zeros = np.eye(2 ** len(layout.dilation))[0]
    col = _unit(prep_col, "prep_col")
    row = _unit(prep_row, "prep_row")
    return np.kron(col, zeros), np.kron(row, zeros)


def extract_block(u: ArrayLike, layout: WireLayout, prep_col: ArrayLike, prep_row: ArrayLike) -> CMatrix:
    """``<0_dil, R_bond| U |0_dil, C_bond>`` as an operator on the physical register."""
    ket_in, ket_out = _ancilla_states(layout, prep_col, prep_row)
    return ancilla_block(u, layout.n_wires, layout.bond + layout.dilation, layout.physical, ket_in, ket_out)


def embed_state(
    n_wires: int, groups: Sequence[tuple[Sequence[int], ArrayLike]]
) -> NDArray[np.complex128]:
    """Product state built from ``(wires, state)`` groups covering all wires."""
    order: list[int] = []
    psi = np.ones(1, dtype=np.complex128)
    for wires, state in groups:
        order.extend(wires)
        psi = np.kron(psi, np.asarray(state, dtype=np.complex128).reshape(-1))
    if sorted(order) != list(range(n_wires)):
        raise ValueError("state groups must cover every wire exactly once")
    t = psi.reshape((2,) * n_wires) if n_wires else psi
    return np.moveaxis(t, tuple(range(n_wires)), tuple(order)).reshape(-1) if n_wires else t


def success_probability(
    c: Circuit,
    layout: WireLayout,
    prep_col: ArrayLike,
    prep_row: ArrayLike,
    state: ArrayLike,
) -> float:
    """Probability of post-selecting dilation ``|0>`` and bond ``|R>`` after ``c``.

    The circuit runs on ``|C>_bond |0>_dil |state>_phys`` by state-vector
    simulation; the post-selection is an exact projection.
    """
    state = _unit(state, "input state")
    col = _unit(prep_col, "prep_col")
    row = _unit(prep_row, "prep_row")
    zeros = np.eye(2 ** len(layout.dilation))[0]
    psi = embed_state(
        layout.n_wires,
        [(layout.bond, col), (layout.dilation, zeros), (layout.physical, state)],
    )
    out = simulate(c, psi).reshape((2,) * layout.n_wires)
    anc = layout.bond + layout.dilation
    out = out.transpose(list(anc) + list(layout.physical)).reshape(2 ** len(anc), -1)
    amp = np.kron(row, zeros).conj() @ out
    return float(np.real(np.vdot(amp, amp)))


# --- state preparation ----------------------------------------------------------


def _single_qubit_prep(a: complex, b: complex, tol: float = 1e-12) -> CMatrix:
    if abs(b) < tol:
        return np.diag([a, np.conj(a)])
    return np.array([[a, np.conj(b)], [b, -np.conj(a)]], dtype=np.complex128)


def _single_qubit_gates(w: int, a: complex, b: complex, tol: float = 1e-12) -> list[Gate]:
    """Gates taking ``|0>`` to ``a|0> + b|1>`` on wire ``w``, preferring X and H."""
    if abs(b) < tol and abs(a - 1) < tol:
        return []
    if abs(a) < tol and abs(b - 1) < tol:
        return [PauliX(w)]
    if abs(a - b) < tol and abs(a - 2**-0.5) < tol:
        return [Hadamard(w)]
    return [DenseUnitary(_single_qubit_prep(a, b), (w,))]


def _product_factors(v: NDArray[np.complex128], tol: float = 1e-12) -> list[NDArray] | None:
    n = int(round(np.log2(v.size)))
    factors = []
    rest = v
    for _ in range(n - 1):
        u, s, vh = np.linalg.svd(rest.reshape(2, -1))
        if s[1] > tol:
            return None
        q = u[:, 0] * s[0]
        r = vh[0]
        # move the phase of the first nonzero amplitude off the factor
        k = int(np.argmax(np.abs(q) > tol))
        ph = q[k] / abs(q[k])
        factors.append(q / ph)
        rest = r * ph
    factors.append(rest)
    return factors


def state_prep_gates(v: ArrayLike, wires: Sequence[int], tol: float = 1e-12) -> list[Gate]:
    """Elementary gates mapping ``|0...0>`` on ``wires`` to ``v``.

    Product states use one single-qubit gate per wire (``X`` for ``|1>``,
    ``H`` for ``|+>``); two-term superpositions use a single-qubit gate plus
    a CNOT fan-out. Anything else falls back to one dense Householder gate.
    """
    v = _unit(v, "state", tol=1e-10)
    wires = tuple(wires)
    if 2 ** len(wires) != v.size:
        raise ValueError(f"state of length {v.size} does not fit {len(wires)} wires")
    if not wires:
        return [GlobalPhase(float(np.angle(v[0])))] if abs(np.angle(v[0])) > tol else []
    factors = _product_factors(v, tol)
    if factors is not None:
        gates: list[Gate] = []
        for w, (a, b) in zip(wires, factors):
            gates.extend(_single_qubit_gates(w, a, b, tol))
        return gates
    support = np.flatnonzero(np.abs(v) > tol)
    if support.size == 2:
        i, j = (int(s) for s in support)
        n = len(wires)
        diff = [p for p in range(n) if ((i ^ j) >> (n - 1 - p)) & 1]
        p0 = diff[0]
        gates = _single_qubit_gates(wires[p0], v[i], v[j], tol)
        gates += [CNOT(wires[p0], wires[p]) for p in diff[1:]]
        gates += [PauliX(wires[p]) for p in range(n) if (i >> (n - 1 - p)) & 1]
        return gates
    return [DenseUnitary(householder_prep(v), wires, "householder")]


def householder_prep(v: ArrayLike) -> CMatrix:
    """Unitary with first column ``v`` built from one Householder reflection."""
    v = _unit(v, "state")
    theta = np.angle(v[0]) if abs(v[0]) > 0 else 0.0
    vp = v * np.exp(-1j * theta)
    e0 = np.zeros_like(vp)
    e0[0] = 1
    w = e0 - vp
    nw = np.vdot(w, w).real
    h = np.eye(v.size, dtype=np.complex128)
    if nw > 1e-30:
        h = h - 2 * np.outer(w, w.conj()) / nw
    return np.exp(1j * theta) * h


def _local_unitary(gates: Sequence[Gate], wires: Sequence[int]) -> CMatrix:
    index = {w: k for k, w in enumerate(wires)}
    local: list[Gate] = []
    for g in gates:
        if isinstance(g, GlobalPhase):
            local.append(g)
        elif isinstance(g, CNOT):
            local.append(CNOT(index[g.control], index[g.target]))
        elif isinstance(g, PauliX):
            local.append(PauliX(index[g.wire]))
        elif isinstance(g, Hadamard):
            local.append(Hadamard(index[g.wire]))
        else:
            local.append(DenseUnitary(g.matrix, tuple(index[w] for w in g.wires)))
    return circuit_unitary(Circuit(len(wires), tuple(local)))


def _describe(gates: Sequence[Gate]) -> str:
    return ";".join(f"{g.kind}{list(g.wires)}" for g in gates) or "identity"


def state_prep(v: ArrayLike, wires: Sequence[int]) -> StatePrep:
    gates = state_prep_gates(v, wires)
    return StatePrep(_local_unitary(gates, wires), tuple(wires), _describe(gates))


def prep_gates(m: PaddedMpo, layout: WireLayout | None = None) -> tuple[StatePrep, StatePrep]:
    """``(P_C, P_R)`` on the bond wires with ``P_C|0> = |C>`` and ``P_R|0> = |R>``."""
    layout = layout or WireLayout.standard(m.length, m.D)
    return state_prep(m.prep_col.vector, layout.bond), state_prep(m.prep_row.vector, layout.bond)


# --- block encoding ---------------------------------------------------------------


def site_dilations(m: PaddedMpo) -> list[DilationResult]:
    if m.norms is None:
        raise ValueError("MPO must be normalized before dilation")
    return [unitary_dilation(reshape_site(s), n) for s, n in zip(m.sites, m.norms)]


def assemble_block_encoding(
    m: PaddedMpo,
    dilations: Sequence[DilationResult] | None = None,
    layout: WireLayout | None = None,
) -> tuple[Circuit, WireLayout, float]:
    """Cascade of dilated site unitaries, site ``L`` acting first.

    Each site gate acts on ``(dilation_l, bond..., physical_l)`` so that its
    upper-left block (dilation in ``|0>``) is ``M[A_l] / N_l`` with the bond
    index as the high-order part. Post-selecting dilations in ``|0>``, the
    bond register prepared in ``|C>`` and measured in ``|R>`` leaves
    ``contract_dense(m) / eta``.
    """
    layout = layout or WireLayout.standard(m.length, m.D)
    if len(layout.bond) != m.D or len(layout.physical) != m.length:
        raise ValueError("layout does not match the MPO dimensions")
    if dilations is None:
        dilations = site_dilations(m)
    if len(dilations) != m.length:
        raise ValueError("need one dilation per site")
    gates: list[Gate] = []
    chi = 2**m.D
    for ell in range(m.length - 1, -1, -1):
        d = dilations[ell]
        if d.source_dim != 2 * chi:
            raise ValueError(f"dilation for site {ell + 1} has dim {d.source_dim}, expected {2 * chi}")
        wires = (layout.dilation[ell],) + layout.bond + (layout.physical[ell],)
        gates.append(DenseUnitary(d.unitary, wires, f"U_A{ell + 1}"))
    return Circuit(layout.n_wires, tuple(gates)), layout, m.scale_factor


@dataclass(frozen=True)
class BlockEncoding:
    """An assembled MPO block encoding with its boundary state preparations."""

    circuit: Circuit
    layout: WireLayout
    eta: float
    prep_col: StatePrep
    prep_row: StatePrep
    mpo: PaddedMpo = field(repr=False)

    @property
    def col_state(self) -> NDArray[np.complex128]:
        return self.mpo.prep_col.vector

    @property
    def row_state(self) -> NDArray[np.complex128]:
        return self.mpo.prep_row.vector

    def referenced(self) -> Circuit:
        """``P_R^dag U P_C``: the encoded block now sits at all-ancilla ``|0...0>``."""
        return Circuit(
            self.circuit.n_wires,
            (self.prep_col,) + self.circuit.gates + (self.prep_row.adjoint(),),
        )

    def block(self) -> CMatrix:
        return extract_block(circuit_unitary(self.circuit), self.layout, self.col_state, self.row_state)


def block_encode(
    m: Mpo, mode: str = "uniform", value: float | None = None, layout: WireLayout | None = None
) -> BlockEncoding:
    """Pad, normalize (unless already normalized), dilate and assemble ``m``."""
    pm = m if isinstance(m, PaddedMpo) else pad_to_power_of_two(m)
    if pm.norms is None or value is not None:
        pm = normalize(pm, mode, value)  # type: ignore[arg-type]
    circ, layout, eta = assemble_block_encoding(pm, layout=layout)
    p_c, p_r = prep_gates(pm, layout)
    return BlockEncoding(circ, layout, eta, p_c, p_r, pm)


# --- scheduling -------------------------------------------------------------------


def _asap_layers(c: Circuit) -> list[int]:
    level: dict[int, int] = {}
    layers = []
    for g in c.gates:
        if not g.wires:
            layers.append(0)
            continue
        lv = max(level.get(w, 0) for w in g.wires) + 1
        for w in g.wires:
            level[w] = lv
        layers.append(lv)
    return layers


def depth(c: Circuit, interleaved: bool = True) -> int:
    """Circuit depth; wire-less gates (global phases) do not count.

    ``interleaved=False`` packs gates strictly in list order: a gate joins the
    last open layer if it is wire-disjoint from it, otherwise opens a new one.
    ``interleaved=True`` lets every gate move earlier past wire-disjoint
    gates (as-soon-as-possible layering).
    """
    if interleaved:
        return max(_asap_layers(c), default=0)
    n_layers = 0
    current: set[int] = set()
    for g in c.gates:
        ws = set(g.wires)
        if not ws:
            continue
        if n_layers and not (ws & current):
            current |= ws
        else:
            n_layers += 1
            current = set(ws)
    return n_layers


def schedule(c: Circuit) -> Circuit:
    """Reorder ``c`` by ASAP layer; only wire-disjoint gates change relative order."""
    layers = _asap_layers(c)
    order = sorted(range(len(c.gates)), key=lambda i: (layers[i], i))
    return Circuit(c.n_wires, tuple(c.gates[i] for i in order))


# --- JSON dumps -------------------------------------------------------------------


def _encode_matrix(m: CMatrix) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(data: Any) -> CMatrix:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        out = np.empty(arr.shape[:-1], dtype=np.complex128)
        # assign parts directly so signed zeros survive a round trip
        out.real, out.imag = arr[..., 0], arr[..., 1]
        return out
    return arr.astype(np.complex128)


def gate_record(g: Gate) -> dict[str, Any]:
    rec: dict[str, Any] = {"kind": g.kind, "wires": list(g.wires), "params": g.params()}
    if isinstance(g, DenseUnitary):
        rec["matrix"] = _encode_matrix(g.unitary)
    return rec


def gate_from_record(rec: dict[str, Any]) -> Gate:
    kind, wires, params = rec["kind"], rec.get("wires", []), rec.get("params", {})
    if kind == "dense":
        return DenseUnitary(decode_matrix(rec["matrix"]), tuple(wires), params.get("label", ""))
    if kind == "state_prep":
        return StatePrep(decode_matrix(rec["matrix"]), tuple(wires), params.get("label", ""))
    if kind == "cnot":
        return CNOT(wires[0], wires[1])
    if kind == "rz":
        return RZ(wires[0], params["angle"])
    if kind == "mcrz":
        return MCRZ(tuple(wires[:-1]), wires[-1], params["angle"], tuple(params["polarity"]))
    if kind == "x":
        return PauliX(wires[0])
    if kind == "h":
        return Hadamard(wires[0])
    if kind == "global_phase":
        return GlobalPhase(params["angle"])
    raise ValueError(f"unknown gate kind {kind!r}")


def circuit_to_dict(c: Circuit) -> dict[str, Any]:
    return {"n_wires": c.n_wires, "gates": [gate_record(g) for g in c.gates]}


def circuit_from_dict(data: dict[str, Any]) -> Circuit:
    return Circuit(int(data["n_wires"]), tuple(gate_from_record(r) for r in data["gates"]))


def dump_circuit(c: Circuit, path: str | Path) -> None:
    Path(path).write_text(json.dumps(circuit_to_dict(c), sort_keys=True, indent=1) + "\n")


def load_circuit(path: str | Path) -> Circuit:
    return circuit_from_dict(json.loads(Path(path).read_text()))


def concat(circuits: Iterable[Circuit]) -> Circuit:
    circuits = list(circuits)
    n = max((c.n_wires for c in circuits), default=0)
    return Circuit(n, tuple(g for c in circuits for g in c.gates))
