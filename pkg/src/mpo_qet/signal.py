"""The signal-processing operator ``Pi_phi = exp(-i phi (2|0><0| - I))`` on n ancillas.

Two gate-level realizations are provided:

* the multi-controlled-RZ cascade: gate ``q`` rotates ancilla ``q`` by
  ``phi / 2**(n-q)`` under open controls on ancillas ``1..q-1``. It equals
  ``Pi_phi`` up to the scalar ``exp(i phi (1 - 2**(1-n)))``;
* the auxiliary-qubit variant: an open multi-controlled X (built from a
  multi-controlled RZ conjugated by Hadamards) flags ``|0...0>`` on one extra
  wire, which is rotated and then uncomputed.

Multi-controlled rotations decompose into RZ and CNOT by the halving
recursion, after which :func:`cancel_cnots` removes redundant CNOT pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .circuit import (
    CNOT,
    MCRZ,
    RZ,
    Circuit,
    Gate,
    GlobalPhase,
    Hadamard,
    PauliX,
    circuit_unitary,
)
from .numerics import CMatrix

PHASE_TOL = 1e-12

Variant = Literal["cascade", "martyn"]


def reference_projector_phase(n: int, phi: float) -> CMatrix:
    """Dense ``diag(exp(-i phi), exp(i phi), ..., exp(i phi))`` of size ``2**n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = np.full(2**n, np.exp(1j * phi))
    d[0] = np.exp(-1j * phi)
    return np.diag(d)


def _ancilla_wires(n: int, wires: Sequence[int] | None) -> tuple[int, ...]:
    if n < 1:
        raise ValueError("n must be >= 1")
    wires = tuple(range(n)) if wires is None else tuple(wires)
    if len(wires) != n:
        raise ValueError(f"expected {n} ancilla wires, got {len(wires)}")
    return wires


def cascade_gates(n: int, phi: float, wires: Sequence[int] | None = None) -> list[Gate]:
    wires = _ancilla_wires(n, wires)
    return [MCRZ(wires[: q - 1], wires[q - 1], phi / 2 ** (n - q)) for q in range(1, n + 1)]


def mcrz_cascade(
    n: int, phi: float, wires: Sequence[int] | None = None, n_wires: int | None = None
) -> Circuit:
    """The n-gate cascade, without its global phase."""
    wires = _ancilla_wires(n, wires)
    return Circuit(n_wires or max(wires) + 1, tuple(cascade_gates(n, phi, wires)))


def analytic_global_phase(n: int, phi: float) -> complex:
    """``exp(i phi (1 - 2**(1-n)))``, the scalar with ``c * cascade = Pi_phi``."""
    return complex(np.exp(1j * phi * (1.0 - 2.0 ** (1 - n))))


def global_phase(n: int, phi: float, tol: float = PHASE_TOL) -> complex:
    """Scalar ``c`` with ``c * cascade = Pi_phi``, read off the dense quotient.

    Raises:
        RuntimeError: if the quotient is not a multiple of the identity or
            disagrees with :func:`analytic_global_phase`.
    """
    u = circuit_unitary(mcrz_cascade(n, phi))
    ref = np.diagonal(reference_projector_phase(n, phi))
    off = np.max(np.abs(u - np.diag(np.diagonal(u))))
    quotient = ref / np.diagonal(u)
    c = complex(quotient[0])
    if off > tol or np.max(np.abs(quotient - c)) > tol:
        raise RuntimeError("cascade is not Pi_phi up to a scalar")
    if abs(c - analytic_global_phase(n, phi)) > tol:
        raise RuntimeError(f"dense global phase {c} disagrees with the closed form")
    return c


def processing_operator(
    n: int, phi: float, wires: Sequence[int] | None = None, n_wires: int | None = None
) -> Circuit:
    """Cascade plus a tracked :class:`GlobalPhase`; exactly ``Pi_phi`` on the ancillas."""
    c = mcrz_cascade(n, phi, wires, n_wires)
    return Circuit(c.n_wires, c.gates + (GlobalPhase(phi * (1.0 - 2.0 ** (1 - n))),))


def martyn_gates(n: int, phi: float, wires: Sequence[int], aux: int) -> list[Gate]:
    # H . MCRZ(pi/2) . H is -iX on aux when all controls read 0; its inverse
    # +iX undoes both the flip and the relative phase.
    return [
        Hadamard(aux),
        MCRZ(tuple(wires), aux, np.pi / 2),
        Hadamard(aux),
        RZ(aux, -phi),
        Hadamard(aux),
        MCRZ(tuple(wires), aux, -np.pi / 2),
        Hadamard(aux),
    ]


def martyn_processing(
    n: int,
    phi: float,
    wires: Sequence[int] | None = None,
    aux: int | None = None,
    n_wires: int | None = None,
) -> Circuit:
    """Auxiliary-qubit realization; equals ``Pi_phi`` on the aux-``|0>`` block, no phase fix."""
    wires = _ancilla_wires(n, wires)
    aux = max(wires) + 1 if aux is None else aux
    if aux in wires:
        raise ValueError("auxiliary wire must differ from the ancilla wires")
    total = n_wires or max(max(wires), aux) + 1
    return Circuit(total, tuple(martyn_gates(n, phi, wires, aux)))


@dataclass(frozen=True)
class ProcessingSpec:
    n: int
    phi: float
    variant: Variant = "cascade"

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.variant not in ("cascade", "martyn"):
            raise ValueError(f"unknown variant {self.variant!r}")

    def build(self) -> Circuit:
        if self.variant == "cascade":
            return processing_operator(self.n, self.phi)
        return martyn_processing(self.n, self.phi)


# --- decomposition ----------------------------------------------------------------


def _decompose(controls: tuple[int, ...], polarity: tuple[int, ...], target: int, alpha: float) -> list[Gate]:
    if not controls:
        return [RZ(target, alpha)]
    c, rest, prest = controls[-1], controls[:-1], polarity[:-1]
    # open control: the two half rotations add on c = 0 and cancel on c = 1
    sign = 1.0 if polarity[-1] == 0 else -1.0
    first = _decompose(rest, prest, target, alpha / 2)
    second = _decompose(rest, prest, target, sign * alpha / 2)
    # the second half is mirrored so neighbouring CNOTs meet and cancel
    return first + [CNOT(c, target)] + second[::-1] + [CNOT(c, target)]


def decompose_mcrz(g: MCRZ, n_wires: int | None = None) -> Circuit:
    """RZ + CNOT circuit equal to ``g``, before any CNOT cancellation.

    A gate with ``k`` controls yields ``2**k`` rotations of magnitude
    ``angle / 2**k`` and ``2**(k+1) - 2`` CNOTs.
    """
    gates = _decompose(g.controls, g.polarity, g.target, g.angle)  # type: ignore[arg-type]
    return Circuit(n_wires or max(g.wires) + 1, tuple(gates))


def decompose_circuit(c: Circuit, cancel: bool = True) -> Circuit:
    """Replace every MCRZ by its RZ + CNOT expansion, optionally cancelling CNOTs."""
    gates: list[Gate] = []
    for g in c.gates:
        if isinstance(g, MCRZ):
            gates.extend(_decompose(g.controls, g.polarity, g.target, g.angle))  # type: ignore[arg-type]
        else:
            gates.append(g)
    out = Circuit(c.n_wires, tuple(gates))
    return cancel_cnots(out) if cancel else out


def _commutes(g: Gate, h: Gate) -> bool:
    """Sound (not complete) commutation test of a CNOT or X ``g`` with ``h``."""
    if not set(g.wires) & set(h.wires):
        return True
    if isinstance(g, CNOT):
        if isinstance(h, CNOT):
            return h.control != g.target and h.target != g.control
        if h.diagonal:
            return g.target not in h.wires
        if isinstance(h, PauliX):
            return h.wire == g.target
        return False
    if isinstance(g, PauliX):
        if isinstance(h, CNOT):
            return h.target == g.wire
        return False
    return False


def _same(g: Gate, h: Gate) -> bool:
    if isinstance(g, CNOT) and isinstance(h, CNOT):
        return g.control == h.control and g.target == h.target
    if isinstance(g, PauliX) and isinstance(h, PauliX):
        return g.wire == h.wire
    return False


def cancel_cnots(c: Circuit) -> Circuit:
    """Remove pairs of equal CNOTs (and X gates) separated only by commuting gates.

    Repeats until no pair is left. Every removal is exact, so the unitary is
    unchanged.
    """
    gates: list[Gate] = list(c.gates)
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(gates):
            g = gates[i]
            removed = False
            if isinstance(g, (CNOT, PauliX)):
                for j in range(i + 1, len(gates)):
                    h = gates[j]
                    if _same(g, h):
                        del gates[j]
                        del gates[i]
                        removed = True
                        break
                    if not _commutes(g, h):
                        break
            if removed:
                changed = True
            else:
                i += 1
    return Circuit(c.n_wires, tuple(gates))


def cnot_count(c: Circuit) -> int:
    return c.count("cnot")


def rotation_angles(c: Circuit) -> list[float]:
    return [g.angle for g in c.gates if isinstance(g, RZ)]


def cascade_cnot_count(n: int) -> int:
    """CNOTs of the decomposed and cancelled cascade: ``sum_{k=1}^{n-1} 2**k = 2**n - 2``."""
    return 2**n - 2


def martyn_cnot_count(n: int) -> int:
    """Two ``n``-controlled rotations, ``2**n`` CNOTs each after cancellation."""
    return 2 ** (n + 1)
