"""Reference LCU block encoding ``PREP^dag . SELECT . PREP`` over Pauli words.

PREP loads amplitudes ``sqrt(|alpha_m| / lambda)`` on ``ceil(log2 M)``
ancillas; SELECT applies ``(alpha_m / |alpha_m|) P_m`` controlled on ancilla
state ``|m>`` and the identity on unused slots. The ancilla-``|0>`` block is
``H / lambda``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit, DenseUnitary, StatePrep, ancilla_block, circuit_unitary, state_prep
from .numerics import PAULI, CMatrix, DimensionError, kron_all

MAX_TERMS = 2**10
_WORD_CHARS = frozenset("IXYZ")


@dataclass(frozen=True)
class PauliTerm:
    coeff: complex
    word: str

    def __post_init__(self) -> None:
        if not self.word or set(self.word) - _WORD_CHARS:
            raise ValueError(f"Pauli word must be a non-empty string over IXYZ, got {self.word!r}")
        if not np.isfinite(self.coeff):
            raise ValueError("coefficient must be finite")

    def matrix(self) -> CMatrix:
        return self.coeff * kron_all(*(PAULI[c] for c in self.word))


@dataclass(frozen=True)
class PauliTermList:
    terms: tuple[PauliTerm, ...]

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("a term list needs at least one term")
        lengths = {len(t.word) for t in terms}
        if len(lengths) != 1:
            raise ValueError(f"Pauli words have mixed lengths {sorted(lengths)}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[complex, str]], drop_zeros: bool = True) -> PauliTermList:
        """Merge repeated words and (by default) drop zero coefficients."""
        merged: dict[str, complex] = {}
        for coeff, word in pairs:
            merged[word] = merged.get(word, 0.0) + coeff
        terms = [PauliTerm(c, w) for w, c in merged.items() if not (drop_zeros and c == 0)]
        if not terms and merged:
            word = next(iter(merged))
            terms = [PauliTerm(0.0, word)]
        return cls(tuple(terms))

    @property
    def n_qubits(self) -> int:
        return len(self.terms[0].word)

    @property
    def M(self) -> int:
        return len(self.terms)

    @property
    def lam(self) -> float:
        return float(sum(abs(t.coeff) for t in self.terms))

    def matrix(self) -> CMatrix:
        if self.n_qubits > 12:
            raise DimensionError("dense term-list matrix capped at 12 qubits")
        return sum((t.matrix() for t in self.terms), np.zeros((2**self.n_qubits,) * 2, dtype=np.complex128))


def _word(length: int, ops: dict[int, str]) -> str:
    return "".join(ops.get(i, "I") for i in range(length))


def ising_terms(length: int, J: float, g: float, zeta: float = 0.0) -> PauliTermList:
    pairs: list[tuple[complex, str]] = [(J, _word(length, {i: "Z", i + 1: "Z"})) for i in range(length - 1)]
    pairs += [(g, _word(length, {i: "X"})) for i in range(length)]
    if zeta:
        pairs.append((zeta, "I" * length))
    return PauliTermList.from_pairs(pairs)


def heisenberg_terms(
    length: int, JX: float, JY: float, JZ: float, gX: float = 0.0, gY: float = 0.0, gZ: float = 0.0
) -> PauliTermList:
    pairs: list[tuple[complex, str]] = []
    for i in range(length - 1):
        for p, j in (("X", JX), ("Y", JY), ("Z", JZ)):
            pairs.append((j, _word(length, {i: p, i + 1: p})))
    for i in range(length):
        for p, g in (("X", gX), ("Y", gY), ("Z", gZ)):
            pairs.append((g, _word(length, {i: p})))
    return PauliTermList.from_pairs(pairs)


def pauli_product_terms(coeffs: Sequence[Sequence[float]], zeta: float = 0.0) -> PauliTermList:
    """Expand ``prod_l (a_l I + b_l X + c_l Y + d_l Z) + zeta I`` into up to ``4**L`` words."""
    pairs: list[tuple[complex, str]] = []
    for choice in product(range(4), repeat=len(coeffs)):
        c = math.prod(float(coeffs[l][k]) for l, k in enumerate(choice))
        pairs.append((c, "".join("IXYZ"[k] for k in choice)))
    if zeta:
        pairs.append((zeta, "I" * len(coeffs)))
    return PauliTermList.from_pairs(pairs)


def load_terms(path: str | Path) -> PauliTermList:
    """Read ``[{"coeff": float, "word": "ZZI"}, ...]``."""
    data = json.loads(Path(path).read_text())
    return terms_from_records(data)


def terms_from_records(data: object) -> PauliTermList:
    if not isinstance(data, list):
        raise ValueError("term list must be a JSON array")
    pairs = []
    for k, rec in enumerate(data):
        if not isinstance(rec, dict) or "coeff" not in rec or "word" not in rec:
            raise ValueError(f"term {k}: needs fields 'coeff' and 'word'")
        coeff = rec["coeff"]
        if isinstance(coeff, list):
            coeff = complex(coeff[0], coeff[1])
        pairs.append((coeff, str(rec["word"])))
    return PauliTermList.from_pairs(pairs, drop_zeros=False)


@dataclass(frozen=True)
class LcuLayout:
    ancillas: tuple[int, ...]
    physical: tuple[int, ...]

    @property
    def n_wires(self) -> int:
        return len(self.ancillas) + len(self.physical)


def lcu_ancillas(M: int) -> int:
    return math.ceil(math.log2(M)) if M > 1 else 0


def prep_amplitudes(t: PauliTermList) -> np.ndarray:
    m = lcu_ancillas(t.M)
    amps = np.zeros(2**m, dtype=np.complex128)
    lam = t.lam
    if lam == 0:
        raise ValueError("all coefficients vanish; lambda = 0")
    amps[: t.M] = [math.sqrt(abs(x.coeff) / lam) for x in t.terms]
    return amps


def select_matrix(t: PauliTermList) -> CMatrix:
    """Block-diagonal SELECT with ancilla index as the high-order part."""
    m = lcu_ancillas(t.M)
    dim = 2**t.n_qubits
    sel = np.zeros((2**m * dim,) * 2, dtype=np.complex128)
    for k in range(2**m):
        block = np.eye(dim, dtype=np.complex128)
        if k < t.M:
            term = t.terms[k]
            phase = term.coeff / abs(term.coeff) if term.coeff != 0 else 1.0
            block = phase * kron_all(*(PAULI[c] for c in term.word))
        sel[k * dim : (k + 1) * dim, k * dim : (k + 1) * dim] = block
    return sel


def build_lcu_circuit(t: PauliTermList) -> tuple[Circuit, LcuLayout, float]:
    """``[PREP, SELECT, PREP^dag]`` on ancillas ``0..m-1`` then the physical qubits."""
    if t.M > MAX_TERMS:
        raise DimensionError(f"LCU limited to {MAX_TERMS} terms, got {t.M}")
    m = lcu_ancillas(t.M)
    layout = LcuLayout(tuple(range(m)), tuple(range(m, m + t.n_qubits)))
    prep: StatePrep = state_prep(prep_amplitudes(t), layout.ancillas)
    select = DenseUnitary(select_matrix(t), layout.ancillas + layout.physical, "SELECT")
    gates = ((prep,) if m else ()) + (select,) + ((prep.adjoint(),) if m else ())
    return Circuit(layout.n_wires, gates), layout, t.lam


def lcu_block(t: PauliTermList) -> tuple[CMatrix, float]:
    """``(H / lambda, lambda)`` read off the simulated LCU circuit."""
    c, layout, lam = build_lcu_circuit(t)
    return ancilla_block(circuit_unitary(c), layout.n_wires, layout.ancillas, layout.physical), lam


def pauli_terms(spec) -> PauliTermList:
    """Term list for a model spec (a :class:`~mpo_qet.models.ModelSpec` or its dict form)."""
    from .models import ModelSpec, spec_from_dict, terms_from_spec

    return terms_from_spec(spec if isinstance(spec, ModelSpec) else spec_from_dict(spec))
