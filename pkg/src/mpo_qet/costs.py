"""Analytical gate-count model comparing MPO and LCU block encodings.

Units: a dense unitary on ``n`` qubits costs ``4**n`` units (leading order
of generic synthesis). Signal-processing entries come in two forms:
``sp_units = 2**n`` is the leading-order figure, ``sp_cnots`` the exact
CNOT count of the decomposed multi-controlled-RZ cascade on ``n`` ancillas
(``2**n - 2``), which is what the circuit actually measures.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

from .mpo import bond_qubits
from .signal import cascade_cnot_count, decompose_circuit, mcrz_cascade

CSV_COLUMNS = ("method", "L", "chi_or_M", "ancillas", "be_units", "sp_units", "sp_cnots", "qet_units")


@dataclass(frozen=True)
class CostRow:
    method: str
    L: int
    chi_or_M: int
    ancillas: int
    be_units: int
    sp_units: int
    sp_cnots: int
    qet_units: int | None = None
    notes: str = ""


@dataclass(frozen=True)
class CostReport:
    rows: tuple[CostRow, ...]

    def row(self, method: str) -> CostRow:
        for r in self.rows:
            if r.method == method:
                return r
        raise KeyError(method)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            d = asdict(r)
            w.writerow(["" if d[c] is None else d[c] for c in CSV_COLUMNS])
        return buf.getvalue()

    def __add__(self, other: CostReport) -> CostReport:
        return CostReport(self.rows + other.rows)


def _qet(d: int | None, be: int, sp: int) -> int | None:
    return None if d is None else d * (be + sp)


def mpo_row(L: int, chi: int, d: int | None = None, method: str = "mpo") -> CostRow:
    """``L + D`` ancillas; ``L`` site unitaries on ``D + 2`` qubits each."""
    D = bond_qubits(chi)
    n = L + D
    be = L * 4 ** (D + 2)
    sp = 2**n
    spc = cascade_cnot_count(n)
    return CostRow(method, L, chi, n, be, sp, spc, _qet(d, be, spc), f"D={D}")


def lcu_row(L: int, M: int, d: int | None = None, method: str = "lcu") -> CostRow:
    """``ceil(log2 M)`` ancillas, ``L * M**2`` block-encoding units."""
    m = math.ceil(math.log2(M)) if M > 1 else 0
    be = L * M**2
    sp = 2**m
    spc = cascade_cnot_count(m) if m else 0
    return CostRow(method, L, M, m, be, sp, spc, _qet(d, be, spc), f"m={m}")


def cost_report(L: int, chi: int, M: int | None = None, d: int | None = None) -> CostReport:
    """MPO row, an LCU row for ``M`` (if given) and the two asymptotic LCU rows.

    The special rows use ``M = 2L - 1`` (terms linear in ``L``, e.g. Ising)
    and ``M = 4**L`` (a generic operator expanded in Pauli words).
    """
    if L < 2:
        raise ValueError("L must be >= 2")
    if chi < 1:
        raise ValueError("chi must be >= 1")
    if M is not None and M < 1:
        raise ValueError("M must be >= 1")
    rows = [mpo_row(L, chi, d)]
    if M is not None:
        rows.append(lcu_row(L, M, d))
    rows.append(lcu_row(L, 2 * L - 1, d, "lcu_linear_terms"))
    rows.append(lcu_row(L, 4**L, d, "lcu_all_words"))
    return CostReport(tuple(rows))


def pauli_product_ancillas(L: int) -> dict[str, int]:
    """Ancillas for the shifted Pauli-product: ``4**L`` words plus one for the shift (LCU) vs chi = 2 (MPO)."""
    lcu = lcu_row(L, 4**L).ancillas + 1
    mpo = mpo_row(L, 2).ancillas
    return {"lcu": lcu, "mpo": mpo}


def pauli_product_rows(L: int) -> CostReport:
    counts = pauli_product_ancillas(L)
    lcu = lcu_row(L, 4**L, method="lcu_pauli_product_shifted")
    lcu = CostRow(**{**asdict(lcu), "ancillas": counts["lcu"], "notes": "4**L words plus one shift ancilla"})
    return CostReport((lcu, mpo_row(L, 2, method="mpo_pauli_product_shifted")))


def measured_cascade_cnots(n: int) -> int:
    """Count CNOTs after decomposing and cancelling the cascade on ``n`` wires."""
    return decompose_circuit(mcrz_cascade(n, 1.0)).count("cnot")
