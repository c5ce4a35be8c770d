"""CNOT counts of the decomposed signal-processing operator, cascade vs auxiliary-qubit variant."""

from __future__ import annotations

import argparse
import csv
import sys

from mpo_qet.circuit import circuit_unitary
from mpo_qet.numerics import max_abs
from mpo_qet.signal import (
    cnot_count,
    decompose_circuit,
    global_phase,
    martyn_processing,
    mcrz_cascade,
    reference_projector_phase,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--phi", type=float, default=0.37)
    ap.add_argument("--check", action="store_true", help="also verify the decomposed cascade against Pi_phi")
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "cascade_raw", "cascade", "aux_variant", "two_to_n", "ratio", "check_err"])
    for n in range(1, args.n_max + 1):
        casc = mcrz_cascade(n, args.phi)
        raw = cnot_count(decompose_circuit(casc, cancel=False))
        dec = decompose_circuit(casc)
        aux = cnot_count(decompose_circuit(martyn_processing(n, args.phi)))
        check = ""
        if args.check:
            check = f"{max_abs(global_phase(n, args.phi) * circuit_unitary(dec) - reference_projector_phase(n, args.phi)):.1e}"
        c = cnot_count(dec)
        w.writerow([n, raw, c, aux, 2**n, f"{aux / c:.3f}" if c else "", check])


if __name__ == "__main__":
    main()
