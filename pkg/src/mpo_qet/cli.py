"""Command-line driver.

Commands: ``verify``, ``filter``, ``cost``, ``phases-fit`` and ``dump-circuit``.
Exit status is 0 when every check passes, 1 when a check fails and 2 for
invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .circuit import BlockEncoding, block_encode, circuit_to_dict, circuit_unitary
from .costs import CostReport, cost_report, pauli_product_rows
from .models import ModelSpec, load_model, mpo_from_spec, terms_from_spec
from .mpo import contract_dense
from .numerics import max_abs
from .qet import (
    DEFAULT_FIT_BOUND,
    FilterSpec,
    PhaseSequence,
    build_qet_circuit,
    eigenbasis_values,
    filter_target,
    fit_filter_phases,
    hermitian_part,
    load_phases,
    qet_block,
    save_phases,
)

log = logging.getLogger("mpo_qet")

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2

FILTER_COLUMNS = ("eigenvalue_index", "original", "normalized", "transformed", "target", "warning")


@dataclass
class RunConfig:
    command: str
    model: Path | None = None
    phases: Path | None = None
    out: Path | None = None
    tol: float = 1e-10
    seed: int = 0
    degree: int | None = None
    gap: float | None = None
    qsp_degree: int | None = None
    L: list[int] = field(default_factory=list)
    chi: list[int] = field(default_factory=list)
    M: int | None = None

    def __post_init__(self) -> None:
        for name in ("model", "phases"):
            p = getattr(self, name)
            if p is not None and not Path(p).is_file():
                raise ValueError(f"--{name}: file not found: {p}")
        if not self.tol > 0:
            raise ValueError("--tol must be > 0")

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> RunConfig:
        return cls(
            command=ns.command,
            model=Path(ns.model) if getattr(ns, "model", None) else None,
            phases=Path(ns.phases) if getattr(ns, "phases", None) else None,
            out=Path(ns.out) if getattr(ns, "out", None) else None,
            tol=ns.tol if ns.tol is not None else _default_tol(ns.command),
            seed=ns.seed,
            degree=getattr(ns, "degree", None),
            gap=getattr(ns, "gap", None),
            qsp_degree=getattr(ns, "qsp_degree", None),
            L=list(getattr(ns, "L", None) or []),
            chi=list(getattr(ns, "chi", None) or []),
            M=getattr(ns, "M", None),
        )


def _default_tol(command: str) -> float:
    return DEFAULT_FIT_BOUND if command == "phases-fit" else 1e-10 if command == "verify" else 1e-8


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _require_model(cfg: RunConfig) -> ModelSpec:
    if cfg.model is None:
        raise ValueError(f"{cfg.command}: --model is required")
    return load_model(cfg.model)


def _encode(spec: ModelSpec) -> BlockEncoding:
    return block_encode(mpo_from_spec(spec), spec.normalization, spec.N)


def reference_hamiltonian(spec: ModelSpec) -> np.ndarray:
    """Dense ``H`` from the Pauli-term expansion, or the MPO contraction for custom specs."""
    if spec.model == "custom":
        return contract_dense(mpo_from_spec(spec))
    return terms_from_spec(spec).matrix()


def cmd_verify(cfg: RunConfig) -> int:
    spec = _require_model(cfg)
    be = _encode(spec)
    h = reference_hamiltonian(spec)
    err = max_abs(be.eta * be.block() - h)
    ok = err <= cfg.tol
    report = {
        "model": spec.model,
        "L": spec.L,
        "D": be.mpo.D,
        "n_wires": be.layout.n_wires,
        "eta": be.eta,
        "norms": list(be.mpo.norms or ()),
        "max_abs_error": err,
        "tol": cfg.tol,
        "status": "PASS" if ok else "FAIL",
    }
    _emit(json.dumps(report, indent=1, sort_keys=True) + "\n", cfg.out)
    if cfg.out is not None:
        print(f"{report['status']}: max |eta*block - H| = {err:.3e} (tol {cfg.tol:g})")
    return EXIT_OK if ok else EXIT_FAIL


def _phases_for(cfg: RunConfig) -> tuple[PhaseSequence, float | None, FilterSpec | None]:
    fspec = None
    if cfg.degree is not None or cfg.gap is not None:
        if cfg.degree is None or cfg.gap is None:
            raise ValueError("--degree and --gap must be given together")
        fspec = FilterSpec(cfg.degree, cfg.gap)
    if cfg.phases is not None:
        return load_phases(cfg.phases), None, fspec
    if fspec is None:
        raise ValueError("filter: give --phases or --degree/--gap to fit phases")
    fit = fit_filter_phases(fspec, seed=cfg.seed, n_phases=cfg.qsp_degree)
    return fit.sequence, fit.residual, fspec


def filter_rows(spec: ModelSpec, ph: PhaseSequence, fspec: FilterSpec | None, warn: bool = False) -> list[dict]:
    be = _encode(spec)
    h = contract_dense(be.mpo)
    block = hermitian_part(qet_block(build_qet_circuit(be, ph), be.layout))
    vals, diag, _ = eigenbasis_values(block, h / be.eta)
    rows = []
    for k, (lam_n, t) in enumerate(zip(vals, np.real(diag))):
        target = float(filter_target(lam_n, fspec)) if fspec is not None else None
        rows.append(
            {
                "eigenvalue_index": k,
                "original": float(lam_n * be.eta),
                "normalized": float(lam_n),
                "transformed": float(t),
                "target": target,
                "warning": int(warn),
            }
        )
    return rows


def cmd_filter(cfg: RunConfig) -> int:
    spec = _require_model(cfg)
    ph, residual, fspec = _phases_for(cfg)
    warn = residual is not None and residual > DEFAULT_FIT_BOUND
    rows = filter_rows(spec, ph, fspec, warn)
    lines = [",".join(FILTER_COLUMNS)]
    for r in rows:
        lines.append(",".join("" if r[c] is None else repr(r[c]) for c in FILTER_COLUMNS))
    _emit("\n".join(lines) + "\n", cfg.out)
    if fspec is None:
        return EXIT_OK
    allowed = (residual or 0.0) + cfg.tol
    worst = max(abs(r["transformed"] - r["target"]) for r in rows)
    log.info("filter: worst |transformed - target| = %.3e, allowed %.3e", worst, allowed)
    return EXIT_OK if worst <= allowed and not warn else EXIT_FAIL


def cmd_cost(cfg: RunConfig) -> int:
    Ls = cfg.L or [3]
    chis = cfg.chi or [4]
    report = CostReport(())
    for L in Ls:
        for chi in chis:
            report = report + cost_report(L, chi, cfg.M, cfg.degree)
        report = report + pauli_product_rows(L)
    _emit(report.to_csv(), cfg.out)
    return EXIT_OK


def cmd_phases_fit(cfg: RunConfig) -> int:
    if cfg.degree is None or cfg.gap is None:
        raise ValueError("phases-fit: --degree and --gap are required")
    fspec = FilterSpec(cfg.degree, cfg.gap)
    fit = fit_filter_phases(fspec, seed=cfg.seed, n_phases=cfg.qsp_degree, bound=cfg.tol)
    if cfg.out is None:
        print(json.dumps({"phases": list(fit.sequence.phases), "parity": fit.sequence.parity}))
    else:
        save_phases(fit.sequence, cfg.out)
    print(f"{'FAIL' if fit.warning else 'PASS'}: sup residual {fit.residual:.3e} (bound {cfg.tol:g})", file=sys.stderr)
    return EXIT_FAIL if fit.warning else EXIT_OK


def cmd_dump_circuit(cfg: RunConfig) -> int:
    spec = _require_model(cfg)
    be = _encode(spec)
    circ = build_qet_circuit(be, load_phases(cfg.phases)) if cfg.phases else be.referenced()
    if circ.n_wires <= 14:
        circuit_unitary(circ)  # cheap sanity pass before writing
    _emit(json.dumps(circuit_to_dict(circ), sort_keys=True, indent=1) + "\n", cfg.out)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "filter": cmd_filter,
    "cost": cmd_cost,
    "phases-fit": cmd_phases_fit,
    "dump-circuit": cmd_dump_circuit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpo-qet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--tol", type=float, default=None, help="pass/fail tolerance")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify", help="check eta * block == H for a model spec")
    p.add_argument("--model", required=True)
    common(p)

    p = sub.add_parser("filter", help="QET-transformed eigenvalues vs the filter target (CSV)")
    p.add_argument("--model", required=True)
    p.add_argument("--phases")
    p.add_argument("--degree", type=int)
    p.add_argument("--gap", type=float)
    p.add_argument("--qsp-degree", type=int, help="number of phases to fit (default 2 * degree)")
    common(p)

    p = sub.add_parser("cost", help="analytical cost table (CSV)")
    p.add_argument("--L", type=int, nargs="+")
    p.add_argument("--chi", type=int, nargs="+")
    p.add_argument("--M", type=int)
    p.add_argument("--degree", type=int, help="QET degree for the qet_units column")
    common(p)

    p = sub.add_parser("phases-fit", help="fit eigenstate-filter phases to a JSON file")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--gap", type=float, required=True)
    p.add_argument("--qsp-degree", type=int)
    common(p)

    p = sub.add_parser("dump-circuit", help="write the referenced block encoding (or QET circuit) as JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--phases")
    common(p)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig.from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
