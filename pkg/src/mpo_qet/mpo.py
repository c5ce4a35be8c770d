"""Matrix product operators: builders, padding, normalization, dense contraction.

A site tensor is stored as an array of shape ``(chi_left, chi_right, 2, 2)``
indexed ``(bond_out, bond_in, phys_out, phys_in)``: entry ``[a, b]`` is the
2x2 operator in row ``a`` and column ``b`` of the operator-valued matrix.
The operator represented by an MPO is ``R . A1 . A2 ... AL . C`` where the
products of operator entries belonging to different sites are tensor
products (site 1 being the most significant factor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .numerics import I2, X, Y, Z, CMatrix, DimensionError, spectral_norm

CONTRACT_MAX_SITES = 12

NormMode = Literal["uniform", "per_site"]


@dataclass(frozen=True)
class SiteTensor:
    data: NDArray[np.complex128]

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.complex128)
        if data.ndim != 4 or data.shape[2:] != (2, 2):
            raise ValueError(f"site tensor must have shape (chi_l, chi_r, 2, 2), got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("site tensor has non-finite entries")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_grid(cls, grid: Sequence[Sequence[ArrayLike]]) -> SiteTensor:
        """Build from a nested list of 2x2 operators (``0`` is accepted for the zero operator)."""
        rows = len(grid)
        cols = len(grid[0])
        data = np.zeros((rows, cols, 2, 2), dtype=np.complex128)
        for a, row in enumerate(grid):
            if len(row) != cols:
                raise ValueError("ragged operator grid")
            for b, op in enumerate(row):
                data[a, b] = np.broadcast_to(np.asarray(op, dtype=np.complex128), (2, 2))
        return cls(data)

    @property
    def chi_left(self) -> int:
        return self.data.shape[0]

    @property
    def chi_right(self) -> int:
        return self.data.shape[1]

    def op(self, a: int, b: int) -> CMatrix:
        return self.data[a, b]


@dataclass(frozen=True)
class Mpo:
    """Open-boundary MPO closed by a boundary row ``R`` and column ``C``.

    ``norms`` holds the per-site normalization factors once :func:`normalize`
    has been applied; before that it is ``None``.
    """

    sites: tuple[SiteTensor, ...]
    row: NDArray[np.complex128]
    col: NDArray[np.complex128]
    norms: tuple[float, ...] | None = None
    label: str = ""

    def __post_init__(self) -> None:
        sites = tuple(self.sites)
        if not sites:
            raise ValueError("an MPO needs at least one site")
        row = np.asarray(self.row, dtype=np.complex128).reshape(-1)
        col = np.asarray(self.col, dtype=np.complex128).reshape(-1)
        for i in range(len(sites) - 1):
            if sites[i].chi_right != sites[i + 1].chi_left:
                raise ValueError(
                    f"bond mismatch between sites {i + 1} and {i + 2}: "
                    f"{sites[i].chi_right} != {sites[i + 1].chi_left}"
                )
        if row.size != sites[0].chi_left:
            raise ValueError(f"boundary row has length {row.size}, expected {sites[0].chi_left}")
        if col.size != sites[-1].chi_right:
            raise ValueError(f"boundary column has length {col.size}, expected {sites[-1].chi_right}")
        if self.norms is not None:
            norms = tuple(float(n) for n in self.norms)
            if len(norms) != len(sites) or any(n <= 0 for n in norms):
                raise ValueError("norms must be one positive number per site")
            object.__setattr__(self, "norms", norms)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "row", row)
        object.__setattr__(self, "col", col)

    @property
    def length(self) -> int:
        return len(self.sites)

    @property
    def chi(self) -> int:
        """Largest bond dimension, boundaries included."""
        return max(max(s.chi_left, s.chi_right) for s in self.sites)

    @property
    def boundary_factor(self) -> float:
        """``|R| |C|``, the scale carried by the unnormalized boundary vectors."""
        return float(np.linalg.norm(self.row) * np.linalg.norm(self.col))

    @property
    def scale_factor(self) -> float:
        """The global scale eta with ``contract_dense(m) = eta * encoded block``."""
        if self.norms is None:
            raise ValueError("MPO is not normalized; call normalize() first")
        return float(np.prod(self.norms)) * self.boundary_factor


@dataclass(frozen=True)
class BondState:
    """A boundary vector viewed as a normalized state on the bond register."""

    vector: NDArray[np.complex128]
    norm: float


@dataclass(frozen=True)
class PaddedMpo(Mpo):
    """MPO whose bonds all have dimension ``2**D``."""

    D: int = 0
    original_chi: int = 1

    def __post_init__(self) -> None:
        super().__post_init__()
        chi = 2**self.D
        for s in self.sites:
            if s.chi_left != chi or s.chi_right != chi:
                raise ValueError(f"padded MPO requires uniform bond dimension {chi}")

    @property
    def prep_col(self) -> BondState:
        """``|C>``: the state the bond register is initialized in."""
        n = float(np.linalg.norm(self.col))
        if n == 0:
            raise ValueError("boundary column is zero")
        return BondState(self.col / n, n)

    @property
    def prep_row(self) -> BondState:
        """``|R>``, defined so that the bra ``<R|`` equals ``R / |R|``."""
        n = float(np.linalg.norm(self.row))
        if n == 0:
            raise ValueError("boundary row is zero")
        return BondState(np.conj(self.row) / n, n)


def bond_qubits(chi: int) -> int:
    """Number of qubits ``ceil(log2 chi)`` needed for a bond of dimension ``chi``."""
    if chi < 1:
        raise ValueError("bond dimension must be >= 1")
    return math.ceil(math.log2(chi)) if chi > 1 else 0


def reshape_site(t: SiteTensor) -> CMatrix:
    """Matrix with ``row = bond_out * 2 + phys_out`` and ``col = bond_in * 2 + phys_in``."""
    cl, cr = t.chi_left, t.chi_right
    return t.data.transpose(0, 2, 1, 3).reshape(2 * cl, 2 * cr)


def unreshape_site(m: ArrayLike, chi_left: int, chi_right: int) -> SiteTensor:
    m = np.asarray(m, dtype=np.complex128)
    return SiteTensor(m.reshape(chi_left, 2, chi_right, 2).transpose(0, 2, 1, 3))


def _check_length(length: int, minimum: int = 2) -> None:
    if length < minimum:
        raise ValueError(f"L must be >= {minimum}, got {length}")


def build_ising(length: int, J: float, g: float) -> Mpo:
    """Transverse-field Ising chain ``J sum Z Z + g sum X`` with chi = 3."""
    _check_length(length)
    site = SiteTensor.from_grid(
        [
            [I2, 0, 0],
            [Z, 0, 0],
            [g * X, J * Z, I2],
        ]
    )
    return Mpo((site,) * length, row=[0, 0, 1], col=[1, 0, 0], label=f"ising(L={length}, J={J}, g={g})")


def build_ising_shifted(length: int, J: float, g: float, zeta: float) -> Mpo:
    """Ising chain plus ``zeta * I`` folded into a chi = 4 MPO.

    Each site carries ``zeta**(1/L) * I`` in the extra diagonal slot and the
    boundary vectors become ``(0, 0, 1, 1)`` and ``(1, 0, 0, 1)``, whose norms
    contribute a factor 2 to the overall scale.
    """
    _check_length(length)
    if zeta <= 0:
        raise ValueError("zeta must be > 0 for the shifted Ising MPO")
    z = zeta ** (1.0 / length)
    site = SiteTensor.from_grid(
        [
            [I2, 0, 0, 0],
            [Z, 0, 0, 0],
            [g * X, J * Z, I2, 0],
            [0, 0, 0, z * I2],
        ]
    )
    return Mpo(
        (site,) * length,
        row=[0, 0, 1, 1],
        col=[1, 0, 0, 1],
        label=f"ising_shifted(L={length}, J={J}, g={g}, zeta={zeta})",
    )


def build_heisenberg(
    length: int,
    JX: float,
    JY: float,
    JZ: float,
    gX: float = 0.0,
    gY: float = 0.0,
    gZ: float = 0.0,
) -> Mpo:
    """Anisotropic Heisenberg chain with uniform fields, chi = 5."""
    _check_length(length)
    field_op = gX * X + gY * Y + gZ * Z
    site = SiteTensor.from_grid(
        [
            [I2, 0, 0, 0, 0],
            [X, 0, 0, 0, 0],
            [Y, 0, 0, 0, 0],
            [Z, 0, 0, 0, 0],
            [field_op, JX * X, JY * Y, JZ * Z, I2],
        ]
    )
    return Mpo(
        (site,) * length,
        row=[0, 0, 0, 0, 1],
        col=[1, 0, 0, 0, 0],
        label=f"heisenberg(L={length}, J=({JX}, {JY}, {JZ}), g=({gX}, {gY}, {gZ}))",
    )


def build_xy(length: int, JX: float, JY: float, gX: float = 0.0, gY: float = 0.0) -> Mpo:
    """XY chain: the Heisenberg MPO with the Z row and column removed (chi = 4)."""
    _check_length(length)
    site = SiteTensor.from_grid(
        [
            [I2, 0, 0, 0],
            [X, 0, 0, 0],
            [Y, 0, 0, 0],
            [gX * X + gY * Y, JX * X, JY * Y, I2],
        ]
    )
    return Mpo(
        (site,) * length,
        row=[0, 0, 0, 1],
        col=[1, 0, 0, 0],
        label=f"xy(L={length}, J=({JX}, {JY}), g=({gX}, {gY}))",
    )


def build_pauli_product(coeffs: Sequence[Sequence[float]], zeta: float = 0.0) -> Mpo:
    """Tensor product of local Pauli sums, optionally shifted by ``zeta * I``.

    Args:
        coeffs: one ``(alpha, beta, gamma, delta)`` quadruple per site, the
            local operator being ``alpha I + beta X + gamma Y + delta Z``.
        zeta: shift. ``zeta == 0`` gives a chi = 1 MPO; ``zeta > 0`` uses the
            block form ``diag(local, zeta**(1/L) I)`` with ``R = C = (1, 1)``.
    """
    coeffs = [tuple(float(v) for v in c) for c in coeffs]
    length = len(coeffs)
    _check_length(length, minimum=1)
    if any(len(c) != 4 for c in coeffs):
        raise ValueError("each site needs four coefficients (alpha, beta, gamma, delta)")
    if not all(math.isfinite(v) for c in coeffs for v in c):
        raise ValueError("non-finite Pauli coefficient")
    if zeta < 0:
        raise ValueError("zeta must be >= 0")
    locals_ = [a * I2 + b * X + c * Y + d * Z for a, b, c, d in coeffs]
    if zeta == 0:
        sites = tuple(SiteTensor.from_grid([[h]]) for h in locals_)
        row, col = [1.0], [1.0]
    else:
        z = zeta ** (1.0 / length)
        sites = tuple(SiteTensor.from_grid([[h, 0], [0, z * I2]]) for h in locals_)
        row, col = [1.0, 1.0], [1.0, 1.0]
    return Mpo(sites, row=row, col=col, label=f"pauli_product(L={length}, zeta={zeta})")


def pad_to_power_of_two(m: Mpo) -> PaddedMpo:
    """Zero-pad every bond (and the boundary vectors) to dimension ``2**D``."""
    D = bond_qubits(m.chi)
    chi = 2**D
    sites = []
    for s in m.sites:
        data = np.zeros((chi, chi, 2, 2), dtype=np.complex128)
        data[: s.chi_left, : s.chi_right] = s.data
        sites.append(SiteTensor(data))
    row = np.zeros(chi, dtype=np.complex128)
    row[: m.row.size] = m.row
    col = np.zeros(chi, dtype=np.complex128)
    col[: m.col.size] = m.col
    return PaddedMpo(
        tuple(sites), row=row, col=col, norms=m.norms, label=m.label, D=D, original_chi=m.chi
    )


def site_norms(m: Mpo) -> list[float]:
    return [spectral_norm(reshape_site(s)) for s in m.sites]


def normalize(m: PaddedMpo, mode: NormMode = "uniform", value: float | None = None) -> PaddedMpo:
    """Attach per-site normalization factors.

    ``uniform`` uses the largest site norm everywhere, ``per_site`` each
    site's own spectral norm. ``value`` overrides both with a fixed factor,
    which must still bound every site norm.
    """
    norms = site_norms(m)
    if value is not None:
        if value < max(norms) - 1e-12:
            raise ValueError(f"N = {value} is below the largest site norm {max(norms):.12g}")
        chosen = [float(value)] * m.length
    elif mode == "uniform":
        chosen = [max(norms)] * m.length
    elif mode == "per_site":
        chosen = norms
    else:
        raise ValueError(f"unknown normalization mode {mode!r}")
    if any(n <= 0 for n in chosen):
        raise ValueError("a site tensor is identically zero; cannot normalize")
    return replace(m, norms=tuple(chosen))


def contract_dense(m: Mpo, max_sites: int = CONTRACT_MAX_SITES) -> CMatrix:
    """Exact dense operator ``R . A1 ... AL . C`` on ``2**L`` dimensions."""
    if m.length > max_sites:
        raise DimensionError(f"dense contraction capped at L = {max_sites}, got {m.length}")
    env = m.row.reshape(-1, 1, 1)
    for s in m.sites:
        p = env.shape[1]
        env = np.einsum("aij,abkl->bikjl", env, s.data).reshape(s.chi_right, 2 * p, 2 * p)
    return np.einsum("b,bij->ij", m.col, env)


def normalized_contraction(m: Mpo) -> CMatrix:
    """Contraction with each site divided by its ``N`` and unit boundary vectors."""
    if m.norms is None:
        raise ValueError("MPO is not normalized")
    sites = tuple(SiteTensor(s.data / n) for s, n in zip(m.sites, m.norms))
    scaled = Mpo(
        sites,
        row=m.row / np.linalg.norm(m.row),
        col=m.col / np.linalg.norm(m.col),
    )
    return contract_dense(scaled)
