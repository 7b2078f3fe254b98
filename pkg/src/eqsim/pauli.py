"""Symbolic algebra for N-qubit Pauli strings and Pauli sums.

Qubit 0 is the leftmost tensor factor. A :class:`PauliString` is an axis
word over ``IXYZ`` plus a phase in ``{1, -1, 1j, -1j}``; a :class:`PauliSum`
is a canonical list of ``(coefficient, string)`` pairs whose strings carry
unit phase.

Text notation (used by configs and the CLI)::

    1.0 * Y_I_I + -2.0 * Y_X_X_X
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable

import numpy as np

AXES = "IXYZ"

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# single-site products a*b = phase * c
_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}

ZERO_TOL = 1e-15
DENSE_HERMITIAN_MAX_QUBITS = 8


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


class NotHermitianError(ValueError):
    """An operation requiring a Hermitian operator received a non-Hermitian one."""


def _unit_phase(phase: complex) -> complex:
    for p in (1, -1, 1j, -1j):
        if abs(phase - p) < 1e-12:
            return complex(p)
    raise ValueError(f"phase {phase!r} is not in {{±1, ±i}}")


@dataclass(frozen=True)
class PauliString:
    axes: str
    phase: complex = 1

    def __post_init__(self):
        axes = self.axes.upper()
        if not axes or any(a not in AXES for a in axes):
            raise ValueError(f"invalid Pauli axes {self.axes!r}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "phase", _unit_phase(self.phase))

    @classmethod
    def from_sites(cls, n_qubits: int, sites: dict[int, str], phase: complex = 1) -> "PauliString":
        """Build a string from a sparse ``{qubit: axis}`` map."""
        axes = ["I"] * n_qubits
        for q, a in sites.items():
            axes[q] = a.upper()
        return cls("".join(axes), phase)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls("I" * n_qubits)

    @property
    def n_qubits(self) -> int:
        return len(self.axes)

    @property
    def weight(self) -> int:
        return sum(a != "I" for a in self.axes)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, a in enumerate(self.axes) if a != "I")

    @property
    def y_count(self) -> int:
        return self.axes.count("Y")

    def masks(self) -> tuple[int, int]:
        """Return ``(x_mask, z_mask)`` bit masks; qubit 0 is the most significant bit."""
        n = self.n_qubits
        x = z = 0
        for q, a in enumerate(self.axes):
            bit = 1 << (n - 1 - q)
            if a in "XY":
                x |= bit
            if a in "ZY":
                z |= bit
        return x, z

    def unsigned(self) -> "PauliString":
        return PauliString(self.axes)

    def is_identity(self) -> bool:
        return self.weight == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.axes, -self.phase)

    def tensor(self, other: "PauliString") -> "PauliString":
        return PauliString(self.axes + other.axes, self.phase * other.phase)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix by explicit Kronecker products (reference path)."""
        mats = [PAULI_MATRICES[a] for a in self.axes]
        return self.phase * reduce(np.kron, mats)

    def label(self) -> str:
        return "_".join(self.axes)

    def __str__(self) -> str:
        prefix = {1: "", -1: "-", 1j: "i", -1j: "-i"}[self.phase]
        return prefix + self.label()


def _check_dims(p: PauliString, q: PauliString) -> None:
    if p.n_qubits != q.n_qubits:
        raise DimensionError(f"qubit counts differ: {p.n_qubits} vs {q.n_qubits}")


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Product ``p·q`` with the phase tracked symbolically."""
    _check_dims(p, q)
    phase = p.phase * q.phase
    axes = []
    for a, b in zip(p.axes, q.axes):
        ph, c = _PRODUCT[a, b]
        phase *= ph
        axes.append(c)
    return PauliString("".join(axes), phase)


def commutes(p: PauliString, q: PauliString) -> bool:
    """True iff ``p`` and ``q`` commute (even number of anticommuting sites)."""
    _check_dims(p, q)
    clashes = sum(1 for a, b in zip(p.axes, q.axes) if a != "I" and b != "I" and a != b)
    return clashes % 2 == 0


class PauliSum:
    """Immutable linear combination of Pauli strings.

    Terms are canonicalized on construction: string phases are folded into
    the coefficients, duplicates merged, terms with ``|c| <= 1e-15`` dropped,
    and the remainder sorted lexicographically by axes.
    """

    __slots__ = ("_terms", "_n")

    def __init__(self, terms: Iterable[tuple[complex, PauliString]], n_qubits: int | None = None):
        merged: dict[str, complex] = {}
        n = n_qubits
        for coeff, string in terms:
            if n is None:
                n = string.n_qubits
            elif string.n_qubits != n:
                raise DimensionError(f"term {string} does not act on {n} qubits")
            merged[string.axes] = merged.get(string.axes, 0) + complex(coeff) * string.phase
        if n is None:
            raise ValueError("an empty PauliSum needs an explicit n_qubits")
        self._n = n
        self._terms = tuple(
            (_simplify(c), PauliString(axes)) for axes, c in sorted(merged.items()) if abs(c) > ZERO_TOL
        )

    @classmethod
    def from_string(cls, p: PauliString, coeff: complex = 1.0) -> "PauliSum":
        return cls([(coeff, p)])

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls([], n_qubits)

    @property
    def terms(self) -> tuple[tuple[complex, PauliString], ...]:
        return self._terms

    @property
    def n_qubits(self) -> int:
        return self._n

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return hash((self._n, self._terms))

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n_qubits != self._n:
            raise DimensionError("cannot add sums on different qubit counts")
        return PauliSum(self._terms + other._terms, self._n)

    def __neg__(self) -> "PauliSum":
        return self.scale(-1)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-other)

    def scale(self, factor: complex) -> "PauliSum":
        return PauliSum([(factor * c, p) for c, p in self._terms], self._n)

    def is_zero(self) -> bool:
        return not self._terms

    def to_matrix(self) -> np.ndarray:
        dim = 2**self._n
        out = np.zeros((dim, dim), dtype=complex)
        for c, p in self._terms:
            out += c * p.to_matrix()
        return out

    def is_hermitian(self) -> bool:
        if self._n <= DENSE_HERMITIAN_MAX_QUBITS:
            m = self.to_matrix()
            return bool(np.array_equal(m, m.conj().T))
        return all(complex(c).imag == 0 for c, _ in self._terms)

    def require_hermitian(self) -> None:
        if not self.is_hermitian():
            raise NotHermitianError(f"operator is not Hermitian: {self}")

    def __str__(self) -> str:
        return format_pauli_sum(self)

    def __repr__(self) -> str:
        return f"PauliSum({format_pauli_sum(self)!r}, n_qubits={self._n})"


def _simplify(c: complex):
    c = complex(c)
    return c.real if c.imag == 0 else c


def split_real_imag(h: PauliSum) -> tuple[PauliSum, PauliSum]:
    """Split a Hermitian ``h`` as ``A + iB`` with ``A`` and ``B`` real matrices.

    A real-coefficient string is a real matrix for an even number of Y
    factors and ``i`` times a real matrix for an odd number.
    """
    h.require_hermitian()
    real_terms, imag_terms = [], []
    for c, p in h.terms:
        if p.y_count % 2 == 0:
            real_terms.append((c, p))
        else:
            imag_terms.append((c / 1j, p))
    return PauliSum(real_terms, h.n_qubits), PauliSum(imag_terms, h.n_qubits)


def embed_hamiltonian(h: PauliSum) -> PauliSum:
    """Enlarged Hamiltonian ``i·I⊗B − Y⊗A`` on ``N+1`` qubits, ancilla at index 0."""
    a, b = split_real_imag(h)
    terms = [(1j * c, PauliString("I" + p.axes)) for c, p in b.terms]
    terms += [(-c, PauliString("Y" + p.axes)) for c, p in a.terms]
    return PauliSum(terms, h.n_qubits + 1)


# ---------------------------------------------------------------------------
# text notation

_COEFF = r"\([^()]*\)|[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?j?|[-+]?(?:inf|nan)"
_TERM_RE = re.compile(rf"\s*(?P<coeff>{_COEFF})\s*\*\s*(?P<axes>[IXYZ](?:_[IXYZ])*)\s*")
_SEP_RE = re.compile(r"\s*(?:\+|\n|;)\s*")


def _format_coeff(c) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    return repr(c)


def format_pauli_sum(h: PauliSum) -> str:
    """Canonical text; ``parse_pauli_sum`` inverts it bit-exactly."""
    if h.is_zero():
        return f"0.0 * {'_'.join('I' * h.n_qubits)}"
    return " + ".join(f"{_format_coeff(c)} * {p.label()}" for c, p in h.terms)


def parse_pauli_sum(text: str, n_qubits: int | None = None) -> PauliSum:
    """Parse ``coeff * AXIS_AXIS_...`` terms separated by ``+``, ``;`` or newlines."""
    pos, terms = 0, []
    text = text.strip()
    while pos < len(text):
        if terms:
            sep = _SEP_RE.match(text, pos)
            if not sep or sep.end() == pos:
                raise ValueError(f"expected '+' between terms at column {pos + 1}: {text!r}")
            pos = sep.end()
        m = _TERM_RE.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse Pauli term at column {pos + 1}: {text[pos:]!r}")
        raw = m.group("coeff")
        coeff = complex(raw) if ("j" in raw or raw.startswith("(")) else float(raw)
        terms.append((coeff, PauliString(m.group("axes").replace("_", ""))))
        pos = m.end()
    if not terms:
        raise ValueError("empty Pauli sum")
    return PauliSum(terms, n_qubits)
