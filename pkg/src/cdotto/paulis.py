"""Exact symbolic algebra over N-site Pauli operators.

Operators live as maps from letter patterns (tuples such as
``('X', 'I', 'Z')``) to complex coefficients.  Pauli strings are
trace-orthogonal, so products, commutators and Hilbert-Schmidt inner
products are computed term by term without any dense matrix; dense
realizations are built on demand for propagation and thermal states.

All values are immutable after construction and every operation is a
pure function, so they are safe to share across threads and processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .errors import CapacityError, DimensionError

#: Coefficients at or below this magnitude are dropped from canonical forms.
PRUNE_TOL = 1e-14

#: Largest site count for which a dense 2^N x 2^N realization is built.
DENSE_SITE_CAP = 12

LETTERS = ("I", "X", "Y", "Z")

SINGLE_SITE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

# Single-site products a * b == phase * letter.
_MUL = {
    ("I", "I"): (1.0 + 0.0j, "I"),
    ("I", "X"): (1.0 + 0.0j, "X"),
    ("I", "Y"): (1.0 + 0.0j, "Y"),
    ("I", "Z"): (1.0 + 0.0j, "Z"),
    ("X", "I"): (1.0 + 0.0j, "X"),
    ("Y", "I"): (1.0 + 0.0j, "Y"),
    ("Z", "I"): (1.0 + 0.0j, "Z"),
    ("X", "X"): (1.0 + 0.0j, "I"),
    ("Y", "Y"): (1.0 + 0.0j, "I"),
    ("Z", "Z"): (1.0 + 0.0j, "I"),
    ("X", "Y"): (1.0j, "Z"),
    ("Y", "X"): (-1.0j, "Z"),
    ("Y", "Z"): (1.0j, "X"),
    ("Z", "Y"): (-1.0j, "X"),
    ("Z", "X"): (1.0j, "Y"),
    ("X", "Z"): (-1.0j, "Y"),
}


def _check_letters(letters: tuple[str, ...]) -> None:
    if not letters:
        raise DimensionError("a Pauli string needs at least one site")
    for s in letters:
        if s not in LETTERS:
            raise ValueError(f"unknown Pauli letter {s!r}")


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-site Pauli operators with a scalar coefficient.

    ``letters`` holds one symbol from ``I, X, Y, Z`` per site; site 0 is the
    leftmost letter and the most significant factor of the Kronecker product.
    """

    letters: tuple[str, ...]
    coefficient: complex = 1.0 + 0.0j

    def __post_init__(self):
        _check_letters(self.letters)
        object.__setattr__(self, "letters", tuple(self.letters))
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def n_sites(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return sum(1 for s in self.letters if s != "I")

    @property
    def y_parity(self) -> int:
        """Number of Y letters modulo 2."""
        return sum(1 for s in self.letters if s == "Y") % 2

    def __repr__(self):
        return f"PauliString({''.join(self.letters)}, {self.coefficient})"


def _mul_letters(a: tuple[str, ...], b: tuple[str, ...]) -> tuple[complex, tuple[str, ...]]:
    phase = 1.0 + 0.0j
    out = []
    for sa, sb in zip(a, b):
        ph, s = _MUL[(sa, sb)]
        phase *= ph
        out.append(s)
    return phase, tuple(out)


def _anticommute(a: tuple[str, ...], b: tuple[str, ...]) -> bool:
    # Strings anticommute iff they differ on an odd number of jointly
    # non-identity sites.
    count = 0
    for sa, sb in zip(a, b):
        if sa != "I" and sb != "I" and sa != sb:
            count += 1
    return count % 2 == 1


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Product of two Pauli strings, phase folded into the coefficient."""
    if a.n_sites != b.n_sites:
        raise DimensionError(f"site counts differ: {a.n_sites} vs {b.n_sites}")
    phase, letters = _mul_letters(a.letters, b.letters)
    return PauliString(letters, a.coefficient * b.coefficient * phase)


class OperatorSum:
    """A canonical linear combination of Pauli strings on ``n_sites`` sites.

    Canonical means: unique letter patterns, lexicographically ordered, and
    no coefficient of magnitude <= ``PRUNE_TOL``.  An OperatorSum is Hermitian
    exactly when every coefficient is real.  Treat instances as immutable.
    """

    __slots__ = ("_n_sites", "_terms")

    def __init__(self, n_sites: int, terms=None):
        if n_sites < 1:
            raise DimensionError("n_sites must be positive")
        canonical = {}
        if terms:
            for letters, coeff in (terms.items() if isinstance(terms, dict) else terms):
                letters = tuple(letters)
                if len(letters) != n_sites:
                    raise DimensionError(
                        f"pattern {letters} does not match n_sites={n_sites}"
                    )
                _check_letters(letters)
                c = canonical.get(letters, 0.0 + 0.0j) + complex(coeff)
                canonical[letters] = c
        pruned = {k: c for k, c in canonical.items() if abs(c) > PRUNE_TOL}
        self._n_sites = n_sites
        self._terms = dict(sorted(pruned.items()))

    @classmethod
    def from_strings(cls, strings) -> "OperatorSum":
        strings = list(strings)
        if not strings:
            raise DimensionError("cannot infer n_sites from an empty string list")
        n = strings[0].n_sites
        return cls(n, [(s.letters, s.coefficient) for s in strings])

    @classmethod
    def zero(cls, n_sites: int) -> "OperatorSum":
        return cls(n_sites)

    @property
    def n_sites(self) -> int:
        return self._n_sites

    @property
    def terms(self):
        """Read-only view of the pattern -> coefficient map."""
        return MappingProxyType(self._terms)

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def __eq__(self, other):
        if not isinstance(other, OperatorSum):
            return NotImplemented
        return self._n_sites == other._n_sites and self._terms == other._terms

    def __hash__(self):
        return hash((self._n_sites, tuple(self._terms.items())))

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        if self._n_sites != other._n_sites:
            raise DimensionError("site counts differ")
        merged = dict(self._terms)
        for k, c in other._terms.items():
            merged[k] = merged.get(k, 0.0 + 0.0j) + c
        return OperatorSum(self._n_sites, merged)

    def __sub__(self, other: "OperatorSum") -> "OperatorSum":
        return self + (-1.0) * other

    def __neg__(self) -> "OperatorSum":
        return (-1.0) * self

    def __mul__(self, scalar) -> "OperatorSum":
        scalar = complex(scalar)
        return OperatorSum(
            self._n_sites, {k: scalar * c for k, c in self._terms.items()}
        )

    __rmul__ = __mul__

    def __repr__(self):
        shown = ", ".join(
            f"{c:g}*{''.join(k)}" for k, c in list(self._terms.items())[:4]
        )
        more = "" if self.n_terms <= 4 else f", ... ({self.n_terms} terms)"
        return f"OperatorSum({self._n_sites} sites: {shown}{more})"


def commutator(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    """[a, b] = ab - ba in canonical form.

    Only anticommuting string pairs contribute, each as twice their product.
    """
    if a.n_sites != b.n_sites:
        raise DimensionError(f"site counts differ: {a.n_sites} vs {b.n_sites}")
    out: dict = {}
    for pa, ca in a.terms.items():
        for pb, cb in b.terms.items():
            if _anticommute(pa, pb):
                phase, pat = _mul_letters(pa, pb)
                out[pat] = out.get(pat, 0.0 + 0.0j) + 2.0 * ca * cb * phase
    return OperatorSum(a.n_sites, out)


def hs_inner(a: OperatorSum, b: OperatorSum) -> complex:
    """Hilbert-Schmidt inner product Tr[a^dagger b].

    Pauli strings are trace-orthogonal, so this is 2^N times the sum of
    conj(coeff_a) * coeff_b over shared patterns.
    """
    if a.n_sites != b.n_sites:
        raise DimensionError(f"site counts differ: {a.n_sites} vs {b.n_sites}")
    small, large = (a, b) if a.n_terms <= b.n_terms else (b, a)
    acc = 0.0 + 0.0j
    for pat, c in small.terms.items():
        other = large.terms.get(pat)
        if other is not None:
            if small is a:
                acc += np.conj(c) * other
            else:
                acc += np.conj(other) * c
    return (2.0 ** a.n_sites) * acc


def frobenius_sq(a: OperatorSum) -> float:
    """Squared Frobenius norm Tr[a^dagger a] = 2^N * sum |coeff|^2."""
    return (2.0 ** a.n_sites) * float(
        sum((c * np.conj(c)).real for c in a.terms.values())
    )


def pattern_dense(letters: tuple[str, ...]) -> np.ndarray:
    """Dense matrix of a unit-coefficient Pauli string."""
    out = SINGLE_SITE[letters[0]]
    for s in letters[1:]:
        out = np.kron(out, SINGLE_SITE[s])
    return out


def to_dense(a: OperatorSum, site_cap: int = DENSE_SITE_CAP) -> np.ndarray:
    """Dense 2^N x 2^N realization; Hermitian when coefficients are real."""
    if a.n_sites > site_cap:
        raise CapacityError(
            f"dense realization of {a.n_sites} sites exceeds cap of {site_cap}"
        )
    dim = 2 ** a.n_sites
    out = np.zeros((dim, dim), dtype=complex)
    for pat, c in a.terms.items():
        out += c * pattern_dense(pat)
    return out
