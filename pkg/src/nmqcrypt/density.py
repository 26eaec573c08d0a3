"""
Small dense linear algebra for one- and two-qubit states.

Every object here is a plain ``numpy`` array of shape (2, 2), (4, 4), (2,)
or (4,). Two-qubit objects use the basis order |00>, |01>, |10>, |11> with
qubit 1 as the left tensor factor; the rest of the package relies on that.
"""

from __future__ import annotations

import enum
from typing import Sequence

import numpy as np

TRACE_TOL = 1e-10
HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = -1e-9
COMPLETENESS_TOL = 1e-8

_SQRT_HALF = 1.0 / np.sqrt(2.0)

_PAULIS = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
for _m in _PAULIS:
    _m.setflags(write=False)

I2 = _PAULIS[0]
X = _PAULIS[1]
Y = _PAULIS[2]
Z = _PAULIS[3]


class InvalidChannelError(ValueError):
    """Kraus operators do not satisfy the completeness relation."""


class BellKind(enum.Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"

    @property
    def even_parity(self) -> bool:
        """True for the |00>, |11> superpositions."""
        return self in (BellKind.PSI_PLUS, BellKind.PSI_MINUS)

    @classmethod
    def parse(cls, text: str) -> "BellKind":
        key = text.strip().lower().replace("_", "")
        aliases = {"psiplus": "psi+", "psiminus": "psi-", "phiplus": "phi+", "phiminus": "phi-"}
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown Bell state {text!r}; expected one of psi+, psi-, phi+, phi-")


def pauli(index: int) -> np.ndarray:
    """Return I, X, Y or Z for ``index`` 0..3."""
    if isinstance(index, bool) or index not in (0, 1, 2, 3):
        raise ValueError(f"Pauli index must be 0, 1, 2 or 3, got {index!r}")
    return _PAULIS[index].copy()


def ket(bits: str) -> np.ndarray:
    """Computational basis vector for a bit string such as ``"01"``."""
    if not bits or set(bits) - {"0", "1"} or len(bits) > 2:
        raise ValueError(f"expected one or two bits, got {bits!r}")
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


PLUS = np.array([_SQRT_HALF, _SQRT_HALF], dtype=complex)
MINUS = np.array([_SQRT_HALF, -_SQRT_HALF], dtype=complex)


def bell_state(kind: BellKind) -> np.ndarray:
    """State vector of a Bell state.

    psi+- = (|00> +- |11>)/sqrt(2) and phi+- = (|01> +- |10>)/sqrt(2).
    """
    s = _SQRT_HALF
    vectors = {
        BellKind.PSI_PLUS: (s, 0, 0, s),
        BellKind.PSI_MINUS: (s, 0, 0, -s),
        BellKind.PHI_PLUS: (0, s, s, 0),
        BellKind.PHI_MINUS: (0, s, -s, 0),
    }
    return np.array(vectors[BellKind(kind)], dtype=complex)


def _require_shape(m: np.ndarray, shape: tuple[int, ...], name: str) -> np.ndarray:
    m = np.asarray(m)
    if m.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {m.shape}")
    return m


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two single-qubit operators (``a`` on qubit 1)."""
    a = _require_shape(a, (2, 2), "a")
    b = _require_shape(b, (2, 2), "b")
    return np.kron(a, b)


def embed_on_qubit(k: np.ndarray, qubit: int) -> np.ndarray:
    k = _require_shape(k, (2, 2), "k")
    if qubit == 1:
        return np.kron(k, I2)
    if qubit == 2:
        return np.kron(I2, k)
    raise ValueError(f"qubit must be 1 or 2, got {qubit!r}")


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def completeness_defect(operators: Sequence[np.ndarray]) -> float:
    """Largest entrywise deviation of sum K^dag K from the identity."""
    ops = np.asarray(operators)
    total = np.einsum("kji,kjl->il", ops.conj(), ops)
    return float(np.max(np.abs(total - np.eye(ops.shape[-1]))))


def _as_operator_stack(ks) -> np.ndarray:
    ops = getattr(ks, "operators", ks)
    return np.asarray(ops, dtype=complex)


def apply_kraus(rho: np.ndarray, ks, qubit: int | str = 1, partner=None) -> np.ndarray:
    """Apply a Kraus map to a one- or two-qubit density matrix.

    Parameters
    ----------
    rho : np.ndarray
        Density matrix, 2x2 or 4x4.
    ks : KrausSet or sequence of 2x2 arrays
        Single-qubit Kraus operators.
    qubit : {1, 2, "both"}
        Target qubit for a 4x4 ``rho``. With ``"both"``, ``partner`` acts on
        qubit 2 and the double sum over (K_i x L_j) is applied, i.e. the two
        qubits see independent environments. Ignored for 2x2 ``rho``.
    partner : KrausSet or sequence, optional
        Kraus operators for qubit 2 when ``qubit == "both"``.

    Returns
    -------
    np.ndarray
        The transformed density matrix.
    """
    rho = np.asarray(rho, dtype=complex)
    ops = _as_operator_stack(ks)
    if ops.ndim != 3 or ops.shape[1:] != (2, 2):
        raise ValueError("Kraus operators must be 2x2 matrices")
    defect = completeness_defect(ops)
    if defect > COMPLETENESS_TOL:
        raise InvalidChannelError(f"Kraus completeness violated by {defect:.3e}")

    if rho.shape == (2, 2):
        full = ops
    elif rho.shape == (4, 4):
        if qubit == "both":
            if partner is None:
                raise ValueError('qubit="both" requires a partner Kraus set')
            other = _as_operator_stack(partner)
            defect = completeness_defect(other)
            if defect > COMPLETENESS_TOL:
                raise InvalidChannelError(f"partner Kraus completeness violated by {defect:.3e}")
            full = np.einsum("aij,bkl->abikjl", ops, other).reshape(-1, 4, 4)
        elif qubit == 1:
            full = np.einsum("aij,kl->aikjl", ops, I2).reshape(-1, 4, 4)
        elif qubit == 2:
            full = np.einsum("ij,akl->aikjl", I2, ops).reshape(-1, 4, 4)
        else:
            raise ValueError(f"qubit must be 1, 2 or 'both', got {qubit!r}")
    else:
        raise ValueError(f"rho must be 2x2 or 4x4, got {rho.shape}")

    return np.einsum("kij,jl,kml->im", full, rho, full.conj())


def apply_unitary(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    return u @ rho @ u.conj().T


def fidelity_pure(psi: np.ndarray, rho: np.ndarray) -> float:
    """Overlap <psi|rho|psi> of a pure reference state with ``rho``.

    The imaginary part of the quadratic form must vanish for Hermitian
    ``rho``; anything above 1e-10 is treated as a bug and raises.
    """
    psi = np.asarray(psi, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if psi.ndim != 1 or rho.shape != (psi.size, psi.size):
        raise ValueError(f"dimension mismatch: state {psi.shape} vs density {rho.shape}")
    value = complex(psi.conj() @ rho @ psi)
    if abs(value.imag) > 1e-10:
        raise ValueError(f"fidelity has imaginary part {value.imag:.3e}; rho is not Hermitian")
    f = value.real
    if -1e-12 <= f < 0.0:
        f = 0.0
    elif 1.0 < f <= 1.0 + 1e-12:
        f = 1.0
    return f


def validate_density(rho: np.ndarray) -> list[str]:
    """Describe every way ``rho`` fails to be a density matrix (empty if valid)."""
    rho = np.asarray(rho)
    problems: list[str] = []
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
        return [f"shape {rho.shape} is not 2x2 or 4x4"]
    if not np.all(np.isfinite(rho)):
        return ["non-finite entries"]
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        problems.append(f"trace {tr.real:.12g}{tr.imag:+.3g}j differs from 1")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > HERMITIAN_TOL:
        problems.append(f"not Hermitian (max |rho - rho^dag| = {herm:.3e})")
    lowest = float(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)))
    if lowest < POSITIVITY_TOL:
        problems.append(f"negative eigenvalue {lowest:.3e}")
    return problems
