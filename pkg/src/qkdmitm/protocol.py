"""BB84 role logic: generation, encoding, measurement, basis comparison, sifting.

Vectors are ordered from the highest qubit index down to index 0, matching
the trace table layout (q7 ... q0 for eight qubits).
"""
from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import kernels
from .quantum import SCRAMBLED, Basis, Outcome, PureState, SymbolicQubit, from_vector
from .rng import SeededRng

_SYMBOLS = {0: "0", 1: "1", 2: "U+", 3: "U-", kernels.SCRAMBLED: "U"}
_UNICODE = {"U+": "|U⁺⟩", "U-": "|U⁻⟩", "0": "|0⟩", "1": "|1⟩", "U": "|U⟩"}


class ProtocolError(ValueError):
    pass


class ProtocolCorruption(RuntimeError):
    """A position kept by sifting holds a uniform outcome."""


class Mode(str, enum.Enum):
    SYMBOLIC = "symbolic"
    PHYSICAL = "physical"


def check_length(length: int) -> int:
    if isinstance(length, bool) or not isinstance(length, (int, np.integer)):
        raise ProtocolError(f"length must be an integer, got {length!r}")
    if length < 2 or length % 2:
        raise ProtocolError(f"length must be even and >= 2, got {length}")
    return int(length)


def _same_length(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise ProtocolError(f"length mismatch: {len(a)} vs {len(b)}")


def as_codes(values: Sequence) -> np.ndarray:
    return np.fromiter((int(v) for v in values), dtype=np.uint8, count=len(values))


class QuantumSignal:
    """A transmitted sequence of qubits; symbolic codes or physical amplitudes."""

    __slots__ = ("mode", "_data")

    def __init__(self, mode: Mode, data: np.ndarray):
        self.mode = Mode(mode)
        data = np.array(data, copy=True)
        if self.mode is Mode.SYMBOLIC:
            data = data.astype(np.uint8)
            if data.ndim != 1:
                raise ProtocolError("symbolic signal must be one-dimensional")
        else:
            data = data.astype(np.complex128)
            if data.ndim != 2 or data.shape[1] != 2:
                raise ProtocolError("physical signal must have shape (n, 2)")
            norms = np.sum(np.abs(data) ** 2, axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-12):
                raise ProtocolError("physical signal contains non-normalized states")
        data.setflags(write=False)
        self._data = data

    @classmethod
    def from_codes(cls, codes: np.ndarray, mode: Mode) -> QuantumSignal:
        if Mode(mode) is Mode.PHYSICAL:
            return cls(mode, kernels.prepare_amps(np.asarray(codes, dtype=np.uint8)))
        return cls(mode, codes)

    @classmethod
    def from_qubits(cls, qubits: Sequence) -> QuantumSignal:
        if qubits and isinstance(qubits[0], PureState):
            return cls(Mode.PHYSICAL, np.array([q.as_array() for q in qubits]))
        codes = [SCRAMBLED.code if q is SCRAMBLED else int(q) for q in qubits]
        return cls(Mode.SYMBOLIC, np.array(codes, dtype=np.uint8))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def qubits(self) -> tuple:
        if self.mode is Mode.SYMBOLIC:
            return tuple(
                SCRAMBLED if c == kernels.SCRAMBLED else SymbolicQubit(c) for c in self._data
            )
        return tuple(PureState.from_array(row) for row in self._data)

    def symbols(self) -> tuple[str, ...]:
        """ASCII cell labels; physical states outside the BB84 set render as '?'."""
        if self.mode is Mode.SYMBOLIC:
            return tuple(_SYMBOLS[int(c)] for c in self._data)
        out = []
        for q in self.qubits:
            sym = from_vector(q)
            out.append("?" if sym is None else _SYMBOLS[int(sym)])
        return tuple(out)

    def same_as(self, other: QuantumSignal, tol: float = 1e-9) -> bool:
        """Elementwise equality, up to a global phase per qubit in physical mode."""
        if self.mode is not other.mode or len(self) != len(other):
            return False
        if self.mode is Mode.SYMBOLIC:
            return bool(np.array_equal(self._data, other._data))
        overlap = np.abs(np.sum(np.conj(self._data) * other._data, axis=1))
        return bool(np.all(np.abs(overlap - 1.0) <= tol))

    def __len__(self) -> int:
        return self._data.shape[0]

    def __repr__(self) -> str:
        return f"QuantumSignal({self.mode.value}, [{', '.join(self.symbols())}])"


def unicode_symbol(sym: str) -> str:
    return _UNICODE.get(sym, sym)


def generate_payload(rng: SeededRng, length: int, stream: str = "alice.payload") -> tuple[int, ...]:
    n = check_length(length)
    return tuple(int(b) for b in rng.bits(stream, n))


def generate_controls(
    rng: SeededRng, length: int, stream: str = "alice.controls"
) -> tuple[Basis, ...]:
    n = check_length(length)
    return tuple(Basis(int(b)) for b in rng.bits(stream, n))


def encode(
    payload: Sequence[int], controls: Sequence[Basis], mode: Mode = Mode.SYMBOLIC
) -> QuantumSignal:
    """Prepare each bit and apply H wherever the control says so."""
    _same_length(payload, controls)
    if any(b not in (0, 1) for b in payload):
        raise ProtocolError("payload must contain only bits")
    return QuantumSignal.from_codes(kernels.encode(as_codes(payload), as_codes(controls)), mode)


def measure_signal(
    signal: QuantumSignal,
    controls: Sequence[Basis],
    rng: SeededRng | None = None,
    stream: str = "bob.measure",
) -> tuple[tuple[Outcome, ...], QuantumSignal]:
    """Measure every qubit in its control basis; returns outcomes and post-states."""
    _same_length(signal, controls)
    bases = as_codes(controls)
    if signal.mode is Mode.SYMBOLIC:
        outcomes, post = kernels.measure_symbolic(signal.data, bases)
        return tuple(Outcome(o) for o in outcomes), QuantumSignal(Mode.SYMBOLIC, post)
    if rng is None:
        raise ProtocolError("physical measurement needs an rng")
    bits, post = kernels.measure_physical(signal.data, bases, rng.uniforms(stream, len(signal)))
    return tuple(Outcome(b) for b in bits), QuantumSignal(Mode.PHYSICAL, post)


def compare_controls(a: Sequence[Basis], b: Sequence[Basis]) -> tuple[int, ...]:
    _same_length(a, b)
    return tuple(int(x == y) for x, y in zip(a, b))


def sift(values: Sequence, matches: Sequence[int]) -> tuple[int, ...]:
    """Keep the positions where ``matches`` is 1, in order.

    ``values`` may be payload bits or measurement outcomes; a uniform outcome
    at a kept position raises :class:`ProtocolCorruption`.
    """
    _same_length(values, matches)
    key = []
    for i, (v, c) in enumerate(zip(values, matches)):
        if not c:
            continue
        if isinstance(v, Outcome):
            if not v.is_definite:
                raise ProtocolCorruption(f"uniform outcome at kept position {i}")
            key.append(v.bit)
        else:
            key.append(int(v))
    return tuple(key)


@dataclass(frozen=True)
class KeySample:
    """Publicly compared subset of the sifted key, by position in that key."""

    positions: tuple[int, ...]
    alice_bits: tuple[int, ...]
    bob_bits: tuple[int, ...]
    alice_remaining: tuple[int, ...]
    bob_remaining: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.positions)

    @property
    def errors(self) -> int:
        return sum(a != b for a, b in zip(self.alice_bits, self.bob_bits))


def sample_size_for(sifted_len: int, fraction: float, size: int | None = None) -> int:
    if size is not None:
        return min(int(size), sifted_len)
    return min(sifted_len, int(math.floor(fraction * sifted_len + 0.5)))


def sample_key(
    alice_key: Sequence[int],
    bob_key: Sequence[int],
    rng: SeededRng,
    fraction: float = 0.5,
    size: int | None = None,
    stream: str = "sample",
) -> KeySample:
    """Disclose a random subset of the sifted key and discard it from both sides."""
    _same_length(alice_key, bob_key)
    if not 0.0 <= fraction <= 1.0:
        raise ProtocolError(f"sample fraction must be in [0, 1], got {fraction}")
    m = sample_size_for(len(alice_key), fraction, size)
    chosen = rng.stream(stream).choice(len(alice_key), size=m, replace=False) if m else []
    positions = tuple(sorted(int(p) for p in chosen))
    picked = set(positions)
    return KeySample(
        positions=positions,
        alice_bits=tuple(alice_key[p] for p in positions),
        bob_bits=tuple(bob_key[p] for p in positions),
        alice_remaining=tuple(b for i, b in enumerate(alice_key) if i not in picked),
        bob_remaining=tuple(b for i, b in enumerate(bob_key) if i not in picked),
    )
