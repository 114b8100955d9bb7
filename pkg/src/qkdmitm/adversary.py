"""Eavesdropper strategies.

Eve sees every quantum transmission and every classical message. The
strategies here differ in how she measures and what she forwards:

* fixed- or random-basis intercept-resend,
* two-pass replay (Attack 1): with the same signal sent once per basis, the
  definite/uniform pattern across an all-I and an all-H pass reveals both the
  payload and Alice's bases,
* basis leak (Attack 2): with Bob's bases announced before the quantum
  transmission, Eve measures exactly as Bob will and re-prepares.
"""
from __future__ import annotations

import enum
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .protocol import Mode, ProtocolError, QuantumSignal, as_codes, encode
from .quantum import Basis, Outcome
from .rng import SeededRng


class ReconstructionError(RuntimeError):
    pass


class StrategyKind(str, enum.Enum):
    INTERCEPT_ALL_I = "intercept-all-i"
    INTERCEPT_ALL_H = "intercept-all-h"
    INTERCEPT_RANDOM = "intercept-random"
    ATTACK1 = "attack1"
    ATTACK2 = "attack2"


@dataclass(frozen=True)
class EveStrategy:
    """Which attack Eve runs. ``copies`` is the number of passes per basis (Attack 1)."""

    kind: StrategyKind
    copies: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", StrategyKind(self.kind))
        if self.copies < 1:
            raise ValueError(f"copies must be >= 1, got {self.copies}")

    @classmethod
    def attack1(cls, copies: int = 1) -> EveStrategy:
        return cls(StrategyKind.ATTACK1, copies)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "copies": self.copies}

    @classmethod
    def from_dict(cls, d: dict) -> EveStrategy:
        return cls(StrategyKind(d["kind"]), int(d.get("copies", 1)))


@dataclass(frozen=True)
class EveRecord:
    """One listening pass: the bases Eve used and what she saw."""

    bases: tuple[Basis, ...]
    outcomes: tuple[Outcome, ...]

    def to_dict(self) -> dict:
        return {
            "bases": [b.name for b in self.bases],
            "outcomes": ["U" if o is Outcome.UNIFORM else str(int(o)) for o in self.outcomes],
        }


@dataclass
class AttackReport:
    strategy: EveStrategy
    records: list[EveRecord] = field(default_factory=list)
    reconstructed_payload: tuple[int, ...] | None = None
    reconstructed_controls: tuple[Basis, ...] | None = None
    forged_signal: QuantumSignal | None = None
    eve_bits: tuple[int, ...] | None = None
    eve_key: tuple[int, ...] | None = None
    exact_forgery: bool = False
    keys_match: bool = False
    detected: bool = False
    basis_errors: int | None = None
    # set by the session: Eve holds Alice's sifted key and nobody noticed
    success: bool = False

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.to_dict(),
            "records": [r.to_dict() for r in self.records],
            "reconstructed_payload": _opt_list(self.reconstructed_payload),
            "reconstructed_controls": (
                None
                if self.reconstructed_controls is None
                else [b.name for b in self.reconstructed_controls]
            ),
            "forged_signal": (
                None if self.forged_signal is None else list(self.forged_signal.symbols())
            ),
            "eve_key": _opt_list(self.eve_key),
            "exact_forgery": self.exact_forgery,
            "keys_match": self.keys_match,
            "detected": self.detected,
            "basis_errors": self.basis_errors,
            "success": self.success,
        }


def _opt_list(v):
    return None if v is None else list(v)


class _Guesses:
    """Eve's coin flips: a forced script (golden fixtures) or the rng."""

    def __init__(self, rng: SeededRng, forced: Sequence[int] | None = None):
        self._rng = rng
        self._forced: Iterator[int] | None = None if forced is None else iter(forced)

    def draw(self, n: int) -> np.ndarray:
        if self._forced is None:
            return self._rng.bits("eve.guess", n)
        try:
            return np.array([next(self._forced) for _ in range(n)], dtype=np.uint8)
        except StopIteration:
            raise ProtocolError("fixture ran out of scripted Eve guesses") from None


def _measure(signal: QuantumSignal, bases: np.ndarray, rng: SeededRng) -> np.ndarray:
    if signal.mode is Mode.SYMBOLIC:
        outcomes, _ = kernels.measure_symbolic(signal.data, bases)
        return outcomes
    bits, _ = kernels.measure_physical(signal.data, bases, rng.uniforms("eve.measure", len(signal)))
    return bits


def _forge_codes(outcomes: np.ndarray, bases: np.ndarray, guesses: _Guesses) -> np.ndarray:
    """Re-prepare definite results in the measured basis; guess the rest in the other basis."""
    uniform = outcomes == kernels.UNIFORM
    full = np.zeros(len(outcomes), dtype=np.uint8)
    k = int(uniform.sum())
    if k:
        full[uniform] = guesses.draw(k)
    return kernels.forge(outcomes, bases, full)


def _record(bases: np.ndarray, outcomes: np.ndarray) -> EveRecord:
    return EveRecord(tuple(Basis(int(b)) for b in bases), tuple(Outcome(int(o)) for o in outcomes))


def intercept_fixed_basis(
    signal: QuantumSignal,
    basis: Basis | Sequence[Basis],
    rng: SeededRng,
    forced_guesses: Sequence[int] | None = None,
) -> tuple[EveRecord, QuantumSignal]:
    """Measure every qubit (one basis for all, or a per-position list) and forge a replacement.

    Symbolic mode reveals which positions were uniform; Eve then guesses a
    state of the other basis there. In physical mode every outcome is a bit
    and Eve simply re-prepares what she measured.
    """
    if isinstance(basis, int):
        bases = np.full(len(signal), int(basis), dtype=np.uint8)
    else:
        bases = as_codes(basis)
        if len(bases) != len(signal):
            raise ProtocolError("basis list length differs from the signal")
    outcomes = _measure(signal, bases, rng)
    codes = _forge_codes(outcomes, bases, _Guesses(rng, forced_guesses))
    return _record(bases, outcomes), QuantumSignal.from_codes(codes, signal.mode)


def attack1_reconstruct(
    record_i: EveRecord, record_h: EveRecord
) -> tuple[tuple[int, ...], tuple[Basis, ...]]:
    """Combine an all-I pass and an all-H pass over the same symbolic signal."""
    if len(record_i.outcomes) != len(record_h.outcomes):
        raise ProtocolError("records differ in length")
    if any(b is not Basis.I for b in record_i.bases) or any(
        b is not Basis.H for b in record_h.bases
    ):
        raise ReconstructionError("expected one all-I pass and one all-H pass")
    payload, controls, status = kernels.reconstruct(
        as_codes(record_i.outcomes), as_codes(record_h.outcomes)
    )
    bad = np.flatnonzero(status)
    if bad.size:
        i = int(bad[0])
        why = "both passes uniform" if status[i] == 1 else "both passes definite"
        raise ReconstructionError(f"position {i}: {why}")
    return tuple(int(b) for b in payload), tuple(Basis(int(c)) for c in controls)


def classify_copies(
    reads_i: np.ndarray, reads_h: np.ndarray
) -> tuple[tuple[int, ...], tuple[Basis, ...]]:
    """Physical Attack 1: a basis whose k readouts all agree is taken as Alice's.

    The I pass is checked first, so an H-encoded qubit is misread as I-encoded
    whenever its k computational-basis readouts agree by chance, which
    happens with probability 2**(1 - k).
    """
    reads_i = np.ascontiguousarray(reads_i, dtype=np.uint8)
    reads_h = np.ascontiguousarray(reads_h, dtype=np.uint8)
    if reads_i.shape != reads_h.shape:
        raise ProtocolError("pass shapes differ")
    payload, controls, status = kernels.classify_copies(reads_i, reads_h)
    if status.any():
        raise ReconstructionError(f"no pass agreed at position {int(np.flatnonzero(status)[0])}")
    return tuple(int(b) for b in payload), tuple(Basis(int(c)) for c in controls)


def attack1_forge(
    payload: Sequence[int], controls: Sequence[Basis], mode: Mode = Mode.SYMBOLIC
) -> QuantumSignal:
    return encode(payload, controls, mode)


def attack2_forge(
    outcomes: Sequence[Outcome],
    leaked_b: Sequence[Basis],
    rng: SeededRng,
    mode: Mode = Mode.SYMBOLIC,
    forced_guesses: Sequence[int] | None = None,
) -> QuantumSignal:
    """Forge what Bob should see from Eve's measurement in Bob's own bases.

    A definite bit is re-encoded in Bob's basis, so Bob reads the same bit. A
    uniform position means Alice used the other basis; Eve re-prepares a
    random state of that basis. Sifting drops those positions anyway.
    """
    if len(outcomes) != len(leaked_b):
        raise ProtocolError(f"length mismatch: {len(outcomes)} vs {len(leaked_b)}")
    codes = _forge_codes(as_codes(outcomes), as_codes(leaked_b), _Guesses(rng, forced_guesses))
    return QuantumSignal.from_codes(codes, mode)


class Eve:
    """Event-driven adversary attached to a session's channels."""

    def __init__(self, strategy: EveStrategy, rng: SeededRng, forced_guesses=None):
        self.strategy = strategy
        self.rng = rng
        self.report = AttackReport(strategy)
        self._guesses = _Guesses(rng, forced_guesses)
        self._leaked_b: np.ndarray | None = None
        self._passes: list[np.ndarray] = []

    def on_classical(self, kind: str, payload) -> None:
        if kind == "controls" and self._leaked_b is None:
            self._leaked_b = as_codes(payload)

    def on_quantum(self, signal: QuantumSignal, index: int, total: int) -> QuantumSignal | None:
        """Consume one transmission; return the forgery to deliver, or None to absorb it."""
        kind = self.strategy.kind
        n = len(signal)
        if kind is StrategyKind.ATTACK1:
            return self._attack1_pass(signal, index, total)
        if kind is StrategyKind.ATTACK2:
            if self._leaked_b is None:
                raise ProtocolError("attack2 needs Bob's bases before the quantum transmission")
            bases = self._leaked_b
        elif kind is StrategyKind.INTERCEPT_ALL_I:
            bases = np.zeros(n, dtype=np.uint8)
        elif kind is StrategyKind.INTERCEPT_ALL_H:
            bases = np.ones(n, dtype=np.uint8)
        else:
            bases = self.rng.bits("eve.bases", n)
        outcomes = _measure(signal, bases, self.rng)
        codes = _forge_codes(outcomes, bases, self._guesses)
        self.report.records.append(_record(bases, outcomes))
        return self._finish(codes, signal.mode)

    def _attack1_pass(self, signal: QuantumSignal, index: int, total: int) -> QuantumSignal | None:
        k = self.strategy.copies
        n = len(signal)
        basis = 0 if index < k else 1
        bases = np.full(n, basis, dtype=np.uint8)
        outcomes = _measure(signal, bases, self.rng)
        self.report.records.append(_record(bases, outcomes))
        self._passes.append(outcomes)
        if index + 1 < total:
            return None
        if signal.mode is Mode.SYMBOLIC:
            payload, controls = attack1_reconstruct(
                self.report.records[0], self.report.records[k]
            )
        else:
            payload, controls = classify_copies(
                np.vstack(self._passes[:k]), np.vstack(self._passes[k:])
            )
        self.report.reconstructed_payload = payload
        self.report.reconstructed_controls = controls
        return self._finish(kernels.encode(as_codes(payload), as_codes(controls)), signal.mode)

    def _finish(self, codes: np.ndarray, mode: Mode) -> QuantumSignal:
        self.report.eve_bits = tuple(int(c) & 1 for c in codes)
        forged = QuantumSignal.from_codes(codes, mode)
        self.report.forged_signal = forged
        return forged
