"""Single-qubit states, the X and H gates, and two measurement semantics.

*Symbolic* semantics follow the idealized tables: a measurement in the wrong
basis yields a recognizable ``UNIFORM`` outcome. *Physical* semantics apply
the Born rule and always yield a bit.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import singledispatch

import numpy as np

from . import kernels
from .rng import SeededRng

NORM_TOL = 1e-12
INV_SQRT2 = 1.0 / math.sqrt(2.0)


class NormalizationError(ValueError):
    pass


class Basis(enum.IntEnum):
    """Control signal: ``I`` leaves the qubit alone, ``H`` applies Hadamard."""

    I = 0  # noqa: E741
    H = 1

    @property
    def other(self) -> Basis:
        return Basis(1 - self)

    def __str__(self) -> str:
        return self.name


class SymbolicQubit(enum.IntEnum):
    ZERO = 0
    ONE = 1
    PLUS = 2
    MINUS = 3

    @property
    def basis(self) -> Basis:
        return Basis(self >> 1)

    @property
    def bit(self) -> int:
        return int(self) & 1

    @classmethod
    def encode(cls, bit: int, basis: Basis) -> SymbolicQubit:
        return cls(_check_bit(bit) + 2 * int(basis))


class Scrambled:
    """Post-measurement marker left behind by a uniform symbolic outcome.

    Measuring it again, in any basis, yields ``UNIFORM`` again.
    """

    _instance = None
    code = kernels.SCRAMBLED

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "SCRAMBLED"


SCRAMBLED = Scrambled()


class Outcome(enum.IntEnum):
    ZERO = 0
    ONE = 1
    UNIFORM = 2

    @property
    def is_definite(self) -> bool:
        return self is not Outcome.UNIFORM

    @property
    def bit(self) -> int:
        if self is Outcome.UNIFORM:
            raise ValueError("a uniform outcome carries no bit")
        return int(self)

    @classmethod
    def definite(cls, bit: int) -> Outcome:
        return cls(_check_bit(bit))


@dataclass(frozen=True)
class PureState:
    """Amplitude pair ``amp0|0> + amp1|1>``."""

    amp0: complex
    amp1: complex

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.amp0) ** 2 + abs(self.amp1) ** 2)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(abs(self.amp0) ** 2 + abs(self.amp1) ** 2 - 1.0) <= tol

    def as_array(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=np.complex128)

    def equivalent(self, other: PureState, tol: float = NORM_TOL) -> bool:
        """Equal up to a global phase."""
        overlap = self.amp0.conjugate() * other.amp0 + self.amp1.conjugate() * other.amp1
        return abs(abs(overlap) - 1.0) <= tol

    @classmethod
    def from_array(cls, arr) -> PureState:
        return cls(complex(arr[0]), complex(arr[1]))


def _check_bit(bit: int) -> int:
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    return int(bit)


def _require_unit(state: PureState) -> None:
    if not state.is_normalized():
        raise NormalizationError(f"state {state} has norm {state.norm!r}, expected 1")


def prepare(bit: int) -> SymbolicQubit:
    """Start from |0> and flip with X when ``bit`` is 1."""
    return SymbolicQubit.ZERO if _check_bit(bit) == 0 else SymbolicQubit.ONE


_X_TABLE = {
    SymbolicQubit.ZERO: SymbolicQubit.ONE,
    SymbolicQubit.ONE: SymbolicQubit.ZERO,
    SymbolicQubit.PLUS: SymbolicQubit.PLUS,
    # X|U-> = -|U->; the global phase is dropped
    SymbolicQubit.MINUS: SymbolicQubit.MINUS,
}
_H_TABLE = {
    SymbolicQubit.ZERO: SymbolicQubit.PLUS,
    SymbolicQubit.PLUS: SymbolicQubit.ZERO,
    SymbolicQubit.ONE: SymbolicQubit.MINUS,
    SymbolicQubit.MINUS: SymbolicQubit.ONE,
}


@singledispatch
def apply_x(state):
    raise TypeError(f"cannot apply X to {type(state).__name__}")


@apply_x.register
def _(state: SymbolicQubit) -> SymbolicQubit:
    return _X_TABLE[state]


@apply_x.register
def _(state: PureState) -> PureState:
    _require_unit(state)
    return PureState(state.amp1, state.amp0)


@apply_x.register
def _(state: Scrambled) -> Scrambled:
    return state


@singledispatch
def apply_h(state):
    raise TypeError(f"cannot apply H to {type(state).__name__}")


@apply_h.register
def _(state: SymbolicQubit) -> SymbolicQubit:
    return _H_TABLE[state]


@apply_h.register
def _(state: PureState) -> PureState:
    _require_unit(state)
    return PureState(
        (state.amp0 + state.amp1) * INV_SQRT2, (state.amp0 - state.amp1) * INV_SQRT2
    )


@apply_h.register
def _(state: Scrambled) -> Scrambled:
    return state


def to_vector(q: SymbolicQubit) -> PureState:
    return PureState.from_array(kernels.prepare_amps(np.array([q], dtype=np.uint8))[0])


def from_vector(state: PureState, tol: float = 1e-9) -> SymbolicQubit | None:
    """The symbolic state equal to ``state`` up to global phase, if any."""
    for q in SymbolicQubit:
        if to_vector(q).equivalent(state, tol):
            return q
    return None


def measure_symbolic(
    q: SymbolicQubit | Scrambled, basis: Basis
) -> tuple[Outcome, SymbolicQubit | Scrambled]:
    code = q.code if isinstance(q, Scrambled) else int(q)
    outcomes, post = kernels.measure_symbolic(
        np.array([code], dtype=np.uint8), np.array([basis], dtype=np.uint8)
    )
    post_state = SCRAMBLED if post[0] == kernels.SCRAMBLED else SymbolicQubit(post[0])
    return Outcome(outcomes[0]), post_state


def measure_physical(
    state: PureState, basis: Basis, rng: SeededRng, stream: str = "measure"
) -> tuple[int, PureState]:
    """Born-rule readout; the post-state is an eigenstate of ``basis``."""
    _require_unit(state)
    bits, post = kernels.measure_physical(
        state.as_array().reshape(1, 2),
        np.array([basis], dtype=np.uint8),
        rng.uniforms(stream, 1),
    )
    return int(bits[0]), PureState.from_array(post[0])
