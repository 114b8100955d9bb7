"""Seeded, splittable random number generation.

Every random draw in a session comes from a named substream so that adding a
draw in one role never perturbs the values another role sees.
"""
from __future__ import annotations

import zlib

import numpy as np


def _name_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


class SeededRng:
    """A root seed plus a path of names; substreams are derived, never shared."""

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self._seed = int(seed)
        self._path = tuple(path)
        self._streams: dict[str, np.random.Generator] = {}

    @property
    def seed(self) -> int:
        return self._seed

    def child(self, name: str) -> SeededRng:
        """Independent generator for a sub-task (e.g. one Monte Carlo trial)."""
        return SeededRng(self._seed, self._path + (_name_key(name),))

    def stream(self, name: str) -> np.random.Generator:
        gen = self._streams.get(name)
        if gen is None:
            seq = np.random.SeedSequence(
                entropy=self._seed, spawn_key=self._path + (_name_key(name),)
            )
            gen = np.random.Generator(np.random.PCG64(seq))
            self._streams[name] = gen
        return gen

    def bits(self, name: str, n: int) -> np.ndarray:
        return (self.stream(name).random(n) < 0.5).astype(np.uint8)

    def uniforms(self, name: str, n: int) -> np.ndarray:
        return self.stream(name).random(n)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self._seed}, path={self._path})"
