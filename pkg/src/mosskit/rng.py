"""Deterministic 64-bit PRNG, stream derivation, and decision tapes.

The same xoshiro256** generator is implemented here and in the compiled
kernels, so a fixed seed yields an identical draw sequence on every
backend.  All bounded draws are rejection-based (no modulo bias).
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> tuple[int, int]:
    """One splitmix64 step: returns (output, next_state)."""
    x = (x + _SPLITMIX_GAMMA) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31), x


def derive_stream_seed(master_seed: int, stream_id: int) -> int:
    """Seed for an independent worker stream (master_seed, stream_id)."""
    z, s = _splitmix64(master_seed & MASK64)
    z2, _ = _splitmix64((s ^ (stream_id & MASK64)) & MASK64)
    return (z ^ z2) & MASK64


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """xoshiro256** seeded through splitmix64."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        s = seed & MASK64
        self.s0, s = _splitmix64(s)
        self.s1, s = _splitmix64(s)
        self.s2, s = _splitmix64(s)
        self.s3, s = _splitmix64(s)

    @property
    def state(self) -> tuple[int, int, int, int]:
        return (self.s0, self.s1, self.s2, self.s3)

    @state.setter
    def state(self, st) -> None:
        self.s0, self.s1, self.s2, self.s3 = (x & MASK64 for x in st)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n), bias-free by rejection."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        rem = (1 << 64) % n
        if rem == 0:
            return self.next_u64() % n
        limit = (1 << 64) - rem
        r = self.next_u64()
        while r >= limit:
            r = self.next_u64()
        return r % n

    def randint1(self, n: int) -> int:
        """Uniform integer in [1, n]."""
        return self.randbelow(n) + 1


class TapeRecorder:
    """Records every draw as (label, value), grouped per trial."""

    def __init__(self):
        self.trials: list[list[tuple[str, int]]] = []

    def begin_trial(self) -> None:
        self.trials.append([])

    def record(self, label: str, value: int) -> None:
        self.trials[-1].append((label, value))

    def to_json_obj(self):
        return [[[lab, val] for lab, val in t] for t in self.trials]

    @classmethod
    def from_json_obj(cls, obj) -> "TapeRecorder":
        rec = cls()
        rec.trials = [[(lab, int(val)) for lab, val in t] for t in obj]
        return rec


class TapeExhausted(Exception):
    pass


class TrialReplay:
    """Replays the recorded draws of a single trial, checking labels."""

    __slots__ = ("_entries", "_pos")

    def __init__(self, entries):
        self._entries = entries
        self._pos = 0

    def __call__(self, label: str, n: int) -> int:
        if self._pos >= len(self._entries):
            raise TapeExhausted(f"tape exhausted at draw {label!r}")
        lab, val = self._entries[self._pos]
        self._pos += 1
        if lab != label:
            raise TapeExhausted(f"tape mismatch: expected {label!r}, got {lab!r}")
        if not 1 <= val <= n:
            raise TapeExhausted(f"tape value {val} out of range [1, {n}] for {label!r}")
        return val

    @property
    def exhausted(self) -> bool:
        return self._pos >= len(self._entries)


def make_draw(rng: Xoshiro256, tape: TapeRecorder | None):
    """Draw callable: draw(label, n) -> uniform int in [1, n], optionally taped."""
    if tape is None:
        def draw(label: str, n: int) -> int:
            return rng.randint1(n)
    else:
        def draw(label: str, n: int) -> int:
            v = rng.randint1(n)
            tape.record(label, v)
            return v
    return draw
