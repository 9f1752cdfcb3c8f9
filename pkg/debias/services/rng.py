"""Reproducible 48-bit linear congruential random streams.

The recurrence is ``state <- (state * 0x5DEECE66D + 11) mod 2**48`` with the
seed scrambled by XOR against the multiplier. Doubles take the top 26 bits of
one state and the top 27 bits of the next, giving 53 random bits.

States are produced in blocks with numpy: after ``j`` steps the state is
``A_j * s + C_j mod 2**48``, and uint64 arithmetic wraps modulo 2**64, which
2**48 divides, so masking the wrapped product gives the exact result. Block
output is bit-identical to stepping the recurrence one state at a time.
"""

from typing import Literal

import numpy as np

from debias.core.exceptions import DomainError, EmptyRangeError
from debias.models.experiment import U64_MAX

MULTIPLIER = 0x5DEECE66D  # 25214903917
INCREMENT = 11
STATE_BITS = 48
STATE_MASK = (1 << STATE_BITS) - 1
DOUBLE_UNIT = 1.0 / (1 << 53)
STATE_UNIT = 1.0 / (1 << STATE_BITS)
INT_BITS = 31
INT_LIMIT = 1 << INT_BITS

BLOCK_SIZE = 1024

DoubleMapping = Literal["53bit", "48bit"]


def _jump_tables(size: int) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients (A_j, C_j), j = 1..size, of the j-step affine map."""
    a_coef, c_coef = 1, 0
    a_list, c_list = [], []
    for _ in range(size):
        a_coef = (a_coef * MULTIPLIER) & STATE_MASK
        c_coef = (c_coef * MULTIPLIER + INCREMENT) & STATE_MASK
        a_list.append(a_coef)
        c_list.append(c_coef)
    return np.array(a_list, dtype=np.uint64), np.array(c_list, dtype=np.uint64)


_JUMP_A, _JUMP_C = _jump_tables(BLOCK_SIZE)
_MASK_U64 = np.uint64(STATE_MASK)


class RngStream:
    """Single-owner stream of uniform draws replayable from its seed."""

    def __init__(self, seed: int, mapping: DoubleMapping = "53bit"):
        """
        Create a stream.

        Args:
            seed: 64-bit unsigned seed
            mapping: ``"53bit"`` (two states per double) or ``"48bit"``
                (one state per double)

        Raises:
            DomainError: If the seed is not a 64-bit unsigned integer
        """
        if not 0 <= seed <= U64_MAX:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if mapping not in ("53bit", "48bit"):
            raise DomainError(f"unknown double mapping {mapping!r}")
        self.seed = seed
        self.mapping = mapping
        self._state = (seed ^ MULTIPLIER) & STATE_MASK
        self._block = np.empty(0, dtype=np.uint64)
        self._block_list: list[int] = []
        self._pos = 0

    @property
    def state(self) -> int:
        """Most recently produced state (the scrambled seed before any draw)."""
        return self._state

    def _refill(self) -> None:
        self._block = (_JUMP_A * np.uint64(self._state) + _JUMP_C) & _MASK_U64
        self._block_list = self._block.tolist()
        self._pos = 0

    def _next_state(self) -> int:
        if self._pos == len(self._block_list):
            self._refill()
        state = self._block_list[self._pos]
        self._pos += 1
        self._state = state
        return state

    def _take_states(self, count: int) -> np.ndarray:
        chunks = []
        needed = count
        while needed > 0:
            if self._pos == len(self._block_list):
                self._refill()
            take = min(needed, len(self._block_list) - self._pos)
            chunks.append(self._block[self._pos:self._pos + take])
            self._pos += take
            needed -= take
            # the next refill continues from here
            self._state = self._block_list[self._pos - 1]
        if not chunks:
            return np.empty(0, dtype=np.uint64)
        return chunks[0] if len(chunks) == 1 else np.concatenate(chunks)

    def next_double(self) -> float:
        """Uniform draw in [0, 1)."""
        if self.mapping == "48bit":
            return self._next_state() * STATE_UNIT
        high = self._next_state() >> (STATE_BITS - 26)
        low = self._next_state() >> (STATE_BITS - 27)
        return ((high << 27) + low) * DOUBLE_UNIT

    def next_doubles(self, count: int) -> np.ndarray:
        """``count`` consecutive draws, identical to calling next_double repeatedly."""
        if count <= 0:
            return np.empty(0, dtype=np.float64)
        if self.mapping == "48bit":
            return self._take_states(count).astype(np.float64) * STATE_UNIT
        states = self._take_states(2 * count)
        high = states[0::2] >> np.uint64(STATE_BITS - 26)
        low = states[1::2] >> np.uint64(STATE_BITS - 27)
        return ((high << np.uint64(27)) + low).astype(np.float64) * DOUBLE_UNIT

    def next_int(self, bound: int) -> int:
        """
        Uniform integer in [0, bound).

        Uses the top 31 bits of one state; non power-of-two bounds reject the
        incomplete last bucket so there is no modulo bias.

        Raises:
            EmptyRangeError: If bound < 1
            DomainError: If bound exceeds 2**31
        """
        if bound < 1:
            raise EmptyRangeError(f"empty range: bound={bound}")
        if bound > INT_LIMIT:
            raise DomainError(f"bound {bound} exceeds 2**31")
        bits = self._next_state() >> (STATE_BITS - INT_BITS)
        if bound & (bound - 1) == 0:
            return (bound * bits) >> INT_BITS
        value = bits % bound
        while bits - value + (bound - 1) >= INT_LIMIT:
            bits = self._next_state() >> (STATE_BITS - INT_BITS)
            value = bits % bound
        return value


def new_stream(seed: int, mapping: DoubleMapping = "53bit") -> RngStream:
    """Create a stream from a 64-bit seed."""
    return RngStream(seed, mapping=mapping)
