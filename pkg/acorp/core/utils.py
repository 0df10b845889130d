# Written by the acorp developers - 2026
#####################################################
import hashlib
import hmac
import os
import time
from typing import Union

from .types import AcorpId, ACORP_ID_ALPHABET, ACORP_ID_LENGTH, TOKEN_ID_SIZE


# Seeded CSPRNG: HMAC-SHA256 in counter mode. The same seed always yields the same id stream.
class IdSource:
    def __init__(self, seed: Union[bytes, int, None] = None):
        if seed is None:
            seed = os.urandom(32)
        if isinstance(seed, int):
            seed = seed.to_bytes(16, "big", signed=False)
        self._key = hashlib.sha256(b"acorp-ids" + bytes(seed)).digest()
        self._counter = 0
        self._buffer = b""

    def random_bytes(self, n: int) -> bytes:
        while len(self._buffer) < n:
            block = hmac.new(self._key, self._counter.to_bytes(8, "big"), hashlib.sha256).digest()
            self._buffer += block
            self._counter += 1
        out, self._buffer = self._buffer[:n], self._buffer[n:]
        return out

    # Rejection sampling keeps the 36-symbol alphabet uniform
    def acorp_id(self) -> AcorpId:
        limit = 256 - (256 % len(ACORP_ID_ALPHABET))
        chars = []
        while len(chars) < ACORP_ID_LENGTH:
            for b in self.random_bytes(ACORP_ID_LENGTH):
                if b < limit and len(chars) < ACORP_ID_LENGTH:
                    chars.append(ACORP_ID_ALPHABET[b % len(ACORP_ID_ALPHABET)])
        return AcorpId("".join(chars))

    def token_id(self) -> bytes:
        return self.random_bytes(TOKEN_ID_SIZE)

    def action_id(self) -> bytes:
        return self.random_bytes(TOKEN_ID_SIZE)


class WallClock:
    def now(self) -> int:
        return int(time.time())


class FixedClock:
    def __init__(self, timestamp: int):
        self.timestamp = int(timestamp)

    def now(self) -> int:
        return self.timestamp

    def advance(self, seconds: int) -> int:
        self.timestamp += int(seconds)
        return self.timestamp


def make_clock(clock_mode: Union[str, int]):
    # "WALL" or a fixed integer timestamp
    if isinstance(clock_mode, str) and clock_mode.upper() == "WALL":
        return WallClock()
    return FixedClock(int(clock_mode))


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()
