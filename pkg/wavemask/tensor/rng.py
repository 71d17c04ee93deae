""" Seedable, platform independent pseudo random numbers: xoshiro256++ seeded through
splitmix64 from a 64-bit user seed. Every random quantity in wavemask (noise samples,
flow times, dataset synthesis, parameter initialisation) is drawn from this stream, so a
seed fully determines a run.
"""
import math
from typing import Sequence, Tuple

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF


def rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64(state: int) -> Tuple[int, int]:
    """ One step of the splitmix64 generator.

    :param state: the current 64-bit state
    :return: a tuple with the new state and the output
    """
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


class Rng:
    """ xoshiro256++ generator.

    A single instance must not be shared between threads: the state is advanced in place.
    """

    def __init__(self, seed: int = 0):
        seed = int(seed) & MASK64
        s = []
        for _ in range(4):
            seed, out = splitmix64(seed)
            s.append(out)
        self.s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (rotl((s0 + s3) & MASK64, 23) + s0) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def uniform(self) -> float:
        """ A double uniformly distributed in [0, 1), built from the top 53 bits. """
        return (self.next_u64() >> 11) * 2.0 ** -53

    def randbelow(self, n: int) -> int:
        """ An integer uniformly distributed in [0, n), without modulo bias. """
        if n < 1:
            raise ValueError(f"randbelow needs n >= 1, got {n}.")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def uniform_array(self, shape: Sequence[int], low: float = 0.0, high: float = 1.0) -> np.ndarray:
        size = int(np.prod(shape)) if len(shape) else 1
        values = [low + (high - low) * self.uniform() for _ in range(size)]
        return np.array(values, dtype=np.float64).reshape(tuple(shape))

    def normal_pair(self) -> Tuple[float, float]:
        """ Two independent standard normal values by the Box-Muller transform. """
        u1 = 1.0 - self.uniform()  # in (0, 1], keeps the logarithm finite
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        return r * math.cos(theta), r * math.sin(theta)


def gaussian_sample(rng: Rng, shape: Sequence[int]) -> np.ndarray:
    """ Tensor of i.i.d. standard normal entries, drawn pairwise from the stream of 'rng'.
    With an odd number of entries the second value of the last pair is discarded.

    :param rng: the generator, advanced in place
    :param shape: shape of the output
    :return: float64 array of the requested shape
    """
    size = int(np.prod(shape)) if len(shape) else 1
    values = []
    for _ in range((size + 1) // 2):
        values.extend(rng.normal_pair())
    return np.array(values[:size], dtype=np.float64).reshape(tuple(shape))
