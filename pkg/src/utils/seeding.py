"""
Deterministic random streams.

All randomness in the toolkit (initial conditions, constant sampling, property
suites) is drawn from numpy Generators spawned from one SeedSequence per run, so
independent consumers never share a stream and reruns are bit-identical.
"""
from typing import List, Optional, Sequence, Union

import numpy as np

DEFAULT_SEED = 20240101

SeedLike = Union[None, int, Sequence[int], np.random.SeedSequence]


def seed_sequence(seed: SeedLike = None) -> np.random.SeedSequence:
    """Return a SeedSequence for `seed` (DEFAULT_SEED when None)."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(DEFAULT_SEED if seed is None else seed)


def make_rng(seed: SeedLike = None, stream: Optional[int] = None) -> np.random.Generator:
    """
    Build a Generator for `seed`.

    Args:
        seed: Integer seed, entropy sequence or SeedSequence.
        stream: Optional stream index; distinct indices give independent
            generators derived from the same seed.
    """
    sequence = seed_sequence(seed)
    if stream is not None:
        sequence = np.random.SeedSequence(sequence.entropy, spawn_key=tuple(sequence.spawn_key) + (int(stream),))
    return np.random.default_rng(sequence)


def spawn_rngs(seed: SeedLike, count: int) -> List[np.random.Generator]:
    """Spawn `count` independent generators, e.g. one per worker chunk."""
    return [np.random.default_rng(child) for child in seed_sequence(seed).spawn(count)]


def uniform_box(rng: np.random.Generator, size: int, box: Sequence[float] = (-10.0, 10.0)) -> np.ndarray:
    """Draw a vector uniformly from the box [low, high]^size."""
    low, high = float(box[0]), float(box[1])
    return rng.uniform(low, high, size=size)
