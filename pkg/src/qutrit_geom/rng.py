"""Counter-based random numbers addressed by ``(seed, stream, index)``.

Item ``i`` of a stream always consumes the same Philox4x64 blocks, so any
chunking of a run (serial, threaded, resumed) reproduces the same values bit
for bit. Uniforms carry 53 random bits; Gaussians use the Box-Muller
transform on those uniforms.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

# Stream ids keep independent draws for different purposes from overlapping.
STREAM_GINIBRE = 1
STREAM_RANK2 = 2
STREAM_ERASURE = 3
STREAM_TRANSMIT = 4

SEED_MAX = 2**64 - 1
THREADS_ENV = "QUTRIT_GEOM_THREADS"


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def uniforms(seed: int, stream: int, start: int, count: int, width: int) -> np.ndarray:
    """Uniform doubles in [0, 1) of shape ``(count, width)`` for items ``start..start+count-1``."""
    seed = check_seed(seed)
    if start < 0 or count < 0 or width < 1:
        raise ValueError("start and count must be non-negative, width positive")
    blocks = -(-width // 4)  # Philox emits four 64-bit words per block
    bitgen = np.random.Philox(key=seed | (stream << 64), counter=start * blocks)
    raw = bitgen.random_raw(count * blocks * 4).reshape(count, blocks * 4)[:, :width]
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def complex_normals(seed: int, stream: int, start: int, count: int, k: int) -> np.ndarray:
    """Standard complex Gaussians (E|z|^2 = 1), shape ``(count, k)``.

    Box-Muller: z = sqrt(-ln u1) * exp(2 pi i u2), with u1 taken from (0, 1].
    """
    u = uniforms(seed, stream, start, count, 2 * k)
    u1 = 1.0 - u[:, :k]
    u2 = u[:, k:]
    return np.sqrt(-np.log(u1)) * np.exp(2j * np.pi * u2)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def map_chunks(fn: Callable[[int, int], np.ndarray], count: int, chunk: int = 8192) -> np.ndarray:
    """Evaluate ``fn(start, stop)`` over consecutive ranges and concatenate in order."""
    bounds = [(lo, min(lo + chunk, count)) for lo in range(0, count, chunk)]
    if not bounds:
        return fn(0, 0)
    workers = min(worker_count(), len(bounds))
    if workers == 1:
        parts = [fn(lo, hi) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: fn(*b), bounds))
    return np.concatenate(parts, axis=0)
