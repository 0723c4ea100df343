import numpy as np

from app.errors import ParameterError

KEY_STREAM = 0
ERROR_STREAM = 1


def stream_seed(master_seed: int, stream: int, *indices: int) -> int:
    """64-bit seed for one item of a campaign; depends only on its coordinates."""
    seq = np.random.SeedSequence([master_seed, stream, *indices])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def key_seed(master_seed: int, key_index: int, attempt: int) -> int:
    return stream_seed(master_seed, KEY_STREAM, key_index, attempt)


def trial_rng(master_seed: int, key_index: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, ERROR_STREAM, key_index, trial]))


def sample_support(rng: np.random.Generator, n: int, weight: int) -> np.ndarray:
    """Uniform weight-subset of [0, n): the first distinct values of an iid stream, sorted."""
    if not 0 <= weight <= n:
        raise ParameterError(f"Cannot pick {weight} distinct positions out of {n}")
    chosen = np.empty(0, dtype=np.int64)
    while chosen.size < weight:
        merged = np.concatenate((chosen, rng.integers(0, n, size=weight - chosen.size)))
        _, first = np.unique(merged, return_index=True)
        chosen = merged[np.sort(first)]
    return np.sort(chosen)
