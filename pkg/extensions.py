"""
Shared numerical runtime: random generators and the parallel executor
"""

import numpy as np
from joblib import Parallel
from threadpoolctl import threadpool_limits

# All randomness goes through PCG64 seeded from a SeedSequence, so generated
# matrices and CSV outputs are identical across platforms for a given seed.
BIT_GENERATOR = np.random.PCG64


def make_rng(seed):
    """Return a PCG64-backed Generator for a 64-bit seed"""
    return np.random.Generator(BIT_GENERATOR(np.random.SeedSequence(int(seed))))


def spawn_seeds(master_seed, *key, count=2):
    """Derive `count` independent 64-bit seeds from a master seed and an index key"""
    sequence = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))
    words = sequence.generate_state(count, dtype=np.uint64)
    return tuple(int(w) for w in words)


def make_parallel(n_jobs=1):
    """Executor used for realization-level parallelism"""
    return Parallel(n_jobs=n_jobs, prefer="processes")


def single_threaded_blas():
    """Context pinning BLAS/LAPACK to one thread so results do not depend on scheduling"""
    return threadpool_limits(limits=1)
