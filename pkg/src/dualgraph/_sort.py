"""Two-pass counting sort shared by the CSR and edge-block builders."""
import numpy as np
from numba import njit


@njit(cache=True)
def _counting_sort(keys, num_keys):
    n = keys.shape[0]
    counts = np.zeros(num_keys + 1, dtype=np.int64)
    ops = 0
    # counting pass
    for i in range(n):
        counts[keys[i] + 1] += 1
        ops += 2
    for k in range(num_keys):
        counts[k + 1] += counts[k]
        ops += 1
    offsets = counts.copy()
    cursor = counts[:num_keys].copy()
    order = np.empty(n, dtype=np.int64)
    # placement pass, stable
    for i in range(n):
        k = keys[i]
        order[cursor[k]] = i
        cursor[k] += 1
        ops += 3
    return offsets, order, ops


def counting_sort(keys, num_keys):
    """Stable bucket order of ``keys`` in ``[0, num_keys)``.

    Returns ``(offsets, order, ops)``: ``offsets`` has ``num_keys + 1`` entries,
    ``order`` lists input positions grouped by key with input order kept inside
    each group, and ``ops`` counts element reads/writes done by the two passes.
    """
    keys = np.ascontiguousarray(keys, dtype=np.int64)
    if num_keys == 0:
        return np.zeros(1, dtype=np.int64), np.empty(0, dtype=np.int64), 0
    offsets, order, ops = _counting_sort(keys, np.int64(num_keys))
    return offsets, order, int(ops)
