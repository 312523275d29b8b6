"""Hot numeric kernels, JIT-compiled when numba is available.

Each kernel ships in two equivalent flavours: a loop version compiled with
numba's @njit and a vectorised pure-numpy version. Setting the environment
variable CANTORNORMAL_DISABLE_NUMBA (to any non-empty value) before import
selects the numpy path; so does a missing numba installation. The benchmark
script under benchmarks/ times both flavours side by side.

All kernels work on int64 arrays and are guarded against overflow by the
callers (window-key width and orbit denominators are checked in Python
before dispatch).
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ArgumentError

NUMBA_ENV_FLAG = "CANTORNORMAL_DISABLE_NUMBA"

if os.environ.get(NUMBA_ENV_FLAG):
    HAVE_NUMBA = False
else:
    try:
        from numba import njit, types
        from numba.typed import Dict

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# window digits: decode the cyclic block assignment for one region
# ---------------------------------------------------------------------------

def _check_key_width(beta: int, r: int) -> None:
    # window keys are packed base-beta into a single int64
    if r * beta.bit_length() > 61:
        raise ArgumentError(
            f"window key of {r} bases below {beta} does not fit an int64 key"
        )


if HAVE_NUMBA:

    @njit(cache=True)
    def _region_digits_numba(bases, r, beta):  # pragma: no cover - compiled
        nwin = bases.shape[0] // r
        out = np.empty(nwin * r, dtype=np.int64)
        counts = Dict.empty(types.int64, types.int64)
        for j in range(nwin):
            key = 0
            prod = 1
            for i in range(r):
                b = bases[j * r + i]
                key = key * beta + b
                prod *= b
            c = counts.get(key, 0) + 1
            counts[key] = c
            idx = (c - 1) % prod
            for i in range(r - 1, -1, -1):
                out[j * r + i] = idx % bases[j * r + i]
                idx //= bases[j * r + i]
        return out, len(counts)


def _region_digits_numpy(bases, r, beta):
    nwin = bases.shape[0] // r
    win = bases[: nwin * r].reshape(nwin, r)
    weights = beta ** np.arange(r - 1, -1, -1, dtype=np.int64)
    keys = (win * weights).sum(axis=1)
    # occurrence rank of each window among equal keys, in position order
    uniq, inv = np.unique(keys, return_inverse=True)
    order = np.argsort(inv, kind="stable")
    sorted_inv = inv[order]
    starts = np.concatenate(([0], np.flatnonzero(np.diff(sorted_inv)) + 1))
    group_sizes = np.diff(np.concatenate((starts, [nwin])))
    rank_sorted = np.arange(nwin, dtype=np.int64) - np.repeat(starts, group_sizes)
    occ = np.empty(nwin, dtype=np.int64)
    occ[order] = rank_sorted
    prod = win.prod(axis=1)
    idx = occ % prod
    out = np.empty((nwin, r), dtype=np.int64)
    for i in range(r - 1, -1, -1):
        out[:, i] = idx % win[:, i]
        idx //= win[:, i]
    return out.reshape(-1), int(uniq.size)


def region_digits(bases: np.ndarray, r: int, use_numba: bool | None = None):
    """Digits for the windows whose bases are packed row-major in `bases`.

    Returns (digits, distinct_window_count). Windows are processed in
    position order starting from the first window of the region, which is
    what makes the per-window occurrence ranks meaningful.
    """
    if r < 1:
        raise ArgumentError(f"window length must be >= 1, got {r}")
    if bases.size % r:
        raise ArgumentError(f"{bases.size} bases do not split into windows of {r}")
    bases = np.ascontiguousarray(bases, dtype=np.int64)
    if bases.size == 0:
        return np.empty(0, dtype=np.int64), 0
    beta = int(bases.max()) + 1
    _check_key_width(beta, r)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba and HAVE_NUMBA:
        out, distinct = _region_digits_numba(bases, r, beta)
        return out, int(distinct)
    return _region_digits_numpy(bases, r, beta)


# ---------------------------------------------------------------------------
# block occurrence mask
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _match_mask_numba(digits, block, n):  # pragma: no cover - compiled
        k = block.shape[0]
        out = np.zeros(n, dtype=np.bool_)
        for i in range(n):
            hit = True
            for j in range(k):
                if digits[i + j] != block[j]:
                    hit = False
                    break
            out[i] = hit
        return out


def _match_mask_numpy(digits, block, n):
    mask = np.ones(n, dtype=bool)
    for j, b in enumerate(block):
        mask &= digits[j : j + n] == b
    return mask


def match_mask(digits: np.ndarray, block, n: int, use_numba: bool | None = None) -> np.ndarray:
    """Boolean mask over start positions 1..n marking occurrences of `block`."""
    block_arr = np.asarray(block, dtype=np.int64)
    k = block_arr.size
    if k < 1:
        raise ArgumentError("blocks must have at least one digit")
    if digits.size < n + k - 1:
        raise ArgumentError(
            f"need digits through position {n + k - 1}, have {digits.size}"
        )
    if n <= 0:
        return np.zeros(0, dtype=bool)
    digits = np.ascontiguousarray(digits, dtype=np.int64)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba and HAVE_NUMBA:
        return _match_mask_numba(digits, block_arr, n)
    return _match_mask_numpy(digits, block_arr, n)


# ---------------------------------------------------------------------------
# truncated orbit values
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _orbit_numbers_numba(digits, bases, depths):  # pragma: no cover - compiled
        count = depths.shape[0]
        num = np.empty(count, dtype=np.int64)
        den = np.empty(count, dtype=np.int64)
        for m in range(count):
            a = 0
            d = 1
            for i in range(depths[m]):
                q = bases[m + i]
                a = a * q + digits[m + i]
                d = d * q
            num[m] = a
            den[m] = d
        return num, den


def _orbit_numbers_numpy(digits, bases, depths):
    count = depths.shape[0]
    num = np.zeros(count, dtype=np.int64)
    den = np.ones(count, dtype=np.int64)
    max_depth = int(depths.max(initial=0))
    for i in range(max_depth):
        live = depths > i
        idx = np.flatnonzero(live) + i
        num[live] = num[live] * bases[idx] + digits[idx]
        den[live] *= bases[idx]
    return num, den


def orbit_numbers(
    digits: np.ndarray,
    bases: np.ndarray,
    depths: np.ndarray,
    use_numba: bool | None = None,
):
    """Exact numerator/denominator of each truncated orbit value.

    Entry m uses digits[m], digits[m+1], ... for depths[m] steps (callers
    pass slices so that digits[m] is the digit at stream position m+1).
    Denominators must fit int64; callers bound depth accordingly.
    """
    depths = np.ascontiguousarray(depths, dtype=np.int64)
    if depths.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    need = int((np.arange(depths.size, dtype=np.int64) + depths).max())
    if digits.size < need or bases.size < need:
        raise ArgumentError(f"orbit evaluation needs {need} digits/bases")
    log2den = np.log2(bases[:need].astype(np.float64))
    csum = np.concatenate(([0.0], np.cumsum(log2den)))
    spans = csum[np.arange(depths.size) + depths] - csum[: depths.size]
    if spans.max(initial=0.0) > 61.5:
        raise ArgumentError("truncation depth too large for int64 denominators")
    digits = np.ascontiguousarray(digits, dtype=np.int64)
    bases = np.ascontiguousarray(bases, dtype=np.int64)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba and HAVE_NUMBA:
        return _orbit_numbers_numba(digits, bases, depths)
    return _orbit_numbers_numpy(digits, bases, depths)
