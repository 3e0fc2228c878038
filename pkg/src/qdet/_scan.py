"""Chunked argmax over the grouping enumeration.

The winner is the first grouping (in canonical order) whose gain is within
``TIE_TOL`` of the overall maximum. The rule depends only on the gains, not
on how the index range is split, so any chunking gives the same answer.
"""
import numpy as np

TIE_TOL = 1e-12
CHUNK = 4096


def chunks(total, size=CHUNK):
    for start in range(0, total, size):
        yield start, min(start + size, total)


def first_best(total, score_chunk, gain_of, chunk=CHUNK):
    """Return ``(index, gain, scores_row)`` of the winning grouping.

    ``score_chunk(start, stop)`` gives a score array for that range and
    ``gain_of(scores)`` maps it to a gain vector; ``-inf`` marks groupings
    that must be skipped. Returns ``(None, -inf, None)`` if every grouping
    was skipped.
    """
    best = -np.inf
    cand_idx = []
    cand_gain = []
    cand_rows = []
    for start, stop in chunks(total, chunk):
        scores = score_chunk(start, stop)
        if np.isnan(scores).any():
            raise ArithmeticError("eigenvalue kernel failed to converge during grouping scan")
        gains = gain_of(scores)
        m = gains.max()
        if not np.isfinite(m):
            continue
        best = max(best, m)
        keep = np.flatnonzero(gains >= best - TIE_TOL)
        cand_idx.extend((keep + start).tolist())
        cand_gain.extend(gains[keep].tolist())
        cand_rows.extend(scores[keep])
        if len(cand_idx) > 4 * chunk or m == best:
            mask = [g >= best - TIE_TOL for g in cand_gain]
            cand_idx = [c for c, ok in zip(cand_idx, mask) if ok]
            cand_gain = [g for g, ok in zip(cand_gain, mask) if ok]
            cand_rows = [r for r, ok in zip(cand_rows, mask) if ok]
    if not cand_idx:
        return None, -np.inf, None
    k = min(i for i, g in enumerate(cand_gain) if g >= best - TIE_TOL)
    return cand_idx[k], cand_gain[k], np.asarray(cand_rows[k])
