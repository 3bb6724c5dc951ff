"""Grouped key-race sampling over row tables.

Every row ``(group_id, label, strength)`` gets its own uniform draw and
competition key; the winner of each group is the row with the extremal
key.  Because the per-row work touches nothing but the row itself and the
per-group step is an associative, commutative merge, the whole procedure
is schedule-independent: any sharding, threading, or fold order produces
byte-identical winners.

Randomness is *derived*, not streamed.  The uniform of a row is a pure
function of ``(seed, replicate, version, group_id, label)``, obtained by
absorbing those values into a 64-bit state with the SplitMix64 finalizer
(full-avalanche xorshift-multiply mix) and mapping the final state to the
open interval (0, 1).  A sequential generator would make the output
depend on row order; the hash keeps rows independent of each other and of
the partitioning.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .families import (
    DegenerateWeightError,
    Family,
    FamilyDomainError,
    ModelSpec,
    Orientation,
    describe_invalid_strength,
    first_invalid_strength,
    generate_key,
    generate_order_key,
)

__all__ = [
    "SeedContext",
    "Row",
    "KeyedRow",
    "GroupWinner",
    "derive_uniform",
    "replicate_uniforms",
    "assign_keys",
    "reduce_winners",
    "merge_winner_maps",
    "sample",
    "sample_arrays",
    "replicate_winners",
]

_MASK = 0xFFFFFFFFFFFFFFFF
_MIX_MULT_1 = 0xBF58476D1CE4E5B9
_MIX_MULT_2 = 0x94D049BB133111EB
_GOLDEN = 0x9E3779B97F4A7C15

_U64_MULT_1 = np.uint64(_MIX_MULT_1)
_U64_MULT_2 = np.uint64(_MIX_MULT_2)
_U64_30 = np.uint64(30)
_U64_27 = np.uint64(27)
_U64_31 = np.uint64(31)
_U64_11 = np.uint64(11)
_UNIT = 2.0**-53


def _mix64(x: int) -> int:
    """SplitMix64 finalizer on a plain Python integer."""
    x &= _MASK
    x ^= x >> 30
    x = (x * _MIX_MULT_1) & _MASK
    x ^= x >> 27
    x = (x * _MIX_MULT_2) & _MASK
    x ^= x >> 31
    return x


def _mix64_array(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer, vectorized over a uint64 array (wraps mod 2^64)."""
    x = x ^ (x >> _U64_30)
    x = x * _U64_MULT_1
    x = x ^ (x >> _U64_27)
    x = x * _U64_MULT_2
    x = x ^ (x >> _U64_31)
    return x


@lru_cache(maxsize=1 << 20)
def _string_digest(s: str) -> int:
    """64-bit digest of a string: length then 8-byte chunks, mixed stepwise."""
    data = s.encode("utf-8")
    h = _mix64(_GOLDEN ^ len(data))
    for i in range(0, len(data), 8):
        h = _mix64(h ^ int.from_bytes(data[i : i + 8], "little"))
    return h


def _to_unit(h: np.ndarray) -> np.ndarray:
    # (h >> 11) keeps 53 bits; +0.5 centers inside the half-open cells, so
    # the result lies in [2^-54, 1 - 2^-54] and log(u), log(-log(u)) stay finite.
    return ((h >> _U64_11).astype(np.float64) + 0.5) * _UNIT


@dataclass(frozen=True)
class SeedContext:
    """Root of the derived randomness.

    Equal (seed, replicate) pairs reproduce every uniform exactly;
    distinct replicates give statistically independent copies of the
    whole table, which is how Monte Carlo experiments draw repetitions
    without re-seeding.
    """

    seed: int = 0
    replicate: int = 0


@dataclass(frozen=True)
class Row:
    group_id: str
    label: str
    strength: float


@dataclass(frozen=True)
class KeyedRow:
    """A row plus its uniform draw and competition key.

    ``order_key`` is the monotone-equivalent value used for ranking; it
    differs from ``key`` only for the canonical family (log domain).
    """

    row: Row
    uniform: float
    key: float
    order_key: float = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.order_key is None:
            object.__setattr__(self, "order_key", self.key)


@dataclass(frozen=True)
class GroupWinner:
    group_id: str
    label: str
    key: float
    row_count: int
    order_key: float = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.order_key is None:
            object.__setattr__(self, "order_key", self.key)


def derive_uniform(ctx: SeedContext, group_id: str, label: str, version: int = 0) -> float:
    """Deterministic uniform in (0, 1) for one row.

    Absorption order: seed, replicate, version, group_id, label.  Strings
    enter through their own digests so distinct identifiers decorrelate
    fully; the final state maps to ((h >> 11) + 0.5) * 2^-53.
    """
    h = _mix64(ctx.seed & _MASK)
    h = _mix64(h ^ (ctx.replicate & _MASK))
    h = _mix64(h ^ (version & _MASK))
    h = _mix64(h ^ _string_digest(group_id))
    h = _mix64(h ^ _string_digest(label))
    return ((h >> 11) + 0.5) * _UNIT


def _row_uniforms(
    ctx: SeedContext, group_digests: np.ndarray, label_digests: np.ndarray
) -> np.ndarray:
    """Vectorized ``derive_uniform`` (version 0) over parallel digest arrays."""
    base = _mix64(_mix64(ctx.seed & _MASK) ^ (ctx.replicate & _MASK))
    h0 = np.uint64(_mix64(base))  # version-0 absorption, hoisted out of the array ops
    h = _mix64_array(h0 ^ group_digests)
    h = _mix64_array(h ^ label_digests)
    return _to_unit(h)


def replicate_uniforms(
    seed: int, group_id: str, label: str, n_replicates: int, version: int = 0
) -> np.ndarray:
    """Uniforms of one row across replicates 0..n-1 (vectorized)."""
    h0 = np.uint64(_mix64(seed & _MASK))
    reps = np.arange(n_replicates, dtype=np.uint64)
    h = _mix64_array(h0 ^ reps)
    h = _mix64_array(h ^ np.uint64(version & _MASK))
    h = _mix64_array(h ^ np.uint64(_string_digest(group_id)))
    h = _mix64_array(h ^ np.uint64(_string_digest(label)))
    return _to_unit(h)


def _digests(strings: Sequence[str]) -> np.ndarray:
    return np.fromiter(
        (_string_digest(s) for s in strings), dtype=np.uint64, count=len(strings)
    )


def _beats(
    order_key: float, label: str, inc_order_key: float, inc_label: str, orientation: Orientation
) -> bool:
    """Total-order comparator: extremal order_key first, smaller label on ties."""
    if order_key == inc_order_key:
        return label < inc_label
    if orientation is Orientation.MAX:
        return order_key > inc_order_key
    return order_key < inc_order_key


def _annotated_domain_error(spec: ModelSpec, group_id: str, label: str, value: float):
    message = describe_invalid_strength(spec, value)
    cls = (
        DegenerateWeightError
        if spec.family in (Family.FRECHET2, Family.NEGEXP) and value == 0.0
        else FamilyDomainError
    )
    return cls(f"{message} (group_id={group_id!r}, label={label!r})")


def assign_keys(
    rows: Sequence[Row], spec: ModelSpec, ctx: SeedContext
) -> list[KeyedRow]:
    """Attach a derived uniform and competition key to every row.

    Order-preserving; each output depends only on its own row and ``ctx``,
    so any partition of the input can be keyed independently.  Family
    domain errors are re-raised with the offending (group_id, label).
    """
    if not rows:
        return []
    strengths = np.fromiter((r.strength for r in rows), dtype=np.float64, count=len(rows))
    bad = first_invalid_strength(spec, strengths)
    if bad is not None:
        raise _annotated_domain_error(
            spec, rows[bad].group_id, rows[bad].label, float(strengths[bad])
        )
    gdig = _digests([r.group_id for r in rows])
    ldig = _digests([r.label for r in rows])
    uniforms = _row_uniforms(ctx, gdig, ldig)
    keys = generate_key(spec, strengths, uniforms)
    order_keys = (
        generate_order_key(spec, strengths, uniforms)
        if spec.family is Family.CANONICAL
        else keys
    )
    return [
        KeyedRow(row, float(uniforms[i]), float(keys[i]), float(order_keys[i]))
        for i, row in enumerate(rows)
    ]


def reduce_winners(
    keyed: Iterable[KeyedRow], orientation: Orientation
) -> dict[str, GroupWinner]:
    """Fold keyed rows into one winner per group.

    The pairwise merge (better order_key, label tie-break, counts added)
    is associative and commutative, so the result is independent of input
    order and of any partitioning into sub-reductions.
    """
    winners: dict[str, GroupWinner] = {}
    for kr in keyed:
        gid = kr.row.group_id
        incumbent = winners.get(gid)
        if incumbent is None:
            winners[gid] = GroupWinner(gid, kr.row.label, kr.key, 1, kr.order_key)
        elif _beats(kr.order_key, kr.row.label, incumbent.order_key, incumbent.label, orientation):
            winners[gid] = GroupWinner(
                gid, kr.row.label, kr.key, incumbent.row_count + 1, kr.order_key
            )
        else:
            winners[gid] = GroupWinner(
                gid,
                incumbent.label,
                incumbent.key,
                incumbent.row_count + 1,
                incumbent.order_key,
            )
    return winners


def merge_winner_maps(
    maps: Iterable[Mapping[str, GroupWinner]], orientation: Orientation
) -> dict[str, GroupWinner]:
    """Merge partial winner maps from disjoint row partitions."""
    merged: dict[str, GroupWinner] = {}
    for partial in maps:
        for gid, cand in partial.items():
            incumbent = merged.get(gid)
            if incumbent is None:
                merged[gid] = cand
                continue
            count = incumbent.row_count + cand.row_count
            if _beats(cand.order_key, cand.label, incumbent.order_key, incumbent.label, orientation):
                merged[gid] = GroupWinner(gid, cand.label, cand.key, count, cand.order_key)
            else:
                merged[gid] = GroupWinner(
                    gid, incumbent.label, incumbent.key, count, incumbent.order_key
                )
    return merged


def sample(
    rows: Sequence[Row], spec: ModelSpec, ctx: SeedContext
) -> dict[str, GroupWinner]:
    """Key every row and reduce to per-group winners.

    Within a group, label ``l`` wins with probability ``a_l / sum(a)``
    where ``a`` are the weights recovered from the strengths.
    """
    return reduce_winners(assign_keys(rows, spec, ctx), spec.orientation)


def _shard_winners(
    group_ids: np.ndarray,
    labels: np.ndarray,
    strengths: np.ndarray,
    keys: np.ndarray,
    order_keys: np.ndarray,
    orientation: Orientation,
) -> dict[str, GroupWinner]:
    """Vectorized per-group argmax/argmin over one shard of parallel arrays."""
    groups, g_inv = np.unique(group_ids, return_inverse=True)
    _, l_inv = np.unique(labels, return_inverse=True)
    adj = order_keys if orientation is Orientation.MAX else -order_keys
    # Sort by (group, adj asc, label desc); the last row of each group block
    # is then the extremal key, with the smallest label among exact ties.
    order = np.lexsort((-l_inv.astype(np.int64), adj, g_inv))
    sorted_groups = g_inv[order]
    last = np.searchsorted(sorted_groups, np.arange(len(groups)), side="right") - 1
    winner_idx = order[last]
    counts = np.bincount(g_inv, minlength=len(groups))
    return {
        str(groups[gi]): GroupWinner(
            str(groups[gi]),
            str(labels[wi]),
            float(keys[wi]),
            int(counts[gi]),
            float(order_keys[wi]),
        )
        for gi, wi in enumerate(winner_idx)
    }


def sample_arrays(
    group_ids: Sequence[str],
    labels: Sequence[str],
    strengths: np.ndarray,
    spec: ModelSpec,
    ctx: SeedContext,
    n_shards: int = 1,
    injected_keys: np.ndarray | None = None,
) -> dict[str, GroupWinner]:
    """Array-based fast path behind :func:`sample`.

    Shards the rows, reduces each shard (optionally on a thread pool via
    the caller splitting), and merges the partial maps; the total-order
    comparator makes the outcome identical for every shard count.  When
    ``injected_keys`` is given the keys are taken verbatim instead of
    generated (used to replay externally keyed tables).
    """
    n = len(strengths)
    strengths = np.asarray(strengths, dtype=np.float64)
    if n == 0:
        return {}
    group_arr = np.asarray(group_ids, dtype=object)
    label_arr = np.asarray(labels, dtype=object)
    if injected_keys is not None:
        keys = np.asarray(injected_keys, dtype=np.float64)
        order_keys = keys
    else:
        bad = first_invalid_strength(spec, strengths)
        if bad is not None:
            raise _annotated_domain_error(
                spec, str(group_arr[bad]), str(label_arr[bad]), float(strengths[bad])
            )
        gdig = _digests(list(group_arr))
        ldig = _digests(list(label_arr))
        uniforms = _row_uniforms(ctx, gdig, ldig)
        keys = generate_key(spec, strengths, uniforms)
        order_keys = (
            generate_order_key(spec, strengths, uniforms)
            if spec.family is Family.CANONICAL
            else keys
        )
    n_shards = max(1, min(n_shards, n))
    if n_shards == 1:
        return _shard_winners(group_arr, label_arr, strengths, keys, order_keys, spec.orientation)
    bounds = np.linspace(0, n, n_shards + 1, dtype=np.intp)
    partials = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi > lo:
            partials.append(
                _shard_winners(
                    group_arr[lo:hi],
                    label_arr[lo:hi],
                    strengths[lo:hi],
                    keys[lo:hi],
                    order_keys[lo:hi],
                    spec.orientation,
                )
            )
    return merge_winner_maps(partials, spec.orientation)


def replicate_winners(
    spec: ModelSpec,
    labels: Sequence[str],
    strengths: Sequence[float],
    seed: int,
    n_replicates: int,
    group_id: str = "g",
    chunk_elems: int = 1 << 24,
) -> np.ndarray:
    """Winning label index per replicate for a single group (vectorized).

    Equivalent to running :func:`sample` once per ``SeedContext(seed, r)``
    and recording the winner; replicates are independent because every
    uniform is derived per (replicate, group, label).
    """
    n = len(labels)
    if n == 0:
        raise ValueError("need at least one label")
    s = np.asarray(strengths, dtype=np.float64)
    bad = first_invalid_strength(spec, s)
    if bad is not None:
        raise _annotated_domain_error(spec, group_id, str(labels[bad]), float(s[bad]))
    # ties break toward the lexicographically smallest label: evaluate rows
    # in label-sorted order so the first extremal index is the winner
    label_order = sorted(range(n), key=lambda i: labels[i])
    winners = np.empty(n_replicates, dtype=np.intp)
    take = max(1, chunk_elems // max(n, 1))
    start = 0
    h_seed = np.uint64(_mix64(seed & _MASK))
    digests = [
        (np.uint64(_string_digest(group_id)), np.uint64(_string_digest(labels[i])))
        for i in label_order
    ]
    version0 = np.uint64(0)
    while start < n_replicates:
        stop = min(start + take, n_replicates)
        reps = np.arange(start, stop, dtype=np.uint64)
        order_keys = np.empty((n, stop - start), dtype=np.float64)
        for pos, i in enumerate(label_order):
            gd, ld = digests[pos]
            h = _mix64_array(h_seed ^ reps)
            h = _mix64_array(h ^ version0)  # version-0 absorption step
            h = _mix64_array(h ^ gd)
            h = _mix64_array(h ^ ld)
            u = _to_unit(h)
            order_keys[pos] = generate_order_key(spec, s[i], u)
        extremal = (
            np.argmax(order_keys, axis=0)
            if spec.orientation is Orientation.MAX
            else np.argmin(order_keys, axis=0)
        )
        winners[start:stop] = np.asarray(label_order, dtype=np.intp)[extremal]
        start = stop
    return winners
