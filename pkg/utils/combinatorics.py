"""
Permutation signs and unshuffle enumeration.

Convention: a permutation is the sequence (σ(1), …, σ(m)) of argument
indices placed into positions 1..m; its sign is (-1)^(number of inversions).
Unshuffles in S^k_m are enumerated as k-subsets in lexicographic order with
the complement in ascending order, so every sum over them (and every failure
witness found while scanning them) is reproducible.
"""

from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence, Tuple

Unshuffle = Tuple[Tuple[int, ...], Tuple[int, ...], int]


def permutation_sign(perm: Sequence[int]) -> int:
    inversions = 0
    items = list(perm)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                inversions += 1
    return -1 if inversions % 2 else 1


@lru_cache(maxsize=None)
def unshuffles(k: int, m: int) -> Tuple[Unshuffle, ...]:
    """(head, tail, sign) for every σ ∈ S^k_m, indices 0-based."""
    if k < 0 or k > m:
        return ()
    result = []
    for head in combinations(range(m), k):
        chosen = set(head)
        tail = tuple(i for i in range(m) if i not in chosen)
        inversions = sum(h - pos for pos, h in enumerate(head))
        result.append((head, tail, -1 if inversions % 2 else 1))
    return tuple(result)


def unshuffle_count(k: int, m: int) -> int:
    return comb(m, k) if 0 <= k <= m else 0


def sort_with_sign(indices: Sequence[int]) -> Tuple[Tuple[int, ...], int]:
    """Sorted copy and the sign of the sorting permutation; sign 0 on repeats."""
    items = list(indices)
    if len(set(items)) != len(items):
        return tuple(sorted(items)), 0
    return tuple(sorted(items)), permutation_sign(items)


def insert_sorted(index: int, ordered: Tuple[int, ...]) -> Tuple[Tuple[int, ...], int]:
    """Wedge e_index in front of e_ordered and re-sort; sign 0 if already present."""
    if index in ordered:
        return ordered, 0
    position = sum(1 for i in ordered if i < index)
    merged = ordered[:position] + (index,) + ordered[position:]
    return merged, -1 if position % 2 else 1
