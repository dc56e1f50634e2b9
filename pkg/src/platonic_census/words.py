"""Words over the four involutive reflection generators.

A word is a tuple of 0-based generator indices.  Because every generator is
an involution there are no inverse letters: the inverse of a word is its
reversal, and free reduction just cancels adjacent equal letters.
"""

from __future__ import annotations

from typing import Iterable, Tuple

Word = Tuple[int, ...]


def word(*letters: int) -> Word:
    return tuple(letters)


def inverse(w: Word) -> Word:
    return tuple(reversed(w))


def free_reduce(w: Iterable[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def concat(*ws: Iterable[int]) -> Word:
    out: list[int] = []
    for w in ws:
        out.extend(w)
    return free_reduce(out)


def power(w: Word, n: int) -> Word:
    return w * n


def is_even(w: Word) -> bool:
    """Parity of the image under the sign character (reflections map to -1)."""
    return len(w) % 2 == 0


def show(w: Word) -> str:
    """Human-readable form, generators printed 1-based as x1..x4."""
    if not w:
        return "e"
    return "*".join(f"x{i + 1}" for i in w)
