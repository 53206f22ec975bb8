"""Undirected multigraphs with loops, and a bit-exact sparse6 codec."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import numpy as np

SPARSE6_HEADER = b">>sparse6<<"


class Sparse6Error(ValueError):
    """Malformed sparse6 input. ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


@dataclass(frozen=True)
class MultiGraph:
    """Vertex count plus a canonical edge multiset.

    ``edges`` holds ``(u, v, multiplicity)`` with ``u <= v``, sorted, one entry
    per distinct pair. Loops are entries with ``u == v``.
    """

    n: int
    edges: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative vertex count")
        prev = None
        for u, v, mult in self.edges:
            if not (0 <= u <= v < self.n):
                raise ValueError(f"bad edge ({u}, {v}) for n={self.n}")
            if mult <= 0:
                raise ValueError("multiplicities must be positive")
            if prev is not None and (u, v) <= prev:
                raise ValueError("edges must be sorted and distinct; use from_pairs")
            prev = (u, v)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "MultiGraph":
        counts = Counter((min(u, v), max(u, v)) for u, v in pairs)
        return cls(n, tuple((u, v, m) for (u, v), m in sorted(counts.items())))

    def edge_pairs(self) -> list[tuple[int, int]]:
        """Edges expanded by multiplicity, in canonical order."""
        out = []
        for u, v, mult in self.edges:
            out.extend([(u, v)] * mult)
        return out

    @property
    def num_edges(self) -> int:
        return sum(m for _, _, m in self.edges)

    @property
    def num_loops(self) -> int:
        return sum(m for u, v, m in self.edges if u == v)

    def adjacency(self) -> np.ndarray:
        """Integer adjacency matrix; a loop adds 2 on the diagonal."""
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v, mult in self.edges:
            if u == v:
                a[u, u] += 2 * mult
            else:
                a[u, v] += mult
                a[v, u] += mult
        return a

    def neighbors(self) -> list[list[int]]:
        """Neighbor lists with repetition; a loop lists the vertex twice."""
        nb: list[list[int]] = [[] for _ in range(self.n)]
        for u, v, mult in self.edges:
            for _ in range(mult):
                nb[u].append(v)
                nb[v].append(u)
        return nb


@dataclass(frozen=True)
class DegreeProfile:
    degrees: tuple[int, ...]
    regular: bool
    d: int | None


def degree_profile(g: MultiGraph) -> DegreeProfile:
    deg = [0] * g.n
    for u, v, mult in g.edges:
        deg[u] += mult
        deg[v] += mult
    regular = len(set(deg)) <= 1
    d = deg[0] if regular and deg else (0 if regular else None)
    return DegreeProfile(tuple(deg), regular, d)


def _bits_for(n: int) -> int:
    k = 1
    while (1 << k) < n:
        k += 1
    return k


def _encode_size(n: int) -> bytes:
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    if n <= 68719476735:
        return bytes([126, 126] + [((n >> s) & 63) + 63 for s in range(30, -1, -6)])
    raise ValueError("graph too large for sparse6")


def parse_sparse6(text: bytes | str) -> MultiGraph:
    """Decode a sparse6 string (optional header, surrounding whitespace allowed)."""
    if isinstance(text, str):
        text = text.encode("ascii", errors="replace")
    lead = len(text) - len(text.lstrip())
    data = text.strip()
    base = lead
    if data.startswith(SPARSE6_HEADER):
        data = data[len(SPARSE6_HEADER):]
        base += len(SPARSE6_HEADER)
    if not data.startswith(b":"):
        raise Sparse6Error("sparse6 data must start with ':'", base)
    body = data[1:]
    base += 1
    for i, ch in enumerate(body):
        if not 63 <= ch <= 126:
            raise Sparse6Error(f"invalid character {ch!r}", base + i)
    if not body:
        raise Sparse6Error("missing vertex count", base)
    if body[0] != 126:
        n, pos = body[0] - 63, 1
    elif len(body) > 1 and body[1] == 126:
        if len(body) < 8:
            raise Sparse6Error("truncated vertex count", base + len(body))
        n = 0
        for ch in body[2:8]:
            n = (n << 6) | (ch - 63)
        pos = 8
    else:
        if len(body) < 4:
            raise Sparse6Error("truncated vertex count", base + len(body))
        n = 0
        for ch in body[1:4]:
            n = (n << 6) | (ch - 63)
        pos = 4

    k = _bits_for(n)
    bits: list[int] = []
    for ch in body[pos:]:
        val = ch - 63
        bits.extend((val >> s) & 1 for s in range(5, -1, -1))

    pairs = []
    v = 0
    i = 0
    total = len(bits)
    while i + 1 + k <= total:
        start = i
        b = bits[i]
        x = 0
        for bit in bits[i + 1:i + 1 + k]:
            x = (x << 1) | bit
        i += 1 + k
        if b:
            v += 1
        if x >= n or v >= n:
            # only trailing padding (all ones) may overflow the vertex range
            if all(bits[start:]):
                break
            raise Sparse6Error(f"vertex index out of range for n={n}", base + pos + start // 6)
        if x > v:
            v = x
        else:
            pairs.append((x, v))
    if n == 0 and pairs:
        raise Sparse6Error("edges in empty graph", base + pos)
    return MultiGraph.from_pairs(n, pairs)


def write_sparse6(g: MultiGraph, header: bool = False) -> bytes:
    """Encode ``g``; the edge order and padding follow the reference encoder."""
    n = g.n
    k = _bits_for(n)
    bits: list[int] = []

    def push(b: int, x: int) -> None:
        bits.append(b)
        bits.extend((x >> s) & 1 for s in range(k - 1, -1, -1))

    cur = 0
    for u, v in sorted(((u, v) for u, v in g.edge_pairs()), key=lambda e: (e[1], e[0])):
        if v == cur:
            push(0, u)
        elif v == cur + 1:
            cur = v
            push(1, u)
        else:
            cur = v
            push(1, v)
            push(0, u)
    if k < 6 and n == (1 << k) and (-len(bits)) % 6 >= k and cur < n - 1:
        bits.append(0)
    bits.extend([1] * ((-len(bits)) % 6))
    out = bytearray(_encode_size(n))
    for i in range(0, len(bits), 6):
        val = 0
        for bit in bits[i:i + 6]:
            val = (val << 1) | bit
        out.append(val + 63)
    prefix = SPARSE6_HEADER if header else b""
    return prefix + b":" + bytes(out)


def load_graph(path) -> MultiGraph:
    with open(path, "rb") as fh:
        return parse_sparse6(fh.read())


def normalize_printed(text: str) -> str:
    """Undo typesetting artifacts in printed sparse6 strings.

    Strips a trailing literal backslash-n token and collapses doubled backslashes.
    """
    s = text.strip()
    if s.endswith("\\n"):
        s = s[:-2]
    return s.replace("\\\\", "\\")
