"""Succinct codes for bipartite graphs without two twin stars ``2Λ_s``.

Top vertices are listed by non-decreasing degree (ties by id).  The first
record carries the neighbourhood of the first vertex, every later record the
symmetric difference with the previous neighbourhood.  Without ``2Λ_s``, the
previous neighbourhood loses fewer than ``s`` vertices at each step, so the
whole code has at most ``2 s (|A| + |B|)`` tokens (labels plus set elements).

Wire format::

    code <s> <|A|> <|B|>
    <a> : <j> <j> ...
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import ClassMembershipError, ContractError, GraphParseError
from .graph import BipartiteGraph, bits, to_mask
from .patterns import twin_star_witness


@dataclass(frozen=True)
class Code:
    s: int
    a_size: int
    b_size: int
    records: tuple[tuple[int, tuple[int, ...]], ...]

    @property
    def token_count(self) -> int:
        return len(self.records) + sum(len(diff) for _, diff in self.records)

    @property
    def bound(self) -> int:
        return 2 * self.s * (self.a_size + self.b_size)

    def to_text(self) -> str:
        lines = [f"code {self.s} {self.a_size} {self.b_size}"]
        for label, diff in self.records:
            lines.append(f"{label} :" + "".join(f" {j}" for j in diff))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Code":
        header = None
        records = []
        offset = 0
        for line in text.splitlines(keepends=True):
            start = offset
            offset += len(line.encode())
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if header is None:
                parts = body.split()
                if len(parts) != 4 or parts[0] != "code":
                    raise GraphParseError("expected header 'code <s> <|A|> <|B|>'", start)
                try:
                    header = tuple(int(x) for x in parts[1:])
                except ValueError:
                    raise GraphParseError("non-integer value in code header", start) from None
                if header[0] < 1 or min(header[1:]) < 0:
                    raise GraphParseError("code header values out of range", start)
                continue
            label, sep, rest = body.partition(":")
            if not sep:
                raise GraphParseError("record must be '<a> : <j> ...'", start)
            try:
                a = int(label)
                diff = tuple(int(x) for x in rest.split())
            except ValueError:
                raise GraphParseError("non-integer vertex label in record", start) from None
            records.append((a, diff))
        if header is None:
            raise GraphParseError("missing 'code' header", offset)
        return cls(header[0], header[1], header[2], tuple(records))


def _witness_json(b: BipartiteGraph, pair: tuple[int, int], s: int) -> dict:
    u, v = pair
    ru, rv = b.rows[u], b.rows[v]
    return {"top": [u, v], "bottom": list(bits(ru & ~rv))[:s] + list(bits(rv & ~ru))[:s]}


def encode(b: BipartiteGraph, s: int) -> Code:
    """Code of a ``2Λ_s``-free bipartite graph."""
    if s < 1:
        raise ValueError("s must be positive")
    pair = twin_star_witness(b, s, "lambda")
    if pair is not None:
        raise ClassMembershipError(f"lambda(2,{s})", _witness_json(b, pair, s))
    order = sorted(range(b.a_size), key=lambda a: (b.rows[a].bit_count(), a))
    records = []
    prev = 0
    for a in order:
        row = b.rows[a]
        if (prev & ~row).bit_count() >= s:
            raise ContractError(f"backward difference at top {a} is not below s = {s}")
        records.append((a, tuple(bits(prev ^ row))))
        prev = row
    code = Code(s, b.a_size, b.b_size, tuple(records))
    if code.token_count > code.bound:
        warnings.warn(f"code has {code.token_count} tokens, above 2sn = {code.bound}", stacklevel=2)
    return code


def decode(c: Code) -> BipartiteGraph:
    labels = [a for a, _ in c.records]
    if sorted(labels) != list(range(c.a_size)):
        raise GraphParseError("record labels are not a permutation of the top side")
    rows = [0] * c.a_size
    prev = 0
    for a, diff in c.records:
        for j in diff:
            if not 0 <= j < c.b_size:
                raise GraphParseError(f"difference of top {a} names bottom {j} outside 0..{c.b_size - 1}")
        prev ^= to_mask(diff)
        rows[a] = prev
    return BipartiteGraph(c.a_size, c.b_size, tuple(rows))


def backward_differences(c: Code) -> list[int]:
    """``|N(a_{i-1}) \\ N(a_i)|`` for each record after the first."""
    out = []
    prev = 0
    for i, (_, diff) in enumerate(c.records):
        row = prev ^ to_mask(diff)
        if i:
            out.append((prev & ~row).bit_count())
        prev = row
    return out
