"""Codebook (``wccpool``), expurgated-code (``wccec``) and concatenation
manifest (``wcccat``) files."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graph import GraphError, LabeledGraph
from .pool import Codeword, codeword_from_labels


class FormatError(ValueError):
    pass


class IntegrityError(FormatError):
    pass


def _rat(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _parse_rat(tok: str) -> Fraction:
    num, sep, den = tok.partition("/")
    if not sep:
        raise FormatError(f"expected num/den, got {tok!r}")
    try:
        return Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"expected num/den, got {tok!r}") from None


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CodebookFile:
    kind: str  # "pool" or "ec"
    n: int
    alpha: Fraction
    zeta: Fraction
    root: str
    graphhash: str
    codewords: tuple[tuple[str, ...], ...]
    eps: Fraction | None = None
    mode: str | None = None

    def check_graph(self, graph: LabeledGraph):
        if graph.digest != self.graphhash:
            raise IntegrityError("codebook was built for a different graph (graph hash mismatch)")

    def prefix_len(self) -> int:
        return (self.alpha * self.n).__floor__()

    def to_codewords(self, graph: LabeledGraph) -> list[Codeword]:
        self.check_graph(graph)
        try:
            root = graph.vertex_id(self.root)
            out = []
            for word in self.codewords:
                labels = [graph.symbol_id(s) for s in word]
                out.append(codeword_from_labels(graph, root, labels, self.prefix_len()))
        except GraphError as exc:
            raise FormatError(f"codeword does not trace on the graph: {exc}") from None
        return out


def format_codebook(
    graph: LabeledGraph,
    n: int,
    alpha: Fraction,
    zeta: Fraction,
    root: int,
    codewords: Sequence[Codeword],
    *,
    eps: Fraction | None = None,
    mode: str | None = None,
) -> str:
    ec = eps is not None
    lines = [
        "wccec v1" if ec else "wccpool v1",
        f"n {n}",
        f"alpha {_rat(alpha)}",
        f"zeta {_rat(zeta)}",
        f"root {graph.vertices[root]}",
        f"graphhash {graph.digest}",
    ]
    if ec:
        lines.append(f"eps {_rat(eps)}")
        lines.append(f"mode {mode}")
    lines += sorted(" ".join(graph.alphabet[s] for s in c.labels) for c in codewords)
    return "\n".join(lines) + "\n"


def sorted_codewords(graph: LabeledGraph, codewords: Sequence[Codeword]) -> list[Codeword]:
    """Codewords in file order."""
    return sorted(codewords, key=lambda c: " ".join(graph.alphabet[s] for s in c.labels))


def parse_codebook(text: str) -> CodebookFile:
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    if not lines:
        raise FormatError("empty codebook file")
    head = lines[0].strip()
    if head not in ("wccpool v1", "wccec v1"):
        raise FormatError(f"unknown codebook header {head!r}")
    kind = "pool" if head == "wccpool v1" else "ec"
    keys = ["n", "alpha", "zeta", "root", "graphhash"] + (["eps", "mode"] if kind == "ec" else [])
    if len(lines) < 1 + len(keys):
        raise FormatError("truncated codebook header")
    fields = {}
    for i, key in enumerate(keys, start=2):
        tok = lines[i - 1].split(" ", 1)
        if tok[0] != key or len(tok) != 2:
            raise FormatError(f"line {i}: expected '{key} <value>'")
        fields[key] = tok[1].strip()
    try:
        n = int(fields["n"])
    except ValueError:
        raise FormatError("line 2: n must be an integer") from None
    words = tuple(tuple(ln.split()) for ln in lines[1 + len(keys) :] if ln.strip())
    for w in words:
        if len(w) != n:
            raise FormatError(f"codeword of length {len(w)} in a file with n = {n}")
    return CodebookFile(
        kind=kind,
        n=n,
        alpha=_parse_rat(fields["alpha"]),
        zeta=_parse_rat(fields["zeta"]),
        root=fields["root"],
        graphhash=fields["graphhash"],
        codewords=words,
        eps=_parse_rat(fields["eps"]) if kind == "ec" else None,
        mode=fields.get("mode"),
    )


def read_codebook(path) -> CodebookFile:
    with open(path, encoding="utf-8") as fh:
        return parse_codebook(fh.read())


@dataclass(frozen=True)
class Manifest:
    q: int
    k: int
    c0: float
    inner: str
    g: int
    graphhash: str
    innerhash: str

    def to_text(self) -> str:
        return (
            "wcccat v1\n"
            f"q {self.q}  K {self.k}  c0 {self.c0!r}\n"
            f"inner {self.inner}\n"
            f"g {self.g}\n"
            f"graphhash {self.graphhash}\n"
            f"innerhash {self.innerhash}\n"
        )


def parse_manifest(text: str) -> Manifest:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "wcccat v1":
        raise FormatError("not a wcccat v1 manifest")
    try:
        tok = lines[1].split()
        if tok[0::2] != ["q", "K", "c0"]:
            raise ValueError
        q, k, c0 = int(tok[1]), int(tok[3]), float(tok[5])
        fields = {}
        for ln in lines[2:]:
            if ln.strip():
                key, _, val = ln.partition(" ")
                fields[key] = val.strip()
        return Manifest(q, k, c0, fields["inner"], int(fields["g"]), fields["graphhash"], fields["innerhash"])
    except (IndexError, KeyError, ValueError):
        raise FormatError("malformed wcccat manifest") from None
