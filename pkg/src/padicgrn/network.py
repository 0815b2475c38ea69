"""Network definitions, the ``.grn`` text format, and synchronous transition maps.

A ``.grn`` document looks like::

    network toy
    p 2
    genes g0 g1
    rule g0 := g1
    rule g1 := NOT g0 AND (g1 | 0)

or, for any prime ``p``, an explicit table in canonical encoding::

    table
    0 0
    1 3
    ...

Optional annotation lines (ignored by the dynamics):

``ordering <label> <gene> <gene> ...``
    a named gene ordering, e.g. one reported in the literature;
``label <digits> <text...>``
    an annotation for one configuration, digits given in declaration order.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

from .padic_core import check_size, encode, is_prime

DATA_ENV = "GRN_PADIC_DATA"
BUILTINS = ("toy4", "athaliana13")

KEYWORDS = {"and", "or", "not"}


class NetworkFormatError(ValueError):
    """A ``.grn`` document failed to parse or validate."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class DatasetMissingError(FileNotFoundError):
    pass


# --- Boolean expressions -----------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    name: str
    index: int


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class And:
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Expr", ...]


Expr = Union[Const, Var, Not, And, Or]

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_.\-]*)|(?P<num>[01])\b|(?P<op>[!~&|()]))")


def _tokenize(text: str, line: int | None, col0: int):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = col0 + len(text[:pos]) + (len(text[pos:]) - len(text[pos:].lstrip())) + 1
            raise NetworkFormatError(f"unexpected character {text[pos:].lstrip()[0]!r}", line, col)
        kind = m.lastgroup
        value = m.group(kind)
        col = col0 + m.start(kind) + 1
        if kind == "name" and value.lower() in KEYWORDS:
            kind, value = "op", {"and": "&", "or": "|", "not": "!"}[value.lower()]
        elif kind == "op" and value == "~":
            value = "!"
        tokens.append((kind, value, col))
        pos = m.end()
    return tokens


class _Parser:
    # precedence: NOT > AND > OR
    def __init__(self, tokens, genes: Mapping[str, int], line: int | None):
        self.tokens = tokens
        self.i = 0
        self.genes = genes
        self.line = line

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        col = tok[2] if tok else None
        raise NetworkFormatError(msg, self.line, col)

    def parse(self) -> Expr:
        if not self.tokens:
            raise NetworkFormatError("empty expression", self.line)
        expr = self.parse_or()
        tok = self.peek()
        if tok is not None:
            self.error(f"unexpected {tok[1]!r}", tok)
        return expr

    def parse_or(self) -> Expr:
        args = [self.parse_and()]
        while (tok := self.peek()) is not None and tok[1] == "|":
            self.take()
            args.append(self.parse_and())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def parse_and(self) -> Expr:
        args = [self.parse_not()]
        while (tok := self.peek()) is not None and tok[1] == "&":
            self.take()
            args.append(self.parse_not())
        return args[0] if len(args) == 1 else And(tuple(args))

    def parse_not(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok[1] == "!":
            self.take()
            return Not(self.parse_not())
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        tok = self.take()
        if tok is None:
            raise NetworkFormatError("expression ends unexpectedly", self.line)
        kind, value, _ = tok
        if kind == "num":
            return Const(int(value))
        if kind == "name":
            if value not in self.genes:
                self.error(f"unknown gene {value!r}", tok)
            return Var(value, self.genes[value])
        if value == "(":
            inner = self.parse_or()
            close = self.take()
            if close is None or close[1] != ")":
                self.error("missing ')'", close or tok)
            return inner
        self.error(f"unexpected {value!r}", tok)


def parse_expression(text: str, gene_names: Sequence[str], line: int | None = None,
                     column: int = 0) -> Expr:
    """Parse a Boolean rule over the declared genes."""
    genes = {g: i for i, g in enumerate(gene_names)}
    return _Parser(_tokenize(text, line, column), genes, line).parse()


def evaluate(expr: Expr, states: np.ndarray) -> np.ndarray:
    """Evaluate ``expr`` on a ``(configs, N)`` 0/1 array, vectorised over rows."""
    if isinstance(expr, Const):
        return np.full(states.shape[0], bool(expr.value))
    if isinstance(expr, Var):
        return states[:, expr.index].astype(bool)
    if isinstance(expr, Not):
        return ~evaluate(expr.arg, states)
    if isinstance(expr, And):
        out = evaluate(expr.args[0], states)
        for a in expr.args[1:]:
            out = out & evaluate(a, states)
        return out
    out = evaluate(expr.args[0], states)
    for a in expr.args[1:]:
        out = out | evaluate(a, states)
    return out


def format_expression(expr: Expr) -> str:
    if isinstance(expr, Const):
        return str(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Not):
        inner = format_expression(expr.arg)
        return f"!{inner}" if isinstance(expr.arg, (Var, Const, Not)) else f"!({inner})"
    sep = " & " if isinstance(expr, And) else " | "
    parts = []
    for a in expr.args:
        s = format_expression(a)
        if isinstance(a, Or) and isinstance(expr, And):
            s = f"({s})"
        parts.append(s)
    return sep.join(parts)


# --- definitions and transition maps ----------------------------------------

@dataclass(frozen=True)
class NetworkDefinition:
    name: str
    p: int
    gene_names: tuple[str, ...]
    rules: tuple[Expr, ...] | None = None
    table: tuple[int, ...] | None = None
    orderings: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    labels: Mapping[tuple[int, ...], str] = field(default_factory=dict)
    header: str = ""

    @property
    def N(self) -> int:
        return len(self.gene_names)

    def ordering_indices(self, names: Sequence[str]) -> tuple[int, ...]:
        """Canonical indices for an ordering given by gene names."""
        index = {g: i for i, g in enumerate(self.gene_names)}
        unknown = [g for g in names if g not in index]
        if unknown:
            raise ValueError(f"unknown genes in ordering: {', '.join(unknown)}")
        perm = tuple(index[g] for g in names)
        if len(perm) != self.N or len(set(perm)) != self.N:
            raise ValueError("ordering must name every gene exactly once")
        return perm


@dataclass(frozen=True)
class TransitionMap:
    """Synchronous update map as a table of canonical encodings.

    ``images[m]`` is the identity-order encoding of ``f(decode(m))``.
    """

    p: int
    N: int
    images: np.ndarray

    def __post_init__(self):
        imgs = np.asarray(self.images, dtype=np.int64)
        if imgs.shape != (self.p ** self.N,):
            raise ValueError(f"expected {self.p ** self.N} images, got shape {imgs.shape}")
        if imgs.size and (imgs.min() < 0 or imgs.max() >= self.p ** self.N):
            raise ValueError("image out of range")
        imgs.setflags(write=False)
        object.__setattr__(self, "images", imgs)

    @property
    def size(self) -> int:
        return self.p ** self.N

    def __call__(self, m: int) -> int:
        return int(self.images[m])

    def __eq__(self, other):
        if not isinstance(other, TransitionMap):
            return NotImplemented
        return (self.p, self.N) == (other.p, other.N) and np.array_equal(self.images, other.images)

    def __hash__(self):
        return hash((self.p, self.N, self.images.tobytes()))

    def relabel(self, ordering: Sequence[int]) -> "TransitionMap":
        """The same dynamics with genes renumbered so ``ordering`` becomes the identity."""
        from .padic_core import check_ordering
        perm = check_ordering(ordering, self.N)
        states = state_digits(self.N, self.p)
        img_states = states[self.images]
        weights = self.p ** np.arange(self.N, dtype=np.int64)
        enc = states[:, perm] @ weights
        new = np.empty(self.size, dtype=np.int64)
        new[enc] = img_states[:, perm] @ weights
        return TransitionMap(self.p, self.N, new)


def state_digits(N: int, p: int) -> np.ndarray:
    """``(p**N, N)`` array whose row ``m`` holds the base-p digits of ``m``."""
    m = np.arange(p ** N, dtype=np.int64)
    return (m[:, None] // p ** np.arange(N, dtype=np.int64)) % p


def identity_map(N: int, p: int = 2) -> TransitionMap:
    return TransitionMap(p, N, np.arange(p ** N, dtype=np.int64))


def constant_map(N: int, p: int = 2, value: int = 0) -> TransitionMap:
    return TransitionMap(p, N, np.full(p ** N, value, dtype=np.int64))


def random_map(N: int, p: int, rng: np.random.Generator) -> TransitionMap:
    return TransitionMap(p, N, rng.integers(0, p ** N, size=p ** N, dtype=np.int64))


def build_transition_map(net: NetworkDefinition) -> TransitionMap:
    """Materialise ``f`` for every configuration.

    Expression rules are evaluated simultaneously on the pre-update state.
    """
    if net.table is not None:
        return TransitionMap(net.p, net.N, np.array(net.table, dtype=np.int64))
    states = state_digits(net.N, net.p)
    weights = net.p ** np.arange(net.N, dtype=np.int64)
    new = np.column_stack([evaluate(r, states) for r in net.rules]).astype(np.int64)
    return TransitionMap(net.p, net.N, new @ weights)


def network_from_table(name: str, p: int, gene_names: Sequence[str],
                       images: Sequence[int]) -> NetworkDefinition:
    N = len(gene_names)
    check_size(N, p)
    if len(images) != p ** N:
        raise NetworkFormatError(f"table has {len(images)} rows, expected {p ** N}")
    return NetworkDefinition(name, p, tuple(gene_names), table=tuple(int(x) for x in images))


# --- the .grn format ----------------------------------------------------------

def _strip_comment(raw: str) -> str:
    i = raw.find("#")
    return raw if i < 0 else raw[:i]


def parse_network(text: str) -> NetworkDefinition:
    """Parse a ``.grn`` document (see the module docstring)."""
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    header = []
    for raw in lines:
        if raw.startswith("#"):
            header.append(raw[1:].strip())
        elif raw.strip():
            break

    body = [(i + 1, _strip_comment(raw)) for i, raw in enumerate(lines)]
    body = [(ln, s) for ln, s in body if s.strip()]

    def expect(idx, keyword):
        if idx >= len(body):
            raise NetworkFormatError(f"missing '{keyword}' line", None)
        ln, s = body[idx]
        parts = s.split()
        if parts[0] != keyword:
            raise NetworkFormatError(f"expected '{keyword}', found {parts[0]!r}", ln, 1)
        return ln, parts[1:]

    ln, rest = expect(0, "network")
    if len(rest) != 1:
        raise NetworkFormatError("network name must be a single token", ln)
    name = rest[0]
    ln, rest = expect(1, "p")
    try:
        p = int(rest[0]) if len(rest) == 1 else None
    except ValueError:
        p = None
    if p is None or not is_prime(p):
        raise NetworkFormatError(f"p must be a prime, got {' '.join(rest)!r}", ln)
    ln, genes = expect(2, "genes")
    if not genes:
        raise NetworkFormatError("no genes declared", ln)
    for g in genes:
        if g.lower() in KEYWORDS or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.\-]*", g):
            raise NetworkFormatError(f"invalid gene name {g!r}", ln)
    if len(set(genes)) != len(genes):
        raise NetworkFormatError("duplicate gene names", ln)
    N = len(genes)
    try:
        check_size(N, p)
    except ValueError as exc:
        raise NetworkFormatError(str(exc), ln) from None

    rules: dict[str, Expr] = {}
    table: dict[int, int] | None = None
    orderings: dict[str, tuple[str, ...]] = {}
    labels: dict[tuple[int, ...], str] = {}
    in_table = False
    for ln, s in body[3:]:
        parts = s.split()
        head = parts[0]
        if in_table and head.isdigit():
            if len(parts) != 2 or not parts[1].isdigit():
                raise NetworkFormatError("table rows are '<m> <image>'", ln)
            m, img = int(parts[0]), int(parts[1])
            if not (0 <= m < p ** N and 0 <= img < p ** N):
                raise NetworkFormatError(f"table entry out of range 0..{p ** N - 1}", ln)
            if m in table:
                raise NetworkFormatError(f"duplicate table row for {m}", ln)
            table[m] = img
            continue
        in_table = False
        if head == "rule":
            m = re.match(r"\s*rule\s+(\S+)\s*:=\s*(.*)$", s)
            if not m:
                raise NetworkFormatError("rule lines are 'rule <gene> := <expression>'", ln)
            gene = m.group(1)
            if gene not in genes:
                raise NetworkFormatError(f"rule for undeclared gene {gene!r}", ln, s.find(gene) + 1)
            if gene in rules:
                raise NetworkFormatError(f"second rule for {gene!r}", ln)
            rules[gene] = parse_expression(m.group(2), genes, ln, m.start(2))
        elif head == "table":
            if table is not None:
                raise NetworkFormatError("second table block", ln)
            table = {}
            in_table = True
        elif head == "ordering":
            if len(parts) != N + 2:
                raise NetworkFormatError(f"ordering needs a label and {N} genes", ln)
            seq = tuple(parts[2:])
            if sorted(seq) != sorted(genes):
                raise NetworkFormatError("ordering must list every gene exactly once", ln)
            orderings[parts[1]] = seq
        elif head == "label":
            if len(parts) < 3 or len(parts[1]) != N or any(not c.isdigit() or int(c) >= p for c in parts[1]):
                raise NetworkFormatError(f"label lines are 'label <{N} digits> <text>'", ln)
            labels[tuple(int(c) for c in parts[1])] = " ".join(parts[2:])
        else:
            raise NetworkFormatError(f"unknown directive {head!r}", ln, 1)

    if rules and table is not None:
        raise NetworkFormatError("give either rules or a table, not both")
    if table is not None:
        if len(table) != p ** N:
            missing = p ** N - len(table)
            raise NetworkFormatError(f"table has {len(table)} rows, expected {p ** N} ({missing} missing)")
        return NetworkDefinition(name, p, tuple(genes), table=tuple(table[m] for m in range(p ** N)),
                                 orderings=orderings, labels=labels, header="\n".join(header))
    if p != 2:
        raise NetworkFormatError("expression rules require p = 2; use a table")
    missing = [g for g in genes if g not in rules]
    if missing:
        raise NetworkFormatError(f"no rule for {', '.join(missing)}")
    return NetworkDefinition(name, p, tuple(genes), rules=tuple(rules[g] for g in genes),
                             orderings=orderings, labels=labels, header="\n".join(header))


def format_network(net: NetworkDefinition) -> str:
    """Serialise a definition back to the ``.grn`` format."""
    out = [f"network {net.name}", f"p {net.p}", "genes " + " ".join(net.gene_names)]
    for label, seq in net.orderings.items():
        out.append(f"ordering {label} " + " ".join(seq))
    for config, text in net.labels.items():
        out.append("label " + "".join(map(str, config)) + " " + text)
    if net.table is not None:
        out.append("table")
        out.extend(f"{m} {img}" for m, img in enumerate(net.table))
    else:
        out.extend(f"rule {g} := {format_expression(r)}" for g, r in zip(net.gene_names, net.rules))
    return "\n".join(out) + "\n"


def load_network(path: str | os.PathLike) -> NetworkDefinition:
    return parse_network(Path(path).read_text(encoding="utf-8"))


def data_dir() -> Path:
    override = os.environ.get(DATA_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("padicgrn") / "data"))


def builtin_dataset(name: str) -> NetworkDefinition:
    """Load a bundled network (``toy4`` or ``athaliana13``)."""
    if name not in BUILTINS:
        raise ValueError(f"unknown dataset {name!r}; choose from {', '.join(BUILTINS)}")
    path = data_dir() / f"{name}.grn"
    if not path.is_file():
        raise DatasetMissingError(
            f"dataset file {path} not found; set {DATA_ENV} to a directory containing {name}.grn"
        )
    return load_network(path)


def config_label(net: NetworkDefinition, m: int) -> str | None:
    """Annotation for the configuration with canonical encoding ``m``, if any."""
    from .padic_core import decode
    return net.labels.get(decode(m, net.N, net.p))


def labels_by_encoding(net: NetworkDefinition) -> dict[int, str]:
    return {encode(cfg, None, net.p): text for cfg, text in net.labels.items()}
