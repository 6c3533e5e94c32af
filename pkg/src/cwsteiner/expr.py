"""k-clique-expressions: syntax trees, the instance file format, realization and generation."""

from __future__ import annotations

import random
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterator, Union as _TUnion


class ExprError(ValueError):
    """Raised for malformed instance text or semantically invalid expressions."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Introduce:
    label: int
    name: str


@dataclass(frozen=True)
class Union:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Relabel:
    i: int
    j: int
    child: "Expr"


@dataclass(frozen=True)
class Join:
    i: int
    j: int
    child: "Expr"


Expr = _TUnion[Introduce, Union, Relabel, Join]


def children(node: Expr) -> tuple[Expr, ...]:
    if isinstance(node, Introduce):
        return ()
    if isinstance(node, Union):
        return (node.left, node.right)
    return (node.child,)


def postorder(expr: Expr) -> list[Expr]:
    """Nodes children-first; the list index of a node is its node id."""
    out: list[Expr] = []
    stack: list[tuple[Expr, bool]] = [(expr, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            out.append(node)
            continue
        stack.append((node, True))
        for ch in reversed(children(node)):
            stack.append((ch, False))
    return out


def introduces(expr: Expr) -> list[Introduce]:
    """Introduce nodes in left-to-right (parse) order."""
    return [n for n in postorder(expr) if isinstance(n, Introduce)]


@dataclass
class LabeledGraph:
    vertices: list[str]
    edges: set[frozenset[str]]
    labeling: dict[str, int]

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for e in self.edges:
            u, v = tuple(e)
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def export(self) -> str:
        """The line-oriented graph export format."""
        order = {v: n for n, v in enumerate(self.vertices)}
        lines = [f"vertices {len(self.vertices)}"]
        for u, v in sorted((tuple(sorted(e, key=order.__getitem__)) for e in self.edges),
                           key=lambda uv: (order[uv[0]], order[uv[1]])):
            lines.append(f"edge {u} {v}")
        for v in self.vertices:
            lines.append(f"label {v} {self.labeling[v]}")
        return "\n".join(lines) + "\n"


@dataclass
class Instance:
    k: int
    expr: Expr
    terminals: tuple[str, ...]
    budget: int
    nodes: list[Expr] = field(init=False, repr=False, compare=False)
    vertex_names: list[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.nodes = postorder(self.expr)
        self.vertex_names = [n.name for n in self.nodes if isinstance(n, Introduce)]

    @property
    def n(self) -> int:
        return len(self.vertex_names)

    @property
    def v0(self) -> str:
        """The fixed terminal: the terminal introduced first."""
        ts = set(self.terminals)
        return next(v for v in self.vertex_names if v in ts)


def realize(expr: Expr) -> LabeledGraph:
    vertices: list[str] = []
    edges: set[frozenset[str]] = set()
    labeling: dict[str, int] = {}
    # members[id(node)] holds the vertex names of the subgraph of that node
    members: dict[int, list[str]] = {}
    for node in postorder(expr):
        if isinstance(node, Introduce):
            vertices.append(node.name)
            labeling[node.name] = node.label
            members[id(node)] = [node.name]
        elif isinstance(node, Union):
            members[id(node)] = members.pop(id(node.left)) + members.pop(id(node.right))
        elif isinstance(node, Relabel):
            vs = members.pop(id(node.child))
            for v in vs:
                if labeling[v] == node.i:
                    labeling[v] = node.j
            members[id(node)] = vs
        else:
            vs = members.pop(id(node.child))
            a = [v for v in vs if labeling[v] == node.i]
            b = [v for v in vs if labeling[v] == node.j]
            for u in a:
                for v in b:
                    edges.add(frozenset((u, v)))
            members[id(node)] = vs
    return LabeledGraph(vertices, edges, labeling)


def node_count(expr: Expr) -> tuple[int, int, int, int]:
    """Counts of (introduce, union, relabel, join) nodes."""
    counts = [0, 0, 0, 0]
    for node in postorder(expr):
        counts[(Introduce, Union, Relabel, Join).index(type(node))] += 1
    return counts[0], counts[1], counts[2], counts[3]


def validate_expr(expr: Expr, k: int) -> None:
    seen: set[str] = set()
    for node in postorder(expr):
        if isinstance(node, Introduce):
            if node.name in seen:
                raise ExprError(f"duplicate vertex {node.name!r}")
            seen.add(node.name)
            labels = (node.label,)
        elif isinstance(node, Union):
            continue
        else:
            if isinstance(node, Join) and node.i == node.j:
                raise ExprError(f"join requires i != j, got join {node.i} {node.j}")
            labels = (node.i, node.j)
        for lab in labels:
            if not 1 <= lab <= k:
                raise ExprError(f"label {lab} out of range [1, {k}]")


def validate_instance(inst: Instance) -> None:
    if inst.k < 1:
        raise ExprError("k must be at least 1")
    validate_expr(inst.expr, inst.k)
    names = set(inst.vertex_names)
    if not inst.terminals:
        raise ExprError("terminal set must be nonempty")
    if len(set(inst.terminals)) != len(inst.terminals):
        raise ExprError("duplicate terminal")
    for t in inst.terminals:
        if t not in names:
            raise ExprError(f"unknown terminal {t!r}")
    if not len(inst.terminals) <= inst.budget <= len(names):
        raise ExprError(f"budget {inst.budget} outside [{len(inst.terminals)}, {len(names)}]")
    _, unions, relabels, joins = node_count(inst.expr)
    n = len(names)
    if relabels + joins > n * inst.k * inst.k + n:
        warnings.warn(f"expression has {relabels + joins} unary operations for n={n}, k={inst.k}",
                      stacklevel=2)


# --- text format -------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _tokens(text: str, line: int, col: int) -> Iterator[tuple[str, int, int]]:
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.lastindex is None:
            break
        tok = m.group(m.lastindex)
        yield tok, line, col + start
        pos = m.end()


def _parse_int(tok: str, line: int, col: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ExprError(f"expected integer, got {tok!r}", line, col) from None


def parse_expr(text: str, line: int = 1, col: int = 1) -> Expr:
    """Parse one s-expression. Column numbers are 1-based within the source line(s)."""
    toks: list[tuple[str, int, int]] = []
    cur_line, cur_col = line, col
    for piece in text.split("\n"):
        toks.extend(_tokens(piece, cur_line, cur_col))
        cur_line, cur_col = cur_line + 1, 1
    pos = 0

    def take() -> tuple[str, int, int]:
        nonlocal pos
        if pos >= len(toks):
            last = toks[-1] if toks else ("", line, col)
            raise ExprError("unexpected end of expression", last[1], last[2])
        pos += 1
        return toks[pos - 1]

    def expect_close() -> None:
        tok, ln, cl = take()
        if tok != ")":
            raise ExprError(f"expected ')', got {tok!r}", ln, cl)

    def node() -> Expr:
        tok, ln, cl = take()
        if tok != "(":
            raise ExprError(f"expected '(', got {tok!r}", ln, cl)
        head, hl, hc = take()
        if head == "intro":
            lab = _parse_int(*take())
            name, nl, nc = take()
            if name in "()":
                raise ExprError("expected vertex name", nl, nc)
            expect_close()
            return Introduce(lab, name)
        if head == "union":
            a = node()
            b = node()
            expect_close()
            return Union(a, b)
        if head in ("relabel", "join"):
            i = _parse_int(*take())
            j = _parse_int(*take())
            if head == "join" and i == j:
                raise ExprError(f"join requires i != j, got join {i} {j}", hl, hc)
            ch = node()
            expect_close()
            return Join(i, j, ch) if head == "join" else Relabel(i, j, ch)
        raise ExprError(f"unknown operation {head!r}", hl, hc)

    result = node()
    if pos != len(toks):
        tok, ln, cl = toks[pos]
        raise ExprError(f"trailing input {tok!r}", ln, cl)
    return result


def parse_instance(text: str) -> Instance:
    k = budget = None
    terminals: tuple[str, ...] | None = None
    expr: Expr | None = None
    lines = text.split("\n")
    idx = 0
    while idx < len(lines):
        raw = lines[idx]
        lineno = idx + 1
        idx += 1
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        keyword, _, rest = stripped.partition(" ")
        col = raw.index(keyword) + 1
        rest_col = col + len(keyword) + 1
        if keyword == "k":
            k = _parse_int(rest.strip(), lineno, rest_col)
        elif keyword == "budget":
            budget = _parse_int(rest.strip(), lineno, rest_col)
        elif keyword == "terminals":
            terminals = tuple(rest.split())
        elif keyword == "expr":
            # the expression runs to the end of the file, comments excluded
            body = [rest] + [ln if not ln.strip().startswith("#") else "" for ln in lines[idx:]]
            expr = parse_expr("\n".join(body), lineno, rest_col)
            idx = len(lines)
        else:
            raise ExprError(f"unknown keyword {keyword!r}", lineno, col)
    for name, val in (("k", k), ("terminals", terminals), ("budget", budget), ("expr", expr)):
        if val is None:
            raise ExprError(f"missing '{name}' line")
    inst = Instance(k, expr, terminals, budget)
    validate_instance(inst)
    return inst


def render_expr(expr: Expr) -> str:
    parts: dict[int, str] = {}
    for node in postorder(expr):
        if isinstance(node, Introduce):
            s = f"(intro {node.label} {node.name})"
        elif isinstance(node, Union):
            s = f"(union {parts.pop(id(node.left))} {parts.pop(id(node.right))})"
        else:
            op = "join" if isinstance(node, Join) else "relabel"
            s = f"({op} {node.i} {node.j} {parts.pop(id(node.child))})"
        parts[id(node)] = s
    return parts[id(expr)]


def render_instance(inst: Instance) -> str:
    return (f"k {inst.k}\nterminals {' '.join(inst.terminals)}\n"
            f"budget {inst.budget}\nexpr {render_expr(inst.expr)}\n")


# --- generation ---------------------------------------------------------------

def _labels_of(expr: Expr) -> set[int]:
    labs: set[int] = set()
    g = realize(expr)
    labs.update(g.labeling.values())
    return labs


def gen_random_instance(n: int, k: int, terminal_count: int, seed: int,
                        budget: int | None = None, p_join: float = 0.7,
                        p_relabel: float = 0.3) -> Instance:
    """Random valid instance on n vertices named v0..v{n-1}, deterministic per seed.

    Trees are merged bottom-up; after each union a join (between two labels present)
    and a relabel are inserted with the given probabilities.
    """
    if n < 1 or k < 1 or not 1 <= terminal_count <= n:
        raise ValueError(f"infeasible parameters n={n}, k={k}, terminals={terminal_count}")
    if budget is not None and not terminal_count <= budget <= n:
        raise ValueError(f"budget {budget} outside [{terminal_count}, {n}]")
    rng = random.Random(seed)
    forest: list[tuple[Expr, dict[str, int]]] = []
    for v in range(n):
        lab = rng.randint(1, k)
        forest.append((Introduce(lab, f"v{v}"), {f"v{v}": lab}))
    while len(forest) > 1:
        a = forest.pop(rng.randrange(len(forest)))
        b = forest.pop(rng.randrange(len(forest)))
        expr: Expr = Union(a[0], b[0])
        labs = {**a[1], **b[1]}
        present = sorted(set(labs.values()))
        if len(present) >= 2 and rng.random() < p_join:
            i, j = rng.sample(present, 2)
            expr = Join(i, j, expr)
        if k >= 2 and rng.random() < p_relabel:
            i = rng.choice(present)
            j = rng.choice([x for x in range(1, k + 1) if x != i])
            expr = Relabel(i, j, expr)
            labs = {v: (j if lab == i else lab) for v, lab in labs.items()}
        forest.append((expr, labs))
    expr = forest[0][0]
    terms = sorted(rng.sample(range(n), terminal_count))
    inst = Instance(k, expr, tuple(f"v{t}" for t in terms), n if budget is None else budget)
    validate_instance(inst)
    return inst
