"""JSON documents for graphs and weighted systems, and DOT rendering."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .graph import DirectedMixedGraph, GraphError, new_graph
from .linear import LinearSystemError, WeightedLinearSystem

LABEL_RE = re.compile(r"^[A-Za-z0-9_]+$")
_BETA_RE = re.compile(r"^\s*([A-Za-z0-9_]+)\s*->\s*([A-Za-z0-9_]+)\s*$")
_LAMBDA_RE = re.compile(r"^\s*([A-Za-z0-9_]+)\s*<->\s*([A-Za-z0-9_]+)\s*$")


class DocumentError(ValueError):
    """Malformed graph or system document."""


def _check_labels(labels):
    for lab in labels:
        if not isinstance(lab, str) or not LABEL_RE.match(lab):
            raise DocumentError(f"invalid vertex label {lab!r}: use letters, digits and _")


def _pairs(raw, what):
    if not isinstance(raw, list):
        raise DocumentError(f"{what} must be a list of pairs")
    out = []
    for i, p in enumerate(raw):
        if not (isinstance(p, (list, tuple)) and len(p) == 2):
            raise DocumentError(f"{what}[{i}] must be a pair of labels, got {p!r}")
        out.append((p[0], p[1]))
    return out


@dataclass
class GraphDocument:
    vertices: list
    directed: list = field(default_factory=list)
    bidirected: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, data) -> "GraphDocument":
        if not isinstance(data, dict):
            raise DocumentError("graph document must be a JSON object")
        if "vertices" not in data:
            raise DocumentError("graph document needs a 'vertices' list")
        verts = data["vertices"]
        if not isinstance(verts, list):
            raise DocumentError("'vertices' must be a list")
        _check_labels(verts)
        return cls(list(verts), _pairs(data.get("directed", []), "directed"),
                   _pairs(data.get("bidirected", []), "bidirected"))

    @classmethod
    def from_graph(cls, g: DirectedMixedGraph) -> "GraphDocument":
        d = g.to_dict()
        return cls(d["vertices"], [tuple(p) for p in d["directed"]],
                   [tuple(p) for p in d["bidirected"]])

    def to_graph(self) -> DirectedMixedGraph:
        try:
            return new_graph(self.vertices, self.directed, self.bidirected)
        except GraphError as e:
            raise DocumentError(str(e)) from None

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertices),
                "directed": [list(p) for p in self.directed],
                "bidirected": [list(p) for p in self.bidirected]}


def beta_key(a: str, b: str) -> str:
    return f"{a}->{b}"


def lambda_key(a: str, b: str) -> str:
    a, b = sorted((a, b))
    return f"{a}<->{b}"


@dataclass
class SystemDocument:
    graph: GraphDocument
    beta: dict = field(default_factory=dict)
    lam: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data) -> "SystemDocument":
        gdoc = GraphDocument.from_dict(data)
        beta, lam = {}, {}
        for key, val in (data.get("beta") or {}).items():
            m = _BETA_RE.match(key)
            if not m:
                raise DocumentError(f"bad beta key {key!r}; expected 'A->B'")
            beta[beta_key(*m.groups())] = _number(val, key)
        for key, val in (data.get("lambda") or {}).items():
            m = _LAMBDA_RE.match(key)
            if not m:
                raise DocumentError(f"bad lambda key {key!r}; expected 'A<->B'")
            k = lambda_key(*m.groups())
            v = _number(val, key)
            if k in lam and lam[k] != v:
                raise DocumentError(f"conflicting lambda values for {k}")
            lam[k] = v
        return cls(gdoc, beta, lam)

    @classmethod
    def from_system(cls, s: WeightedLinearSystem) -> "SystemDocument":
        lab = s.graph.labels
        return cls(GraphDocument.from_graph(s.graph),
                   {beta_key(lab[t], lab[h]): w for (t, h), w in sorted(s.beta.items())},
                   {lambda_key(lab[a], lab[b]): w for (a, b), w in sorted(s.lam.items())})

    def to_system(self) -> WeightedLinearSystem:
        g = self.graph.to_graph()
        beta = {}
        for key, w in self.beta.items():
            a, b = _BETA_RE.match(key).groups()
            beta[(a, b)] = w
        lam = {}
        for key, w in self.lam.items():
            a, b = _LAMBDA_RE.match(key).groups()
            lam[(a, b)] = w
        try:
            return WeightedLinearSystem(g, beta, lam)
        except (LinearSystemError, GraphError) as e:
            raise DocumentError(str(e)) from None

    def to_dict(self) -> dict:
        out = self.graph.to_dict()
        out["beta"] = dict(sorted(self.beta.items()))
        out["lambda"] = dict(sorted(self.lam.items()))
        return out


def _number(val, key):
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise DocumentError(f"weight for {key!r} must be a number")
    return float(val)


def _position(text: str, err: json.JSONDecodeError) -> str:
    line = text.splitlines()[err.lineno - 1] if text and err.lineno - 1 < len(text.splitlines()) else ""
    return f"line {err.lineno}, column {err.colno}: {err.msg}\n    {line}"


def parse_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"malformed JSON at {_position(text, e)}") from None


def load_graph(path) -> DirectedMixedGraph:
    with open(path, encoding="utf-8") as fh:
        return GraphDocument.from_dict(parse_json(fh.read())).to_graph()


def load_document(path):
    """A :class:`SystemDocument` if the file has weights, else a :class:`GraphDocument`."""
    with open(path, encoding="utf-8") as fh:
        data = parse_json(fh.read())
    if isinstance(data, dict) and ("beta" in data or "lambda" in data):
        return SystemDocument.from_dict(data)
    return GraphDocument.from_dict(data)


def to_dot(g: DirectedMixedGraph, name: str = "G") -> str:
    """Render as DOT: solid arrows for directed edges, dashed double arrows for bidirected ones."""
    lines = [f"digraph {name} {{"]
    for lab in g.labels:
        lines.append(f'  "{lab}";')
    lab = g.labels
    for t, h in sorted(g.directed):
        lines.append(f'  "{lab[t]}" -> "{lab[h]}";')
    for a, b in sorted(g.bidirected):
        lines.append(f'  "{lab[a]}" -> "{lab[b]}" [dir=both, style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def undirected_to_dot(ug, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for lab in ug.labels:
        lines.append(f'  "{lab}";')
    for a, b in sorted(ug.edges):
        lines.append(f'  "{ug.labels[a]}" -- "{ug.labels[b]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
