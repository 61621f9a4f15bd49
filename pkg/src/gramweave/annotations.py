"""Advice values, annotations, and the store that weaving fills in.

An annotation is an ordered set of attributes written between braces:

    { group = keyword; html: color = 'red'; deprecated }

Each attribute is ``namespace? NAME ('=' value)?``; a valueless attribute is a
flag.  Values come in six shapes: integers, quoted strings, bare name
literals, nested annotations (records), ``{{ ... }}`` sequences, and single
punctuation characters inside sequences.  The one-attribute shorthand
``.name = value`` is also accepted.

Weaving produces an :class:`AnnotationStore`: a map from grammar-tree node
ids to annotations, with per-attribute provenance (which aspect and which
rule attached it).  The grammar tree itself is never touched.  Stores
serialize to a stable JSON document so woven results can be diffed and
snapshot-tested.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional, Tuple, Union

from .errors import ConflictError, NotationError
from .grammar import GrammarTree, iter_nodes
from .scan import Cursor

# Single-character values allowed inside {{ }} sequences.
PUNCTUATION = set("`~!@#$%()-+=|\\[];:,./?<>")


class _Flag:
    """Marker returned by lookup() for attributes that carry no value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "FLAG"


FLAG = _Flag()


# ---------------------------------------------------------------------------
# Value model


@dataclass(frozen=True)
class IntValue:
    value: int


@dataclass(frozen=True)
class StrValue:
    text: str


@dataclass(frozen=True)
class NameValue:
    """A bare identifier used as a value, e.g. ``group = keyword``."""

    name: str


@dataclass(frozen=True)
class RecordValue:
    """A nested annotation used as a value, e.g. ``rec = {b = c; d = 5}``."""

    annotation: "Annotation"


@dataclass(frozen=True)
class SeqValue:
    """A ``{{ ... }}`` sequence; items are values or punctuation characters."""

    items: Tuple["Value", ...]


@dataclass(frozen=True)
class PunctValue:
    char: str


Value = Union[IntValue, StrValue, NameValue, RecordValue, SeqValue, PunctValue]


class Provenance(NamedTuple):
    """Where an attribute came from: aspect index, rule index within it.

    rule is None for an aspect's grammar-level annotation.
    """

    aspect: int
    rule: Optional[int]


@dataclass(frozen=True)
class Attribute:
    name: str
    namespace: Optional[str] = None
    value: Optional[Value] = None  # None means the attribute is a flag
    provenance: Optional[Provenance] = field(default=None, compare=False)
    loc: Tuple[int, int] = field(default=(0, 0), compare=False)

    @property
    def key(self) -> Tuple[Optional[str], str]:
        return (self.namespace, self.name)

    def with_provenance(self, prov: Optional[Provenance]) -> "Attribute":
        return Attribute(self.name, self.namespace, self.value, prov, self.loc)


@dataclass(frozen=True)
class Annotation:
    """An ordered collection of attributes with unique (namespace, name)."""

    attributes: Tuple[Attribute, ...] = ()

    def __post_init__(self):
        seen = set()
        for attr in self.attributes:
            if attr.key in seen:
                qual = f"{attr.namespace}:{attr.name}" if attr.namespace else attr.name
                raise NotationError(f"duplicate attribute '{qual}' in annotation",
                                    line=attr.loc[0], col=attr.loc[1])
            seen.add(attr.key)

    def get(self, name: str, namespace: Optional[str] = None):
        for attr in self.attributes:
            if attr.name == name and attr.namespace == namespace:
                return attr.value if attr.value is not None else FLAG
        return None

    def __bool__(self) -> bool:
        return bool(self.attributes)


# ---------------------------------------------------------------------------
# Parsing


def parse_annotation(text: str, source: str = "<string>") -> Annotation:
    """Parse a complete annotation; the whole text must be consumed."""
    cur = Cursor(text, source)
    ann = annotation_at(cur)
    cur.skip_ws()
    if not cur.eof():
        raise cur.error("unexpected text after annotation")
    return ann


def annotation_at(cur: Cursor) -> Annotation:
    """Parse an annotation starting at the cursor: braces form or '.attr'."""
    if cur.accept("."):
        return Annotation((_attribute(cur),))
    cur.expect("{", "annotation")
    attrs = []
    if not cur.accept("}"):
        attrs.append(_attribute(cur))
        while cur.accept(";"):
            # `;` may trail or repeat; an attribute after it is optional
            if cur.peek_char() in ("}", ";"):
                continue
            attrs.append(_attribute(cur))
        cur.expect("}", "annotation")
    return Annotation(tuple(attrs))


def _attribute(cur: Cursor) -> Attribute:
    pos = cur.mark()
    loc = cur.location()
    namespace = None
    name = cur.accept_name()
    if name is None:
        raise cur.error("expected attribute name")
    if cur.accept(":"):
        namespace = name
        loc = cur.location()
        name = cur.expect_name("attribute name")
    value = None
    if cur.accept("="):
        value = _value(cur)
    del pos
    return Attribute(name, namespace, value, loc=loc)


def _value(cur: Cursor) -> Value:
    if cur.accept("{{"):
        return _sequence(cur)
    c = cur.peek_char()
    if c == "{" or c == ".":
        return RecordValue(annotation_at(cur))
    n = cur.accept_int()
    if n is not None:
        return IntValue(n)
    s = cur.accept_string()
    if s is not None:
        return StrValue(s)
    name = cur.accept_name()
    if name is not None:
        return NameValue(name)
    raise cur.error("expected a value")


def _sequence(cur: Cursor) -> SeqValue:
    items = []
    while True:
        if cur.accept("}}"):
            return SeqValue(tuple(items))
        c = cur.peek_char()
        if not c:
            raise cur.error("unterminated '{{' sequence")
        if c.isdigit() or c == "'" or c == "{" or c.isalpha() or c == "_":
            items.append(_value(cur))
        elif c in PUNCTUATION:
            cur.accept(c)
            items.append(PunctValue(c))
        else:
            raise cur.error(f"unexpected character {c!r} in sequence")


# ---------------------------------------------------------------------------
# The store


@dataclass(frozen=True)
class NodeMeta:
    """What the store remembers about a grammar-tree node."""

    kind: str
    detail: Optional[str]
    span: Tuple[int, int]
    children: Tuple[int, ...]


class AnnotationStore:
    """Annotations keyed by grammar-tree node id.

    The store knows the shape of the tree it was built for (node ids, kinds,
    spans) so that attachments can be validated and serialized without the
    tree object itself.
    """

    def __init__(self, nodes: dict, root_id: int):
        self._nodes = dict(nodes)
        self._root_id = root_id
        self._by_node: dict = {}

    @classmethod
    def for_tree(cls, tree: GrammarTree) -> "AnnotationStore":
        nodes = {}
        for node in iter_nodes(tree):
            nodes[node.id] = NodeMeta(node.kind, node.detail, node.span,
                                      tuple(c.id for c in node.children))
        return cls(nodes, tree.root.id)

    @property
    def root_id(self) -> int:
        return self._root_id

    def node_meta(self, node_id: int) -> NodeMeta:
        return self._nodes[node_id]

    def annotation_for(self, node_id: int) -> Annotation:
        return Annotation(tuple(self._by_node.get(node_id, ())))

    @property
    def grammar_annotation(self) -> Optional[Annotation]:
        attrs = self._by_node.get(self._root_id)
        return Annotation(tuple(attrs)) if attrs else None

    def annotated_nodes(self) -> Iterator[int]:
        return iter(sorted(self._by_node))

    def attach(self, node_id: int, annotation: Annotation,
               provenance: Optional[Provenance] = None) -> "AnnotationStore":
        """Append an annotation's attributes to a node.

        Re-attaching an identical (namespace, name, value) triple is a no-op;
        a different value for an existing key raises ConflictError.
        """
        if node_id not in self._nodes:
            raise KeyError(f"node {node_id} is not part of this store's tree")
        existing = self._by_node.setdefault(node_id, [])
        for attr in annotation.attributes:
            incoming = attr.with_provenance(provenance) if provenance else attr
            clash = next((e for e in existing if e.key == attr.key), None)
            if clash is None:
                existing.append(incoming)
            elif clash.value != attr.value:
                meta = self._nodes[node_id]
                raise ConflictError(node_id, meta.span, attr.namespace, attr.name,
                                    clash.value, clash.provenance,
                                    attr.value, incoming.provenance)
        if not existing:
            del self._by_node[node_id]
        return self

    def lookup(self, node_id: int, name: str, namespace: Optional[str] = None):
        """Value of an attribute on a node; FLAG if valueless; None if absent."""
        for attr in self._by_node.get(node_id, ()):
            if attr.name == name and attr.namespace == namespace:
                return attr.value if attr.value is not None else FLAG
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, AnnotationStore):
            return NotImplemented
        mine = {n: tuple(a) for n, a in self._by_node.items() if a}
        theirs = {n: tuple(a) for n, a in other._by_node.items() if a}
        return self._root_id == other._root_id and mine == theirs

    def __len__(self) -> int:
        return sum(len(attrs) for attrs in self._by_node.values())


def attach(store: AnnotationStore, node_id: int, annotation: Annotation,
           provenance: Optional[Provenance] = None) -> AnnotationStore:
    return store.attach(node_id, annotation, provenance)


def lookup(store: AnnotationStore, node_id: int, name: str,
           namespace: Optional[str] = None):
    return store.lookup(node_id, name, namespace)


# ---------------------------------------------------------------------------
# Serialization

# The JSON layout is fixed so woven output is byte-stable:
#   {"version": 1,
#    "grammar": {"root": 0, "nodes": [{"id", "kind", "detail", "span",
#                                      "children"}, ...]},   ascending id
#    "annotations": [{"node", "namespace", "name", "value", "provenance"},
#                    ...]}                     ascending node id, attach order


def _value_to_json(value: Optional[Value]):
    if value is None:
        return None
    if isinstance(value, IntValue):
        return {"type": "int", "value": value.value}
    if isinstance(value, StrValue):
        return {"type": "str", "text": value.text}
    if isinstance(value, NameValue):
        return {"type": "name", "name": value.name}
    if isinstance(value, PunctValue):
        return {"type": "punct", "char": value.char}
    if isinstance(value, SeqValue):
        return {"type": "seq", "items": [_value_to_json(v) for v in value.items]}
    if isinstance(value, RecordValue):
        return {"type": "record",
                "attributes": [_attr_to_json(a) for a in value.annotation.attributes]}
    raise TypeError(f"unknown value {value!r}")


def _attr_to_json(attr: Attribute):
    return {"namespace": attr.namespace, "name": attr.name,
            "value": _value_to_json(attr.value)}


def _value_from_json(data) -> Optional[Value]:
    if data is None:
        return None
    kind = data["type"]
    if kind == "int":
        return IntValue(data["value"])
    if kind == "str":
        return StrValue(data["text"])
    if kind == "name":
        return NameValue(data["name"])
    if kind == "punct":
        return PunctValue(data["char"])
    if kind == "seq":
        return SeqValue(tuple(_value_from_json(v) for v in data["items"]))
    if kind == "record":
        attrs = tuple(Attribute(a["name"], a["namespace"], _value_from_json(a["value"]))
                      for a in data["attributes"])
        return RecordValue(Annotation(attrs))
    raise NotationError(f"unknown value type {kind!r} in store document")


def serialize_store(store: AnnotationStore) -> str:
    nodes = []
    for node_id in sorted(store._nodes):
        meta = store._nodes[node_id]
        nodes.append({"id": node_id, "kind": meta.kind, "detail": meta.detail,
                      "span": list(meta.span), "children": list(meta.children)})
    annotations = []
    for node_id in store.annotated_nodes():
        for attr in store.annotation_for(node_id).attributes:
            prov = attr.provenance
            annotations.append({
                "node": node_id,
                "namespace": attr.namespace,
                "name": attr.name,
                "value": _value_to_json(attr.value),
                "provenance": {"aspect": prov.aspect, "rule": prov.rule} if prov else None,
            })
    doc = {"version": 1,
           "grammar": {"root": store.root_id, "nodes": nodes},
           "annotations": annotations}
    return json.dumps(doc, indent=2) + "\n"


def deserialize_store(text: str) -> AnnotationStore:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NotationError(f"store document is not valid JSON: {exc}")
    if doc.get("version") != 1:
        raise NotationError(f"unsupported store version {doc.get('version')!r}")
    nodes = {}
    for entry in doc["grammar"]["nodes"]:
        nodes[entry["id"]] = NodeMeta(entry["kind"], entry["detail"],
                                      tuple(entry["span"]), tuple(entry["children"]))
    store = AnnotationStore(nodes, doc["grammar"]["root"])
    for entry in doc["annotations"]:
        prov = entry.get("provenance")
        provenance = Provenance(prov["aspect"], prov["rule"]) if prov else None
        attr = Attribute(entry["name"], entry["namespace"],
                         _value_from_json(entry["value"]))
        store.attach(entry["node"], Annotation((attr,)), provenance)
    return store
