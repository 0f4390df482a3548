"""Reading and writing GEXF 1.x carrier graphs.

Supported subset: ``meta`` (creator, description), one ``graph`` with a
``defaultedgetype``, node attribute declarations with optional defaults,
nodes with ``attvalues``, and edges.  Anything else is rejected in strict
mode and carried through verbatim in lenient mode.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import DanglingReference, FormatError, GraphError, InvalidArgument
from .graphcore import AttributeDictionary, AttributeEntry, AttributeVector, SocialGraph

GEXF_NS = "http://gexf.net/1.3"
GEXF_VERSION = "1.3"

ATTRIBUTE_TYPES = ("string", "integer", "long", "float", "double", "boolean")
_TRUE = {"true", "1"}
_FALSE = {"false", "0"}


@dataclass
class AttributeDecl:
    id: str
    title: str
    type: str = "string"
    default: str | None = None


@dataclass
class GexfNode:
    id: str
    label: str | None = None
    attvalues: dict = field(default_factory=dict)


@dataclass
class GexfDocument:
    default_edge_type: str = "undirected"
    attributes: list = field(default_factory=list)
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)  # (source, target) pairs
    creator: str | None = None
    description: str | None = None
    extras: list = field(default_factory=list)  # opaque XML kept by lenient parses

    def structure(self):
        """Order-insensitive comparison key."""
        return (
            self.default_edge_type,
            self.creator,
            self.description,
            tuple(sorted((a.id, a.title, a.type, a.default) for a in self.attributes)),
            tuple(sorted((n.id, n.label, tuple(sorted(n.attvalues.items()))) for n in self.nodes)),
            tuple(sorted(self.edges)),
            tuple(sorted(self.extras)),
        )

    def __eq__(self, other):
        if not isinstance(other, GexfDocument):
            return NotImplemented
        return self.structure() == other.structure()

    def validate(self) -> None:
        if self.default_edge_type not in ("directed", "undirected"):
            raise FormatError(f"unsupported defaultedgetype {self.default_edge_type!r}")
        decls = {}
        for a in self.attributes:
            if a.id in decls:
                raise FormatError(f"attribute id {a.id!r} declared twice")
            if a.type not in ATTRIBUTE_TYPES:
                raise FormatError(f"unknown attribute type {a.type!r}")
            if a.default is not None:
                _check_value(a.type, a.default)
            decls[a.id] = a
        ids = set()
        for n in self.nodes:
            if n.id in ids:
                raise FormatError(f"node id {n.id!r} declared twice")
            ids.add(n.id)
            for key, value in n.attvalues.items():
                if key not in decls:
                    raise DanglingReference(f"node {n.id!r}: attvalue for undeclared attribute {key!r}")
                _check_value(decls[key].type, value)
        for source, target in self.edges:
            for end in (source, target):
                if end not in ids:
                    raise DanglingReference(f"edge {source!r}->{target!r} references undeclared node {end!r}")


def _check_value(kind, value):
    try:
        if kind in ("integer", "long"):
            int(value)
        elif kind in ("float", "double"):
            float(value)
        elif kind == "boolean" and value.strip().lower() not in _TRUE | _FALSE:
            raise ValueError(value)
    except ValueError as exc:
        raise FormatError(f"value {value!r} is not a valid {kind}") from exc


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _child(elem, name):
    for c in elem:
        if _local(c.tag) == name:
            return c
    return None


def _strip_ns(elem):
    for e in elem.iter():
        e.tag = _local(e.tag)
    return elem


def parse_gexf(text, strict: bool = True) -> GexfDocument:
    """Parse GEXF text (str or bytes) into a validated document."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise FormatError(f"malformed XML: {exc}") from exc
    if _local(root.tag) != "gexf":
        raise FormatError(f"root element is <{_local(root.tag)}>, expected <gexf>")
    doc = GexfDocument()

    def unsupported(elem, where):
        if strict:
            raise FormatError(f"unsupported element <{_local(elem.tag)}> in {where}")
        doc.extras.append(ET.tostring(_strip_ns(elem), encoding="unicode").strip())

    graph = None
    for elem in root:
        name = _local(elem.tag)
        if name == "meta":
            for m in elem:
                mname = _local(m.tag)
                if mname == "creator":
                    doc.creator = m.text or ""
                elif mname == "description":
                    doc.description = m.text or ""
                else:
                    unsupported(m, "meta")
        elif name == "graph" and graph is None:
            graph = elem
        else:
            unsupported(elem, "gexf")
    if graph is None:
        raise FormatError("document has no <graph> element")
    doc.default_edge_type = graph.get("defaultedgetype", "undirected")
    for elem in graph:
        name = _local(elem.tag)
        if name == "attributes":
            if elem.get("class", "node") != "node":
                unsupported(elem, "graph")
                continue
            for a in elem:
                if _local(a.tag) != "attribute":
                    unsupported(a, "attributes")
                    continue
                default = _child(a, "default")
                if a.get("id") is None:
                    raise FormatError("attribute without id")
                doc.attributes.append(AttributeDecl(
                    a.get("id"), a.get("title", a.get("id")), a.get("type", "string"),
                    None if default is None else (default.text or ""),
                ))
        elif name == "nodes":
            for n in elem:
                if _local(n.tag) != "node":
                    unsupported(n, "nodes")
                    continue
                if n.get("id") is None:
                    raise FormatError("node without id")
                node = GexfNode(n.get("id"), n.get("label"))
                for sub in n:
                    if _local(sub.tag) != "attvalues":
                        unsupported(sub, f"node {node.id}")
                        continue
                    for av in sub:
                        if _local(av.tag) != "attvalue" or av.get("for") is None:
                            raise FormatError(f"node {node.id}: malformed attvalue")
                        node.attvalues[av.get("for")] = av.get("value", "")
                doc.nodes.append(node)
        elif name == "edges":
            for e in elem:
                if _local(e.tag) != "edge":
                    unsupported(e, "edges")
                    continue
                if e.get("source") is None or e.get("target") is None:
                    raise FormatError("edge without source/target")
                etype = e.get("type")
                if etype is not None and etype != doc.default_edge_type and strict:
                    raise FormatError("per-edge types differing from defaultedgetype are unsupported")
                doc.edges.append((e.get("source"), e.get("target")))
        else:
            unsupported(elem, "graph")
    doc.validate()
    return doc


def _id_key(value: str):
    return (0, int(value), "") if value.lstrip("-").isdigit() else (1, 0, value)


def emit_gexf(doc: GexfDocument) -> str:
    """Deterministic GEXF text: nodes and edges sorted by id."""
    doc.validate()
    root = ET.Element("gexf", {"xmlns": GEXF_NS, "version": GEXF_VERSION})
    if doc.creator is not None or doc.description is not None:
        meta = ET.SubElement(root, "meta")
        if doc.creator is not None:
            ET.SubElement(meta, "creator").text = doc.creator
        if doc.description is not None:
            ET.SubElement(meta, "description").text = doc.description
    graph = ET.SubElement(root, "graph", {"defaultedgetype": doc.default_edge_type})
    if doc.attributes:
        attrs = ET.SubElement(graph, "attributes", {"class": "node"})
        for a in sorted(doc.attributes, key=lambda a: _id_key(a.id)):
            ae = ET.SubElement(attrs, "attribute", {"id": a.id, "title": a.title, "type": a.type})
            if a.default is not None:
                ET.SubElement(ae, "default").text = a.default
    nodes = ET.SubElement(graph, "nodes")
    for n in sorted(doc.nodes, key=lambda n: _id_key(n.id)):
        ne = ET.SubElement(nodes, "node", {"id": n.id})
        if n.label is not None:
            ne.set("label", n.label)
        if n.attvalues:
            avs = ET.SubElement(ne, "attvalues")
            for key in sorted(n.attvalues, key=_id_key):
                ET.SubElement(avs, "attvalue", {"for": key, "value": n.attvalues[key]})
    edges = ET.SubElement(graph, "edges")
    for source, target in sorted(doc.edges, key=lambda e: (_id_key(e[0]), _id_key(e[1]))):
        ET.SubElement(edges, "edge", {"source": source, "target": target})
    for extra in sorted(doc.extras):
        root.append(ET.fromstring(extra))
    ET.indent(root, space="  ")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def read_gexf(path, strict: bool = True) -> GexfDocument:
    with open(path, "rb") as fh:
        return parse_gexf(fh.read(), strict=strict)


def write_gexf(doc: GexfDocument, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_gexf(doc))


# bridging documents and social graphs

def default_dictionary(doc: GexfDocument) -> AttributeDictionary:
    """One presence bit per declared boolean or string attribute, in declaration order."""
    return AttributeDictionary.from_names(
        a.title for a in doc.attributes if a.type in ("boolean", "string")
    )


def _bit(decl: AttributeDecl, entry: AttributeEntry, value: str | None) -> int:
    if value is None:
        value = decl.default
    if value is None:
        return 0
    if decl.type == "boolean":
        if entry.domain is not None:
            raise InvalidArgument(f"boolean attribute {decl.title!r} takes no value domain")
        return 1 if value.strip().lower() in _TRUE else 0
    if decl.type == "string":
        if entry.domain is None:
            return 1 if value != "" else 0
        return 1 if value == entry.domain else 0
    raise InvalidArgument(f"attribute {decl.title!r} of type {decl.type} cannot map to a presence bit")


def graph_from_gexf(doc: GexfDocument, dictionary: AttributeDictionary | None = None,
                    loops: bool = False) -> SocialGraph:
    """Build a :class:`SocialGraph` whose node ids are the GEXF integer ids."""
    if dictionary is None:
        dictionary = default_dictionary(doc)
    by_title = {a.title: a for a in doc.attributes}
    decls = []
    for entry in dictionary:
        if entry.name not in by_title:
            raise InvalidArgument(f"dictionary attribute {entry.name!r} not declared in document")
        decl = by_title[entry.name]
        if decl.type not in ("boolean", "string"):
            raise InvalidArgument(f"attribute {decl.title!r} of type {decl.type} cannot map to a presence bit")
        decls.append((decl, entry))
    graph = SocialGraph(doc.default_edge_type == "directed", loops, len(dictionary))
    try:
        ids = {n.id: int(n.id) for n in doc.nodes}
    except ValueError as exc:
        raise FormatError("node ids must be non-negative integers to build a social graph") from exc
    for n in sorted(doc.nodes, key=lambda n: ids[n.id]):
        bits = [_bit(decl, entry, n.attvalues.get(decl.id)) for decl, entry in decls]
        graph.add_node(AttributeVector.from_bits(bits) if bits else AttributeVector.zeros(0), ids[n.id])
    for source, target in doc.edges:
        try:
            graph.set_link(ids[source], ids[target], True)
        except GraphError as exc:
            raise FormatError(f"edge {source}->{target}: {exc}") from exc
    return graph


def gexf_from_graph(graph: SocialGraph, dictionary: AttributeDictionary | None = None,
                    creator: str | None = None, description: str | None = None) -> GexfDocument:
    """Document with one boolean attribute per profile bit.

    Only set bits are written as attvalues; the declared default is false.
    """
    if dictionary is None:
        dictionary = AttributeDictionary.from_names(f"f{j}" for j in range(1, graph.n_attributes + 1))
    if len(dictionary) != graph.n_attributes:
        raise InvalidArgument("dictionary size differs from the graph's attribute count")
    doc = GexfDocument(
        default_edge_type="directed" if graph.directed else "undirected",
        attributes=[AttributeDecl(str(e.index - 1), e.name, "boolean", "false") for e in dictionary],
        creator=creator,
        description=description,
    )
    for v in graph.nodes():
        vec = graph.attributes(v)
        doc.nodes.append(GexfNode(str(v), None, {str(j - 1): "true" for j in vec.features()}))
    doc.edges = [(str(a), str(b)) for a, b in graph.links()]
    return doc


def graph_to_text(graph: SocialGraph, dictionary=None, **meta) -> str:
    return emit_gexf(gexf_from_graph(graph, dictionary, **meta))


def text_to_graph(text, dictionary=None, loops=False, strict=True) -> SocialGraph:
    return graph_from_gexf(parse_gexf(text, strict=strict), dictionary, loops=loops)
