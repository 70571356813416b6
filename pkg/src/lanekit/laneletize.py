"""Conversion of the lane-level map document into an explicit lanelet
network, plus lossless XML serialization of that network.

Each lane becomes one lanelet: both boundaries are resampled at the same
fractions of their own arclengths (equal point counts by construction)
and the centerline is recomputed from boundary midpoints rather than
copied from the generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.etree import ElementTree as ET

import numpy as np

from . import geometry
from .errors import ConversionError, NetworkReadError
from .mapgen import ALONG, HdMapDocument, document_hash


@dataclass(frozen=True)
class Adjacency:
    ref: int
    same_direction: bool


@dataclass
class Lanelet:
    id: int
    left_bound: list[list[float]]
    right_bound: list[list[float]]
    centerline: list[list[float]]
    predecessors: list[int] = field(default_factory=list)
    successors: list[int] = field(default_factory=list)
    adjacent_left: Adjacency | None = None
    adjacent_right: Adjacency | None = None


@dataclass
class LaneletNetwork:
    lanelets: dict[int, Lanelet] = field(default_factory=dict)
    meta_source: str = ""
    sampling_step: float = 1.0
    defect_artifact: bool = False

    def ordered(self) -> list[Lanelet]:
        return [self.lanelets[k] for k in sorted(self.lanelets)]


def convert(doc: HdMapDocument, step: float = 1.0) -> LaneletNetwork:
    """Build one lanelet per lane with uniformly resampled boundaries.

    Endpoints are always included; the interval count comes from the longer
    boundary so both sides get equal point counts. Adjacency derives from
    lane-group ordering, with sides expressed relative to each lane's own
    travel direction.
    """
    lanes = sorted(doc.lanes, key=lambda ln: ln.id)
    id_map = {lane.id: k + 1 for k, lane in enumerate(lanes)}
    boundary = {b.id: b.points for b in doc.boundaries}
    net = LaneletNetwork(meta_source=document_hash(doc), sampling_step=step)
    for lane in lanes:
        left = boundary[lane.left_boundary_id]
        right = boundary[lane.right_boundary_id]
        if len(left) < 2 or len(right) < 2:
            raise ConversionError(f"lane {lane.id}: boundary with fewer than 2 points")
        n_intervals = max(1, math.ceil(max(geometry.length(left), geometry.length(right)) / step))
        fractions = [k / n_intervals for k in range(n_intervals + 1)]
        lb = geometry.resample_fractions(left, fractions)
        rb = geometry.resample_fractions(right, fractions)
        center = (lb + rb) / 2.0
        net.lanelets[id_map[lane.id]] = Lanelet(
            id=id_map[lane.id],
            left_bound=lb.tolist(),
            right_bound=rb.tolist(),
            centerline=center.tolist(),
            predecessors=[id_map[p] for p in lane.predecessors],
            successors=[id_map[s] for s in lane.successors],
        )

    lane_travel = {lane.id: lane.travel_direction for lane in lanes}
    for group in doc.groups:
        for a_id, b_id in zip(group.lane_ids, group.lane_ids[1:]):
            same = lane_travel[a_id] == lane_travel[b_id]
            a = net.lanelets[id_map[a_id]]
            b = net.lanelets[id_map[b_id]]
            # b sits on a's segment-right; flip sides for against-travel lanes
            if lane_travel[a_id] == ALONG:
                a.adjacent_right = Adjacency(b.id, same)
            else:
                a.adjacent_left = Adjacency(b.id, same)
            if lane_travel[b_id] == ALONG:
                b.adjacent_left = Adjacency(a.id, same)
            else:
                b.adjacent_right = Adjacency(a.id, same)
    return net


def _fmt(v: float) -> str:
    if not math.isfinite(v):
        return "nan"
    return f"{v:.9g}"


def _bound_element(tag: str, points) -> ET.Element:
    el = ET.Element(tag)
    for p in points:
        ET.SubElement(el, "point", x=_fmt(p[0]), y=_fmt(p[1]), z=_fmt(p[2]))
    return el


def network_to_element(net: LaneletNetwork) -> ET.Element:
    root = ET.Element("laneletNetwork",
                      meta_source=net.meta_source,
                      sampling_step=_fmt(net.sampling_step))
    if net.defect_artifact:
        root.set("defect_artifact", "true")
    for lanelet in net.ordered():
        el = ET.SubElement(root, "lanelet", id=str(lanelet.id))
        el.append(_bound_element("leftBound", lanelet.left_bound))
        el.append(_bound_element("rightBound", lanelet.right_bound))
        el.append(_bound_element("centerline", lanelet.centerline))
        for ref in lanelet.predecessors:
            ET.SubElement(el, "predecessor", ref=str(ref))
        for ref in lanelet.successors:
            ET.SubElement(el, "successor", ref=str(ref))
        if lanelet.adjacent_left is not None:
            ET.SubElement(el, "adjacentLeft", ref=str(lanelet.adjacent_left.ref),
                          sameDirection="true" if lanelet.adjacent_left.same_direction else "false")
        if lanelet.adjacent_right is not None:
            ET.SubElement(el, "adjacentRight", ref=str(lanelet.adjacent_right.ref),
                          sameDirection="true" if lanelet.adjacent_right.same_direction else "false")
    return root


def network_bytes(net: LaneletNetwork) -> bytes:
    root = network_to_element(net)
    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


def write_network(net: LaneletNetwork, path):
    with open(path, "wb") as fh:
        fh.write(network_bytes(net))


def _parse_float(text: str, where: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise NetworkReadError(f"{where}: bad number {text!r}", path=where)


def _parse_int(text: str, where: str) -> int:
    try:
        return int(text)
    except (TypeError, ValueError):
        raise NetworkReadError(f"{where}: bad integer {text!r}", path=where)


def _read_bound(parent: ET.Element, tag: str, where: str) -> list[list[float]]:
    el = parent.find(tag)
    if el is None:
        raise NetworkReadError(f"{where}: missing <{tag}>", path=f"{where}/{tag}")
    points = []
    for k, pt in enumerate(el.findall("point")):
        pw = f"{where}/{tag}/point[{k}]"
        points.append([
            _parse_float(pt.get("x"), pw + "/@x"),
            _parse_float(pt.get("y"), pw + "/@y"),
            _parse_float(pt.get("z"), pw + "/@z"),
        ])
    return points


def _read_adjacent(el: ET.Element, where: str) -> Adjacency:
    ref = _parse_int(el.get("ref"), where + "/@ref")
    flag = el.get("sameDirection")
    if flag not in ("true", "false"):
        raise NetworkReadError(f"{where}: bad sameDirection {flag!r}",
                               path=where + "/@sameDirection")
    return Adjacency(ref, flag == "true")


def read_network(path) -> LaneletNetwork:
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        raise NetworkReadError(f"{path}: not well-formed XML: {exc}") from exc
    root = tree.getroot()
    if root.tag != "laneletNetwork":
        raise NetworkReadError(f"root element is <{root.tag}>, expected <laneletNetwork>",
                               path="/" + root.tag)
    net = LaneletNetwork(
        meta_source=root.get("meta_source", ""),
        sampling_step=_parse_float(root.get("sampling_step", "1"),
                                   "laneletNetwork/@sampling_step"),
        defect_artifact=root.get("defect_artifact") == "true",
    )
    for k, el in enumerate(root.findall("lanelet")):
        where = f"laneletNetwork/lanelet[{k}]"
        lid = _parse_int(el.get("id"), where + "/@id")
        if lid in net.lanelets:
            raise NetworkReadError(f"duplicate lanelet id {lid}", path=where)
        lanelet = Lanelet(
            id=lid,
            left_bound=_read_bound(el, "leftBound", where),
            right_bound=_read_bound(el, "rightBound", where),
            centerline=_read_bound(el, "centerline", where),
        )
        for p in el.findall("predecessor"):
            lanelet.predecessors.append(_parse_int(p.get("ref"), where + "/predecessor/@ref"))
        for s in el.findall("successor"):
            lanelet.successors.append(_parse_int(s.get("ref"), where + "/successor/@ref"))
        adj_l = el.find("adjacentLeft")
        if adj_l is not None:
            lanelet.adjacent_left = _read_adjacent(adj_l, where + "/adjacentLeft")
        adj_r = el.find("adjacentRight")
        if adj_r is not None:
            lanelet.adjacent_right = _read_adjacent(adj_r, where + "/adjacentRight")
        net.lanelets[lid] = lanelet
    return net


def _points_equal(a: list[list[float]], b: list[list[float]]) -> bool:
    if len(a) != len(b):
        return False
    for pa, pb in zip(a, b):
        for va, vb in zip(pa, pb):
            if _fmt(va) != _fmt(vb):
                return False
    return True


def networks_equal(a: LaneletNetwork, b: LaneletNetwork) -> bool:
    """Structural equality at serialization precision.

    Ids, relations, and adjacency compare exactly; coordinates compare via
    their 9-significant-digit canonical text, which also identifies
    non-finite values.
    """
    if sorted(a.lanelets) != sorted(b.lanelets):
        return False
    for lid in a.lanelets:
        la, lb = a.lanelets[lid], b.lanelets[lid]
        if la.predecessors != lb.predecessors or la.successors != lb.successors:
            return False
        if la.adjacent_left != lb.adjacent_left or la.adjacent_right != lb.adjacent_right:
            return False
        if not (_points_equal(la.left_bound, lb.left_bound)
                and _points_equal(la.right_bound, lb.right_bound)
                and _points_equal(la.centerline, lb.centerline)):
            return False
    return True


def bound_arrays(lanelet: Lanelet):
    """(left, right, center) as float arrays; convenience for rule code."""
    return (np.asarray(lanelet.left_bound, dtype=float),
            np.asarray(lanelet.right_bound, dtype=float),
            np.asarray(lanelet.centerline, dtype=float))
