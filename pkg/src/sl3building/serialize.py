"""Round-trip text serialization of the domain values.

Rationals travel as "num/den" strings (plain integers stay bare), matrices as
row-major nested lists, and every composite value as a kind-tagged mapping.
Vertices and flags are serialized in canonical form only, so
from_obj(to_obj(v)) == v holds exactly.
"""

from __future__ import annotations

from fractions import Fraction

from .building import Frame, LatticeVertex, ResidueChamber
from .boundary import Flag
from .dynamics import GroupElement, SrhCertificate
from .stochastics import WalkConfig, WalkStep, WalkTrace


class ParseError(ValueError):
    def __init__(self, message, where=None):
        super().__init__(f"{message}" + (f" (at {where})" if where else ""))
        self.where = where


def frac_to_str(x):
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def str_to_frac(s, where=None):
    try:
        if isinstance(s, int):
            return Fraction(s)
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {s!r}: {exc}", where) from exc


def matrix_to_obj(m):
    return [[frac_to_str(e) for e in row] for row in m]


def obj_to_matrix(obj, where="matrix"):
    if not isinstance(obj, list) or not obj:
        raise ParseError("matrix must be a nonempty list of rows", where)
    rows = []
    for i, row in enumerate(obj):
        rows.append(tuple(str_to_frac(e, f"{where}[{i}][{j}]")
                          for j, e in enumerate(row)))
    return tuple(rows)


def _vec_to_obj(v):
    return [frac_to_str(e) for e in v]


def _obj_to_int_vec(obj, where):
    return tuple(int(str_to_frac(e, where)) for e in obj)


def to_obj(value):
    """Kind-tagged JSON-able form of a domain value."""
    if isinstance(value, LatticeVertex):
        return {"kind": "vertex", "p": value.p, "matrix": matrix_to_obj(value.matrix)}
    if isinstance(value, Flag):
        return {"kind": "flag", "matrix": matrix_to_obj(value.matrix)}
    if isinstance(value, Frame):
        return {"kind": "frame", "lines": [_vec_to_obj(v) for v in value.lines]}
    if isinstance(value, ResidueChamber):
        return {"kind": "residue_chamber", "p": value.p,
                "line": list(value.line), "plane_normal": list(value.plane_normal)}
    if isinstance(value, GroupElement):
        return {"kind": "group_element", "matrix": matrix_to_obj(value.matrix),
                "word": list(value.word) if value.word is not None else None}
    if isinstance(value, SrhCertificate):
        return {"kind": "srh_certificate", "p": value.p,
                "element": to_obj(value.element),
                "lines": [_vec_to_obj(v) for v in value.lines],
                "lam": list(value.lam),
                "attracting": to_obj(value.attracting),
                "repelling": to_obj(value.repelling)}
    if isinstance(value, WalkConfig):
        return {"kind": "walk_config", "p": value.p,
                "generators": [to_obj(g) for g in value.generators],
                "weights": [frac_to_str(w) for w in value.weights],
                "steps": value.steps, "seed": value.seed,
                "base_vertex": to_obj(value.base_vertex)}
    if isinstance(value, WalkStep):
        return {"kind": "walk_step", "n": value.n, "letter": value.letter,
                "theta": list(value.theta),
                "germ": to_obj(value.germ) if value.germ else None,
                "germ_run": value.germ_run}
    if isinstance(value, WalkTrace):
        return {"kind": "walk_trace", "config": to_obj(value.config),
                "steps": [to_obj(s) for s in value.steps],
                "final_position": to_obj(value.final_position)}
    if isinstance(value, tuple):
        return {"kind": "weyl_vector", "entries": list(value)}
    raise TypeError(f"no serialization for {type(value).__name__}")


def from_obj(obj):
    """Inverse of to_obj; canonical forms are re-derived on load."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError("expected a kind-tagged mapping")
    kind = obj["kind"]
    try:
        if kind == "vertex":
            return LatticeVertex.from_matrix(obj["p"], obj_to_matrix(obj["matrix"]))
        if kind == "flag":
            return Flag.from_matrix(obj_to_matrix(obj["matrix"]))
        if kind == "frame":
            return Frame.from_lines(tuple(
                tuple(str_to_frac(e, "frame.lines") for e in v) for v in obj["lines"]))
        if kind == "residue_chamber":
            return ResidueChamber.from_parts(obj["p"], tuple(obj["line"]),
                                             tuple(obj["plane_normal"]))
        if kind == "group_element":
            word = tuple(obj["word"]) if obj.get("word") is not None else None
            return GroupElement.from_matrix(obj_to_matrix(obj["matrix"]), word=word)
        if kind == "srh_certificate":
            return SrhCertificate(
                obj["p"], from_obj(obj["element"]),
                tuple(_obj_to_int_vec(v, "lines") for v in obj["lines"]),
                tuple(obj["lam"]), from_obj(obj["attracting"]),
                from_obj(obj["repelling"]))
        if kind == "walk_config":
            return WalkConfig(
                obj["p"], tuple(from_obj(g) for g in obj["generators"]),
                tuple(str_to_frac(w, "weights") for w in obj["weights"]),
                obj["steps"], obj["seed"], from_obj(obj["base_vertex"]))
        if kind == "walk_step":
            germ = from_obj(obj["germ"]) if obj.get("germ") else None
            return WalkStep(obj["n"], obj["letter"], tuple(obj["theta"]),
                            germ, obj["germ_run"])
        if kind == "walk_trace":
            return WalkTrace(from_obj(obj["config"]),
                             tuple(from_obj(s) for s in obj["steps"]),
                             from_obj(obj["final_position"]))
        if kind == "weyl_vector":
            return tuple(obj["entries"])
    except KeyError as exc:
        raise ParseError(f"missing field {exc} in {kind}") from exc
    raise ParseError(f"unknown kind {kind!r}")
