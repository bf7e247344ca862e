"""Machine file format: one JSON document per machine, rationals as "p/q".

The same schema is shared by the CLI and the transform provenance records.
In-memory states and symbols may be structured tuples (transforms build
composite states); on disk they are canonical strings.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .machines import (LAMBDA, Dfa, LeveledAlphabet, LimitedAutomaton,
                       MachineError, PushdownAutomaton)
from .transducers import RtTransducer

SCHEMA = "1"


def format_ratio(x) -> str:
    if x == "inf":
        return "inf"
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def parse_ratio(s: str) -> Fraction:
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        den = int(den)
        if den == 0:
            raise MachineError(f"zero denominator in rational {s!r}")
        return Fraction(int(num), den)
    if "." in s:
        raise MachineError(f"rationals must be p/q strings, got decimal {s!r}")
    return Fraction(int(s))


def name_of(obj) -> str:
    """Canonical printable name for a (possibly structured) state or symbol."""
    if isinstance(obj, str):
        return obj
    if isinstance(obj, tuple):
        return "(" + " ".join(name_of(x) for x in obj) + ")"
    return str(obj)


def _name_map(items):
    out = {}
    for it in items:
        n = name_of(it)
        if n in out and out[n] != it:
            raise MachineError(f"name collision on {n!r}")
        out[n] = it
    return out


def machine_to_doc(m) -> dict:
    if isinstance(m, LimitedAutomaton):
        doc = {
            "schema": SCHEMA,
            "kind": "limited",
            "k": m.k,
            "states": sorted(name_of(q) for q in m.states),
            "initial": name_of(m.initial),
            "accept": sorted(name_of(q) for q in m.accept),
            "reject": sorted(name_of(q) for q in m.reject),
            "alphabet": {
                "input": sorted(name_of(s) for s in m.alphabet.input_symbols),
                "levels": [sorted(name_of(s) for s in part if s not in ("|c", "$"))
                           for part in m.alphabet.levels],
                "blank": name_of(m.alphabet.blank),
            },
            "transitions": [
                {"from": name_of(q), "read": name_of(sym), "to": name_of(p),
                 "write": name_of(tau), "dir": d, "prob": format_ratio(w)}
                for (q, sym), dist in sorted(m.delta.items(), key=lambda kv: repr(kv[0]))
                for (p, tau, d), w in dist
            ],
        }
        if m.name:
            doc["name"] = m.name
        return doc
    if isinstance(m, PushdownAutomaton):
        doc = {
            "schema": SCHEMA,
            "kind": "pda",
            "states": sorted(name_of(q) for q in m.states),
            "initial": name_of(m.initial),
            "accept": sorted(name_of(q) for q in m.accept),
            "reject": sorted(name_of(q) for q in m.reject),
            "alphabet": {"input": sorted(name_of(s) for s in m.input_symbols)},
            "stack": {"symbols": sorted(name_of(s) for s in m.stack_symbols),
                      "bottom": name_of(m.bottom), "push_size": m.push_size},
            "transitions": [
                {"from": name_of(q), "read": name_of(sym), "top": name_of(a),
                 "to": name_of(p), "push": [name_of(b) for b in u], "prob": format_ratio(w)}
                for (q, sym, a), dist in sorted(m.delta.items(), key=lambda kv: repr(kv[0]))
                for (p, u), w in dist
            ],
        }
        if m.name:
            doc["name"] = m.name
        return doc
    if isinstance(m, Dfa):
        return {
            "schema": SCHEMA,
            "kind": "dfa",
            "states": sorted(name_of(q) for q in m.states),
            "initial": name_of(m.start),
            "accept": sorted(name_of(q) for q in m.accepting),
            "alphabet": {"input": sorted(name_of(s) for s in m.input_symbols)},
            "transitions": [
                {"from": name_of(q), "read": name_of(s), "to": name_of(p)}
                for (q, s), p in sorted(m.transitions.items(), key=lambda kv: repr(kv[0]))
            ],
        }
    if isinstance(m, RtTransducer):
        return {
            "schema": SCHEMA,
            "kind": "transducer",
            "states": sorted(name_of(q) for q in m.states),
            "initial": name_of(m.initial),
            "accept": name_of(m.accept_state),
            "alphabet": {"input": sorted(name_of(s) for s in m.input_symbols),
                         "output": sorted(name_of(s) for s in m.output_symbols)},
            "transitions": [
                {"from": name_of(q), "read": name_of(s), "to": name_of(p),
                 "emit": (name_of(e) if e is not None else "")}
                for (q, s), opts in sorted(m.delta.items(), key=lambda kv: repr(kv[0]))
                for (p, e) in opts
            ],
        }
    raise TypeError(f"cannot serialize {type(m).__name__}")


def doc_to_machine(doc: dict):
    kind = doc.get("kind")
    if kind == "limited":
        alpha = LeveledAlphabet(doc["alphabet"]["input"], doc["alphabet"]["levels"],
                                doc["alphabet"].get("blank", "B"))
        delta: dict = {}
        for t in doc["transitions"]:
            key = (t["from"], t["read"])
            delta.setdefault(key, []).append(
                ((t["to"], t["write"], int(t["dir"])), parse_ratio(t["prob"])))
        return LimitedAutomaton(int(doc["k"]), doc["states"], alpha, delta,
                                doc["initial"], doc["accept"], doc["reject"],
                                name=doc.get("name", ""))
    if kind == "pda":
        delta = {}
        for t in doc["transitions"]:
            key = (t["from"], t["read"], t["top"])
            delta.setdefault(key, []).append(
                ((t["to"], tuple(t["push"])), parse_ratio(t["prob"])))
        return PushdownAutomaton(
            doc["states"], doc["alphabet"]["input"], doc["stack"]["symbols"],
            int(doc["stack"]["push_size"]), delta, doc["initial"],
            doc["stack"]["bottom"], doc["accept"], doc["reject"],
            name=doc.get("name", ""))
    if kind == "dfa":
        trans = {(t["from"], t["read"]): t["to"] for t in doc["transitions"]}
        return Dfa(doc["states"], doc["alphabet"]["input"], trans,
                   doc["initial"], doc["accept"])
    if kind == "transducer":
        delta = {}
        for t in doc["transitions"]:
            key = (t["from"], t["read"])
            emit = t.get("emit", "")
            delta.setdefault(key, []).append((t["to"], emit if emit != "" else None))
        return RtTransducer(doc["states"], doc["alphabet"]["input"],
                            doc["alphabet"]["output"], delta, doc["initial"],
                            doc["accept"])
    raise MachineError(f"unknown machine kind {kind!r}")


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(m) -> str:
    doc = machine_to_doc(m)
    doc.pop("provenance", None)
    return hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()


def save_machine(m, path, provenance: dict | None = None):
    doc = machine_to_doc(m)
    if provenance:
        doc["provenance"] = provenance
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def load_machine(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return doc_to_machine(doc)


def rename_to_strings(m):
    """Rebuild a machine with all states/symbols replaced by their names.

    A saved+reloaded machine equals `rename_to_strings` of the original, which
    is the "equal up to interning" notion used by the round-trip checks.
    """
    return doc_to_machine(machine_to_doc(m))
