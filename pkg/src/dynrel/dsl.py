"""Text format (``.drm``) for DFT and DRBD models: parser, printer and validator.

::

    dft DBW {
        basic TF exponential(rate=1e-4);
        spare SC active exponential(rate=3e-4) dormancy(0.5);
        basic PC weibull(shape=1.5, scale=5000);
        gate SP wsp PC SC;
        gate T or TF SP;
        top T;
    }

``and``/``or`` take two or more operands and are read left-associatively.
``ALWAYS`` and ``NEVER`` are reserved operand names for the identity
elements.  Comments run from ``#`` to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Literal

from . import algebra as alg
from .algebra import Always, Basic, Block, Expr, Never, RWsp, Wsp, event_ids, flatten, walk
from .distributions import DistributionSpec, Exponential, SpareSpec, Weibull
from .errors import DomainError, DynrelError
from .model import Model


@dataclass(frozen=True)
class Diagnostic:
    severity: Literal["error", "warning"]
    line: int | None
    column: int | None
    message: str
    code: str

    def __str__(self) -> str:
        where = f"{self.line}:{self.column}: " if self.line is not None else ""
        return f"{where}{self.severity}[{self.code}]: {self.message}"


class ModelSyntaxError(DynrelError):
    """Parsing failed; ``diagnostics`` lists every problem found."""

    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("\n".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


# -- lexer -------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}();=,])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str, diags: list[Diagnostic]) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            diags.append(Diagnostic("error", line, pos - line_start + 1,
                                    f"unexpected character {text[pos]!r}", "E-LEX"))
            pos += 1
            continue
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        for i, ch in enumerate(m.group()):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# -- parser ------------------------------------------------------------------

IDENTITIES = {"ALWAYS": Always, "NEVER": Never}

_GATES = {
    "dft": {"and": alg.DAnd, "or": alg.DOr, "pand": alg.Pand, "fdep": alg.Fdep,
            "wsp": Wsp, "simult": alg.DSimult},
    "drbd": {"and": alg.RAnd, "or": alg.ROr, "after": alg.RAfter, "simult": alg.RSimult,
             "iafter": alg.RInclusiveAfter, "wsp": RWsp},
}
_ALL_OPS = {"and", "or", "pand", "fdep", "wsp", "after", "simult", "iafter"}


@dataclass
class _Gate:
    name: str
    op: str
    operands: list[_Tok]
    tok: _Tok


class _SyntaxAbort(Exception):
    pass


class _Parser:
    def __init__(self, toks: list[_Tok], diags: list[Diagnostic]):
        self.toks = toks
        self.i = 0
        self.diags = diags

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, tok: _Tok, msg: str, code: str = "E-SYNTAX") -> None:
        self.diags.append(Diagnostic("error", tok.line, tok.col, msg, code))

    def expect(self, text: str | None = None, kind: str | None = None) -> _Tok:
        tok = self.cur
        if (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            want = repr(text) if text is not None else kind
            got = "end of input" if tok.kind == "eof" else repr(tok.text)
            self.error(tok, f"expected {want}, found {got}")
            raise _SyntaxAbort
        self.i += 1
        return tok

    def number(self) -> tuple[float, _Tok]:
        tok = self.expect(kind="number")
        return float(tok.text), tok

    def recover(self) -> None:
        while self.cur.kind != "eof" and self.cur.text not in (";", "}"):
            self.i += 1
        if self.cur.text == ";":
            self.i += 1

    def dist(self) -> DistributionSpec:
        tok = self.expect(kind="ident")
        try:
            if tok.text == "exponential":
                self.expect("(")
                self.expect("rate")
                self.expect("=")
                rate, _ = self.number()
                self.expect(")")
                return Exponential(rate)
            if tok.text == "weibull":
                self.expect("(")
                self.expect("shape")
                self.expect("=")
                shape, _ = self.number()
                self.expect(",")
                self.expect("scale")
                self.expect("=")
                scale, _ = self.number()
                self.expect(")")
                return Weibull(shape, scale)
        except DomainError as exc:
            self.error(tok, str(exc), "E-RANGE")
            raise _SyntaxAbort from None
        self.error(tok, f"unknown distribution {tok.text!r} (expected exponential or weibull)")
        raise _SyntaxAbort

    def parse(self):
        kind_tok = self.expect(kind="ident")
        if kind_tok.text not in ("dft", "drbd"):
            self.error(kind_tok, f"model must start with 'dft' or 'drbd', found {kind_tok.text!r}")
            raise _SyntaxAbort
        name = self.expect(kind="ident").text
        self.expect("{")
        events: dict[str, DistributionSpec | SpareSpec] = {}
        gates: dict[str, _Gate] = {}
        positions: dict[str, tuple[int, int]] = {}
        top: _Tok | None = None
        while self.cur.text != "}" and self.cur.kind != "eof":
            try:
                top = self.decl(events, gates, positions, top)
            except _SyntaxAbort:
                self.recover()
        self.expect("}")
        if self.cur.kind != "eof":
            self.error(self.cur, "unexpected text after the closing brace")
        return kind_tok.text, name, events, gates, positions, top, kind_tok

    def declare(self, tok: _Tok, positions) -> bool:
        # called after the closing ';' so a rejected name never derails recovery
        if tok.text.upper() in IDENTITIES:
            self.error(tok, f"{tok.text!r} is reserved for an identity element", "E-DUP")
            return False
        if tok.text in positions:
            line, col = positions[tok.text]
            self.error(tok, f"{tok.text!r} already declared at {line}:{col}", "E-DUP")
            return False
        positions[tok.text] = (tok.line, tok.col)
        return True

    def decl(self, events, gates, positions, top):
        tok = self.expect(kind="ident")
        if tok.text == "basic":
            ident = self.expect(kind="ident")
            law = self.dist()
            self.expect(";")
            if self.declare(ident, positions):
                events[ident.text] = law
        elif tok.text == "spare":
            ident = self.expect(kind="ident")
            self.expect("active")
            law = self.dist()
            self.expect("dormancy")
            self.expect("(")
            alpha, _ = self.number()
            self.expect(")")
            self.expect(";")
            if self.declare(ident, positions):
                events[ident.text] = SpareSpec(law, alpha)
        elif tok.text == "gate":
            ident = self.expect(kind="ident")
            op = self.expect(kind="ident")
            if op.text not in _ALL_OPS:
                self.error(op, f"unknown gate operator {op.text!r}")
                raise _SyntaxAbort
            operands = []
            while self.cur.kind == "ident":
                operands.append(self.expect(kind="ident"))
            if not operands:
                self.error(self.cur, "a gate needs at least one operand")
                raise _SyntaxAbort
            self.expect(";")
            if self.declare(ident, positions):
                gates[ident.text] = _Gate(ident.text, op.text, operands, ident)
        elif tok.text == "top":
            ident = self.expect(kind="ident")
            self.expect(";")
            if top is not None:
                self.error(ident, f"top already given at {top.line}:{top.col}", "E-DUP")
            else:
                top = ident
        else:
            self.error(tok, f"expected a declaration (basic, spare, gate or top), found {tok.text!r}")
            raise _SyntaxAbort
        return top


def _build(kind, events, gates, top_tok, diags) -> Expr | None:
    leaf = Basic if kind == "dft" else Block
    table = _GATES[kind]
    building: set[str] = set()
    built: dict[str, Expr | None] = {}

    def err(tok, msg, code):
        diags.append(Diagnostic("error", tok.line, tok.col, msg, code))

    def operand(tok: _Tok) -> Expr | None:
        name = tok.text
        if name.upper() in IDENTITIES and name not in gates and name not in events:
            return IDENTITIES[name.upper()]()
        if name in events:
            if isinstance(events[name], SpareSpec):
                err(tok, f"spare {name!r} can only appear as the second operand of wsp", "E-SPARE")
                return None
            return leaf(name)
        if name in gates:
            return gate(gates[name], tok)
        err(tok, f"undeclared name {name!r}", "E-REF")
        return None

    def gate(g: _Gate, ref: _Tok) -> Expr | None:
        if g.name in built:
            return built[g.name]
        if g.name in building:
            err(ref, f"gate {g.name!r} is defined in terms of itself", "E-CYCLE")
            return None
        building.add(g.name)
        built[g.name] = node = make(g)
        building.discard(g.name)
        return node

    def make(g: _Gate) -> Expr | None:
        cls = table.get(g.op)
        if cls is None:
            err(g.tok, f"operator {g.op!r} is not available in {kind} models", "E-OP")
            return None
        n = len(g.operands)
        if g.op in ("and", "or"):
            if n < 2:
                err(g.tok, f"{g.op} gate {g.name!r} needs at least 2 operands, got {n}", "E-ARITY")
                return None
        elif n != 2:
            err(g.tok, f"{g.op} gate {g.name!r} takes exactly 2 operands, got {n}", "E-ARITY")
            return None
        if g.op == "wsp":
            main_tok, sp_tok = g.operands
            if sp_tok.text not in events or not isinstance(events[sp_tok.text], SpareSpec):
                code = "E-REF" if sp_tok.text not in events and sp_tok.text not in gates else "E-SPARE"
                err(sp_tok, f"second wsp operand {sp_tok.text!r} must be a declared spare", code)
                return None
            main = operand(main_tok)
            return None if main is None else cls(main, sp_tok.text, name=g.name)
        ops = [operand(t) for t in g.operands]
        if any(o is None for o in ops):
            return None
        if g.op in ("and", "or"):
            return alg.chain(cls, ops, name=g.name)
        return cls(ops[0], ops[1], name=g.name)

    top = None if top_tok is None else operand(top_tok)
    # gates off the top's path are still checked so that their errors surface
    for g in gates.values():
        gate(g, g.tok)
    return top


def parse_model(text: str | bytes) -> Model:
    """Parse a model; raises :class:`ModelSyntaxError` listing every diagnostic."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    diags: list[Diagnostic] = []
    toks = _lex(text, diags)
    parser = _Parser(toks, diags)
    try:
        kind, name, events, gates, positions, top_tok, kind_tok = parser.parse()
    except _SyntaxAbort:
        raise ModelSyntaxError(diags) from None
    if top_tok is None:
        last = toks[-1]
        diags.append(Diagnostic("error", last.line, last.col, "model has no top declaration", "E-SYNTAX"))
    top = _build(kind, events, gates, top_tok, diags)
    if diags:
        raise ModelSyntaxError(diags)
    return Model(name, kind, events, top, positions)


# -- validation --------------------------------------------------------------


def _where(model: Model, name: str | None) -> tuple[int | None, int | None]:
    if name is not None and name in model.positions:
        return model.positions[name]
    return (1, 1) if model.positions else (None, None)


def _shared(groups: list[set[str]]) -> list[str]:
    seen, dup = set(), []
    for ids in groups:
        for eid in sorted(ids):
            if eid in seen and eid not in dup:
                dup.append(eid)
            seen.add(eid)
    return dup


def validate(model: Model) -> list[Diagnostic]:
    """Structural checks backing the independence assumptions of the analytic routes."""
    out: list[Diagnostic] = []

    def add(sev, name, msg, code):
        out.append(Diagnostic(sev, *_where(model, name), msg, code))

    for eid, law in model.events.items():
        if isinstance(law, SpareSpec) and not 0.0 <= law.dormancy <= 1.0:
            add("error", eid, f"dormancy factor of {eid!r} is {law.dormancy!r}, must lie in [0, 1]", "E-RANGE")

    spares = [n for n in walk(model.top) if isinstance(n, (Wsp, RWsp))]
    counted: dict[str, int] = {}
    for n in spares:
        counted[n.spare] = counted.get(n.spare, 0) + 1
    for sid, k in counted.items():
        if k > 1:
            add("error", sid, f"spare {sid!r} is shared by {k} spare gates", "E-SPARE-SHARED")
    for n in spares:
        if n.spare in event_ids(n.main):
            add("error", n.spare, f"spare {n.spare!r} also appears in its own main input", "E-SPARE")

    for eid in sorted(event_ids(model.top) - set(model.events)):
        add("error", None, f"undeclared event {eid!r}", "E-REF")

    if model.kind == "dft":
        modules = flatten(model.top, alg.DOr)
        for eid in _shared([event_ids(m) for m in modules]):
            add("error", eid, f"event {eid!r} appears in more than one OR module; "
                "the inclusion-exclusion route needs independent modules", "E-SHARED")
    for node in walk(model.top):
        kids = alg.children(node)
        if len(kids) == 2 and not (model.kind == "dft" and isinstance(node, alg.DOr)):
            for eid in _shared([event_ids(k) for k in kids]):
                add("warning", node.name or eid, f"event {eid!r} feeds both inputs of "
                    f"{type(node).__name__}{' ' + node.name if node.name else ''}", "W-SHARED")

    used = event_ids(model.top)
    named = {n.name for n in walk(model.top) if n.name}
    for ident in model.positions:
        if ident in model.events and ident not in used:
            add("warning", ident, f"event {ident!r} is declared but not used", "W-UNREACHABLE")
        elif ident not in model.events and ident not in named:
            add("warning", ident, f"gate {ident!r} is not reachable from the top", "W-UNREACHABLE")
    for ident in model.events:
        if ident not in used and ident not in model.positions:
            add("warning", None, f"event {ident!r} is declared but not used", "W-UNREACHABLE")
    return out


# -- printer -----------------------------------------------------------------

_OP_NAMES = {
    alg.DAnd: "and", alg.DOr: "or", alg.Pand: "pand", alg.Fdep: "fdep", Wsp: "wsp",
    alg.DSimult: "simult", alg.RAnd: "and", alg.ROr: "or", alg.RAfter: "after",
    alg.RSimult: "simult", alg.RInclusiveAfter: "iafter", RWsp: "wsp",
}


def _fmt_num(x: float) -> str:
    return repr(float(x))


def _fmt_dist(d: DistributionSpec) -> str:
    if isinstance(d, Exponential):
        return f"exponential(rate={_fmt_num(d.rate)})"
    return f"weibull(shape={_fmt_num(d.shape)}, scale={_fmt_num(d.scale)})"


def format_model(model: Model) -> str:
    """Serialise a model back to the text format; reparsing yields an equal model."""
    lines = [f"{model.kind} {model.name} {{"]
    for eid, law in model.events.items():
        if isinstance(law, SpareSpec):
            lines.append(f"    spare {eid} active {_fmt_dist(law.active)} dormancy({_fmt_num(law.dormancy)});")
        else:
            lines.append(f"    basic {eid} {_fmt_dist(law)};")

    taken = set(model.events) | {"ALWAYS", "NEVER"}
    names: dict[str, Expr] = {}
    gate_lines: list[str] = []
    counter = 0

    def fresh() -> str:
        nonlocal counter
        while True:
            counter += 1
            cand = f"G{counter}"
            if cand not in taken and cand not in names:
                return cand

    def ref(node: Expr) -> str:
        if isinstance(node, (Basic, Block)):
            return node.id
        if isinstance(node, Always):
            return "ALWAYS"
        if isinstance(node, Never):
            return "NEVER"
        if isinstance(node, (alg.DBefore, alg.DInclusiveBefore)):
            raise DynrelError(f"{type(node).__name__} has no text syntax")
        name = node.name
        if name is not None and names.get(name) == node:
            return name
        if name is None or name in taken or name in names:
            name = fresh()
        names[name] = node
        if isinstance(node, (Wsp, RWsp)):
            args = [ref(node.main), node.spare]
        elif type(node) in (alg.DAnd, alg.DOr, alg.RAnd, alg.ROr):
            spine = [node.right]
            cur = node.left
            while type(cur) is type(node) and cur.name is None:
                spine.append(cur.right)
                cur = cur.left
            spine.append(cur)
            args = [ref(o) for o in reversed(spine)]
        else:
            args = [ref(node.left), ref(node.right)]
        gate_lines.append(f"    gate {name} {_OP_NAMES[type(node)]} {' '.join(args)};")
        return name

    top = ref(model.top)
    lines.extend(gate_lines)
    lines.append(f"    top {top};")
    lines.append("}")
    return "\n".join(lines) + "\n"
