"""Text format for garment graphs (.tir files).

Block-structured, keyword-introduced sections; `#` starts a line
comment; UTF-8 with LF endings canonical (CRLF tolerated on input).
parse() is total: any byte string yields either a graph or a list of
positioned diagnostics, never an exception. print_canonical() emits a
normal form with sorted elements and shortest round-trip decimals so
that formatting is idempotent and parse(print(g)) rebuilds g exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import ir

TOKEN_RE = re.compile(
    r"""
    (?P<WS>[ \t\r]+)
  | (?P<COMMENT>\#[^\n]*)
  | (?P<NL>\n)
  | (?P<NUMBER>-?\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_\-]*)
  | (?P<STRING>"(?:[^"\\\n]|\\.)*")
  | (?P<BADSTRING>"(?:[^"\\\n]|\\.)*)
  | (?P<PUNCT>[{}()\[\]:,.])
""",
    re.VERBOSE,
)

TOP_KEYWORDS = ("garment", "piece", "seam", "dart", "notch", "region")


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    offset: int
    length: int = 1


@dataclass(frozen=True)
class ParseDiagnostic:
    code: str
    message: str
    span: Span

    def format(self) -> str:
        return f"{self.span.line}:{self.span.col}: {self.code}: {self.message}"


@dataclass
class ParseResult:
    graph: ir.GarmentGraph | None
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.graph is not None


@dataclass(frozen=True)
class _Token:
    kind: str  # NUMBER | IDENT | STRING | PUNCT | EOF
    text: str
    span: Span


def _tokenize(text: str) -> tuple[list[_Token], list[ParseDiagnostic]]:
    tokens: list[_Token] = []
    diags: list[ParseDiagnostic] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = TOKEN_RE.match(text, pos)
        if m is None:
            span = Span(line, pos - line_start + 1, pos)
            ch = text[pos]
            diags.append(
                ParseDiagnostic("E-LEX-001", f"illegal character {ch!r}", span)
            )
            pos += 1
            continue
        kind = m.lastgroup or ""
        lexeme = m.group()
        span = Span(line, pos - line_start + 1, pos, len(lexeme))
        if kind == "NL":
            line += 1
            line_start = pos + 1
        elif kind == "BADSTRING":
            diags.append(ParseDiagnostic("E-LEX-003", "unterminated string", span))
        elif kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, lexeme, span))
        pos = m.end()
    tokens.append(_Token("EOF", "", Span(line, pos - line_start + 1, pos, 0)))
    return tokens, diags


class _Parser:
    """Single-pass recursive descent with per-statement recovery.

    A malformed statement is reported and skipped up to the next
    top-level keyword so one typo does not hide later problems.
    """

    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0
        self.diags: list[ParseDiagnostic] = []
        self.garment_class: str | None = None
        self.openings: int | None = None
        self.pieces: list[ir.PatternPiece] = []
        self.seams: list[ir.SeamEdge] = []
        self.darts: list[ir.Dart] = []
        self.notches: list[ir.Notch] = []
        self.regions: list[ir.MaterialRegion] = []
        self.spans: dict[str, Span] = {}

    # -- token helpers -------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def error(self, code: str, message: str, span: Span | None = None) -> None:
        self.diags.append(
            ParseDiagnostic(code, message, span or self.peek().span)
        )

    def expect_punct(self, ch: str) -> bool:
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.text == ch:
            self.next()
            return True
        self.error("E-SYN-001", f"expected '{ch}', found {tok.text!r}")
        return False

    def expect_ident(self, what: str) -> str | None:
        tok = self.peek()
        if tok.kind == "IDENT":
            self.next()
            return tok.text
        self.error("E-SYN-001", f"expected {what}, found {tok.text!r}")
        return None

    def expect_number(self, what: str) -> float | None:
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.next()
            try:
                return float(tok.text)
            except ValueError:
                self.error("E-LEX-002", f"malformed number {tok.text!r}", tok.span)
                return None
        self.error("E-SYN-001", f"expected {what}, found {tok.text!r}")
        return None

    def expect_int(self, what: str) -> int | None:
        tok = self.peek()
        value = self.expect_number(what)
        if value is None:
            return None
        if value != int(value):
            self.error("E-SYN-004", f"{what} must be an integer", tok.span)
            return None
        return int(value)

    def at_top_keyword(self) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.text in TOP_KEYWORDS

    def skip_to_next_statement(self) -> None:
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind == "EOF":
                return
            if depth == 0 and self.at_top_keyword():
                return
            if tok.kind == "PUNCT" and tok.text == "{":
                depth += 1
            elif tok.kind == "PUNCT" and tok.text == "}":
                depth = max(0, depth - 1)
                self.next()
                if depth == 0:
                    return
                continue
            self.next()

    # -- grammar -------------------------------------------------------

    def parse_file(self) -> None:
        while self.peek().kind != "EOF":
            tok = self.peek()
            if tok.kind == "IDENT" and tok.text in TOP_KEYWORDS:
                before = self.i
                getattr(self, f"parse_{tok.text}")()
                if self.i == before:  # statement made no progress
                    self.next()
            else:
                self.error(
                    "E-SYN-001",
                    f"expected one of {', '.join(TOP_KEYWORDS)}, found {tok.text!r}",
                )
                self.next()
                self.skip_to_next_statement()

    def parse_garment(self) -> None:
        self.next()  # 'garment'
        cls_tok = self.peek()
        cls = self.expect_ident("garment class")
        if cls is None:
            self.skip_to_next_statement()
            return
        if self.garment_class is not None:
            self.error("E-SYN-003", "duplicate garment statement", cls_tok.span)
        self.garment_class = cls
        if self.peek().kind == "IDENT" and self.peek().text == "openings":
            self.next()
            count = self.expect_int("openings count")
            if count is not None:
                self.openings = count

    def parse_block_header(self, kind: str) -> str | None:
        self.next()  # kind keyword
        name_tok = self.peek()
        name = self.expect_ident(f"{kind} id")
        if name is None or not self.expect_punct("{"):
            self.skip_to_next_statement()
            return None
        self.spans.setdefault(name, name_tok.span)
        return name

    def block_fields(self, kind: str, name: str):
        """Yield field keywords inside a block until the closing brace."""
        while True:
            tok = self.peek()
            if tok.kind == "EOF":
                self.error("E-SYN-001", f"unterminated {kind} block '{name}'")
                return
            if tok.kind == "PUNCT" and tok.text == "}":
                self.next()
                return
            if tok.kind != "IDENT":
                self.error(
                    "E-SYN-001", f"expected a field name, found {tok.text!r}"
                )
                self.next()
                continue
            self.next()
            yield tok

    def parse_point(self) -> tuple[float, float] | None:
        if not self.expect_punct("("):
            return None
        x = self.expect_number("x coordinate")
        if x is None or not self.expect_punct(","):
            return None
        y = self.expect_number("y coordinate")
        if y is None or not self.expect_punct(")"):
            return None
        return (x, y)

    def parse_piece(self) -> None:
        name = self.parse_block_header("piece")
        if name is None:
            return
        boundary: list[tuple[float, float]] = []
        grain = 0.0
        allowance: list[float] = []
        label = ""
        seen: set[str] = set()
        for tok in self.block_fields("piece", name):
            word = tok.text
            if word in seen and word != "boundary":
                self.error("E-SYN-003", f"duplicate field '{word}'", tok.span)
            seen.add(word)
            if word == "boundary":
                while self.peek().kind == "PUNCT" and self.peek().text == "(":
                    pt = self.parse_point()
                    if pt is None:
                        break
                    boundary.append(pt)
            elif word == "grain":
                value = self.expect_number("grain angle")
                if value is not None:
                    grain = value
            elif word == "allowance":
                while self.peek().kind == "NUMBER":
                    value = self.expect_number("allowance width")
                    if value is None:
                        break
                    allowance.append(value)
            elif word == "label":
                stok = self.peek()
                if stok.kind == "STRING":
                    self.next()
                    label = _unescape(stok.text)
                else:
                    self.error("E-SYN-001", "label expects a quoted string")
            else:
                self.error("E-SYN-001", f"unknown piece field '{word}'", tok.span)
                self.skip_field_value()
        if len(boundary) < 3:
            self.error(
                "E-SYN-002",
                f"piece '{name}' needs a boundary of at least 3 points",
                self.spans.get(name),
            )
            return
        if len(allowance) == 1:
            allowance = allowance * len(boundary)
        self.pieces.append(
            ir.PatternPiece(
                id=name,
                boundary=tuple(boundary),
                grainline_deg=grain,
                allowance_cm=tuple(allowance),
                label=label,
            )
        )

    def skip_field_value(self) -> None:
        while True:
            tok = self.peek()
            if tok.kind in ("EOF", "IDENT"):
                return
            if tok.kind == "PUNCT" and tok.text == "}":
                return
            self.next()

    def parse_side(self) -> ir.SeamSide | None:
        piece = self.expect_ident("piece id")
        if piece is None:
            return None
        if not self.expect_punct("."):
            return None
        edge = self.expect_int("edge index")
        if edge is None:
            return None
        t0, t1 = 0.0, 1.0
        if self.peek().kind == "PUNCT" and self.peek().text == "[":
            self.next()
            a = self.expect_number("range start")
            if a is None or not self.expect_punct(":"):
                return None
            b = self.expect_number("range end")
            if b is None or not self.expect_punct("]"):
                return None
            t0, t1 = a, b
        return ir.SeamSide(piece_id=piece, edge_index=edge, t0=t0, t1=t1)

    def parse_seam(self) -> None:
        name = self.parse_block_header("seam")
        if name is None:
            return
        side_a: ir.SeamSide | None = None
        side_b: ir.SeamSide | None = None
        ease = 1.0
        stitch = "plain"
        flip = False
        after: list[str] = []
        seen: set[str] = set()
        for tok in self.block_fields("seam", name):
            word = tok.text
            if word in seen and word != "after":
                self.error("E-SYN-003", f"duplicate field '{word}'", tok.span)
            seen.add(word)
            if word == "a":
                side_a = self.parse_side()
            elif word == "b":
                side_b = self.parse_side()
            elif word == "ease":
                value = self.expect_number("ease ratio")
                if value is not None:
                    ease = value
            elif word == "stitch":
                value = self.expect_ident("stitch class")
                if value is not None:
                    stitch = value
            elif word == "flip":
                flip = True
            elif word == "after":
                dep = self.expect_ident("seam id")
                if dep is not None:
                    after.append(dep)
            else:
                self.error("E-SYN-001", f"unknown seam field '{word}'", tok.span)
                self.skip_field_value()
        if side_a is None or side_b is None:
            self.error(
                "E-SYN-002",
                f"seam '{name}' needs both sides a and b",
                self.spans.get(name),
            )
            return
        self.seams.append(
            ir.SeamEdge(
                id=name,
                side_a=side_a,
                side_b=side_b,
                ease_ratio=ease,
                stitch_class=stitch,
                flip=flip,
                sew_after=tuple(after),
            )
        )

    def parse_dart(self) -> None:
        name = self.parse_block_header("dart")
        if name is None:
            return
        piece: str | None = None
        apex: tuple[float, float] | None = None
        legs: list[tuple[int, float]] = []
        for tok in self.block_fields("dart", name):
            word = tok.text
            if word == "piece":
                piece = self.expect_ident("piece id")
            elif word == "apex":
                apex = self.parse_point()
            elif word == "leg":
                edge = self.expect_int("leg edge index")
                t = self.expect_number("leg fraction")
                if edge is not None and t is not None:
                    legs.append((edge, t))
            else:
                self.error("E-SYN-001", f"unknown dart field '{word}'", tok.span)
                self.skip_field_value()
        if piece is None or apex is None or len(legs) != 2:
            self.error(
                "E-SYN-002",
                f"dart '{name}' needs piece, apex and exactly two legs",
                self.spans.get(name),
            )
            return
        self.darts.append(
            ir.Dart(id=name, piece_id=piece, apex=apex, legs=(legs[0], legs[1]))
        )

    def parse_notch(self) -> None:
        name = self.parse_block_header("notch")
        if name is None:
            return
        piece: str | None = None
        edge: int | None = None
        t: float | None = None
        pair = ""
        for tok in self.block_fields("notch", name):
            word = tok.text
            if word == "piece":
                piece = self.expect_ident("piece id")
            elif word == "edge":
                edge = self.expect_int("edge index")
                t = self.expect_number("edge fraction")
            elif word == "pair":
                value = self.expect_ident("notch id")
                if value is not None:
                    pair = value
            else:
                self.error("E-SYN-001", f"unknown notch field '{word}'", tok.span)
                self.skip_field_value()
        if piece is None or edge is None or t is None:
            self.error(
                "E-SYN-002",
                f"notch '{name}' needs piece and edge position",
                self.spans.get(name),
            )
            return
        self.notches.append(
            ir.Notch(id=name, piece_id=piece, edge_index=edge, t=t, pair_id=pair)
        )

    def parse_region(self) -> None:
        name = self.parse_block_header("region")
        if name is None:
            return
        piece_ids: list[str] = []
        material: str | None = None
        for tok in self.block_fields("region", name):
            word = tok.text
            if word == "pieces":
                while self.peek().kind == "IDENT" and self.peek().text not in (
                    "material",
                    "pieces",
                ):
                    piece_ids.append(self.next().text)
            elif word == "material":
                material = self.expect_ident("material id")
            else:
                self.error("E-SYN-001", f"unknown region field '{word}'", tok.span)
                self.skip_field_value()
        if material is None or not piece_ids:
            self.error(
                "E-SYN-002",
                f"region '{name}' needs pieces and a material",
                self.spans.get(name),
            )
            return
        self.regions.append(
            ir.MaterialRegion(
                id=name, piece_ids=tuple(piece_ids), material_id=material
            )
        )


def _unescape(quoted: str) -> str:
    body = quoted[1:-1]
    return (
        body.replace("\\\\", "\x00")
        .replace('\\"', '"')
        .replace("\\n", "\n")
        .replace("\x00", "\\")
    )


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    )


def parse(text: str | bytes) -> ParseResult:
    """Parse .tir source into a validated garment graph.

    Never raises: lexical, syntactic and structural problems all come
    back as diagnostics with source positions, and a graph is returned
    only when there are none.
    """
    try:
        if isinstance(text, bytes):
            try:
                text = text.decode("utf-8")
            except UnicodeDecodeError as exc:
                span = Span(1, 1, exc.start)
                return ParseResult(
                    None,
                    [ParseDiagnostic("E-LEX-004", "input is not valid UTF-8", span)],
                )
        tokens, diags = _tokenize(text)
        parser = _Parser(tokens)
        parser.parse_file()
        diags.extend(parser.diags)
        if parser.garment_class is None:
            diags.append(
                ParseDiagnostic(
                    "E-SYN-002",
                    "missing garment statement",
                    Span(1, 1, 0),
                )
            )
        if diags:
            return ParseResult(None, diags)
        try:
            graph = ir.build_graph(
                garment_class=parser.garment_class,
                pieces=parser.pieces,
                seams=parser.seams,
                darts=parser.darts,
                notches=parser.notches,
                regions=parser.regions,
                openings_override=parser.openings,
            )
        except ir.GraphError as exc:
            span = parser.spans.get(exc.locus, Span(1, 1, 0))
            return ParseResult(None, [ParseDiagnostic(exc.code, str(exc), span)])
        return ParseResult(graph, [])
    except RecursionError:  # pathological nesting; report, never crash
        return ParseResult(
            None, [ParseDiagnostic("E-INT-001", "input too deeply nested", Span(1, 1, 0))]
        )


def parse_file(path) -> ParseResult:
    from pathlib import Path

    return parse(Path(path).read_bytes())


# -- canonical printing ----------------------------------------------


def _fmt(value: float) -> str:
    """Shortest decimal that round-trips to the same float."""
    return repr(float(value))


def _fmt_point(pt: tuple[float, float]) -> str:
    return f"({_fmt(pt[0])}, {_fmt(pt[1])})"


def _fmt_side(side: ir.SeamSide) -> str:
    return (
        f"{side.piece_id}.{side.edge_index} "
        f"[{_fmt(side.t0)}:{_fmt(side.t1)}]"
    )


def print_canonical(graph: ir.GarmentGraph) -> str:
    """Canonical text form: sorted ids, fixed field order, explicit
    defaults for seam ranges, ease and stitch. Stable byte-for-byte."""
    out: list[str] = []
    line = f"garment {graph.garment_class}"
    if graph.openings_override is not None:
        line += f" openings {graph.openings_override}"
    out.append(line)

    for p in sorted(graph.pieces, key=lambda x: x.id):
        out.append("")
        out.append(f"piece {p.id} {{")
        pts = " ".join(_fmt_point(pt) for pt in p.boundary)
        out.append(f"  boundary {pts}")
        out.append(f"  grain {_fmt(p.grainline_deg)}")
        if p.allowance_cm:
            out.append(
                "  allowance " + " ".join(_fmt(a) for a in p.allowance_cm)
            )
        if p.label:
            out.append(f'  label "{_escape(p.label)}"')
        out.append("}")

    for s in sorted(graph.seams, key=lambda x: x.id):
        out.append("")
        out.append(f"seam {s.id} {{")
        out.append(f"  a {_fmt_side(s.side_a)}")
        out.append(f"  b {_fmt_side(s.side_b)}")
        out.append(f"  ease {_fmt(s.ease_ratio)}")
        out.append(f"  stitch {s.stitch_class}")
        if s.flip:
            out.append("  flip")
        for dep in sorted(s.sew_after):
            out.append(f"  after {dep}")
        out.append("}")

    for d in sorted(graph.darts, key=lambda x: x.id):
        out.append("")
        out.append(f"dart {d.id} {{")
        out.append(f"  piece {d.piece_id}")
        out.append(f"  apex {_fmt_point(d.apex)}")
        for edge, t in d.legs:
            out.append(f"  leg {edge} {_fmt(t)}")
        out.append("}")

    for n in sorted(graph.notches, key=lambda x: x.id):
        out.append("")
        out.append(f"notch {n.id} {{")
        out.append(f"  piece {n.piece_id}")
        out.append(f"  edge {n.edge_index} {_fmt(n.t)}")
        if n.pair_id:
            out.append(f"  pair {n.pair_id}")
        out.append("}")

    for r in sorted(graph.regions, key=lambda x: x.id):
        out.append("")
        out.append(f"region {r.id} {{")
        out.append("  pieces " + " ".join(sorted(r.piece_ids)))
        out.append(f"  material {r.material_id}")
        out.append("}")

    return "\n".join(out) + "\n"


def is_canonical(text: str) -> bool:
    result = parse(text)
    if result.graph is None:
        return False
    return print_canonical(result.graph) == text
