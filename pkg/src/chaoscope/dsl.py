"""Text format for user-defined cover towers (``.cover`` files).

A document names each level's cycles and gives, per cycle, the image formula
over the symbols of the level below.  Grammar (EBNF)::

    document      := header level+
    header        := "cover" IDENT "mode" ("bouquet" | "materialized")
    level         := "level" INT "{" cycle+ "}"
    cycle         := "c" INT ("[" INT "]")? ":=" formula ";"
    formula       := term ("+" term)*
    term          := coefficient? atom | comprehension
    coefficient   := INT | IDENT          (IDENT only inside a comprehension)
    atom          := "e" | "c" INT
    comprehension := "sum" "(" IDENT "=" INT ".." BOUND ")" "{" formula "}"
    BOUND         := INT | "k"

``e`` is the base self-loop of the level below, ``cI`` its cycle ``I``; a
coefficient repeats the atom.  ``k`` resolves to twice the total edge count
of the level below.  Integers are decimal and unbounded, whitespace is
insignificant, ``#`` starts a comment.  Level 0 (the single base vertex) is
implicit; blocks must be contiguous from level 1.  The optional ``[length]``
annotation declares the cycle's expected length and is checked against the
formula.

Comprehensions are the one macro form and stay unexpanded through parse,
serialize and JSON export; validation inverts their quadratic length prefix
instead of expanding, so documents describing astronomically deep levels
stay cheap to check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .bouquet import (
    BlockSum,
    BlockTerm,
    Formula,
    FormulaItem,
    LevelSpec,
    Run,
    build_level_spec,
)
from .errors import ChaoscopeError

DOCUMENT_MODES = ("bouquet", "materialized")


class DslSyntaxError(ChaoscopeError):
    """First-error diagnostic with 1-based line and column."""

    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


# ---------------------------------------------------------------------------
# Document model (mirrors the grammar).
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DocTerm:
    coef: int | str  # loop-variable name when symbolic
    atom: int        # 0 = base edge, i >= 1 = cycle i of the level below


@dataclass(frozen=True)
class DocSum:
    var: str
    lo: int
    bound: int | None  # None encodes the symbolic bound "k"
    body: tuple["DocTerm | DocSum", ...]


DocElement = DocTerm | DocSum


@dataclass(frozen=True)
class CycleDecl:
    index: int
    terms: tuple[DocElement, ...]
    declared_length: int | None = None


@dataclass(frozen=True)
class LevelBlock:
    level: int
    cycles: tuple[CycleDecl, ...]


@dataclass(frozen=True)
class CoverDocument:
    name: str
    mode: str
    levels: tuple[LevelBlock, ...]


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    level: int | None = None
    cycle: int | None = None

    def __str__(self) -> str:
        where = ""
        if self.level is not None:
            where = f" (level {self.level}" + (
                f", c{self.cycle})" if self.cycle is not None else ")")
        return f"{self.code}{where}: {self.message}"


# ---------------------------------------------------------------------------
# Lexer.
# ---------------------------------------------------------------------------

_KEYWORDS = {"cover", "mode", "level", "sum"} | set(DOCUMENT_MODES)
_PUNCT_2 = (":=", "..")
_PUNCT_1 = "{}()[];+="


@dataclass(frozen=True)
class _Token:
    kind: str  # int | cycle | edge | kbound | ident | kw | punct | eof
    value: object
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        two = text[i:i + 2]
        if two in _PUNCT_2:
            tokens.append(_Token("punct", two, start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT_1:
            tokens.append(_Token("punct", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", int(text[i:j]), start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            col += j - i
            i = j
            if word == "e":
                tokens.append(_Token("edge", word, start_line, start_col))
            elif word == "k":
                tokens.append(_Token("kbound", word, start_line, start_col))
            elif word in _KEYWORDS:
                tokens.append(_Token("kw", word, start_line, start_col))
            elif word[0] == "c" and word[1:].isdigit():
                tokens.append(_Token("cycle", int(word[1:]), start_line, start_col))
            else:
                tokens.append(_Token("ident", word, start_line, start_col))
            continue
        raise DslSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("eof", None, line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser.
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str) -> DslSyntaxError:
        tok = self.peek()
        shown = "end of input" if tok.kind == "eof" else repr(tok.value)
        return DslSyntaxError(f"{message}, found {shown}", tok.line, tok.col)

    def expect_punct(self, value: str) -> None:
        tok = self.peek()
        if tok.kind != "punct" or tok.value != value:
            raise self.fail(f"expected {value!r}")
        self.next()

    def expect_kw(self, value: str) -> None:
        tok = self.peek()
        if tok.kind != "kw" or tok.value != value:
            raise self.fail(f"expected keyword {value!r}")
        self.next()

    def expect_int(self) -> int:
        tok = self.peek()
        if tok.kind != "int":
            raise self.fail("expected an integer")
        return self.next().value

    def document(self) -> CoverDocument:
        self.expect_kw("cover")
        tok = self.peek()
        if tok.kind != "ident":
            raise self.fail("expected a document name")
        name = self.next().value
        self.expect_kw("mode")
        tok = self.peek()
        if tok.kind != "kw" or tok.value not in DOCUMENT_MODES:
            raise self.fail("expected 'bouquet' or 'materialized'")
        mode = self.next().value
        levels = [self.level_block()]
        while self.peek().kind == "kw" and self.peek().value == "level":
            levels.append(self.level_block())
        tok = self.peek()
        if tok.kind != "eof":
            raise self.fail("expected 'level' or end of input")
        return CoverDocument(name, mode, tuple(levels))

    def level_block(self) -> LevelBlock:
        self.expect_kw("level")
        index = self.expect_int()
        self.expect_punct("{")
        cycles = [self.cycle_decl()]
        while self.peek().kind == "cycle":
            cycles.append(self.cycle_decl())
        self.expect_punct("}")
        return LevelBlock(index, tuple(cycles))

    def cycle_decl(self) -> CycleDecl:
        tok = self.peek()
        if tok.kind != "cycle":
            raise self.fail("expected a cycle declaration like 'c1'")
        index = self.next().value
        declared = None
        if self.peek().kind == "punct" and self.peek().value == "[":
            self.next()
            declared = self.expect_int()
            self.expect_punct("]")
        self.expect_punct(":=")
        terms = self.formula()
        self.expect_punct(";")
        return CycleDecl(index, terms, declared)

    def formula(self) -> tuple[DocElement, ...]:
        terms = [self.term()]
        while self.peek().kind == "punct" and self.peek().value == "+":
            self.next()
            terms.append(self.term())
        return tuple(terms)

    def term(self) -> DocElement:
        tok = self.peek()
        if tok.kind == "kw" and tok.value == "sum":
            return self.comprehension()
        coef: int | str = 1
        if tok.kind == "int":
            coef = self.next().value
        elif tok.kind == "ident":
            coef = self.next().value
        tok = self.peek()
        if tok.kind == "edge":
            self.next()
            return DocTerm(coef, 0)
        if tok.kind == "cycle":
            return DocTerm(coef, self.next().value)
        raise self.fail("expected 'e' or a cycle reference")

    def comprehension(self) -> DocSum:
        self.expect_kw("sum")
        self.expect_punct("(")
        tok = self.peek()
        if tok.kind != "ident":
            raise self.fail("expected a loop variable")
        var = self.next().value
        self.expect_punct("=")
        lo = self.expect_int()
        self.expect_punct("..")
        tok = self.peek()
        if tok.kind == "kbound":
            self.next()
            bound: int | None = None
        elif tok.kind == "int":
            bound = self.next().value
        else:
            raise self.fail("expected an integer bound or 'k'")
        self.expect_punct(")")
        self.expect_punct("{")
        body = self.formula()
        self.expect_punct("}")
        return DocSum(var, lo, bound, body)


def parse(text: str) -> CoverDocument:
    """Parse a cover document; raises :class:`DslSyntaxError` on the first
    lexical or syntactic problem, with its location."""
    return _Parser(_tokenize(text)).document()


# ---------------------------------------------------------------------------
# Canonical serialization.
# ---------------------------------------------------------------------------

def _render_atom(atom: int) -> str:
    return "e" if atom == 0 else f"c{atom}"


def _render_element(el: DocElement) -> str:
    if isinstance(el, DocTerm):
        if el.coef == 1:
            return _render_atom(el.atom)
        return f"{el.coef} {_render_atom(el.atom)}"
    bound = "k" if el.bound is None else str(el.bound)
    body = " + ".join(_render_element(t) for t in el.body)
    return f"sum({el.var}={el.lo}..{bound}){{ {body} }}"


def serialize(doc: CoverDocument) -> str:
    """Canonical text form; ``parse(serialize(doc))`` is structurally ``doc``."""
    lines = [f"cover {doc.name} mode {doc.mode}", ""]
    for block in doc.levels:
        lines.append(f"level {block.level} {{")
        for cyc in block.cycles:
            ann = "" if cyc.declared_length is None else f"[{cyc.declared_length}]"
            body = " + ".join(_render_element(t) for t in cyc.terms)
            lines.append(f"  c{cyc.index}{ann} := {body};")
        lines.append("}")
    return "\n".join(lines) + "\n"


def document_json(doc: CoverDocument) -> dict:
    """JSON mirror of the parsed document, 1:1 with the grammar."""
    def element(el: DocElement) -> dict:
        if isinstance(el, DocTerm):
            return {"coef": str(el.coef), "atom": _render_atom(el.atom)}
        return {"sum": {"var": el.var, "from": el.lo,
                        "to": "k" if el.bound is None else str(el.bound),
                        "body": [element(t) for t in el.body]}}

    return {
        "cover": doc.name,
        "mode": doc.mode,
        "levels": [
            {"level": b.level,
             "cycles": [
                 {"index": c.index,
                  "declared_length": None if c.declared_length is None
                  else str(c.declared_length),
                  "formula": [element(t) for t in c.terms]}
                 for c in b.cycles]}
            for b in doc.levels],
    }


# ---------------------------------------------------------------------------
# Validation and resolution.
# ---------------------------------------------------------------------------

def _first_atom(el: DocElement) -> DocTerm | None:
    while isinstance(el, DocSum):
        if not el.body:
            return None
        el = el.body[0]
    return el


def _last_atom(el: DocElement) -> DocTerm | None:
    while isinstance(el, DocSum):
        if not el.body:
            return None
        el = el.body[-1]
    return el


def _convert_terms(terms: tuple[DocElement, ...], k_below: int,
                   below_cycles: int, errs: list[str]) -> list[FormulaItem]:
    """Turn document elements into formula items, resolving 'k' bounds and
    shifting comprehension ranges to start at 1."""
    items: list[FormulaItem] = []
    for el in terms:
        if isinstance(el, DocTerm):
            if not isinstance(el.coef, int):
                errs.append(f"loop variable {el.coef!r} used outside a sum")
                continue
            if el.coef < 1:
                errs.append(f"count {el.coef} must be positive")
                continue
            if el.atom > below_cycles:
                errs.append(f"unknown cycle c{el.atom} (level below has "
                            f"{below_cycles})")
                continue
            items.append(Run(el.atom, el.coef))
            continue
        bound = k_below if el.bound is None else el.bound
        if el.lo < 1:
            errs.append(f"sum must start at 1 or later, got {el.lo}")
            continue
        if bound < el.lo:
            errs.append(f"empty sum: {el.lo}..{bound}")
            continue
        body: list[BlockTerm] = []
        shift = el.lo - 1  # rewrite sum(j=lo..b) as sum(j'=1..b-lo+1)
        for sub in el.body:
            if isinstance(sub, DocSum):
                errs.append("nested sums are not supported")
                body = []
                break
            if sub.atom > below_cycles:
                errs.append(f"unknown cycle c{sub.atom} (level below has "
                            f"{below_cycles})")
                body = []
                break
            if isinstance(sub.coef, int):
                if sub.coef < 1:
                    errs.append(f"count {sub.coef} must be positive")
                    body = []
                    break
                body.append(BlockTerm(sub.atom, sub.coef, 0))
            else:
                if sub.coef != el.var:
                    errs.append(f"unknown variable {sub.coef!r} in sum over "
                                f"{el.var!r}")
                    body = []
                    break
                body.append(BlockTerm(sub.atom, shift, 1))
        if body:
            items.append(BlockSum(bound - shift, tuple(body)))
    return items


def validate_document(doc: CoverDocument) -> list[Violation]:
    """Structural validation; returns every violation found (empty = valid)."""
    violations: list[Violation] = []
    if doc.mode not in DOCUMENT_MODES:
        violations.append(Violation("BadMode", f"unknown mode {doc.mode!r}"))
    below_lengths: tuple[int, ...] = ()
    k_below = 2
    for expected, block in enumerate(doc.levels, start=1):
        if block.level != expected:
            violations.append(Violation(
                "NonContiguousLevels",
                f"expected level {expected}, found {block.level}",
                level=block.level))
        indices = [c.index for c in block.cycles]
        if indices != list(range(1, len(indices) + 1)):
            if len(set(indices)) != len(indices):
                violations.append(Violation(
                    "DuplicateCycle", f"duplicate cycle indices {indices}",
                    level=block.level))
            else:
                violations.append(Violation(
                    "NonContiguousCycles",
                    f"cycle indices {indices} are not 1..{len(indices)}",
                    level=block.level))
        new_lengths = []
        for cyc in block.cycles:
            errs: list[str] = []
            items = _convert_terms(cyc.terms, k_below, len(below_lengths), errs)
            for msg in errs:
                code = "UnknownCycle" if "unknown cycle" in msg else (
                    "NestedSum" if "nested" in msg else (
                        "EmptySum" if "empty sum" in msg else "BadTerm"))
                violations.append(Violation(code, msg, block.level, cyc.index))
            first = _first_atom(cyc.terms[0])
            last = _last_atom(cyc.terms[-1])
            if first is None or first.atom != 0 or last is None or last.atom != 0:
                violations.append(Violation(
                    "EdgeBoundViolation",
                    "image formulas must begin and end with an edge term",
                    block.level, cyc.index))
            if errs or not items:
                new_lengths.append(0)
                continue
            try:
                formula = Formula(items, below_lengths)
            except ChaoscopeError as exc:
                violations.append(Violation("BadTerm", str(exc),
                                            block.level, cyc.index))
                new_lengths.append(0)
                continue
            if formula.length < 2:
                violations.append(Violation(
                    "CycleTooShort",
                    f"cycle length {formula.length} (need at least 2)",
                    block.level, cyc.index))
            if cyc.declared_length is not None and \
                    cyc.declared_length != formula.length:
                violations.append(Violation(
                    "LengthMismatch",
                    f"declared length {cyc.declared_length} but the formula "
                    f"expands to {formula.length}",
                    block.level, cyc.index))
            new_lengths.append(formula.length)
        below_lengths = tuple(new_lengths)
        k_below = 2 * (1 + sum(below_lengths))
    return violations


def document_tower(doc: CoverDocument) -> list[LevelSpec]:
    """Resolve a valid document into level specs (index = level).

    Spec ``n`` carries level ``n``'s cycle lengths and the formulas of level
    ``n+1``'s cycles; the deepest spec has no formulas (the document ends).
    """
    problems = validate_document(doc)
    if problems:
        raise ChaoscopeError("invalid document: " + "; ".join(
            str(v) for v in problems[:3]))
    tower: list[LevelSpec] = []
    below_lengths: tuple[int, ...] = ()
    k_below = 2
    for block in doc.levels:
        errs: list[str] = []
        formulas = tuple(
            Formula(_convert_terms(c.terms, k_below, len(below_lengths), errs),
                    below_lengths)
            for c in block.cycles)
        tower.append(LevelSpec(block.level - 1, below_lengths, k_below, formulas))
        below_lengths = tuple(f.length for f in formulas)
        k_below = 2 * (1 + sum(below_lengths))
    tower.append(LevelSpec(len(doc.levels), below_lengths, k_below, ()))
    return tower


# ---------------------------------------------------------------------------
# The built-in construction as a document.
# ---------------------------------------------------------------------------

def builtin_document(max_level: int, name: str = "builtin") -> CoverDocument:
    """The tower's own definition, written in the DSL up to ``max_level``."""
    blocks = []
    for n in range(1, max_level + 1):
        cycles = []
        if n == 1:
            cycles.append(CycleDecl(1, (DocTerm(10, 0),)))
        else:
            below = build_level_spec(n - 1)
            head: list[DocElement] = [
                DocSum("j", 1, None, (DocTerm("j", 0), DocTerm(2, 1))),
                DocTerm(1, 0),
            ]
            head.extend(DocTerm(2, i) for i in range(2, n))
            head.append(DocTerm(1, 0))
            cycles.append(CycleDecl(1, tuple(head)))
            for i in range(2, n):
                mid: list[DocElement] = [DocTerm(1, 0)]
                mid.extend(DocTerm(2, i2) for i2 in range(i, n))
                mid.append(DocTerm(1, 0))
                cycles.append(CycleDecl(i, tuple(mid)))
            top = (n + 1) ** 2 * sum(below.cycle_lengths)
            cycles.append(CycleDecl(n, (DocTerm(top, 0),)))
        blocks.append(LevelBlock(n, tuple(cycles)))
    return CoverDocument(name, "bouquet", tuple(blocks))


def _normalize_items(items: tuple[FormulaItem, ...]) -> tuple[FormulaItem, ...]:
    out: list[FormulaItem] = []
    for item in items:
        if (isinstance(item, Run) and out and isinstance(out[-1], Run)
                and out[-1].cycle == item.cycle):
            out[-1] = Run(item.cycle, out[-1].count + item.count)
        else:
            out.append(item)
    return tuple(out)


def builtin_equivalence(doc: CoverDocument, up_to_level: int) -> bool:
    """Whether the document's term lists match the programmatic generator for
    every level up to ``up_to_level`` (after run merging and bound
    resolution)."""
    if validate_document(doc):
        return False
    if len(doc.levels) < up_to_level:
        return False
    tower = document_tower(doc)
    for n in range(1, up_to_level + 1):
        doc_spec = tower[n - 1]
        ref_spec = build_level_spec(n - 1)
        if len(doc_spec.image_formulas) != len(ref_spec.image_formulas):
            return False
        for mine, ref in zip(doc_spec.image_formulas, ref_spec.image_formulas):
            if _normalize_items(mine.items) != _normalize_items(ref.items):
                return False
            if mine.length != ref.length:
                return False
    return True
