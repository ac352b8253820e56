"""Cover-document parsing, serialization, validation, builtin equivalence."""

from __future__ import annotations

import json

import pytest

from chaoscope import (
    DslSyntaxError,
    builtin_document,
    builtin_equivalence,
    document_json,
    document_tower,
    materialize_graph,
    parse,
    serialize,
    validate_document,
)
from chaoscope.dsl import CycleDecl, DocSum, DocTerm
from chaoscope.verify import DSL_MUTATIONS, rejection_stage

MINIMAL = """\
cover demo mode bouquet

level 1 {
  c1 := 10 e;
}
"""


def test_minimal_document_parses():
    doc = parse(MINIMAL)
    assert doc.name == "demo" and doc.mode == "bouquet"
    assert doc.levels[0].cycles == (CycleDecl(1, (DocTerm(10, 0),)),)
    assert validate_document(doc) == []


def test_comprehension_expands_to_695():
    text = """\
cover demo mode bouquet
level 1 { c1 := 10 e; }
level 2 {
  c1 := sum(j=1..k){ j e + 2 c1 } + e + e;
  c2 := 90 e;
}
"""
    doc = parse(text)
    assert validate_document(doc) == []
    tower = document_tower(doc)
    assert tower[1].image_formulas[0].length == 695
    assert tower[2].cycle_lengths == (695, 90)


def test_formula_must_be_edge_bounded():
    doc = parse("cover x mode bouquet level 1 { c1 := c1 + e; }")
    codes = {v.code for v in validate_document(doc)}
    assert "EdgeBoundViolation" in codes


def test_syntax_error_carries_location():
    with pytest.raises(DslSyntaxError) as err:
        parse("cover x mode bouquet\nlevel 1 { c1 := ; }")
    assert err.value.line == 2
    assert "found" in str(err.value)


def test_comments_and_whitespace_are_insignificant():
    text = "cover x mode bouquet  # header\nlevel 1 {\n  # the only cycle\n  c1:=10 e;\n}"
    assert parse(text) == parse("cover x mode bouquet level 1 { c1 := 10 e; }")


def test_declared_length_mismatch():
    doc = parse("cover x mode bouquet level 1 { c1[696] := 10 e; }")
    codes = {v.code for v in validate_document(doc)}
    assert codes == {"LengthMismatch"}


def test_unknown_cycle_reference():
    doc = parse("""cover x mode bouquet
level 1 { c1 := 10 e; }
level 2 { c1 := e + 2 c1 + e; c2 := e + 2 c3 + e; }
""")
    codes = {v.code for v in validate_document(doc)}
    assert "UnknownCycle" in codes


def test_round_trip_is_structural_identity():
    for depth in (1, 2, 5):
        doc = builtin_document(depth)
        assert parse(serialize(doc)) == doc


def test_levelless_document_serializes_to_header_only():
    from chaoscope.dsl import CoverDocument

    assert serialize(CoverDocument("empty", "bouquet", ())) == \
        "cover empty mode bouquet\n\n"


def test_serialization_is_canonical_fixpoint():
    text = serialize(builtin_document(4))
    assert serialize(parse(text)) == text


def test_comprehension_survives_round_trip_unexpanded():
    doc = builtin_document(3)
    text = serialize(doc)
    assert "sum(j=1..k){ j e + 2 c1 }" in text
    reparsed = parse(text)
    assert isinstance(reparsed.levels[1].cycles[0].terms[0], DocSum)


def test_builtin_document_levels_up_to_five_are_equivalent():
    doc = builtin_document(5)
    assert validate_document(doc) == []
    assert builtin_equivalence(doc, 5)


def test_literal_k_equal_to_derived_k_is_still_equivalent():
    # writing the resolved bound 22 instead of "k" is the same construction
    text = serialize(builtin_document(2)).replace("sum(j=1..k)", "sum(j=1..22)")
    assert builtin_equivalence(parse(text), 2)


def test_split_edge_runs_normalize_before_comparison():
    text = serialize(builtin_document(2)).replace("+ e + e;", "+ 2 e;")
    assert builtin_equivalence(parse(text), 2)


def test_every_mutant_is_rejected():
    canonical = serialize(builtin_document(5))
    assert len(DSL_MUTATIONS) >= 20
    stages = set()
    for name, find, replace in DSL_MUTATIONS:
        assert find in canonical, name
        stage = rejection_stage(canonical.replace(find, replace, 1), 5)
        assert stage is not None, f"mutant accepted: {name}"
        stages.add(stage)
    assert stages == {"syntax", "validation", "equivalence"}


def test_random_documents_round_trip():
    import random

    from chaoscope.dsl import CoverDocument, LevelBlock

    rng = random.Random(77)

    def random_formula(below, var_ok):
        terms = [DocTerm(rng.randrange(1, 50), 0)]
        for _ in range(rng.randrange(0, 4)):
            if below and rng.random() < 0.7:
                terms.append(DocTerm(rng.randrange(1, 4), rng.randrange(1, below + 1)))
            else:
                terms.append(DocTerm(rng.randrange(1, 30), 0))
        if var_ok and below and rng.random() < 0.4:
            body = (DocTerm("j", 0), DocTerm(2, rng.randrange(1, below + 1)))
            terms.insert(rng.randrange(0, len(terms) + 1),
                         DocSum("j", 1, rng.randrange(2, 9), body))
        terms.append(DocTerm(rng.randrange(1, 50), 0))
        return tuple(terms)

    for _ in range(40):
        depth = rng.randrange(1, 4)
        blocks = []
        for n in range(1, depth + 1):
            cycles = tuple(CycleDecl(i, random_formula(n - 1, var_ok=True))
                           for i in range(1, n + 1))
            blocks.append(LevelBlock(n, cycles))
        doc = CoverDocument("fuzz", "bouquet", tuple(blocks))
        assert validate_document(doc) == []
        text = serialize(doc)
        assert parse(text) == doc
        assert serialize(parse(text)) == text


def test_document_json_mirrors_grammar():
    record = document_json(builtin_document(2))
    assert record["cover"] == "builtin"
    level2 = record["levels"][1]
    sum_term = level2["cycles"][0]["formula"][0]["sum"]
    assert sum_term["var"] == "j" and sum_term["to"] == "k"
    assert json.dumps(record)  # JSON-serializable throughout


def test_document_tower_materializes():
    doc = builtin_document(2)
    tower = document_tower(doc)
    level = materialize_graph(2, spec_for=lambda n: tower[n])
    assert level.graph.vertex_count == 784


def test_materialized_mode_documents_parse():
    doc = parse("cover tiny mode materialized level 1 { c1 := 4 e; }")
    assert doc.mode == "materialized"
    assert validate_document(doc) == []
    tower = document_tower(doc)
    level = materialize_graph(1, spec_for=lambda n: tower[n])
    assert level.graph.vertex_count == 4
