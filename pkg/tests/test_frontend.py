import pytest
from hypothesis import given, strategies as st

from cito.frontend import LoweringError, MinijSyntaxError, NameResolutionError, lower, parse, pretty
from cito.frontend import syntax as ast
from cito.frontend.printer import expr
from cito.model import Comparison, Opaque, Or
from cito.synth import SynthSpec, generate_program


def lower_src(src: str):
    return lower(parse(src), name="t")


def test_sample_classes_and_calls(abc):
    assert [c.name for c in abc.classes] == ["A", "B", "C"]
    sites = {(s.caller_class, s.caller_method, s.target_class, s.target_member) for s in abc.call_sites()}
    assert ("A", "methodA1", "B", "methodB1") in sites
    assert ("B", "methodB3", "C", "methodC2") in sites
    assert ("C", "methodC3", "A", "methodA4") in sites


def test_sample_branch_predicates(abc):
    cfg = abc.method("A", "methodA3").body
    (pred,) = [b.branch.predicate for b in cfg.blocks if b.branch]
    assert pred == Or((Comparison("x", ">", 3), Comparison("y", "<", 5)))


def test_comments_and_modifiers():
    m = lower_src("""
        /* block
           comment */
        public class A { private int x; // trailing
            public final void f() { x = 1; } }
    """)
    assert m.cls("A").attribute_map["x"].type == "int"


def test_unterminated_comment():
    with pytest.raises(MinijSyntaxError):
        parse("class A { } /* oops")


def test_syntax_error_position():
    with pytest.raises(MinijSyntaxError) as err:
        parse("class A {\n  void f() { x = ; }\n}")
    assert err.value.line == 2


def test_undeclared_name():
    with pytest.raises(NameResolutionError):
        lower_src("class A { void f() { y = 1; } }")


def test_break_outside_switch_tail():
    with pytest.raises(LoweringError):
        lower_src("class A { int x; void f() { while (x > 1) { break; } } }")


def test_unreachable_statement():
    with pytest.raises(LoweringError):
        lower_src("class A { int f() { return 1; return 2; } }")


def test_member_access_in_field_initialiser():
    with pytest.raises(LoweringError):
        lower_src("class B { int v; } class A { B b = new B(); int x = b.v; }")


def test_inherited_member_resolves_to_declaring_class():
    m = lower_src("""
        class P { int v; int g() { return v; } }
        class Q extends P { }
        class R { Q q = new Q(); void f() { q.g(); } }
    """)
    (site,) = [s for s in m.call_sites() if s.caller_class == "R"]
    assert (site.target_class, site.target_member) == ("P", "g")


def test_call_in_condition_is_opaque_with_call():
    m = lower_src("class B { int g() { return 1; } } class A { B b = new B(); void f() { if (b.g() > 0) { b.g(); } } }")
    (pred,) = [blk.branch.predicate for blk in m.method("A", "f").body.blocks if blk.branch]
    assert isinstance(pred, Opaque) and pred.call.target_member == "g"


def test_switch_without_default_gets_implicit_arm():
    m = lower_src("class A { void f(int x) { int t = 0; switch (x) { case 1: t = 1; break; case 2: t = 2; break; } } }")
    (br,) = [b.branch for b in m.method("A", "f").body.blocks if b.branch]
    assert br.kind == "switch" and br.arms == 3


def test_assigns_marks_own_attribute():
    m = lower_src("class B { int g() { return 1; } } class A { int k; B b = new B(); void f() { k = b.g(); } }")
    (s,) = [s for s in m.cls("A").statements() if s.call]
    assert s.assigns == "k"


# ---- round trips

names = st.sampled_from(["x", "y", "z", "t"])
# the parser reads "-1" as unary minus, so literals are never negative
literals = st.one_of(
    st.integers(0, 50),
    st.booleans(),
    st.floats(0, 1e3, allow_nan=False, allow_infinity=False),
).map(ast.Literal)
exprs = st.recursive(
    st.one_of(literals, names.map(ast.Name)),
    lambda sub: st.one_of(
        st.tuples(st.sampled_from(["+", "-", "*", "/", "<", ">=", "==", "&&", "||"]), sub, sub).map(
            lambda t: ast.Binary(*t)
        ),
        st.tuples(st.sampled_from(["!", "-"]), sub).map(lambda t: ast.Unary(*t)),
        st.tuples(sub, names).map(lambda t: ast.FieldAccess(*t)),
        st.tuples(st.none() | sub, names, st.lists(sub, max_size=2).map(tuple)).map(lambda t: ast.Call(*t)),
    ),
    max_leaves=8,
)


@given(exprs)
def test_expression_print_parse_roundtrip(e):
    prog = parse(f"class K {{ void f() {{ t = {expr(e)}; }} }}")
    (stmt,) = prog.classes[0].methods[0].body.stmts
    assert stmt.value == e


@given(st.integers(0, 10_000), st.integers(1, 6), st.floats(0, 1), st.floats(0, 1))
def test_program_print_parse_roundtrip(seed, n, density, branches):
    prog = generate_program(SynthSpec(classes=n, edge_density=density, branch_density=branches, seed=seed))
    text = pretty(prog)
    assert parse(text) == prog
    assert pretty(parse(text)) == text


def test_sample_print_parse_roundtrip():
    from cito.frontend import parse_files
    from cito.samples import abc_paths
    prog = parse_files(abc_paths())
    assert parse(pretty(prog)) == prog
