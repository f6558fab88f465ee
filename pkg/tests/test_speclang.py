import json
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from facto.errors import LoadError, SpecSyntaxError
from facto.speclang import emit_report, load, parse, pretty, run
from facto.speclang.cli import main
from facto.speclang.corpus import DOCUMENTS, replay
from facto.speclang.generate import generate
from facto.speclang.report import Report
from facto.speclang.syntax import BARE, q, tokenize

ARROW = """\
# the walking arrow
category A {
  objects: a b;
  mor f: a -> b;
}
"""


def test_walking_arrow_document():
    env = load(ARROW)
    C = env.category("A")
    assert C.n_obj == 2 and C.n_mor == 3


@pytest.mark.parametrize("name", sorted(DOCUMENTS))
def test_parse_pretty_fixed_point(name):
    d = parse(DOCUMENTS[name])
    p = pretty(d)
    assert parse(p).decls == d.decls
    assert pretty(parse(p)) == p


def test_syntax_error_position():
    with pytest.raises(SpecSyntaxError) as e:
        parse("category X {\n  objects a;\n}\n")
    assert (e.value.line, e.value.col) == (2, 11)


def test_missing_composition_names_pair():
    text = "category X {\n objects: a b c;\n mor f: a -> b;\n mor g: b -> c;\n}\n"
    with pytest.raises(LoadError, match=r"pair g\.f"):
        load(text)


def test_unresolved_reference():
    with pytest.raises(LoadError, match="unresolved"):
        load(ARROW + "class K in A = perp_right(Nope);\n")


def test_duplicate_names():
    with pytest.raises(LoadError):
        load(ARROW + ARROW)


def test_group_document_matches_module(z2):
    T, em = z2
    env = load(DOCUMENTS["z2"])
    from facto.speclang.loader import em_of
    em2 = em_of(env, "T")
    assert [a.key() for a in em2.algebras] == [a.key() for a in em.algebras]
    assert em2.category.n_mor == em.category.n_mor


def test_presheaf_body():
    env = load(DOCUMENTS["walking-arrow"])
    P = env.get("P", ("presheaf",)).value
    assert P.sizes == (1, 2)
    assert P.validate().ok


def test_report_shape_and_stability():
    r = run(["verify", "--fs", "corpus:finset", "Epi", "Mono"])
    d = json.loads(emit_report(r))
    assert d["verdict"] == "pass" and d["witnesses"] == []
    assert {"verdict", "witnesses", "window", "timing_ms", "command"} <= set(d)
    assert emit_report(r) == emit_report(run(["verify", "--fs", "corpus:finset", "Epi", "Mono"]))
    assert Report.from_dict(d).as_dict() == d


def test_ladder_witness_in_report():
    r = run(["verify", "--dfs", "corpus:finset", "EEM"])
    assert r.verdict == "fail" and r.exit_code == 1
    w = r.witnesses[0]
    assert w["kind"] == "ladder" and len(w["ids"]) == 6
    assert w["filler_status"] in ("missing", "extra")


def test_hypothesis_failed_names_gate():
    r = run(["verify", "--roundtrip", "corpus:systems", "EMI"])
    assert r.verdict == "hypothesis-failed" and r.exit_code == 2
    env = load(DOCUMENTS["systems"])
    from facto.ortho import qfs_hypotheses
    gate = qfs_hypotheses(env.category("S"), env.get("EMI", ("dfs",)).value)
    assert r.hypothesis == gate.hypothesis == "(ii) e o j in E with j not iso"
    assert r.hypothesis_witness == gate.hypothesis_witness


def test_replay_reproduces_and_rejects_tampering(tmp_path):
    r = run(["verify", "--qfs", "corpus:systems", "QEMI"])
    assert r.verdict == "fail"
    path = tmp_path / "r.json"
    path.write_bytes(emit_report(r))
    assert replay(str(path)).verdict == "pass"
    d = json.loads(path.read_text())
    w = d["witnesses"][0]
    C = load(DOCUMENTS["systems"]).category("S")
    f, g = w["ids"]
    # an identity pair never violates 2-out-of-3
    w["ids"] = [int(C.ident[C.dom[f]]), int(C.ident[C.dom[f]])]
    path.write_text(json.dumps(d))
    assert replay(str(path)).verdict == "fail"


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["verify", "--fs", "corpus:finset", "Epi", "Mono"]) == 0
    assert main(["verify", "--fs", "corpus:finset", "Mono", "Epi"]) == 1
    assert main(["verify", "--roundtrip", "corpus:systems", "EMI"]) == 2
    assert main(["verify", "--fs", "corpus:finset", "Epi"]) == 3
    assert main(["nonsense"]) == 3
    bad = tmp_path / "bad.spec"
    bad.write_text("category X {\n objects a;\n}\n")
    assert main(["validate", str(bad)]) == 3
    assert "line 2" in capsys.readouterr().err


def test_cli_terminal_base_lists_two():
    r = run(["lt", "--enumerate", "corpus:walking-arrow", "One"])
    assert r.result["count"] == 2


def test_cli_out_and_text(tmp_path):
    out = tmp_path / "o.txt"
    assert main(["lt", "--enumerate", "corpus:walking-arrow", "W", "--format", "text", "--out", str(out)]) == 0
    assert out.read_text().startswith("$ facto lt --enumerate")


def test_console_script():
    p = subprocess.run([sys.executable, "-m", "facto.speclang.cli", "corpus", "--list"], capture_output=True)
    assert p.returncode == 0
    assert "finset" in json.loads(p.stdout)["documents"]


def test_generate_compose_roundtrip():
    text = generate(poset=["a<b", "b<c"], name="P")
    C = load(text).category("P")
    assert C.n_mor == 6
    F = load(generate(n_finset=2, name="F")).category("F")
    from facto.fincat import finset
    assert F.n_mor == finset(2).n_mor
    with pytest.raises(ValueError):
        generate(poset=["a<b", "b<a"])


def test_generate_builtin_preserves_structure():
    text = generate(builtin="chain(3)", name="K")
    env = load(text + "class I in K = iso(K);\nclass All in K = all(K);\ndfs D in K = (I, All, I);\n")
    assert env.category("K").n_mor == 6
    assert env.get("D", ("dfs",)) is not None


names = st.text(alphabet=st.characters(codec="utf-8", exclude_categories=("Cs", "Cc")), min_size=1, max_size=8)


@settings(max_examples=60, deadline=None)
@given(names, names, names)
def test_quoted_names_roundtrip(a, b, f):
    text = f"category {q('X')} {{\n  objects: {q(a)} {q(b)};\n  mor {q(f)}: {q(a)} -> {q(b)};\n}}\n"
    d = parse(text)
    assert parse(pretty(d)).decls == d.decls
    assert d.decls[0].body[0][1:] == (a, b)


@settings(max_examples=60, deadline=None)
@given(st.from_regex(BARE, fullmatch=True))
def test_bare_names_tokenize_whole(word):
    toks = tokenize(word)
    assert toks[0].text == word and toks[1].kind == "eof"
