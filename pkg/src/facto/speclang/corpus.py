"""Built-in documents, the checks run over them, and witness replay."""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import FactoError, NonCommutingSquare
from ..fincat import FinCategory
from ..ortho import bad_ladder, ladder_fillers, lift_fillers
from .commands import UsageError, load_document, run
from .report import Report

WALKING_ARROW = """\
category A {
  objects: a b;
  mor f: a -> b;
}
"""

DOCUMENTS: dict[str, str] = {}

DOCUMENTS["finset"] = """\
# Finite sets up to three elements with the (Epi, Mono) factorization system.
category S = finset(3);
class Epi in S = epi(S);
class Mono in S = mono(S);
class Iso in S = iso(S);
class All in S = all(S);
class MonoPerp in S = perp_right(Epi);
dfs EIM in S = (Epi, Iso, Mono);
dfs IEM in S = (Iso, Epi, Mono);
dfs EEM in S = (Epi, Epi, Mono);
"""

DOCUMENTS["walking-arrow"] = WALKING_ARROW + """\
# Presheaves on the walking arrow and on the terminal category.
category One = terminal();
window W on A = default();
class Epi in W = epi(W);
class Mono in W = mono(W);
presheaf Ya = representable(A, a);
presheaf Yb = representable(A, b);
presheaf Two = constant(A, 2);
presheaf P on A {
  # two elements over b, both restricting to the single element over a
  at a = {x};
  at b = {y0 y1};
  restrict f : y0 -> x, y1 -> x;
}
dfs K0 in W = topology(0);
dfs K1 in W = topology(1);
dfs K2 in W = topology(2);
dfs K3 in W = topology(3);
"""

DOCUMENTS["systems"] = """\
# Double factorization systems on small categories; (Epi, Mono, Iso) on
# finite sets fails the 2-out-of-3 property for its weak equivalences.
category S = finset(2);
class Epi in S = epi(S);
class Mono in S = mono(S);
class Iso in S = iso(S);
class All in S = all(S);
dfs EIM in S = (Epi, Iso, Mono);
dfs EMI in S = (Epi, Mono, Iso);
dfs IAI in S = (Iso, All, Iso);
qfs QEMI in S = from_dfs(EMI);
qfs QEIM in S = from_dfs(EIM);
category Ch = chain(3);
class ChIso in Ch = iso(Ch);
class ChAll in Ch = all(Ch);
dfs ChD in Ch = (ChIso, ChAll, ChIso);
dfs ChE in Ch = (ChAll, ChIso, ChIso);
category Top = preorder_spaces(2);
class RegEpi in Top = reg_epi(Top);
class Bim in Top = bim(Top);
class RegMono in Top = reg_mono(Top);
dfs TopD in Top = (RegEpi, Bim, RegMono);
qfs TopQ in Top = from_dfs(TopD);
"""

DOCUMENTS["z2"] = """\
# Z/2-sets with at most four elements, as algebras for X -> Z/2 x X.
group Z2 {
  elements: e g;
  table: g*g = e;
}
monad T = action(Z2, 4);
category S = base(T);
class Epi in S = epi(S);
class Mono in S = mono(S);
class Iso in S = iso(S);
dfs EIM in S = (Epi, Iso, Mono);
dfs IEM in S = (Iso, Epi, Mono);
dfs EMI in S = (Epi, Mono, Iso);
"""

DOCUMENTS["constant-limit"] = WALKING_ARROW + """\
# Constant presheaf functor left adjoint to global sections, sets up to 3 elements.
adjunction DG = constant_limit(3, A);
"""

DOCUMENTS["flagship"] = WALKING_ARROW + """\
# Coalgebras for y(a) x (-) on presheaves over the walking arrow.
presheaf Ya = representable(A, a);
presheaf Ya4 = product(Ya, constant(A, 4));
window W on A = default(Ya4);
comonad-product G on W = Ya;
"""

DOCUMENTS["coalgebra-variants"] = WALKING_ARROW + """\
# The terminal product comonad, the identity comonad, and a comonad that is not cartesian.
presheaf One = terminal(A);
window W on A = default();
comonad-product G1 on W = One;
comonad I on W = identity;
comonad R on W = restriction_image;
"""

# (check name, argv, expected verdict)
CHECKS: list[tuple[str, list[str], str]] = [
    ("finset-validate", ["validate", "corpus:finset"], "pass"),
    ("finset-fs", ["verify", "--fs", "corpus:finset", "Epi", "Mono"], "pass"),
    ("finset-perp", ["perp", "corpus:finset", "Epi"], "pass"),
    ("finset-factorize", ["factorize", "--fs", "corpus:finset", "Epi", "Mono", "m20"], "pass"),
    ("finset-dfs", ["verify", "--dfs", "corpus:finset", "EIM"], "pass"),
    ("finset-dfs-iem", ["verify", "--dfs", "corpus:finset", "IEM"], "pass"),
    ("finset-not-dfs", ["verify", "--dfs", "corpus:finset", "EEM"], "fail"),
    ("finset-wfs-wrong", ["verify", "--fs", "corpus:finset", "Mono", "Epi"], "fail"),
    ("arrow-fs", ["verify", "--fs", "corpus:walking-arrow", "Epi", "Mono"], "pass"),
    ("terminal-lt", ["lt", "--enumerate", "corpus:walking-arrow", "One"], "pass"),
    ("arrow-lt", ["lt", "--enumerate", "corpus:walking-arrow", "W"], "pass"),
    ("arrow-closure", ["lt", "--closure", "corpus:walking-arrow", "W"], "pass"),
    ("arrow-compare", ["lt", "--compare", "corpus:walking-arrow", "W", "0", "3"], "pass"),
] + [
    (f"arrow-dfs-k{i}", ["verify", "--dfs", "corpus:walking-arrow", f"K{i}"], "pass") for i in range(4)
] + [
    (f"arrow-from-dfs-k{i}", ["lt", "--from-dfs", "corpus:walking-arrow", f"K{i}"], "pass") for i in range(4)
] + [
    (f"arrow-cartesian-k{i}", ["cartesian", "corpus:walking-arrow", f"K{i}"], "pass") for i in range(4)
] + [
    ("arrow-bousfield-self", ["bousfield", "corpus:walking-arrow", "K2", "K2"], "pass"),
    ("arrow-bousfield-differ", ["bousfield", "corpus:walking-arrow", "K0", "K3"], "fail"),
    ("arrow-lemma1", ["lemma1", "corpus:walking-arrow", "K1"], "pass"),
    ("arrow-sheafify", ["sheaf", "--sheafify", "corpus:walking-arrow", "W"], "pass"),
    ("arrow-sheaf-check", ["sheaf", "--check", "corpus:walking-arrow", "W", "P"], "pass"),
    ("systems-roundtrip-eim", ["verify", "--roundtrip", "corpus:systems", "EIM"], "pass"),
    ("systems-roundtrip-iai", ["verify", "--roundtrip", "corpus:systems", "IAI"], "pass"),
    ("systems-roundtrip-qeim", ["verify", "--roundtrip", "corpus:systems", "QEIM"], "pass"),
    ("systems-roundtrip-chain", ["verify", "--roundtrip", "corpus:systems", "ChD"], "pass"),
    ("systems-emi-dfs", ["verify", "--dfs", "corpus:systems", "EMI"], "pass"),
    ("systems-emi-hypotheses", ["verify", "--roundtrip", "corpus:systems", "EMI"], "hypothesis-failed"),
    ("systems-emi-2of3", ["verify", "--qfs", "corpus:systems", "QEMI"], "fail"),
    ("systems-top-2of3", ["verify", "--qfs", "corpus:systems", "TopQ"], "fail"),
    ("systems-lemma3", ["lemma3", "corpus:systems", "EIM", "1"], "pass"),
    ("z2-build", ["em", "--build", "corpus:z2", "T"], "pass"),
    ("z2-lift", ["em", "--lemma2", "corpus:z2", "T", "Epi", "Mono"], "pass"),
    ("z2-induced-eim", ["em", "--prop1", "corpus:z2", "T", "EIM"], "pass"),
    ("z2-induced-emi", ["em", "--prop1", "corpus:z2", "T", "EMI"], "pass"),
    ("z2-lifted-adjunction", ["em", "--cor2", "corpus:z2", "Z2"], "pass"),
    ("constant-limit-continuity", ["thm7", "corpus:constant-limit", "DG"], "pass"),
    ("flagship-cartesian", ["cartesian", "corpus:flagship", "G"], "pass"),
    ("flagship-build", ["coalg", "--build", "corpus:flagship", "G"], "pass"),
    ("flagship-induced", ["coalg", "--prop4", "corpus:flagship", "G"], "pass"),
    ("terminal-extend", ["coalg", "--extend", "corpus:coalgebra-variants", "G1"], "pass"),
    ("identity-induced", ["coalg", "--prop4", "corpus:coalgebra-variants", "I"], "pass"),
    ("restriction-not-cartesian", ["cartesian", "corpus:coalgebra-variants", "R"], "fail"),
    ("restriction-build", ["coalg", "--build", "corpus:coalgebra-variants", "R"], "hypothesis-failed"),
]


def run_check(name: str) -> Report:
    for n, argv, _ in CHECKS:
        if n == name:
            return run(argv, stable=True)
    raise UsageError(f"no corpus check {name!r}")


def run_corpus(names: list[str] | None = None) -> list[Report]:
    """Every corpus check with timing suppressed, preceded by a summary report."""
    reports, table = [], []
    for n, argv, expected in CHECKS:
        if names is not None and n not in names:
            continue
        r = run(argv, stable=True)
        reports.append(r)
        table.append({"check": n, "verdict": r.verdict, "expected": expected, "ok": r.verdict == expected})
    summary = Report(command=["corpus", "--all"], document="corpus", window="built-in corpus documents")
    summary.result = table
    summary.checks = {"checks run": len(table), "as expected": sum(t["ok"] for t in table)}
    for t in table:
        if not t["ok"]:
            summary.witnesses.append({"law": "unexpected verdict", "names": [t["check"]],
                                      "detail": f"got {t['verdict']}, expected {t['expected']}"})
            summary.n_violations += 1
    summary.settle()
    return [summary] + reports


def corpus_listing() -> dict:
    return {"documents": sorted(DOCUMENTS), "checks": [{"check": n, "command": a, "expected": e}
                                                       for n, a, e in CHECKS]}


# ------------------------------------------------------------ replay
def _in_class(K, m: int) -> bool:
    return bool(K.mask[m])


def replay_witness(report: Report, w: dict, _reruns: dict | None = None) -> bool:
    """Re-check one witness; True when the recorded violation is reproduced."""
    kind = w.get("kind")
    ref = w.get("replay", {})
    ids = w.get("ids", [])
    if kind in ("square", "ladder", "pair"):
        env = load_document(report.document)
    try:
        if kind == "square":
            if "qfs" in ref:
                q = env.get(ref["qfs"], ("qfs",)).value
                C, unique = q.C, True
            else:
                C, unique = env.get(ref["left"], ("class",)).value.C, bool(ref.get("unique"))
            f, u, v, g = ids
            n = len(lift_fillers(C, f, g, u, v).fillers)
            return n == 0 or (unique and n > 1)
        if kind == "ladder":
            d = env.get(ref["dfs"], ("dfs",)).value
            C = d.C
            if not (d.E.mask[ids[0]] and d.J.mask[ids[1]] and d.J.mask[ids[2]] and d.M.mask[ids[3]]):
                return False
            if len(ids) == 6:
                return len(ladder_fillers(C, *ids)) != 1
            return bad_ladder(C, *ids[:4]) is not None
        if kind == "pair":
            if "qfs" in ref:
                W = env.get(ref["qfs"], ("qfs",)).value.W
            else:
                W = env.get(ref["dfs"], ("dfs",)).value.weq()
            C: FinCategory = W.C
            f, g = ids
            if C.cod[f] != C.dom[g]:
                return False
            inside = [_in_class(W, f), _in_class(W, g), _in_class(W, C.compose(g, f))]
            return sum(inside) == 2
    except (NonCommutingSquare, ValueError, IndexError):
        return False
    # no targeted check: rerun the command and look for the same violation
    key = tuple(report.command)
    if _reruns is not None and key in _reruns:
        again = _reruns[key]
    else:
        again = run(list(report.command), stable=True)
        if _reruns is not None:
            _reruns[key] = again
    return any(x.get("law") == w.get("law") and x.get("names") == w.get("names") for x in again.witnesses)


def replay(path: str) -> Report:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read report {path}: {exc}") from None
    items = data["reports"] if isinstance(data, dict) and "reports" in data else [data]
    out = Report(command=["replay", path], document=path, window="replayed reports")
    rows, reruns = [], {}
    for d in items:
        r = Report.from_dict(d)
        if r.command[:1] == ["corpus"] or r.verdict != "fail":
            continue
        for w in r.witnesses:
            try:
                ok = replay_witness(r, w, reruns)
            except FactoError as exc:
                ok = False
                out.notes.append(f"{' '.join(r.command)}: {exc}")
            rows.append({"command": r.command, "law": w.get("law"), "kind": w.get("kind", "rerun"),
                         "reproduced": ok})
            if not ok:
                out.witnesses.append({"law": "witness not reproduced", "names": [w.get("law", "")],
                                      "detail": " ".join(r.command)})
                out.n_violations += 1
    out.result = rows
    out.checks = {"witnesses replayed": len(rows), "reproduced": sum(r["reproduced"] for r in rows)}
    if not rows:
        out.notes.append("no failing witnesses to replay")
    out.settle()
    return out
