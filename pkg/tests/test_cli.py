import json

import pytest

from deligne_kit.cli import build_report, main, record_digest, replay_report
from deligne_kit.errors import DimensionError, NameResolutionError, ParseError
from deligne_kit.session import parse_session

GOOD = """\
# demo session
ring Q[x,y] order grevlex;
module M = coker [[x, 0], [0, y]];
ideal J = (x, y);
sequence s = (x, x);
task prozero s degree 1 from 1 cap 10;
task deligne-roundtrip J R samples 3 seed 7;
task sheaf-glue J R samples 2 seed 3;
task diagram J M samples 4 seed 11;
task idealization poles (1, 3) cap 6;
"""


# ---------------------------------------------------------------- parsing


def test_parse_good_session():
    s = parse_session(GOOD)
    assert s.ring.variables == ("x", "y")
    assert "M" in s.modules and "R" in s.modules
    assert [t.kind for t in s.tasks] == [
        "prozero", "deligne-roundtrip", "sheaf-glue", "diagram", "idealization",
    ]


def test_parse_builtin_R():
    s = parse_session("ring Q[x]; ideal J=(x); task deligne-roundtrip J R samples 5 seed 1;")
    assert s.modules["R"].rank == 1
    assert s.tasks[0].samples == 5


def test_parse_syntax_error_position():
    with pytest.raises(ParseError) as exc:
        parse_session("ring Q[x];\nmodule M = coker [[x]]\nideal J=(x);")
    assert exc.value.line == 3  # missing semicolon noticed at next statement


def test_parse_unknown_name():
    with pytest.raises(NameResolutionError):
        parse_session("ring Q[x]; task prozero nosuch degree 1 from 1 cap 2;")


def test_parse_unknown_variable():
    with pytest.raises(NameResolutionError):
        parse_session("ring Q[x]; ideal J = (z);")


def test_parse_ragged_matrix():
    with pytest.raises(DimensionError):
        parse_session("ring Q[x,y]; module M = coker [[x, y], [x]];")


def test_parse_poly_subtraction_not_a_kind():
    s = parse_session("ring Q[x,y]; ideal J = (x - y, y);")
    assert str(s.ideals["J"][0]) == "x - y"


def test_parse_print_parse_fixpoint():
    s1 = parse_session(GOOD)
    s2 = parse_session(s1.pretty())
    assert s1 == s2
    assert s1.pretty() == s2.pretty()


def test_prime_field_ring():
    s = parse_session("ring F5[x,y,z]; sequence s = (x, y, z); task prozero s degree 1 from 1 cap 6;")
    assert s.ring.field.characteristic == 5


def test_prozero_session_doubled_sequence_from_two():
    text = "ring Q[x,y]; sequence s = (x, x); task prozero s degree 1 from 2 cap 10;"
    session = parse_session(text)
    rep = build_report(text, session)
    assert rep["records"][0]["bounds"]["witness_m"] == 4


# ---------------------------------------------------------------- reports


@pytest.fixture(scope="module")
def report():
    session = parse_session(GOOD)
    return build_report(GOOD, session), session


def test_report_outcomes(report):
    rep, _ = report
    outcomes = [r["outcome"] for r in rep["records"]]
    assert outcomes == ["pass", "pass", "pass", "pass", "obstruction"]
    assert rep["ok"] is True


def test_prozero_record_carries_certificate(report):
    rep, _ = report
    rec = rep["records"][0]
    assert rec["bounds"]["witness_m"] == 2
    assert rec["certificate"]["entries"]


def test_report_deterministic():
    session = parse_session(GOOD)
    a = build_report(GOOD, session)
    b = build_report(GOOD, parse_session(GOOD))

    def strip(rep):
        return [
            {k: v for k, v in r.items() if k != "time_ms"} for r in rep["records"]
        ]

    assert strip(a) == strip(b)
    assert [r["digest"] for r in a["records"]] == [r["digest"] for r in b["records"]]


def test_digest_excludes_timing(report):
    rep, _ = report
    for rec in rep["records"]:
        assert record_digest(rec) == rec["digest"]


def test_replay_verifies(report):
    rep, session = report
    out = replay_report(GOOD, session, rep)
    assert out["ok"] is True
    assert all(r["verified"] for r in out["results"])


def test_replay_rejects_tampering(report):
    rep, session = report
    broken = json.loads(json.dumps(rep))
    broken["records"][0]["certificate"]["entries"][0]["preimage_chain"][0] = "x + 1"
    out = replay_report(GOOD, session, broken)
    assert out["ok"] is False


def test_replay_rejects_wrong_session(report):
    rep, _ = report
    other = "ring Q[x];\ntask idealization poles (1) cap 2;\n"
    session = parse_session(other)
    with pytest.raises(Exception):
        replay_report(other, session, rep)


def test_jobs_parallel_matches_serial():
    session = parse_session(GOOD)
    serial = build_report(GOOD, session)
    parallel = build_report(GOOD, parse_session(GOOD), jobs=4)
    assert [r["digest"] for r in serial["records"]] == [
        r["digest"] for r in parallel["records"]
    ]
    assert [r["label"] for r in parallel["records"]] == [
        t.pretty() for t in session.tasks
    ]


# ---------------------------------------------------------------- exit codes


def test_main_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.dk"
    good.write_text(GOOD)
    assert main(["run", str(good)]) == 0
    capsys.readouterr()

    bad = tmp_path / "bad.dk"
    bad.write_text("ring Q[x]; ideal J = (;")
    assert main(["run", str(bad)]) == 2
    capsys.readouterr()

    # exhausted prozero without allow-exhausted fails with 1
    ex = tmp_path / "ex.dk"
    ex.write_text("ring Q[x];\nsequence s = (x, x);\ntask prozero s degree 1 from 4 cap 5;\n")
    assert main(["run", str(ex)]) == 1
    capsys.readouterr()

    ok = tmp_path / "ok.dk"
    ok.write_text("ring Q[x];\nsequence s = (x, x);\ntask prozero s degree 1 from 4 cap 5 allow-exhausted;\n")
    assert main(["run", str(ok)]) == 0
    capsys.readouterr()


def test_main_replay_roundtrip(tmp_path, capsys):
    f = tmp_path / "s.dk"
    f.write_text(GOOD)
    out = tmp_path / "report.json"
    assert main(["run", str(f), "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["run", str(f), "--replay", str(out)]) == 0
    capsys.readouterr()


def test_exhausted_outcome_recorded(tmp_path):
    text = "ring Q[x];\nsequence s = (x, x);\ntask prozero s degree 1 from 4 cap 5 allow-exhausted;\n"
    session = parse_session(text)
    rep = build_report(text, session)
    assert rep["records"][0]["outcome"] == "exhausted"
    assert rep["ok"] is True
