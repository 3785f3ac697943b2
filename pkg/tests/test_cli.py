import json
import subprocess
import sys

import pytest

ADJ = [sys.executable, "-m", "adjlang.cli"]


def adj(*args, env=None):
    import os
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run(ADJ + list(args), capture_output=True, text=True,
                          env=full_env)


def test_check_corpus_ok(corpus_dir):
    for name in ("nor.adj", "map.adj", "structural.adj", "bool_demo.adj"):
        r = adj("check", str(corpus_dir / name))
        assert r.returncode == 0, (name, r.stderr)


def test_check_reports_errors(tmp_path):
    bad = tmp_path / "bad.adj"
    bad.write_text("mode m;\nproc p (a : 1[m]) |- (c : 1[m]) = c.<>;\n")
    r = adj("check", str(bad))
    assert r.returncode == 1
    assert "unused channel" in r.stderr


def test_check_json_diagnostics(tmp_path):
    bad = tmp_path / "bad.adj"
    bad.write_text("mode m;\nproc p (a : 1[m]) |- (c : 1[m]) = c.<>;\n")
    r = adj("check", str(bad), "--json")
    assert r.returncode == 1
    objs = [json.loads(line) for line in r.stdout.splitlines()]
    assert objs and {"severity", "message", "file", "line", "col"} <= set(objs[0])


def test_check_missing_file():
    r = adj("check", "/nonexistent/x.adj")
    assert r.returncode == 1


def test_map_without_cancel_fails(corpus_dir, tmp_path):
    text = (corpus_dir / "map.adj").read_text()
    lines = [l for l in text.splitlines() if "cancel the service" not in l]
    broken = tmp_path / "map_nocancel.adj"
    broken.write_text("\n".join(lines))
    r = adj("check", str(broken))
    assert r.returncode == 1
    assert "unused" in r.stderr


def test_run_bool_demo(corpus_dir):
    r = adj("run", str(corpus_dir / "bool_demo.adj"))
    assert r.returncode == 0, r.stderr
    assert "terminated-poised" in r.stdout
    assert "observable: yes" in r.stdout


def test_run_warns_on_non_positive_main(tmp_path):
    f = tmp_path / "neg.adj"
    f.write_text("""
mode m;
proc main () |- (c : &{ go : 1[m] }) =
  case c { go(c1) => c1.<> };
""")
    r = adj("run", str(f))
    assert r.returncode == 0
    assert "purely positive" in r.stderr


def test_run_step_limit_exit_code(tmp_path):
    f = tmp_path / "loop.adj"
    f.write_text("""
mode m;
type ones[m] = +{ one : ones };
proc main () |- (z : ones) =
  {s} <- (nu w) (w <- main <-) ; z.one(s);
""")
    r = adj("run", str(f), "--max-steps", "7")
    assert r.returncode == 3
    assert "step-limit" in r.stdout


def test_run_rejects_zero_step_limit(corpus_dir):
    r = adj("run", str(corpus_dir / "bool_demo.adj"), "--max-steps", "0")
    assert r.returncode != 0


def test_run_refuses_ill_typed_without_unsafe(tmp_path):
    f = tmp_path / "ill.adj"
    f.write_text("""
mode m;
proc aux (a : 1[m]) |- (c : 1[m]) = c.<>;
proc main () |- (c : 1[m]) = c.<>;
""")
    assert adj("run", str(f)).returncode == 1
    r = adj("run", str(f), "--unsafe")
    assert r.returncode == 0


def test_trace_determinism(corpus_dir, tmp_path):
    t1, t2 = tmp_path / "t1.jsonl", tmp_path / "t2.jsonl"
    for t in (t1, t2):
        r = adj("run", str(corpus_dir / "share_demo.adj"), "main",
                "--seed", "42", "--trace", str(t))
        assert r.returncode == 0
    assert t1.read_bytes() == t2.read_bytes()
    events = [json.loads(l) for l in t1.read_text().splitlines()]
    assert {"step", "rule", "consumed", "produced", "channels"} == set(events[0])
    assert [e["step"] for e in events] == list(range(len(events)))


def test_adj_seed_env_overrides(corpus_dir, tmp_path):
    t1, t2 = tmp_path / "t1.jsonl", tmp_path / "t2.jsonl"
    adj("run", str(corpus_dir / "share_demo.adj"), "--seed", "0",
        "--trace", str(t1), env={"ADJ_SEED": "1234"})
    adj("run", str(corpus_dir / "share_demo.adj"), "--seed", "99",
        "--trace", str(t2), env={"ADJ_SEED": "1234"})
    assert t1.read_bytes() == t2.read_bytes()


def test_prove_commutativity():
    r = adj("prove", "x : A * B |- B * A at L")
    assert r.returncode == 0
    assert "tensorR" in r.stdout


def test_prove_exhausted():
    r = adj("prove", "x : A |- A * A at L")
    assert r.returncode == 4
    assert "EXHAUSTED" in r.stdout


def test_prove_structural_difference():
    assert adj("prove", "p : A & B |- A * B at U").returncode == 0
    assert adj("prove", "p : A & B |- A * B at L").returncode == 4


def test_prove_malformed():
    r = adj("prove", "x : |- junk ++")
    assert r.returncode == 1


def test_prove_custom_theory(corpus_dir):
    r = adj("prove", "x : bits |- bits", "--mode-theory",
            str(corpus_dir / "nor.adj"))
    assert r.returncode == 0


def test_prove_depth_flag():
    r = adj("prove", "p : A & B |- A * B at U", "--depth", "2")
    assert r.returncode == 4


def test_fmt_roundtrip(corpus_dir, tmp_path):
    r = adj("fmt", str(corpus_dir / "structural.adj"))
    assert r.returncode == 0
    out = tmp_path / "fmt.adj"
    out.write_text(r.stdout)
    r2 = adj("check", str(out))
    assert r2.returncode == 0, r2.stderr
    r3 = adj("fmt", str(out))
    assert r3.stdout == r.stdout  # printing is a fixed point


def test_run_unknown_main(corpus_dir):
    r = adj("run", str(corpus_dir / "bool_demo.adj"), "nosuch")
    assert r.returncode == 1
