import io

import pytest

from tonesearch.cli import EXIT_DATA, EXIT_GAVE_UP, EXIT_OK, EXIT_USAGE, argv_from_manifest, main
from tonesearch.formats import (
    F0ParseError,
    RunManifest,
    format_solution,
    parse_blocks,
    parse_f0_file,
    parse_f0_text,
    parse_machine,
    parse_pairs_text,
)
from tonesearch.model import RTable, ScalingParams, Solution, evaluate, generate_contour
from tonesearch.schemes import normalize_initial_step
from tonesearch.tones import parse_tones

from conftest import MULTI, TRIAL1


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


@pytest.fixture
def multi_file(tmp_path):
    path = tmp_path / "multi.txt"
    path.write_text(",".join(str(x) for x in MULTI) + "\n")
    return str(path)


# -- F0 and pair files ---------------------------------------------------------


def test_parse_f0_trial1(tmp_path):
    path = tmp_path / "t1.txt"
    path.write_text("219,168,183,150,160,136,144,123,131,115")
    assert parse_f0_file(path) == list(TRIAL1)


def test_parse_f0_single_value():
    assert parse_f0_text("100") == [100.0]


def test_parse_f0_mixed_separators_and_comments():
    text = "# header\n219, 168\n\n183 150  # trailing\n160\n"
    assert parse_f0_text(text) == [219, 168, 183, 150, 160]


def test_parse_f0_errors():
    with pytest.raises(F0ParseError, match="line 1"):
        parse_f0_text("abc")
    with pytest.raises(F0ParseError, match="line 2"):
        parse_f0_text("100\n-5\n")
    with pytest.raises(F0ParseError):
        parse_f0_text("100, inf")
    with pytest.raises(F0ParseError):
        parse_f0_text("# nothing\n")


def test_parse_pairs():
    samples = parse_pairs_text("H L 200 150\n# note\nL !H 150 168\n")
    assert [(str(s.prev_tone), str(s.next_tone)) for s in samples] == [("H", "L"), ("L", "!H")]
    with pytest.raises(F0ParseError, match="line 1"):
        parse_pairs_text("H L 200")


# -- solution records ----------------------------------------------------------


def test_text_format_fields():
    sol = Solution(parse_tones("!H ^H !H L !L ^H L"), ScalingParams(101, 92, 0.87), 0.2)
    text = format_solution(sol, "text")
    assert "!H ^H !H L !L ^H L" in text
    assert "h:101" in text and "l:92" in text and "E:0.20" in text


def test_predicted_line_matches_generate():
    t = RTable.dschang1()
    sol = Solution(parse_tones("^H ^H !H L !L ^H L"), ScalingParams(107, 98, 0.87), 0.5)
    text = format_solution(sol, "text", X=MULTI, table=t)
    pred = generate_contour(sol.tones, MULTI[0], sol.params, t)
    assert text.splitlines()[1] == " ".join(f"{v:.1f}" for v in pred)
    rounded = format_solution(sol, "text", X=MULTI, table=t, round_int=True).splitlines()[1]
    assert rounded == "201 215 201 173 163 201 173"
    machine = parse_blocks(format_solution(sol, "machine", X=MULTI, table=t))[0]
    assert [float(v) for v in machine["predicted"].split()] == pred


def test_machine_round_trip():
    sol = Solution(parse_tones("H ^L !H !H L ^H !H"), ScalingParams(92.22188759731509, 98.6713908266035, 0.7433), 0.0041)
    manifest = RunManifest("transcribe", "x.txt", "1", "sa", 3, (("k", "10"),))
    text = format_solution(sol, "machine", manifest=manifest, X=MULTI)
    assert parse_machine(text) == [sol]
    assert RunManifest.from_fields(parse_blocks(text)[0]) == manifest


def test_unknown_mode():
    sol = Solution(parse_tones("H L"), ScalingParams(100, 90, 0.8), 1.0)
    with pytest.raises(ValueError):
        format_solution(sol, "xml")


# -- commands ------------------------------------------------------------------


def test_generate_reported_row():
    code, out = run(["generate", "--tones", "^H ^H !H L !L ^H L", "--x1", "201",
                     "--h", "107", "--l", "98", "--d", "0.87", "--table", "1", "--round"])
    assert code == EXIT_OK
    assert out.split() == ["201", "215", "201", "173", "163", "201", "173"]


def test_generate_default_one_decimal():
    code, out = run(["generate", "--tones", "H L", "--x1", "96", "--h", "96", "--l", "88", "--d", "0.72"])
    assert out.split() == ["96.0", "88.0"]


def test_interpret_hyman():
    code, out = run(["interpret", "--tones", "H L !H L !H L !H L !H L", "--scheme", "hyman"])
    assert (code, out) == (EXIT_OK, "1 3 2 4 3 5 4 6 5 7\n")


def test_interpret_novel_halves():
    code, out = run(["interpret", "--tones", "H L", "--scheme", "novel"])
    assert out == "1 5/2\n"


def test_convert():
    code, out = run(["convert", "--tones", "H L !H L !H L", "--to", "total"])
    assert (code, out) == (EXIT_OK, "H !L H !L H !L\n")


def test_evaluate_generated_is_zero(tmp_path):
    p = ScalingParams(100, 85, 0.8)
    X = generate_contour("H L !H ^L", 180, p, RTable.dschang1())
    path = tmp_path / "g.txt"
    path.write_text("\n".join(repr(x) for x in X))
    code, out = run(["evaluate", "--tones", "H L !H ^L", "--f0", str(path), "--h", "100", "--l", "85", "--d", "0.8"])
    assert code == EXIT_OK and float(out) == pytest.approx(0, abs=1e-20)


def test_estimate(tmp_path):
    p, t = ScalingParams(96, 88, 0.72), RTable.dschang1()
    lines = []
    for x in (150, 170, 190, 210):
        lines.append(f"H L {x} {generate_contour('H L', x, p, t)[1]!r}")
    for x in (80, 85, 90):
        lines.append(f"L !H {x} {generate_contour('L !H', x, p, t)[1]!r}")
    path = tmp_path / "pairs.txt"
    path.write_text("\n".join(lines))
    code, out = run(["estimate", "--pairs", str(path)])
    assert code == EXIT_OK
    assert "derived: h:96.0 l:88.0 d:0.720" in out


def test_transcribe_text(multi_file):
    code, out = run(["transcribe", "--f0", multi_file, "--seed", "4"])
    assert code == EXIT_OK
    head, pred = out.splitlines()
    assert "E:" in head and len(pred.split()) == len(MULTI)


def test_transcribe_machine_is_consistent(multi_file):
    code, out = run(["transcribe", "--f0", multi_file, "--seed", "4", "--k", "3", "--format", "machine"])
    sols = parse_machine(out)
    assert code == EXIT_OK and len(sols) == 3
    for s in sols:
        assert s.evaluation == pytest.approx(evaluate(s.tones, MULTI, s.params, RTable.dschang1()), rel=1e-12)


def test_transcribe_frozen_and_refine(multi_file):
    code, out = run(["transcribe", "--f0", multi_file, "--freeze-params", "107,98,0.87", "--format", "machine"])
    assert parse_machine(out)[0].params == ScalingParams(107, 98, 0.87)
    code, out = run(["transcribe", "--f0", multi_file, "--refine", "--seed", "2", "--format", "machine"])
    assert parse_machine(out)[0].params.in_gene_ranges()


def test_manifest_reproduces_block(multi_file):
    argv = ["transcribe", "--f0", multi_file, "--seed", "8", "--k", "2", "--no-upstep",
            "--solver", "ga", "--generations", "60", "--format", "machine"]
    code, first = run(argv)
    manifest = RunManifest.from_fields(parse_blocks(first)[0])
    code, again = run(argv_from_manifest(manifest))
    assert again == first


def test_seed_from_environment(multi_file, monkeypatch):
    monkeypatch.setenv("TONESEARCH_SEED", "17")
    _, env_out = run(["transcribe", "--f0", multi_file, "--format", "machine"])
    _, flag_out = run(["transcribe", "--f0", multi_file, "--seed", "17", "--format", "machine"])
    assert env_out == flag_out
    assert "manifest.seed: 17" in env_out


def test_bench_histogram_is_self_consistent():
    code, out = run(["bench", "--trial", "1", "--runs", "6", "--solver", "ga", "--generations", "80",
                     "--no-upstep", "--seed", "0", "--format", "machine", "--max-eval", "1000"])
    assert code == EXIT_OK
    blocks = [b for b in parse_blocks(out) if "tones" in b]
    assert sum(int(b["count"]) for b in blocks) == 6
    for b in blocks:
        tones = parse_tones(b["tones"])
        assert normalize_initial_step(tones) == tones
        assert float(b["best_evaluation"]) < 1000


def test_bench_threads_match_serial():
    argv = ["bench", "--trial", "2", "--runs", "4", "--solver", "ga", "--generations", "40", "--format", "machine"]
    assert run(argv)[1] == run(argv + ["--jobs", "3"])[1]


def test_bench_text():
    code, out = run(["bench", "--trial", "1", "--runs", "3", "--solver", "ga", "--generations", "40"])
    assert code == EXIT_OK
    assert out.splitlines()[0].split()[:2] == ["count", "transcription"]
    assert out.splitlines()[-1].endswith("runs below E 7")


# -- exit codes ----------------------------------------------------------------


def test_usage_errors(multi_file):
    assert run(["nonsense"])[0] == EXIT_USAGE
    assert run(["generate", "--tones", "H L"])[0] == EXIT_USAGE
    assert run(["transcribe", "--f0", multi_file, "--table", "igbo"])[0] == EXIT_USAGE
    assert run(["transcribe", "--f0", multi_file, "--k", "0"])[0] == EXIT_USAGE
    assert run(["transcribe", "--f0", multi_file, "--cooling", "0.9"])[0] == EXIT_USAGE
    assert run(["transcribe", "--f0", multi_file, "--freeze-params", "1,2"])[0] == EXIT_USAGE


def test_bad_seed_env(multi_file, monkeypatch):
    monkeypatch.setenv("TONESEARCH_SEED", "abc")
    assert run(["transcribe", "--f0", multi_file])[0] == EXIT_USAGE


def test_data_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("abc")
    one = tmp_path / "one.txt"
    one.write_text("100")
    assert run(["transcribe", "--f0", str(bad)])[0] == EXIT_DATA
    assert run(["transcribe", "--f0", str(one)])[0] == EXIT_DATA
    assert run(["transcribe", "--f0", str(tmp_path / "missing.txt")])[0] == EXIT_DATA
    assert run(["generate", "--tones", "H X", "--x1", "100", "--h", "100", "--l", "90", "--d", "0.8"])[0] == EXIT_DATA
    assert run(["generate", "--tones", "H L", "--x1", "100", "--h", "100", "--l", "90", "--d", "1.5"])[0] == EXIT_DATA
    assert run(["convert", "--tones", "H !L", "--to", "total"])[0] == EXIT_DATA
    assert run(["generate", "--tones", "L !H", "--x1", "100", "--h", "100", "--l", "90", "--d", "0.8",
                "--table", "igbo", "--igbo-f", "0.8", "--igbo-d", "0.7"])[0] == EXIT_DATA


def test_gave_up_exit_code(tmp_path):
    path = tmp_path / "two.txt"
    path.write_text("150 120")
    code, out = run(["transcribe", "--f0", str(path), "--k", "10", "--table", "igbo",
                     "--igbo-f", "0.8", "--igbo-d", "0.7", "--format", "machine"])
    assert code == EXIT_GAVE_UP
    assert 1 <= len(parse_machine(out)) <= 5
