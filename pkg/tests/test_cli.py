import json
from pathlib import Path

import pytest

from legendgen.cli import main
from legendgen.fixtures import bar_chart, stacked_bar_chart


@pytest.fixture()
def chart_file(tmp_path) -> Path:
    p = tmp_path / "chart.svg"
    p.write_text(stacked_bar_chart(0), encoding="utf-8")
    return p


def test_extract_prints_report(chart_file, capsys):
    assert main(["extract", str(chart_file)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["symbols"][0]["members"] == 12


def test_extract_no_symbols_exit_code(tmp_path, capsys):
    p = tmp_path / "axes.svg"
    p.write_text(
        '<svg width="100" height="100">'
        '<line x1="0" y1="99" x2="100" y2="99" stroke="#000000"/>'
        '<text x="10" y="10">title</text></svg>',
        encoding="utf-8",
    )
    assert main(["extract", str(p)]) == 1
    assert "no_symbols" in capsys.readouterr().err


def test_generate_deterministic_output(chart_file, tmp_path, capsys):
    out1 = tmp_path / "a.svg"
    out2 = tmp_path / "b.svg"
    args = ["--seed", "5", "--population", "16", "--generations", "8"]
    assert main(["generate", str(chart_file), "-o", str(out1)] + args) == 0
    assert main(["generate", str(chart_file), "-o", str(out2)] + args) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_text(encoding="utf-8").startswith("<svg")


def test_generate_top_k_writes_multiple(chart_file, tmp_path):
    out = tmp_path / "legend.svg"
    assert main([
        "generate", str(chart_file), "-o", str(out),
        "--top-k", "3", "--population", "16", "--generations", "6",
    ]) == 0
    assert out.exists()
    assert (tmp_path / "legend-1.svg").exists()
    assert (tmp_path / "legend-2.svg").exists()


def test_score_command(chart_file, tmp_path, capsys):
    out = tmp_path / "cand.svg"
    main(["generate", str(chart_file), "-o", str(out),
          "--population", "12", "--generations", "4"])
    capsys.readouterr()
    # re-derive the spec of the best candidate via the library, then score it
    from legendgen.model import init_model
    from legendgen.pipeline import Document
    from legendgen.search import GAParams

    doc = Document.from_svg(chart_file.read_text(encoding="utf-8"))
    result = doc.candidates(init_model(0), GAParams(population=12, generations=4, seed=0))
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(result.best[0].to_record()), encoding="utf-8")
    assert main(["score", str(chart_file), "--spec", str(spec_path)]) == 0
    record = json.loads(capsys.readouterr().out)
    for key in ("O", "I", "R", "S", "C", "pref_h", "pref_v", "pref_c", "model_score"):
        assert key in record


def test_simulate_smoke(tmp_path, capsys):
    charts = tmp_path / "charts"
    charts.mkdir()
    for i in range(4):
        (charts / f"c{i}.svg").write_text(bar_chart(i), encoding="utf-8")
    assert main([
        "simulate", "--profile", "right_edge", "--rounds", "4",
        "--charts", str(charts), "--seed", "1",
    ]) == 0
    out = capsys.readouterr().out
    assert "final alignment accuracy" in out


def test_unknown_profile_rejected(capsys):
    assert main(["simulate", "--profile", "diagonal_lover", "--rounds", "1"]) == 2
