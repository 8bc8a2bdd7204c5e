import json
from pathlib import Path

import pytest

from magicbias_plots import FigureSpec, RenderError, render
from magicbias_plots.cli import main

FIG3_HEADER = "eta,p,r_proc,r_avg,eta_ZL"
BIAS_HEADER = "set,eta2,p,eta1_ZL,depol_marker"


def write_fig3(path: Path):
    rows = [FIG3_HEADER]
    for eta in ("0.25", "5.0", "inf"):
        for p, r in (("0.0003", "1e-6"), ("0.001", "1.1e-5"), ("0.005", "2.7e-4")):
            rows.append(f"{eta},{p},{r},{float(r)*2/3},1.5")
    path.write_text("\n".join(rows) + "\n")


def write_bias(path: Path, column="eta1_ZL", with_inf=True):
    rows = [BIAS_HEADER.replace("eta1_ZL", column)]
    for s in ("Z", "M"):
        rows.append(f"{s},0.25,0.005,1.6,1")
        for eta, v in (("10", "20"), ("100", "300"), ("300", "900")):
            rows.append(f"{s},{eta},0.005,{v},0")
        if with_inf:
            rows.append(f"{s},inf,0.005,1200,0")
    path.write_text("\n".join(rows) + "\n")


def test_render_all_five_figures(tmp_path):
    """The five paper figures regenerate from data files alone."""
    write_fig3(tmp_path / "fig3.csv")
    for name in ("fig4.csv", "fig6a.csv", "fig6b.csv"):
        write_bias(tmp_path / name)
    write_bias(tmp_path / "fig5.csv", column="eta1_XL")
    outputs = []
    outputs.append(render(FigureSpec("infidelity-vs-p", (str(tmp_path / "fig3.csv"),),
                                     str(tmp_path / "fig3.png"))))
    outputs.append(render(FigureSpec("bias-vs-bias", (str(tmp_path / "fig4.csv"),),
                                     str(tmp_path / "fig4.png"))))
    outputs.append(render(FigureSpec("bias-vs-bias", (str(tmp_path / "fig5.csv"),),
                                     str(tmp_path / "fig5.png"), value_column="eta1_XL")))
    outputs.append(render(FigureSpec("ablation-pair",
                                     (str(tmp_path / "fig6a.csv"), str(tmp_path / "fig6b.csv")),
                                     str(tmp_path / "fig6.png"))))
    for out in outputs:
        assert Path(out).exists() and Path(out).stat().st_size > 0


def test_render_deterministic(tmp_path):
    write_bias(tmp_path / "fig4.csv")
    spec = FigureSpec("bias-vs-bias", (str(tmp_path / "fig4.csv"),), str(tmp_path / "a.png"))
    render(spec)
    first = (tmp_path / "a.png").read_bytes()
    render(spec)
    assert (tmp_path / "a.png").read_bytes() == first


def test_empty_data_is_an_error(tmp_path):
    f = tmp_path / "fig4.csv"
    f.write_text(BIAS_HEADER + "\n")
    with pytest.raises(RenderError, match="no data rows"):
        render(FigureSpec("bias-vs-bias", (str(f),), str(tmp_path / "x.png")))
    assert not (tmp_path / "x.png").exists()


def test_schema_mismatch_and_missing_file(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("a,b\n1,2\n")
    with pytest.raises(RenderError, match="lacks columns"):
        render(FigureSpec("bias-vs-bias", (str(f),), str(tmp_path / "x.png")))
    with pytest.raises(RenderError, match="missing data file"):
        render(FigureSpec("bias-vs-bias", (str(tmp_path / "nope.csv"),), str(tmp_path / "x.png")))
    with pytest.raises(RenderError, match="unknown figure kind"):
        FigureSpec("pie", (str(f),), "x.png")


def test_cli_roundtrip(tmp_path, capsys):
    write_bias(tmp_path / "fig4.csv")
    spec = {
        "kind": "bias-vs-bias",
        "input": str(tmp_path / "fig4.csv"),
        "output": str(tmp_path / "out.png"),
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    assert main(["render", "--spec", str(spec_path)]) == 0
    assert (tmp_path / "out.png").exists()
    assert main(["render", "--spec", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "bias-vs-bias", "input": "missing.csv",
                               "output": str(tmp_path / "y.png")}))
    assert main(["render", "--spec", str(bad)]) == 1
