import os
import re
import math
from uuid import uuid4

import pytest

from polysound.exceptions import DomainError, UsageError
from polysound.output import (
    Table,
    Plot,
    RunManifest,
    write_csv,
    read_csv,
    render_svg_plot,
    config_hash,
)
from polysound.output.plot import default_style
from polysound.polytrope import TrapGeometry, Regime, regime_params
from polysound.sound import sweep_sound_curve


def sweep_rows():
    params = regime_params(Regime.bec(nu=1.0), 1.0)
    return sweep_sound_curve(params, TrapGeometry("cigar"), [0.1, 1.0, 40.0])


def test_table_round_trip():
    path = f"test_{uuid4().hex}.csv"
    rows = sweep_rows()
    try:
        success = {}
        success[0] = write_csv(rows, "sweep", path) == path
        with open(path, "rb") as f:
            content = f.read()
        success[1] = content.startswith(b"n_eq,width,cs_numeric,cs_lowdim,cs_3d\n")
        success[2] = b"\r\n" not in content
        success[3] = content.count(b"\n") == 4
        df = read_csv(path)
        success[4] = list(df.columns) == ["n_eq", "width", "cs_numeric", "cs_lowdim", "cs_3d"]
        success[5] = df["cs_numeric"].tolist() == [r.cs_numeric for r in rows]
        success[6] = df["width"].tolist() == [r.width for r in rows]
        success[7] = math.isclose(df["width"].iloc[2], 3.0, rel_tol=1e-14)

        failed = [k for k, v in success.items() if not v]

        assert not failed
    finally:
        os.remove(path)


def test_table_header_only():
    path = f"test_{uuid4().hex}.csv"
    try:
        Table(path).write([], "dispersion")
        with open(path, "rb") as f:
            assert f.read() == b"k,omega\n"
        assert len(Table(path).read()) == 0
    finally:
        os.remove(path)


def test_table_errors():
    path = f"test_{uuid4().hex}.csv"
    with pytest.raises(UsageError) as e:
        Table(path).write([{"k": 1.0}], "dispersion")
    assert e.value.key == "schema"
    with pytest.raises(UsageError):
        Table(path).write([], "unknown")
    assert not os.path.exists(path)
    with pytest.raises(UsageError) as e:
        Table(f"test_{uuid4().hex}_missing.csv").read()
    assert e.value.key == "csv"
    assert [f for f in os.listdir(".") if f.startswith(f".{path}")] == []
    with open(path, "w") as f:
        f.write("")
    try:
        with pytest.raises(UsageError) as e:
            Table(path).read()
        assert e.value.key == "csv"
    finally:
        os.remove(path)


def test_default_style():
    success = {}
    success[0] = default_style("cs_numeric") == "solid"
    success[1] = default_style("cs_lowdim") == "dashed"
    success[2] = default_style("cs_3d") == "dotted"
    success[3] = default_style("omega") == "solid"

    failed = [k for k, v in success.items() if not v]

    assert not failed


def test_render_svg_plot():
    pytest.importorskip("matplotlib")
    csv_path = f"test_{uuid4().hex}.csv"
    svg_path = f"test_{uuid4().hex}.svg"
    svg_again = f"test_{uuid4().hex}.svg"
    write_csv(sweep_rows(), "sweep", csv_path)
    columns = ["cs_numeric", "cs_lowdim", "cs_3d"]
    try:
        success = {}
        success[0] = render_svg_plot(csv_path, "n_eq", columns, out_path=svg_path, log_x=True) == svg_path
        with open(svg_path, "r", encoding="utf-8") as f:
            svg = f.read()
        success[1] = svg.count('id="series_') == 3
        success[2] = all(f'id="series_{c}"' in svg for c in columns)
        Plot(csv_path).render("n_eq", columns, svg_again, log_x=True)
        with open(svg_again, "r", encoding="utf-8") as f:
            success[3] = f.read() == svg
        # SVG y grows downwards, so an increasing series has decreasing y
        path = re.search(r'id="series_cs_numeric">\s*<path d="([^"]+)"', svg).group(1)
        ys = [float(y) for _, y in re.findall(r"[ML] ([-\d.e]+) ([-\d.e]+)", path)]
        success[4] = len(ys) >= 2 and all(a > b for a, b in zip(ys, ys[1:]))

        failed = [k for k, v in success.items() if not v]

        assert not failed
    finally:
        for path in [csv_path, svg_path, svg_again]:
            if os.path.exists(path):
                os.remove(path)


def test_render_svg_plot_errors():
    pytest.importorskip("matplotlib")
    csv_path = f"test_{uuid4().hex}.csv"
    single_path = f"test_{uuid4().hex}.csv"
    svg_path = f"test_{uuid4().hex}.svg"
    write_csv(sweep_rows(), "sweep", csv_path)
    write_csv(sweep_rows()[:1], "sweep", single_path)
    try:
        with pytest.raises(UsageError) as e:
            render_svg_plot(csv_path, "n_eq", ["cs_missing"], out_path=svg_path)
        assert e.value.key == "cs_missing"
        with pytest.raises(DomainError):
            render_svg_plot(single_path, "n_eq", ["cs_numeric"], out_path=svg_path)
        with pytest.raises(UsageError):
            render_svg_plot(csv_path, "n_eq", ["cs_numeric"], styles={"cs_numeric": "wavy"}, out_path=svg_path)
        with open(single_path, "w") as f:
            f.write("n_eq,cs_numeric\n1,0.5\n2,n/a?\n")
        with pytest.raises(UsageError) as e:
            render_svg_plot(single_path, "n_eq", ["cs_numeric"], out_path=svg_path)
        assert e.value.key == "cs_numeric"
        assert not os.path.exists(svg_path)
    finally:
        os.remove(csv_path)
        os.remove(single_path)


def test_plot_without_matplotlib(monkeypatch):
    from polysound.output import plot

    class NoModule:
        def __init__(self, module_name=None):
            self.module_name = module_name

        def please_import(self, thing=None, who_is_calling=None, errors="raise"):
            raise ImportError(f"{self.module_name} is not installed")

    monkeypatch.setattr(plot, "ModuleHandler", NoModule)
    with pytest.raises(UsageError) as e:
        Plot(f"test_{uuid4().hex}.csv")
    assert e.value.key == "matplotlib"


def test_run_manifest():
    out = f"test_{uuid4().hex}.csv"
    path = RunManifest.path_for(out)
    manifest = RunManifest(
        version="0.1.0",
        subcommand="sweep",
        parameters={"regime": "bec", "nu": 1.0},
        config_hash=config_hash("regime=bec\n"),
        outputs=[out],
        duration_seconds=0.5,
    )
    try:
        success = {}
        success[0] = path == f"{out}.manifest.json"
        manifest.write(path)
        success[1] = RunManifest.read(path) == manifest
        success[2] = len(manifest.config_hash) == 64
        success[3] = config_hash("") == config_hash(None)
        success[4] = config_hash("a=1") != config_hash("a=2")

        failed = [k for k, v in success.items() if not v]

        assert not failed
    finally:
        os.remove(path)
