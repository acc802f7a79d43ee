import json

import pytest

from spikedir_plots.render import (
    EXPECTED_HEADER,
    FigureSpec,
    SchemaError,
    build_panels,
    load_rows,
    main,
    render,
)

HEADER = ",".join(EXPECTED_HEADER)

# hand-written golden study slice: two regimes, all three tests, L = 2,
# including a 'none' limiting power and 17-digit floats
GOLDEN = "\n".join(
    [
        HEADER,
        "400,400,iv,0,0,hybrid,20,0.22360679774997896,52,1000,0.052000000000000005,0.050000000000000044,3",
        "400,400,iv,0,0,watson,20,0.22360679774997896,47,1000,0.047,0.050000000000000044,3",
        "400,400,iv,0,0,z,20,0.22360679774997896,55,1000,0.055,0.050000000000000044,3",
        "400,400,iv,1,1,hybrid,20,0.22360679774997896,318,1000,0.318,0.33243077084937972,3",
        "400,400,iv,1,1,watson,20,0.22360679774997896,262,1000,0.26200000000000001,0.26539174097262478,3",
        "400,400,iv,1,1,z,20,0.22360679774997896,180,1000,0.17999999999999999,0.17752102557275395,3",
        "400,400,iv,2,2,hybrid,20,0.22360679774997896,965,1000,0.96499999999999997,0.96563563938629741,3",
        "400,400,iv,2,2,watson,20,0.22360679774997896,878,1000,0.878,0.88173754896554354,3",
        "400,400,iv,2,2,z,20,0.22360679774997896,704,1000,0.70399999999999996,0.71998288214041066,3",
        "200,800,vb,0,0,watson,10.636591793889977,1,49,1000,0.049000000000000002,0.050000000000000044,3",
        "200,800,vb,1,0.4,watson,10.636591793889977,1,61,1000,0.061,none,3",
        "200,800,vb,2,0.8,watson,10.636591793889977,1,98,1000,0.098000000000000004,0.1034132486385852,3",
    ]
)


@pytest.fixture()
def golden_csv(tmp_path):
    path = tmp_path / "golden.csv"
    path.write_text(GOLDEN + "\n", encoding="utf-8")
    return path


def write_csv(tmp_path, lines, name="in.csv"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestLoadRows:
    def test_loads_golden(self, golden_csv):
        rows = load_rows(str(golden_csv))
        assert len(rows) == 12
        assert {r.regime for r in rows} == {"iv", "vb"}

    def test_rejects_wrong_header(self, tmp_path):
        path = write_csv(tmp_path, ["a,b,c", "1,2,3"])
        with pytest.raises(SchemaError):
            load_rows(str(path))

    def test_rejects_bad_field(self, tmp_path):
        bad = HEADER.replace("asym_power", "asym_power")  # keep header; corrupt body
        path = write_csv(
            tmp_path,
            [bad, "10,5,iv,0,0,watson,1,1,notanint,4,0.25,none,0"],
        )
        with pytest.raises(SchemaError):
            load_rows(str(path))

    def test_rejects_unknown_test(self, tmp_path):
        path = write_csv(
            tmp_path,
            [HEADER, "10,5,iv,0,0,wald,1,1,1,4,0.25,none,0"],
        )
        with pytest.raises(SchemaError):
            load_rows(str(path))

    def test_rejects_out_of_range_freq(self, tmp_path):
        path = write_csv(
            tmp_path,
            [HEADER, "10,5,iv,0,0,watson,1,1,5,4,1.25,none,0"],
        )
        with pytest.raises(SchemaError):
            load_rows(str(path))

    def test_rejects_empty(self, tmp_path):
        path = write_csv(tmp_path, [HEADER])
        with pytest.raises(SchemaError):
            load_rows(str(path))


class TestBuildPanels:
    def test_every_series_in_exactly_one_panel(self, golden_csv):
        rows = load_rows(str(golden_csv))
        panels = build_panels(rows)
        placed = [
            (panel["panel"], s["test"])
            for panel in panels
            for s in panel["series"]
            if s["style"] == "solid"
        ]
        assert sorted(placed) == sorted({(r.regime, r.test) for r in rows})
        assert len(placed) == len(set(placed))

    def test_panel_order_follows_taxonomy(self, golden_csv):
        panels = build_panels(load_rows(str(golden_csv)))
        assert [p["panel"] for p in panels] == ["iv", "vb"]

    def test_dashed_series_skips_none(self, golden_csv):
        panels = build_panels(load_rows(str(golden_csv)))
        vb = next(p for p in panels if p["panel"] == "vb")
        dashed = next(s for s in vb["series"] if s["style"] == "dashed")
        assert dashed["x"] == [0, 2]  # ell = 1 had no limiting power

    def test_duplicate_cell_rejected(self, tmp_path):
        path = write_csv(
            tmp_path,
            [
                HEADER,
                "10,5,iv,0,0,watson,1,1,1,4,0.25,none,0",
                "10,5,iv,0,0,watson,1,1,2,4,0.5,none,0",
            ],
        )
        with pytest.raises(SchemaError):
            build_panels(load_rows(str(path)))


class TestRenderFidelity:
    def test_sidecar_reproduces_csv_series_exactly(self, golden_csv, tmp_path):
        spec = FigureSpec(input_csv=str(golden_csv), output_image=str(tmp_path / "fig.png"))
        render(spec)
        sidecar = json.loads((tmp_path / "fig.json").read_text())

        raw_lines = golden_csv.read_text().splitlines()[1:]
        cells = {}
        for line in raw_lines:
            f = line.split(",")
            cells[(f[2], f[5], int(f[3]))] = (
                float(f[10]),
                None if f[11] == "none" else float(f[11]),
            )

        colors = {"watson": "green", "hybrid": "orange", "z": "red"}
        checked_solid = checked_dashed = 0
        for panel in sidecar["panels"]:
            for s in panel["series"]:
                assert s["color"] == colors[s["test"]]
                for x, y in zip(s["x"], s["y"]):
                    freq, asym = cells[(panel["panel"], s["test"], x)]
                    if s["style"] == "solid":
                        assert y == freq
                        checked_solid += 1
                    else:
                        assert y == asym
                        checked_dashed += 1
        assert checked_solid == 12
        assert checked_dashed == 11  # one cell is 'none'

    def test_single_regime_single_test(self, tmp_path):
        path = write_csv(
            tmp_path,
            [
                HEADER,
                "10,5,vi,0,0,watson,1,1,1,4,0.25,0.05,0",
                "10,5,vi,1,2,watson,1,1,2,4,0.5,0.05,0",
            ],
        )
        spec = FigureSpec(input_csv=str(path), output_image=str(tmp_path / "one.png"))
        panels = render(spec)
        assert len(panels) == 1
        styles = [s["style"] for s in panels[0]["series"]]
        assert styles == ["solid", "dashed"]

    def test_eight_regime_grid(self, tmp_path):
        lines = [HEADER]
        for reg in ("i", "ii", "iii", "iv", "va", "vb", "vi", "vii"):
            for ell in range(3):
                lines.append(f"10,5,{reg},{ell},{0.4*ell},watson,1,1,1,4,0.25,0.05,0")
        path = write_csv(tmp_path, lines)
        panels = render(FigureSpec(input_csv=str(path), output_image=str(tmp_path / "grid.png")))
        assert len(panels) == 8
        assert (tmp_path / "grid.png").exists()

    def test_rendering_is_deterministic(self, golden_csv, tmp_path):
        blobs = []
        for k in range(2):
            img = tmp_path / f"fig{k}.png"
            render(FigureSpec(input_csv=str(golden_csv), output_image=str(img)))
            blobs.append(img.read_bytes() + (tmp_path / f"fig{k}.json").read_bytes())
        assert blobs[0] == blobs[1]

    def test_svg_output(self, golden_csv, tmp_path):
        img = tmp_path / "fig.svg"
        render(FigureSpec(input_csv=str(golden_csv), output_image=str(img)))
        assert img.read_text().startswith("<?xml")


class TestCli:
    def test_end_to_end(self, golden_csv, tmp_path, capsys):
        out = tmp_path / "fig.png"
        assert main([str(golden_csv), "--out", str(out), "--dpi", "72"]) == 0
        assert out.exists()
        assert (tmp_path / "fig.json").exists()

    def test_schema_violation_exits_nonzero(self, tmp_path, capsys):
        bad = write_csv(tmp_path, ["not,a,study", "1,2,3"])
        code = main([str(bad), "--out", str(tmp_path / "x.png")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_custom_sidecar_path(self, golden_csv, tmp_path):
        side = tmp_path / "series.json"
        assert main([str(golden_csv), "--out", str(tmp_path / "f.png"),
                     "--sidecar", str(side)]) == 0
        assert side.exists()
