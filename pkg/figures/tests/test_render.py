import json
import shutil
import subprocess

import pytest

from ifmfigures.render import load_table, render_figure, run
from ifmfigures.recipes import BUILDERS

MANIFEST = json.loads((__import__("pathlib").Path(__file__).parents[1] / "manifest.json").read_text())


def cli(*args):
    subprocess.run(["ifmsim", *args], check=True, capture_output=True)


@pytest.fixture(scope="session")
def small_data(tmp_path_factory):
    """Schema-true CSVs for every manifest input, at unit-test sizes, produced
    through the simulator CLI (the only interface this package consumes)."""
    data = tmp_path_factory.mktemp("data")
    out = lambda name: ("--out", str(data / name))
    cli("evolution", "--n", "10", "--alpha", "1", *out("fig02_evolution_transparent.csv"))
    cli("evolution", "--n", "10", "--alpha", "0", *out("fig02_evolution_opaque.csv"))
    cli("sweep", "--n", "log:1:100:9", "--alpha", "0", *out("fig02_loss_vs_n.csv"))
    cli("evolution", "--n", "10", "--alpha", "0.2", *out("fig03_evolution_a020.csv"))
    cli("evolution", "--n", "10", "--alpha", "0.5", *out("fig03_evolution_a050.csv"))
    cli("evolution", "--n", "10", "--alpha", "0.95", *out("fig03_evolution_a095.csv"))
    cli("sweep", "--n", "10,50", "--alpha", "0:1:21", *out("fig04_sweep_linear.csv"))
    cli("contrast", "--contrasts", "1,10,100", "--anchor", "0.99", *out("fig05_contrast.csv"))
    cli("sweep", "--n", "200,2000", "--log-scale", *out("fig06_sweep_log.csv"))
    for panel, a1, a2 in (("a", "0.2", "0.5"), ("b", "0.04", "0.64"), ("c", "0.5", "0.99"), ("d", "0.001", "0.999")):
        cli(
            "discriminate", "--alpha1", a1, "--alpha2", a2, "--n", "10,100",
            "--thresholds", "log:0.49:0.01:7", "--replications", "300",
            *out(f"fig07{panel}_curves.csv"),
        )
        cli("bound", "--alpha1", a1, "--alpha2", a2, "--p-e", "log:0.005:0.45:21",
            *out(f"fig07{panel}_bound.csv"))
    for stat, fig in (("binomial", "fig08"), ("poisson", "fig09")):
        for signal in ("reference", "sample"):
            cli(
                "precision", "--statistics", stat,
                "--signal", f"classical_transmission,{signal}",
                "--n", "10,100", "--alpha", "0.1:0.9:5",
                *out(f"{fig}_{stat}_{signal}.csv"),
            )
    cli("phase", "--n", "2,5", "--phi", "0:6.283185307179586:41", *out("fig10_phase.csv"))
    return data


@pytest.fixture()
def workspace(small_data, tmp_path):
    """A manifest directory wired to a private copy of the small data set."""
    data = tmp_path / "data"
    shutil.copytree(small_data, data)
    manifest = dict(MANIFEST, data_dir="data", output_dir="output")
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(manifest))
    return path


class TestLoadTable:
    def test_parses_metadata_and_columns(self, small_data):
        table = load_table(small_data / "fig02_evolution_opaque.csv")
        assert table.config["subcommand"] == "evolution"
        assert set(table.columns) >= {"t_over_t", "p_r", "p_s", "p_l"}
        assert table["p_l"][-1] == pytest.approx(0.2194539, abs=1e-6)

    def test_rejects_missing_metadata(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="metadata"):
            load_table(bad)

    def test_rejects_ragged_rows(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text('# {"x": 1}\na,b\n1,2\n3\n')
        with pytest.raises(ValueError, match="ragged"):
            load_table(bad)

    def test_rejects_empty_table(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text('# {"x": 1}\na,b\n')
        with pytest.raises(ValueError, match="no data rows"):
            load_table(bad)


class TestManifest:
    def test_every_builder_is_registered(self):
        for entry in MANIFEST["figures"]:
            assert entry["builder"] in BUILDERS
            _, required = BUILDERS[entry["builder"]]
            assert set(required) <= set(entry["inputs"])

    def test_covers_all_nine_figures(self):
        ids = [entry["id"] for entry in MANIFEST["figures"]]
        assert ids == [f"fig{k:02d}" for k in range(2, 11)]


class TestRender:
    def test_full_manifest_renders(self, workspace):
        assert run(workspace) == 0
        outputs = sorted(p.name for p in (workspace.parent / "output").glob("*.png"))
        assert len(outputs) == 9
        for p in (workspace.parent / "output").glob("*.png"):
            assert p.stat().st_size > 5000

    def test_rerun_is_byte_identical(self, workspace):
        out_dir = workspace.parent / "output"
        assert run(workspace, only=["fig04"]) == 0
        first = (out_dir / "fig04_probabilities_vs_alpha.png").read_bytes()
        assert run(workspace, only=["fig04"]) == 0
        second = (out_dir / "fig04_probabilities_vs_alpha.png").read_bytes()
        assert first == second

    def test_missing_input_is_clean_per_figure_error(self, workspace, capsys):
        (workspace.parent / "data" / "fig04_sweep_linear.csv").unlink()
        assert run(workspace, only=["fig04"]) == 1
        err = capsys.readouterr().err
        assert "figure fig04" in err
        assert "missing input" in err
        assert not (workspace.parent / "output" / "fig04_probabilities_vs_alpha.png").exists()

    def test_other_figures_survive_one_missing_input(self, workspace, capsys):
        (workspace.parent / "data" / "fig05_contrast.csv").unlink()
        assert run(workspace) == 1
        err = capsys.readouterr().err
        assert "figure fig05" in err
        assert (workspace.parent / "output" / "fig04_probabilities_vs_alpha.png").exists()

    def test_schema_mismatch_reported(self, workspace, capsys):
        target = workspace.parent / "data" / "fig05_contrast.csv"
        target.write_text('# {"subcommand": "contrast"}\nfoo,bar\n1,2\n')
        assert run(workspace, only=["fig05"]) == 1
        assert "missing columns" in capsys.readouterr().err

    def test_unknown_builder_rejected(self, small_data, tmp_path):
        entry = {"id": "figXX", "builder": "nope", "output": "x.png", "inputs": {}}
        with pytest.raises(ValueError, match="unknown builder"):
            render_figure(entry, small_data, tmp_path)
