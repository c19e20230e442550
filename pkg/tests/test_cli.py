import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from catlattice import cats, fock, lattice
from catlattice.cli import (
    EXIT_BREACH,
    EXIT_ERROR,
    EXIT_OK,
    OUTPUT_DIR_ENV,
    DescriptorError,
    RunConfig,
    main,
    parse_input_descriptor,
    run,
)
from catlattice.lattice import LatticeSpec
from catlattice.tables import read_table


def invoke(*args, env=None):
    return CliRunner().invoke(main, [str(a) for a in args], env=env, catch_exceptions=False)


def test_parse_fock():
    d = parse_input_descriptor("fock:3")
    assert (d.kind, d.k) == ("fock", 3)
    assert np.array_equal(d(10), fock.basis(3, 10))


def test_parse_mean_photon_forms():
    d = parse_input_descriptor("coherent:n=50")
    assert d.beta == pytest.approx(math.sqrt(50))
    psi = d(150)
    assert fock.mean_occupation(psi) == pytest.approx(50, abs=1e-8)
    d = parse_input_descriptor("dfock:n=50,2")
    assert (d.beta, d.k) == (pytest.approx(math.sqrt(50)), 2)


def test_parse_explicit_amplitudes():
    d = parse_input_descriptor("dfock:7.0711,0,2")
    assert abs(d.beta) ** 2 == pytest.approx(50, abs=1e-3)
    assert d.k == 2
    d = parse_input_descriptor("coherent:-1.5,2e-1")
    assert d.beta == complex(-1.5, 0.2)
    d = parse_input_descriptor("cat:1,0")
    assert (d.beta, d.k) == (1, 0)
    d = parse_input_descriptor("cat:1,0,3")
    assert d.k == 3
    state, _ = cats.cat_from_fock(1, 3, 40)
    assert np.array_equal(d(40), state)


@pytest.mark.parametrize("text, position", [
    ("foo:1", 0),
    ("fock:", 5),
    ("fock:x", 5),
    ("fock:3,", 6),
    ("coherent:1", 10),
    ("coherent:1,abc", 11),
    ("dfock:1,0", 9),
    ("coherent:n=-4", 11),
])
def test_parse_errors_report_position(text, position):
    with pytest.raises(DescriptorError) as info:
        parse_input_descriptor(text)
    assert info.value.position == position
    assert "expected" in str(info.value)


def test_run_config_validation():
    with pytest.raises(Exception):
        RunConfig("simulate", z_samples=1).validate()
    with pytest.raises(Exception):
        RunConfig("simulate", z_max=0).validate()
    with pytest.raises(Exception):
        RunConfig("bogus").validate()


def test_simulate_writes_long_table(tmp_path):
    out = tmp_path / "sim.csv"
    res = invoke("simulate", "--sites", 30, "--input", "fock:0", "--zmax", 2, "--samples", 5, "-o", out)
    assert res.exit_code == EXIT_OK
    text = out.read_text()
    assert "\r" not in text
    assert text.startswith("# config: ")
    config, data = read_table(out)
    assert config["spec"]["sites"] == 30 and config["input"] == "fock:0"
    assert list(data) == ["z", "m", "re", "im", "intensity"]
    assert data["z"].size == 5 * 30
    assert np.allclose(data["intensity"], data["re"] ** 2 + data["im"] ** 2, atol=1e-15)
    last = data["intensity"][-30:]
    assert last[0] == pytest.approx(math.exp(-4), abs=1e-12)


def test_simulate_breach_exit_status(tmp_path):
    res = invoke("simulate", "--sites", 20, "--zmax", 5, "--samples", 10, "-o", tmp_path / "s.csv")
    assert res.exit_code == EXIT_BREACH


def test_output_directory_from_environment(tmp_path):
    res = invoke("green", "--sites", 20, "--input", "fock:1", "--zmax", 1, "--samples", 3,
                 env={OUTPUT_DIR_ENV: str(tmp_path)})
    assert res.exit_code == EXIT_OK
    assert (tmp_path / "green.csv").exists()


def test_green_needs_single_site(tmp_path):
    with pytest.raises(Exception):
        run(RunConfig("green", input="coherent:1,0", output_path=str(tmp_path / "g.csv")))


def test_compare_gate(tmp_path):
    res = invoke("compare", "--sites", 160, "--input", "fock:3", "--zmax", 4, "--samples", 20,
                 "-o", tmp_path / "c.csv")
    assert res.exit_code == EXIT_OK
    _, data = read_table(tmp_path / "c.csv")
    assert np.max(data["abs_diff"]) <= 1e-8


def test_compare_reports_mismatch(tmp_path):
    status, summary = run(RunConfig("compare", LatticeSpec(sites=20), "fock:0", z_max=5, z_samples=6,
                                    output_path=str(tmp_path / "c.csv")))
    assert status == EXIT_BREACH
    assert summary["max_abs_diff"] > 1e-8
    assert 0 <= summary["at_m"] < 20 and summary["at_z"] > 0


def test_csv_round_trip_is_bit_identical(tmp_path):
    sim = tmp_path / "sim.csv"
    cfg = RunConfig("simulate", LatticeSpec(sites=60), "coherent:1.1,-0.7", z_max=2.5, z_samples=7,
                    output_path=str(sim))
    assert run(cfg)[0] == EXIT_OK
    _, data = read_table(sim)
    rec = lattice.evolve_numeric(cfg.spec, cfg.validate()(60), cfg.z_grid)
    assert np.array_equal(data["re"].reshape(7, 60), rec.fields.real)
    assert np.array_equal(data["im"].reshape(7, 60), rec.fields.imag)
    out = tmp_path / "cmp.csv"
    res = invoke("compare", "--sites", 60, "--input", "coherent:1.1,-0.7", "--numeric-csv", sim, "-o", out)
    assert res.exit_code == EXIT_OK
    _, cmp = read_table(out)
    assert np.array_equal(cmp["numeric_re"], data["re"])
    assert np.array_equal(cmp["numeric_im"], data["im"])


def test_json_mirrors_csv(tmp_path):
    args = ["simulate", "--sites", 25, "--zmax", 1, "--samples", 3]
    assert invoke(*args, "-o", tmp_path / "a.csv").exit_code == 0
    assert invoke(*args, "--format", "json", "-o", tmp_path / "a.json").exit_code == 0
    payload = json.loads((tmp_path / "a.json").read_text())
    assert payload["columns"] == ["z", "m", "re", "im", "intensity"]
    _, csv_data = read_table(tmp_path / "a.csv")
    _, json_data = read_table(tmp_path / "a.json")
    for col in csv_data:
        assert np.array_equal(csv_data[col], json_data[col])


def test_outputs_are_deterministic(tmp_path):
    args = ["cat", "--sites", 60, "--input", "coherent:1.5,0.5", "--zmax", 1.5]
    invoke(*args, "-o", tmp_path / "one.csv")
    invoke(*args, "-o", tmp_path / "two.csv")
    assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "two.csv").read_bytes()
    assert (tmp_path / "one_components.csv").read_bytes() == (tmp_path / "two_components.csv").read_bytes()


def test_wigner_center_of_first_fock_state(tmp_path):
    out = tmp_path / "w.csv"
    res = invoke("wigner", "--state", "fock:1", "--range", 2, "--resolution", 41, "-o", out)
    assert res.exit_code == EXIT_OK
    _, data = read_table(out)
    assert data["w"].size == 41 * 41
    centre = data["w"][(data["x"] == 0) & (data["y"] == 0)]
    assert centre[0] == pytest.approx(-1, abs=1e-12)
    assert data["w"].min() == pytest.approx(-1, abs=1e-12)


def test_wigner_too_small_dim_is_breach(tmp_path):
    res = invoke("wigner", "--state", "fock:0", "--range", 3, "--resolution", 7, "--dim", 20,
                 "-o", tmp_path / "w.csv")
    assert res.exit_code == EXIT_BREACH


def test_cat_command_tables(tmp_path):
    out = tmp_path / "cat.csv"
    res = invoke("cat", "--sites", 80, "--input", "cat:1.5,0,1", "-o", out)
    assert res.exit_code == EXIT_OK
    _, comps = read_table(tmp_path / "cat_components.csv")
    assert comps["fock_index"].tolist() == [1, 1]
    assert comps["displacement_im"].tolist() == [1.5, -1.5]
    _, state = read_table(out)
    assert np.sum(state["intensity"]) == pytest.approx(1, abs=1e-10)


def test_cat_command_rejects_fock_input(tmp_path):
    with pytest.raises(Exception):
        run(RunConfig("cat", input="fock:2", output_path=str(tmp_path / "c.csv")))


def test_truncation_error_exit_status(tmp_path):
    res = invoke("simulate", "--sites", 20, "--input", "coherent:n=50", "-o", tmp_path / "x.csv")
    assert res.exit_code == EXIT_ERROR


def test_bad_descriptor_exit_status(tmp_path):
    res = invoke("simulate", "--input", "fock:-1", "-o", tmp_path / "x.csv")
    assert res.exit_code == EXIT_ERROR
