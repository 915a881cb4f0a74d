import io
import json

import numpy as np
import pytest

from zzgate import channels
from zzgate.cli import main
from zzgate.experiments import CSV_HEADER, read_results


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_verify_passes():
    code, out = run("verify", "--gamma-samples", "20")
    assert code == 0
    assert "all checks passed" in out
    assert "NOTE" in out and "cp_depolarizing_reference_slope" in out


def test_verify_fails_on_broken_channel(monkeypatch):
    def broken(p):
        w = np.full(16, np.sqrt(p / 16))
        w[0] = np.sqrt(1 - p)
        return w

    monkeypatch.setattr(channels, "kraus_weights", broken)
    code, out = run("verify", "--gamma-samples", "5")
    assert code == 1
    assert "FAILED: kraus_completeness" in out


@pytest.mark.parametrize(
    "argv",
    [
        ("fidelity",),
        ("fidelity", "--kind", "cnot"),
        ("fidelity", "--kind", "cp", "--p", "1.5"),
        ("fidelity", "--kind", "cp", "--reps", "0"),
        ("fidelity", "--kind", "cz", "--seed", "-1"),
        ("figures", "7"),
        ("sweep", "--gamma", "0", "1", "2.5"),
        ("sweep", "--kinds", "cp,xx"),
        ("bogus",),
    ],
)
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_fidelity_depolarizing_cp():
    code, out = run("fidelity", "--kind", "cp", "--p", "0.0125")
    assert code == 0
    assert "fidelity = 0.990625000000" in out
    assert "exact depolarizing law" in out


def test_fidelity_radians_equals_pi_units():
    a = run("fidelity", "--kind", "cz", "--gamma", "0.5", "--sigma-theta", "0.03", "--reps", "100")[1]
    b = run("fidelity", "--kind", "cz", "--gamma", str(0.5 * np.pi), "--sigma-theta", str(0.03 * np.pi),
            "--reps", "100", "--radians")[1]
    assert a.splitlines()[1] == b.splitlines()[1]


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# fidelity run\nkind = cp\np = 0.0125\nreps = 10\n")
    code, out = run("fidelity", "--config", str(cfg))
    assert code == 0 and "0.990625" in out
    code, out = run("fidelity", "--config", str(cfg), "--p", "0.0")
    assert code == 0 and "fidelity = 1.000000000000" in out


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("kind = cp\ncolour = blue\n")
    assert run("fidelity", "--config", str(cfg))[0] == 2
    assert run("fidelity", "--config", str(tmp_path / "missing.cfg"), "--kind", "cp")[0] == 2


def test_sweep_writes_csv(tmp_path):
    out = tmp_path / "s.csv"
    code, _ = run("sweep", "--kinds", "cp,cz", "--gamma", "0", "1", "3", "--sigma-theta", "0.02", "0.02", "1",
                  "--reps", "40", "--output", str(out))
    assert code == 0
    assert out.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    recs = read_results(out)
    assert len(recs) == 6
    assert json.loads(out.with_name("s.meta.json").read_text())["records"] == 6


def test_sweep_point_equals_fidelity_command(tmp_path):
    out = tmp_path / "one.csv"
    run("sweep", "--kinds", "cz", "--gamma", "0.3", "0.3", "1", "--sigma-theta", "0.04", "0.04", "1",
        "--p", "0.001", "0.001", "1", "--reps", "200", "--seed", "4", "--output", str(out))
    rec = read_results(out)[0]
    text = run("fidelity", "--kind", "cz", "--gamma", "0.3", "--sigma-theta", "0.04", "--p", "0.001",
               "--reps", "200", "--seed", "4")[1]
    assert f"fidelity = {rec.fidelity_mean:.12f}" in text


def test_sweep_unwritable_output(tmp_path):
    blocker = tmp_path / "f"
    blocker.write_text("")
    assert run("sweep", "--reps", "5", "--output", str(blocker / "x.csv"))[0] == 1


def test_figure3_surface(tmp_path):
    out = tmp_path / "fig3.csv"
    assert run("figures", "3", "--output", str(out))[0] == 0
    recs = read_results(out)
    assert len(recs) == 41 * 61
    corner = [r for r in recs if np.isclose(r.gamma, 0) and np.isclose(r.sigma_theta, 0.1 * np.pi)][0]
    # 1 - θ²(0.30 + 0.17) at θ = 0.1π
    assert abs(corner.fidelity_mean - (1 - 0.47 * (0.1 * np.pi) ** 2)) < 1e-12


def test_figure1_state_classes(tmp_path):
    out = tmp_path / "fig1.csv"
    assert run("figures", "1", "--reps", "50", "--output", str(out))[0] == 0
    rows = (tmp_path / "fig1.states.csv").read_text().splitlines()
    assert rows[0] == "sigma_theta,state,fidelity_mean,fidelity_std_error"
    last_sigma = rows[-1].split(",")[0]
    values = [float(r.split(",")[2]) for r in rows[1:] if r.split(",")[0] == last_sigma]
    assert len(values) == 16
    assert len(np.unique(np.round(values, 12))) == 3


def test_recommend_command():
    code, out = run("recommend", "--gamma", "0.01", "--sigma-theta", "0.06", "--p", "0.001", "--reps", "200")
    assert code == 0 and out.startswith("recommended: CP")
    code, out = run("recommend", "--gamma", "0.01", "--sigma-theta", "0.01", "--p", "0.0001", "--reps", "200")
    assert code == 0 and out.startswith("recommended: CZ")
