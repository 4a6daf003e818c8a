import math
import subprocess
import sys

import numpy as np
import pytest

from liesys import cli
from liesys.errors import ConfigError, UsageError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


def read(path):
    header, data = cli.read_csv(path)
    return header, data


def test_solve_riccati_example(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, stdout, _ = run(capsys, "solve", "riccati", "--b0", "1", "--b1", "0", "--b2", "1", "--x0", "0",
                          "--t0", "0", "--t1", "1", "--out", str(out))
    assert code == 0
    header, data = read(out)
    assert header == ["t", "x"]
    assert abs(data[-1, 1] - math.tan(1.0)) <= 1e-6
    assert abs(float(report(stdout)["x_final"]) - 1.5574) <= 1e-4


def test_solve_csv_has_infinity_token(capsys, tmp_path):
    out = tmp_path / "p.csv"
    code, _, _ = run(capsys, "solve", "--system", "riccati", "--b0", "1", "--b1", "0", "--b2", "1",
                     "--x0", "inf", "--t1", "2", "--samples", "3", "--out", str(out))
    assert code == 0
    assert out.read_text().splitlines()[1] == "0,inf"


def test_solve_group_route_agrees(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["solve", "riccati", "--b0", "1+t", "--b1", "sin(t)", "--b2", "0.3", "--x0", "0.1", "--t1", "0.8"]
    assert run(capsys, *base, "--out", str(a))[0] == 0
    assert run(capsys, *base, "--route", "group", "--out", str(b))[0] == 0
    np.testing.assert_allclose(read(a)[1], read(b)[1], rtol=1e-8)


def test_check_integrability_example(capsys):
    code, out, _ = run(capsys, "check-integrability", "--b0", "2*(1+t^2)", "--b1", "3*(1+t^2)",
                       "--b2", "(1+t^2)/2", "--c0", "1", "--c2", "1", "--t0", "0", "--t1", "2")
    rep = report(out)
    assert code == 0 and rep["holds"] == "true" and abs(float(rep["K"]) - 3) <= 1e-8
    assert float(rep["scale_t0"]) == pytest.approx(0.5)


def test_check_integrability_negative(capsys):
    code, out, _ = run(capsys, "check-integrability", "--b0", "1", "--b1", "t", "--b2", "1", "--c0", "1",
                       "--c2", "1")
    assert code == 0 and report(out)["holds"] == "false"


@pytest.mark.parametrize("system", ["riccati", "pinney", "ermakov", "oscillator", "hamiltonian"])
def test_verify_algebra(capsys, system):
    code, out, _ = run(capsys, "verify-algebra", "--system", system, "--points", "20")
    rep = report(out)
    assert code == 0 and float(rep["max_residual"]) <= 1e-6 and rep["closes"] == "true"


def test_superpose_riccati_from_files(capsys, tmp_path):
    files = []
    for i, x0 in enumerate(("0", "1", "-1")):
        f = tmp_path / f"x{i}.csv"
        assert run(capsys, "solve", "riccati", "--b0", "1", "--b1", "0", "--b2", "1", "--x0", x0,
                   "--t1", "1.2", "--out", str(f))[0] == 0
        files.append(str(f))
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "superpose", "riccati", "--inputs", ",".join(files), "--k", "1", "--out", str(out))
    assert code == 0
    np.testing.assert_allclose(read(out)[1], read(files[2])[1], rtol=1e-10, atol=1e-12)


def test_superpose_oscillator_partial(capsys, tmp_path):
    src = tmp_path / "c.csv"
    assert run(capsys, "solve", "oscillator", "--omega", "1", "--x0", "1", "--v0", "0", "--t1", "1.2",
               "--out", str(src))[0] == 0
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "superpose", "oscillator", "--inputs", str(src), "--k", "1", "--kprime", "0",
                     "--out", str(out))
    assert code == 0
    _, data = read(out)
    np.testing.assert_allclose(data[:, 1], np.sin(data[:, 0]), atol=1e-6)


def test_superpose_pinney(capsys, tmp_path):
    x, z = tmp_path / "x.csv", tmp_path / "z.csv"
    assert run(capsys, "solve", "oscillator", "--omega", "1", "--x0", "1", "--v0", "0", "--t1", "3",
               "--out", str(x))[0] == 0
    assert run(capsys, "solve", "oscillator", "--omega", "1", "--x0", "0", "--v0", "1", "--t1", "3",
               "--out", str(z))[0] == 0
    out = tmp_path / "y.csv"
    code, _, _ = run(capsys, "superpose", "pinney", "--inputs", f"{x},{z}", "--c", "1", "--y0", "2",
                     "--vy0", "0", "--out", str(out))
    assert code == 0
    _, data = read(out)
    t = data[:, 0]
    np.testing.assert_allclose(data[:, 1], np.sqrt(4 * np.cos(t) ** 2 + 0.25 * np.sin(t) ** 2), atol=1e-6)


@pytest.mark.parametrize("argv,names", [
    (["--system", "oscillator", "--omega", "1+0.3*sin(t)", "--x0", "1", "--vx0", "0", "--z0", "0", "--vz0", "1"],
     ["W"]),
    (["--system", "ermakov", "--omega", "1+0.3*sin(t)", "--c", "1", "--x0", "1", "--y0", "0.5", "--vx0", "0",
      "--vy0", "0.3"], ["F"]),
    (["--system", "generalized", "--omega", "1+0.3*sin(t)", "--f", "1+u^2", "--g", "u", "--x0", "1",
      "--y0", "1.5", "--vx0", "0", "--vy0", "0.2"], ["F"]),
    (["--system", "pinney", "--omega", "1+0.3*sin(t)", "--c", "1", "--x0", "1", "--y0", "1.3", "--z0", "0",
      "--vx0", "0", "--vy0", "0.2", "--vz0", "1"], ["I1", "I2", "W"]),
])
def test_invariant_command(capsys, argv, names):
    code, out, _ = run(capsys, "invariant", *argv, "--t1", "5")
    rep = report(out)
    assert code == 0
    for n in names:
        assert float(rep[f"{n}_max_drift"]) <= 1e-6


def test_transform_and_reduce(capsys, tmp_path):
    out = tmp_path / "t.csv"
    code, stdout, _ = run(capsys, "transform", "--b0", "1", "--b1", "0", "--b2", "1", "--alpha", "1",
                          "--beta", "-tan(t)", "--gamma", "0", "--delta", "1", "--t1", "1.2", "--out", str(out))
    assert code == 0
    _, data = read(out)
    np.testing.assert_allclose(data[:, 1:], np.column_stack([0 * data[:, 0], 2 * np.tan(data[:, 0]),
                                                             1 + 0 * data[:, 0]]), atol=1e-9)
    assert float(report(stdout)["max_route_difference"]) <= 1e-9
    out2 = tmp_path / "r.csv"
    code, stdout, _ = run(capsys, "reduce", "--b0", "1", "--b1", "0", "--b2", "1", "--particular", "tan(t)",
                          "--t1", "1.2", "--out", str(out2))
    assert code == 0 and report(stdout)["in_span_a1_a2"] == "true"
    np.testing.assert_allclose(read(out2)[1], data, atol=1e-9)


def test_transform_rejects_bad_determinant(capsys):
    code, _, err = run(capsys, "transform", "--b0", "1", "--b1", "0", "--b2", "1", "--alpha", "2",
                       "--beta", "0", "--gamma", "0", "--delta", "1")
    assert code == 2 and err.startswith("error[invalid-curve]:")


@pytest.mark.parametrize("argv,kind", [
    (["solve", "riccati", "--b1", "0", "--b2", "1", "--x0", "0"], "usage"),
    (["solve", "riccati", "--b0", "1+", "--b1", "0", "--b2", "1", "--x0", "0"], "syntax"),
    (["solve", "riccati", "--b0", "foo", "--b1", "0", "--b2", "1", "--x0", "0"], "unknown-identifier"),
    (["frobnicate"], "usage"),
    (["solve", "riccati", "--b0", "1", "--b1", "0", "--b2", "1", "--x0", "0", "--t1", "-1"], "usage"),
    (["solve", "riccati", "--b0", "1", "--b1", "0", "--b2", "1", "--x0", "0", "--method", "euler"], "usage"),
    (["solve", "riccati", "--bogus", "1"], "usage"),
    ([], "usage"),
])
def test_usage_errors_exit_1(capsys, argv, kind):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err.startswith(f"error[{kind}]:")


@pytest.mark.parametrize("argv,kind", [
    (["solve", "riccati", "--b0", "log(t)", "--b1", "0", "--b2", "1", "--x0", "0", "--t0", "-1"], "domain"),
    (["solve", "oscillator", "--omega", "1", "--x0", "1", "--v0", "0", "--max-steps", "3"], "max-steps"),
    (["check-integrability", "--b0", "t", "--b1", "0", "--b2", "1", "--c0", "1", "--c2", "1", "--t0", "-1"],
     "zero-coefficient"),
    (["check-integrability", "--b0", "1", "--b1", "0", "--b2", "-1", "--c0", "1", "--c2", "1"], "sign"),
])
def test_numerical_errors_exit_2(capsys, argv, kind):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith(f"error[{kind}]:")


def test_config_precedence_and_errors(tmp_path):
    cfg = tmp_path / "s.conf"
    cfg.write_text("# scenario\ncommand = solve\nsystem = riccati\nb0 = 2\nb1 = 0\nb2 = 1\nx0 = 0\n"
                   "t1 = 0.5\n")
    sc = cli.load_scenario(cfg, ["--b0", "1"])
    assert sc["b0"] == "1" and sc.t1 == 0.5 and sc.command == "solve"
    sc = cli.load_scenario(cfg, [])
    assert sc["b0"] == "2"
    empty = tmp_path / "empty.conf"
    empty.write_text("")
    sc = cli.load_scenario(empty, ["solve", "riccati", "--b0", "1", "--b1", "0", "--b2", "1", "--x0", "0"])
    assert sc.system == "riccati" and sc["samples"] == 101
    bad = tmp_path / "bad.conf"
    bad.write_text("bogus = 1\n")
    with pytest.raises(ConfigError) as info:
        cli.read_config(bad)
    assert info.value.line == 1 and "bogus" in str(info.value)
    noeq = tmp_path / "noeq.conf"
    noeq.write_text("b0 = 1\n\njust words\n")
    with pytest.raises(ConfigError) as info:
        cli.read_config(noeq)
    assert info.value.line == 3
    with pytest.raises(UsageError):
        cli.load_scenario(cfg, ["--samples", "1"])


def test_config_errors_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("bogus = 1\n")
    code, _, err = run(capsys, "--config", str(bad))
    assert code == 1 and err.startswith("error[config]: line 1")


def test_deterministic_output(capsys, tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"o{i}.csv"
        run(capsys, "solve", "ermakov", "--omega", "1+0.3*sin(t)", "--f", "1+u^2", "--g", "u", "--x0", "1",
            "--y0", "1.5", "--vx0", "0", "--vy0", "0.2", "--t1", "2", "--out", str(p))
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_batch_mode(capsys, tmp_path):
    for i, x0 in enumerate((0.0, 0.5)):
        (tmp_path / f"run{i}.conf").write_text(
            f"command = solve\nsystem = riccati\nb0 = 1\nb1 = 0\nb2 = 1\nx0 = {x0}\n"
            f"out = {tmp_path / f'out{i}.csv'}\n")
    (tmp_path / "broken.conf").write_text("command = solve\nsystem = riccati\n")
    code, out, _ = run(capsys, "--batch", str(tmp_path), "--jobs", "2")
    assert code == 1
    assert (tmp_path / "out0.csv").exists() and (tmp_path / "out1.csv").exists()
    assert f"{tmp_path / 'run0.conf'}: 0" in out


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "liesys", "verify-algebra", "--system", "riccati"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "max_residual" in res.stdout
    res = subprocess.run([sys.executable, "-m", "liesys", "solve", "riccati"], capture_output=True, text=True)
    assert res.returncode == 1 and res.stderr.startswith("error[usage]:")


def test_error_kinds_distinct_and_documented():
    import inspect
    from pathlib import Path

    from liesys import errors

    kinds = [c.kind for _, c in inspect.getmembers(errors, inspect.isclass) if issubclass(c, errors.LieSysError)]
    assert len(kinds) == len(set(kinds))
    readme = (Path(__file__).resolve().parents[1] / "README.md").read_text()
    missing = [k for k in kinds if f"`error[{k}]`" not in readme]
    assert not missing


def test_benchmark_script_runs():
    from pathlib import Path
    script = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    res = subprocess.run([sys.executable, str(script), "--sizes", "200", "--repeat", "1"],
                         capture_output=True, text=True, timeout=300)
    assert res.returncode == 0 and "run_program" in res.stdout
