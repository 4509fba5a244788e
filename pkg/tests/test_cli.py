import io

import numpy as np
import pytest

from balsel import cli, models, statespace
from balsel.errors import FormatError


def run(argv):
    return cli.main(argv)


def write_scalar_model(path):
    m = statespace.StateSpaceModel([[-1.0]], [[1.0]], [[1.0]])
    with open(path, "w") as fh:
        cli.write_model(fh, m)
    return path


def write_symmetric_model(path, n=6, seed=61):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    a = 0.5 * (a + a.T)
    a -= (np.linalg.eigvalsh(a).max() + 0.3) * np.eye(n)
    m = statespace.StateSpaceModel(a, np.eye(n), np.eye(n))
    with open(path, "w") as fh:
        cli.write_model(fh, m)
    return path


class TestMatrixFormat:
    def test_round_trip_real(self):
        a = np.array([[1.0, -2.5], [1e-17, 3.0]])
        buf = io.StringIO()
        cli.write_matrix(buf, a)
        back = cli.read_matrix(buf.getvalue())
        np.testing.assert_array_equal(back.real, a)
        assert "real" in buf.getvalue().splitlines()[0]

    def test_round_trip_complex(self):
        a = np.array([[1 + 2j, -0.5j], [3.0, 4 - 1e-13j]])
        buf = io.StringIO()
        cli.write_matrix(buf, a)
        back = cli.read_matrix(buf.getvalue())
        np.testing.assert_array_equal(back, a)

    def test_comments_ignored(self):
        text = "# header comment\nmatrix 1 2 real\n1 2 # trailing\n"
        np.testing.assert_array_equal(cli.read_matrix(text).real, [[1.0, 2.0]])

    def test_bad_header(self):
        with pytest.raises(FormatError):
            cli.read_matrix("matrice 2 2 real\n1 2 3 4")

    def test_truncated_block(self):
        with pytest.raises(FormatError):
            cli.read_matrix("matrix 2 2 real\n1 2 3")


class TestModelFormat:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "m.txt"
        m = models.random_stable_system(4, 2, 3, seed=9, time_domain="discrete")
        with open(path, "w") as fh:
            cli.write_model(fh, m)
        back = cli.read_model(path.read_text())
        np.testing.assert_array_equal(back.a, m.a)
        np.testing.assert_array_equal(back.b, m.b)
        np.testing.assert_array_equal(back.c, m.c)
        assert back.time_domain == "discrete"


class TestKeyValueConfig:
    def test_parse(self):
        cfg = cli.read_keyvalue_config("n = 32\nkernel_width=0.2 # width\n\n# c\n")
        assert cfg == {"n": "32", "kernel_width": "0.2"}
        params = cli.gl_params_from_config(cfg)
        assert params.n == 32
        assert params.kernel_width == 0.2

    def test_bad_line(self):
        with pytest.raises(FormatError):
            cli.read_keyvalue_config("novalue\n")


class TestGramiansCommand:
    def test_scalar_file(self, tmp_path, capsys):
        path = write_scalar_model(tmp_path / "m.txt")
        out = tmp_path / "g"
        assert run(["gramians", "--model", str(path), "--out", str(out)]) == 0
        wc = cli.read_matrix((out / "Wc.txt").read_text())
        np.testing.assert_allclose(wc.real, [[0.5]])

    def test_corrupt_model_exit_3(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("model continuous\nmatrix 1 1 real\n")
        assert run(["gramians", "--model", str(bad)]) == 3

    def test_unstable_model_exit_2(self, tmp_path, capsys):
        path = tmp_path / "u.txt"
        m = statespace.StateSpaceModel([[1.0]], [[1.0]], [[1.0]])
        with open(path, "w") as fh:
            cli.write_model(fh, m)
        assert run(["gramians", "--model", str(path)]) == 2

    def test_generated_outputs_reload_psd(self, tmp_path, capsys):
        out = tmp_path / "g"
        assert (
            run(
                [
                    "gramians",
                    "--generate",
                    "25,25,25,5,discrete",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        for name in ("Wc.txt", "Wo.txt"):
            w = cli.read_matrix((out / name).read_text())
            lam = np.linalg.eigvalsh(0.5 * (w + w.conj().T))
            assert lam.min() >= -1e-10 * abs(lam).max()


class TestSelectCommand:
    def test_fixture_indices_one_based(self, tmp_path, capsys):
        # diagonal decays: modes concentrate on the slowest states
        m = statespace.StateSpaceModel(
            np.diag([-0.1, -4.0, -0.2, -5.0]), np.eye(4), np.eye(4)
        )
        path = tmp_path / "m.txt"
        with open(path, "w") as fh:
            cli.write_model(fh, m)
        assert run(["select", "--model", str(path), "--rank", "2"]) == 0
        lines = capsys.readouterr().out.splitlines()
        gamma_line = next(l for l in lines if l.startswith("gamma "))
        assert set(gamma_line.split()[1].split(",")) == {"1", "3"}

    def test_no_collocate_disjoint(self, tmp_path, capsys):
        path = write_symmetric_model(tmp_path / "m.txt")
        assert run(
            ["select", "--model", str(path), "--rank", "2", "--no-collocate"]
        ) == 0
        out = capsys.readouterr().out.splitlines()
        gamma = set(next(l for l in out if l.startswith("gamma ")).split()[1].split(","))
        beta = set(next(l for l in out if l.startswith("beta ")).split()[1].split(","))
        assert not gamma & beta

    def test_csv_written(self, tmp_path, capsys):
        out = tmp_path / "sel.csv"
        assert (
            run(["select", "--generate", "8,8,8,3", "--rank", "3", "--out", str(out)])
            == 0
        )
        lines = out.read_text().splitlines()
        assert lines[0] == "side,pivot_rank,index,abs_r_diag"
        assert len(lines) == 1 + 6


class TestBruteforceCommand:
    def test_deterministic_csv_and_summary(self, tmp_path, capsys):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        args = ["bruteforce", "--generate", "10,10,10,4,discrete", "--budget", "3"]
        assert run(args + ["--out", str(out1)]) == 0
        assert run(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        lines = out1.read_text().splitlines()
        assert lines[0] == "value"
        assert len(lines) == 1 + 120 + 1  # header + C(10,3) + summary
        assert lines[-1].startswith("# best=")

    def test_cap_exit_4(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("BALSEL_CAP", "10")
        out = tmp_path / "c.csv"
        code = run(
            [
                "bruteforce",
                "--generate",
                "10,10,10,4,discrete",
                "--budget",
                "3",
                "--out",
                str(out),
            ]
        )
        assert code == 4


class TestBenchRandomCommand:
    def test_row_count_and_determinism(self, tmp_path, capsys):
        out1 = tmp_path / "r1.csv"
        out2 = tmp_path / "r2.csv"
        args = [
            "bench-random",
            "--generate",
            "12,12,12,6",
            "--rank",
            "2",
            "--seeds",
            "0",
            "--ensemble-count",
            "200",
        ]
        assert run(args + ["--out", str(out1)]) == 0
        assert run(args + ["--out", str(out2)]) == 0
        lines = out1.read_text().splitlines()
        assert lines[0] == "seed,r,qr_value,sample_id,sample_value"
        assert len(lines) == 1 + 200
        assert out1.read_bytes() == out2.read_bytes()


class TestGLDemoCommand:
    def test_small_run(self, tmp_path, capsys):
        cfgfile = tmp_path / "gl.cfg"
        cfgfile.write_text("n=28\n")
        out = tmp_path / "gl"
        assert (
            run(
                [
                    "gl-demo",
                    "--gl-params",
                    str(cfgfile),
                    "--rank",
                    "2",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        placement = (out / "placement.csv").read_text().splitlines()
        assert placement[0] == (
            "r,pair,sensor_index,sensor_xi,actuator_index,actuator_xi,h2,stable"
        )
        assert len(placement) == 1 + 1 + 2  # header + r=1 row + r=2 rows
        gain = (out / "lqg_gain.csv").read_text().splitlines()
        assert gain[0] == "omega,actuator_row,sensor_col,gain_db"
        assert len(gain) == 1 + 3 * 2 * 2


class TestScalingCommand:
    def test_trivial_run_writes_csv(self, tmp_path, capsys, monkeypatch):
        # shrink the sweeps through the module hooks for a smoke run
        out = tmp_path / "s.csv"
        assert run(["scaling", "--rank", "4", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "sweep,n,r,seconds"
        assert len(lines) == 1 + 4 + 4
