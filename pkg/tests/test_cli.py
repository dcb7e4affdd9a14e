"""Command-line behavior: output shapes, determinism, exit codes."""

import math
import shutil
import subprocess

import pytest

from phasefisher.cli import (
    CSV_HEADER,
    CrossingResult,
    SweepConfig,
    find_crossings,
    main,
    qfi_ecs_ref_at_mean_photons,
    sweep_rows,
)
from phasefisher.exceptions import InvalidEta, NoCrossingFound
from phasefisher.qfi_analytic import (
    CLOSED_FORM,
    QFIResult,
    qfi_ecs_noref,
    qfi_noon_continuous,
)


def _stdout_value(out: str, key: str) -> float:
    for line in out.splitlines():
        if line.startswith(key):
            return float(line.split("=")[1].split()[0])
    raise AssertionError(f"no line starting with {key!r} in output:\n{out}")


class TestPoint:
    def test_ecs_without_reference(self, capsys):
        rc = main(["point", "--family", "ecs", "--alpha", "1.0", "--eta", "0.9",
                   "--reference", "without"])
        assert rc == 0
        out = capsys.readouterr().out
        f = _stdout_value(out, "F")
        assert f == pytest.approx(qfi_ecs_noref(1.0, 0.9).value, rel=1e-15)
        assert _stdout_value(out, "dphi") == pytest.approx(f**-0.5, rel=1e-15)
        assert "closed_form" in out

    def test_noon(self, capsys):
        rc = main(["point", "--family", "noon", "--n", "3", "--eta", "0.9"])
        assert rc == 0
        f = _stdout_value(capsys.readouterr().out, "F")
        assert f == pytest.approx(9.0 * 0.9**3, rel=1e-15)

    def test_ecs_requires_reference(self, capsys):
        rc = main(["point", "--family", "ecs", "--alpha", "1.0", "--eta", "0.9"])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_ecs_requires_alpha(self, capsys):
        rc = main(["point", "--family", "ecs", "--eta", "0.9", "--reference", "with"])
        assert rc == 2

    def test_noon_requires_n(self, capsys):
        rc = main(["point", "--family", "noon", "--eta", "0.9"])
        assert rc == 2

    def test_unknown_family_rejected_by_parser(self, capsys):
        rc = main(["point", "--family", "cat", "--eta", "0.9"])
        assert rc == 2

    def test_oracle_cross_check_passes(self, capsys):
        rc = main(["point", "--family", "ecs", "--alpha", "0.8", "--eta", "0.9",
                   "--reference", "without", "--oracle"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "oracle =" in out

    def test_oracle_cross_check_noon(self, capsys):
        rc = main(["point", "--family", "noon", "--n", "2", "--eta", "0.7", "--oracle"])
        assert rc == 0

    def test_oracle_breach_exits_three(self, capsys, monkeypatch):
        def inflated(alpha, eta):
            return QFIResult(1.2 * qfi_ecs_noref(alpha, eta).value, CLOSED_FORM)

        monkeypatch.setattr("phasefisher.cli.qfi_ecs_noref", inflated)
        rc = main(["point", "--family", "ecs", "--alpha", "0.8", "--eta", "0.9",
                   "--reference", "without", "--oracle"])
        assert rc == 3
        assert "exceeds" in capsys.readouterr().err


class TestSweepConfig:
    def test_grid_spacings(self):
        log = SweepConfig(eta=0.9, n_min=1.0, n_max=100.0, points=3).grid()
        assert list(log) == pytest.approx([1.0, 10.0, 100.0], rel=1e-12)
        lin = SweepConfig(eta=0.9, n_min=1.0, n_max=3.0, points=3, spacing="linear").grid()
        assert list(lin) == pytest.approx([1.0, 2.0, 3.0], rel=1e-12)

    def test_validation(self):
        with pytest.raises(InvalidEta):
            SweepConfig(eta=0.0)
        with pytest.raises(ValueError):
            SweepConfig(eta=0.9, n_min=-1.0)
        with pytest.raises(ValueError):
            SweepConfig(eta=0.9, n_min=5.0, n_max=2.0)
        with pytest.raises(ValueError):
            SweepConfig(eta=0.9, points=1)
        with pytest.raises(ValueError):
            SweepConfig(eta=0.9, spacing="geometric")
        with pytest.raises(ValueError):
            SweepConfig(eta=0.9, truncation_tol=0.0)


class TestSweep:
    def test_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--eta", "0.9", "--output", str(out),
                   "--n-min", "1", "--n-max", "10", "--points", "5"])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 6
        for line in lines[1:]:
            assert len(line.split(",")) == 12
        first = lines[1].split(",")
        assert float(first[0]) == pytest.approx(1.0)
        assert float(first[1]) == 0.9
        # sensitivity columns are the inverse square roots of the F columns
        assert float(first[7]) == pytest.approx(float(first[3]) ** -0.5, rel=1e-15)

    def test_integer_flags_on_linear_grid(self, tmp_path):
        out = tmp_path / "lin.csv"
        rc = main(["sweep", "--eta", "0.8", "--output", str(out), "--n-min", "1",
                   "--n-max", "5", "--points", "5", "--spacing", "linear"])
        assert rc == 0
        flags = [line.split(",")[-1] for line in out.read_text().splitlines()[1:]]
        assert flags == ["true"] * 5

    def test_integer_flags_on_log_grid(self, tmp_path):
        out = tmp_path / "log.csv"
        main(["sweep", "--eta", "0.8", "--output", str(out),
              "--n-min", "1", "--n-max", "10", "--points", "5"])
        flags = [line.split(",")[-1] for line in out.read_text().splitlines()[1:]]
        assert flags == ["true", "false", "false", "false", "true"]

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sweep", "--eta", "0.77", "--points", "37", "--output"]
        assert main(args + [str(a)]) == 0
        assert main(args + [str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_lossless_columns_coincide(self, tmp_path):
        out = tmp_path / "eta1.csv"
        main(["sweep", "--eta", "1.0", "--output", str(out),
              "--n-min", "0.5", "--n-max", "50", "--points", "20"])
        for line in out.read_text().splitlines()[1:]:
            cells = line.split(",")
            noref, ref = float(cells[3]), float(cells[4])
            assert abs(ref - noref) / noref <= 1e-9
            assert float(cells[10]) == pytest.approx(float(cells[0]) ** -0.5, rel=1e-12)

    def test_invalid_eta_exits_two_without_file(self, tmp_path, capsys):
        out = tmp_path / "never.csv"
        rc = main(["sweep", "--eta", "0.0", "--output", str(out)])
        assert rc == 2
        assert not out.exists()

    def test_unwritable_output_exits_two(self, tmp_path, capsys):
        rc = main(["sweep", "--eta", "0.9", "--points", "2", "--n-min", "1",
                   "--n-max", "2", "--output", str(tmp_path / "no" / "dir" / "x.csv")])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_snl_column(self):
        rows = sweep_rows(SweepConfig(eta=0.25, n_min=4.0, n_max=8.0, points=2))
        cells = rows[1].split(",")
        assert float(cells[10]) == pytest.approx(1.0 / math.sqrt(0.25 * 4.0), rel=1e-14)


class TestCrossings:
    def test_two_crossings_at_moderate_loss(self, capsys):
        rc = main(["crossings", "--eta", "0.9"])
        assert rc == 0
        out = capsys.readouterr().out
        n1 = _stdout_value(out, "N1")
        n2 = _stdout_value(out, "N2")
        assert 0.1 < n1 < n2 < 200.0
        assert "noon probe carries more information" in out
        for root in (n1, n2):
            gap = qfi_noon_continuous(root, 0.9) - qfi_ecs_ref_at_mean_photons(root, 0.9)
            assert abs(gap) <= 1e-6

    def test_eta_must_be_lossy(self, capsys):
        assert main(["crossings", "--eta", "1.0"]) == 2
        assert main(["crossings", "--eta", "0.0"]) == 2

    def test_no_sign_change_raises(self):
        # strictly inside the crossing pair the noon curve stays on top
        with pytest.raises(NoCrossingFound):
            find_crossings(0.9, n_min=5.0, n_max=20.0)

    def test_absence_reported_not_failed(self, capsys, monkeypatch):
        def none_found(eta, tolerance):
            raise NoCrossingFound("no crossing anywhere")

        monkeypatch.setattr("phasefisher.cli.find_crossings", none_found)
        rc = main(["crossings", "--eta", "0.5"])
        assert rc == 0
        assert "no crossing anywhere" in capsys.readouterr().out

    def test_unexpected_count_reported(self, capsys, monkeypatch):
        monkeypatch.setattr("phasefisher.cli.find_crossings", lambda eta, tol: [1.0, 2.0, 3.0])
        rc = main(["crossings", "--eta", "0.5"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "found 3 crossing(s), expected 2" in out

    def test_result_ordering_enforced(self):
        with pytest.raises(ValueError):
            CrossingResult(5.0, 2.0, 0.9, 1e-6)


class TestVerify:
    def test_single_point_passes_and_writes_report(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        rc = main(["verify", "--grid", "single", "--alpha", "0.5", "--eta", "1.0",
                   "--output", str(out)])
        assert rc == 0
        assert "overall: PASS" in capsys.readouterr().out
        lines = out.read_text().splitlines()
        assert lines[0] == "check,passed,max_err,tolerance,detail"
        assert len(lines) == 15

    def test_loose_truncation_fails_honestly(self, capsys):
        rc = main(["verify", "--grid", "single", "--alpha", "0.5", "--eta", "0.9",
                   "--trunc-tol", "1e-2"])
        assert rc == 1
        assert "FAIL" in capsys.readouterr().out


def test_no_arguments_is_usage_error():
    assert main([]) == 2


def test_console_script_installed():
    exe = shutil.which("phasefisher")
    assert exe is not None, "console script missing; install with pip install -e ."
    proc = subprocess.run(
        [exe, "point", "--family", "noon", "--n", "2", "--eta", "0.5"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert "F    =" in proc.stdout
