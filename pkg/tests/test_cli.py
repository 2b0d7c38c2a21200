"""End-to-end behavior of the lfr command."""

from __future__ import annotations

import subprocess
import sys

import pytest

from lfr import VerifyError, lfi_check_sig, parse_lfi
from lfr.cli import main

from conftest import GOLDEN_NAMES, golden_path


GOOD = [n for n in GOLDEN_NAMES]


class TestCheck:
    @pytest.mark.parametrize("name", GOOD)
    def test_goldens_exit_zero(self, name, capsys):
        assert main(["check", str(golden_path(name))]) == 0
        out = capsys.readouterr().out
        assert "ok:" in out and "declarations" in out

    def test_rejected_signature_exits_one(self, capsys):
        assert main(["check", str(golden_path("bad-odd"))]) == 1
        err = capsys.readouterr().err
        assert "error:" in err
        assert "at-odd*" in err

    def test_missing_file_exits_two(self, capsys):
        assert main(["check", "no-such-file.lfr"]) == 2
        assert "cannot read" in capsys.readouterr().err

    def test_parse_error_exits_two(self, tmp_path, capsys):
        p = tmp_path / "broken.lfr"
        p.write_text("nat : type\n")
        assert main(["check", str(p)]) == 2
        err = capsys.readouterr().err
        assert "broken.lfr:" in err and "error:" in err

    def test_quiet_suppresses_report(self, capsys):
        assert main(["check", "--quiet", str(golden_path("nat"))]) == 0
        assert capsys.readouterr().out == ""

    def test_trace_replays_rule_names(self, capsys):
        assert main(["check", "--trace", str(golden_path("nat"))]) == 0
        out = capsys.readouterr().out
        assert "rule trace (" in out
        assert "Π-F" in out

    def test_oracle_audit_line(self, capsys):
        # Elaborating applied sorts compares argument sorts atomically,
        # so the audit has comparisons to count.
        rc = main(["check", "--oracle-depth", "4",
                   str(golden_path("double"))])
        assert rc == 0
        out = capsys.readouterr().out
        assert "oracle audit:" in out
        assert "0 disagreements" in out

    def test_strict_rejects_repeated_refinement(self, tmp_path, capsys):
        p = tmp_path / "twice.lfr"
        p.write_text("nat : type.\nz : nat.\neven << nat.\n"
                     "z :: even.\nz :: even.\n")
        assert main(["check", str(p)]) == 0
        capsys.readouterr()
        assert main(["check", "--strict", str(p)]) == 1
        assert "refinement" in capsys.readouterr().err


class TestTranslate:
    def _src(self, tmp_path, name="even-odd"):
        p = tmp_path / f"{name}.lfr"
        p.write_text(golden_path(name).read_text())
        return p

    def test_writes_output_and_sidecar(self, tmp_path, capsys):
        src = self._src(tmp_path)
        assert main(["translate", str(src)]) == 0
        out_path = src.with_suffix(".lfi")
        prov_path = tmp_path / "even-odd.lfi.prov"
        assert out_path.exists() and prov_path.exists()
        printed = capsys.readouterr().out
        assert "wrote" in printed and "verified:" in printed
        sig = parse_lfi(out_path.read_text(), str(out_path))
        lfi_check_sig(sig)
        for line in prov_path.read_text().splitlines():
            name, label = line.split("\t")
            assert name and label

    def test_custom_output_path(self, tmp_path):
        src = self._src(tmp_path)
        dest = tmp_path / "custom.out"
        assert main(["translate", str(src), "-o", str(dest)]) == 0
        assert dest.exists()
        assert (tmp_path / "custom.out.prov").exists()

    def test_emission_is_deterministic(self, tmp_path):
        src = self._src(tmp_path, "double")
        dest1 = tmp_path / "one.lfi"
        dest2 = tmp_path / "two.lfi"
        assert main(["translate", "--quiet", str(src), "-o", str(dest1)]) == 0
        assert main(["translate", "--quiet", str(src), "-o", str(dest2)]) == 0
        assert dest1.read_bytes() == dest2.read_bytes()

    def test_no_verify_skips_recheck(self, tmp_path, capsys, monkeypatch):
        import lfr.cli as cli

        def boom(sig, result):
            raise AssertionError("verification ran")

        monkeypatch.setattr(cli, "verify_translation", boom)
        src = self._src(tmp_path)
        assert main(["translate", "--no-verify", str(src)]) == 0

    def test_verify_failure_exits_three_but_keeps_files(self, tmp_path,
                                                        capsys, monkeypatch):
        import lfr.cli as cli

        def fail(sig, result):
            raise VerifyError("induced failure")

        monkeypatch.setattr(cli, "verify_translation", fail)
        src = self._src(tmp_path)
        assert main(["translate", str(src)]) == 3
        assert src.with_suffix(".lfi").exists()
        assert (tmp_path / "even-odd.lfi.prov").exists()
        assert "induced failure" in capsys.readouterr().err


class TestVerify:
    @pytest.mark.parametrize("name", GOOD)
    def test_goldens_verify(self, name, capsys):
        assert main(["verify", str(golden_path(name))]) == 0
        assert "verified:" in capsys.readouterr().out

    def test_rejected_signature_fails_before_translation(self, capsys):
        assert main(["verify", str(golden_path("bad-odd"))]) == 1

    def test_exhausted_budget_exits_three(self, monkeypatch, capsys):
        monkeypatch.setenv("LFR_FUEL", "2")
        assert main(["verify", str(golden_path("double"))]) == 3
        assert "search budget exhausted" in capsys.readouterr().err


class TestEntrypoint:
    def test_console_script(self):
        proc = subprocess.run(
            [sys.executable, "-m", "lfr.cli", "check", "--quiet",
             str(golden_path("cbv"))],
            capture_output=True, text=True)
        assert proc.returncode == 0

    def test_installed_script(self):
        proc = subprocess.run(
            ["lfr", "check", "--quiet", str(golden_path("nat"))],
            capture_output=True, text=True)
        assert proc.returncode == 0
