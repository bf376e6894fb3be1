from __future__ import annotations

import io
import subprocess
import sys

import pytest

from ncsym.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def records(text):
    return dict(line.split(" = ", 1) for line in text.splitlines())


def test_sk_vectors_linear_potential():
    code, out, _ = call("sk-vectors", "--V", "z", "--deg", "3", "--format", "structured")
    assert code == 0
    rec = records(out)
    assert rec["command"] == "sk-vectors" and rec["dimension"] == "12" and rec["closed"] == "True"


def test_killing_tensors_kepler_contain_lrl():
    code, out, _ = call("killing-tensors", "--V", "r^-1", "--rank", "2", "--deg", "2", "--format", "structured")
    assert code == 0
    assert records(out)["lrl_principal_parts_contained"] == "3/3"


def test_twistor_sections():
    code, out, _ = call("twistor", "sections", "--deg-t", "0")
    assert code == 0 and out.startswith("global holomorphic vector fields (T-degree <= 0): 8 generators")
    rec = records(call("twistor", "cga", "--format", "structured")[1])
    # the special conformal row: h = -T^2, b = -2T
    assert rec["dictionary.11.h"] == "-T^2" and rec["dictionary.11.b"] == "-2*T"


@pytest.mark.parametrize("argv, key, value", [
    (("expanded-sch",), "dimension", "13"),
    (("cgal", "--deg", "2"), "dimension", "23"),
    (("killing-vectors", "--V=-r^-1"), "dimension", "4"),
    (("symmetries", "--V", "z"), "dimension", "12"),
    (("higher-symmetries", "--order", "2", "--deg", "2"), "dimension", "70"),
    (("twistor", "sch"), "dimension", "13"),
    (("twistor", "cga"), "check.closes", "True"),
    (("twistor", "obstruction", "--deg", "3"), "bound.3", "no global connection"),
    (("connection", "--V", "z"), "Gamma.z_tt", "1"),
])
def test_commands(argv, key, value):
    code, out, err = call(*argv, "--format", "structured")
    assert code == 0, err
    assert records(out)[key] == value


def test_config_file(tmp_path):
    cfg = tmp_path / "s.ini"
    cfg.write_text("[spacetime]\nV = -x^2\nOmega = x\n")
    code, out, _ = call("sk-vectors", "--config", str(cfg), "--format", "structured")
    assert code == 0 and records(out)["dimension"] == "4"


def test_exit_codes(tmp_path):
    assert call("sk-vectors", "--V", "(z")[0] == 2
    assert call("no-such-command")[0] == 2
    assert call("sk-vectors", "--deg", "-1")[0] == 2
    assert call("sk-vectors", "--config", str(tmp_path / "missing.ini"))[0] == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("garbage")
    assert call("sk-vectors", "--config", str(bad))[0] == 2
    code, _, err = call("sk-vectors", "--V", "t*z")
    assert code == 1 and "precondition" in err
    assert call("symmetries", "--Omega", "x^2")[0] == 1


def test_structured_output_is_deterministic():
    a = call("sk-vectors", "--V=-x^2", "--Omega", "x", "--format", "structured")[1]
    b = call("sk-vectors", "--V=-x^2", "--Omega", "x", "--format", "structured")[1]
    assert a == b and a


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ncsym", "twistor", "sections", "--deg-t", "0",
                          "--format", "structured"], capture_output=True, text=True, check=True)
    assert "dimension = 8" in res.stdout


def test_sk_tensors_quotient_record():
    code, out, _ = call("sk-tensors", "--deg", "4", "--format", "structured")
    rec = records(out)
    assert code == 0 and rec["dimension"] == "133" and rec["modulo_hamiltonian"] == "63"
