import dataclasses
import json
import subprocess
import sys

import pytest

from hardyforge import catalog
from hardyforge.cli import dumps, main

WEIGHT = ["weight", "--h", "x^(2-d)", "--V", "1", "--dim", "3", "--interval", "0:inf",
          "--param", "d=3"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_weight_example(capsys):
    code, out, _ = run(capsys, *WEIGHT, "--json")
    assert code == 0
    env = json.loads(out)
    assert env["schema"] == "hardy-forge/1" and env["command"] == "weight"
    assert env["result"]["classification"] == "optimal"


def test_feller_example(capsys):
    code, out, _ = run(capsys, "feller", "--h", "x*(1-x)", "--dim", "1", "--interval", "0:1",
                       "--json")
    assert code == 0
    assert json.loads(out)["result"]["recurrent"] == "yes"


def test_json_is_deterministic(capsys):
    outs = [run(capsys, *WEIGHT, "--json")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_spectrum_scale_detects_failure(capsys):
    args = ["spectrum", "--h", "x^(2-d)", "--V", "1", "--dim", "3", "--interval", "0:inf",
            "--param", "d=3", "--truncation", "1e-2:1e2:500", "--truncation",
            "1e-3:1e3:2000"]
    assert run(capsys, *args)[0] == 0
    assert run(capsys, *args, "--scale", "2")[0] == 1


def test_classify_expect(capsys):
    args = ["classify", "--h", "(1+x^2)^((2-d)/2)", "--V", "(1+x^2)^alpha", "--dim", "3",
            "--interval", "0:inf", "--param", "d=3", "--param", "alpha=-1"]
    assert run(capsys, *args, "--expect", "no_weight")[0] == 0
    assert run(capsys, *args, "--expect", "optimal")[0] == 1


def test_bessel_and_jd(capsys):
    code, out, _ = run(capsys, "bessel", "--h", "x^(2-d)", "--V", "1", "--dim", "3",
                       "--interval", "0.1:10", "--param", "d=3", "--json")
    assert code == 0
    code, out, _ = run(capsys, "jd", "x^(2-d)", "--dim", "3", "--param", "d=3",
                       "--at", "2", "--json")
    assert code == 0 and "0.0625" in out


@pytest.mark.parametrize("argv", [
    ["weight", "--bogus"],
    ["frobnicate"],
    ["weight", "--h", "x^", "--V", "1", "--interval", "0:1"],
    ["weight", "--h", "x^d", "--V", "1", "--interval", "0:1"],
    ["catalog", "run", "nope"],
    ["catalog", "run"],
])
def test_usage_errors_exit_64(capsys, argv):
    assert run(capsys, *argv)[0] == 64


@pytest.mark.parametrize("cmd", ["jd", "weight", "feller", "classify", "spectrum",
                                 "bessel", "catalog"])
def test_help_lists_flags(capsys, cmd):
    code, out, _ = run(capsys, cmd, "--help")
    assert code == 0 and "--json" in out


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "list", "--json")
    names = [e["name"] for e in json.loads(out)["result"]["entries"]]
    assert code == 0 and "leray" in names and "hyperbolic_ak" in names


def test_catalog_run_all_with_perturbed_constant(capsys, monkeypatch):
    keep = ["leray", "ckn"]
    base = catalog._BY_NAME["ckn"]

    def wrong(ctx):
        return [dataclasses.replace(c, expected=c.expected * 1.5 + 1)
                for c in base.constants(ctx)]

    patched = {n: catalog._BY_NAME[n] for n in keep}
    patched["ckn"] = dataclasses.replace(base, constants=wrong)
    monkeypatch.setattr(catalog, "_BY_NAME", patched)
    code, out, _ = run(capsys, "catalog", "run", "--all", "--workers", "1")
    assert code == 1
    assert "FAIL  ckn" in out and "PASS  leray" in out


def test_dumps_formats():
    text = dumps({"a": [float("inf"), float("nan")], "b": 0.1})
    assert json.loads(text) == {"a": ["inf", "nan"], "b": 0.1}
    assert "0.10000000000000001" in text


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "hardyforge.cli", *WEIGHT],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "optimal" in res.stdout
