import os
import subprocess
import sys

import kisin

SNIPPET = (
    "import json; from kisin import BACKEND, standard_module, enumerate_points; "
    "from kisin.battery import cochar_for; M = standard_module(2, 2, 1, 1); "
    "E = enumerate_points(M, cochar_for(M, [3])); "
    "print(json.dumps([BACKEND, E.to_json()], sort_keys=True))"
)


def run(pure):
    env = dict(os.environ, KISIN_PURE_PYTHON="1" if pure else "0")
    res = subprocess.run([sys.executable, "-c", SNIPPET], env=env, capture_output=True, text=True, check=True)
    return res.stdout


def test_backend_is_reported():
    assert kisin.BACKEND in ("cython", "python")


def test_pure_python_fallback_gives_identical_results():
    pure, default = run(True), run(False)
    assert pure.startswith('["python"')
    assert pure.replace('"python"', '"cython"') == default.replace('"python"', '"cython"')
