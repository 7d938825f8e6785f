"""Scripted CLI inputs and expected exit codes, plus golden-file commands."""
from __future__ import annotations

import contextlib
import io
import os
from pathlib import Path

from qmagic import cli

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"

# (golden file name, argv); run with the working directory at DATA
GOLDEN_COMMANDS = [
    ("counterexample_m2.json", ["construct", "counterexample", "--m", "2"]),
    ("classify_nonclassical_qls4.json", ["classify", "nonclassical_qls4.json"]),
    ("classify_identity1.json", ["classify", "identity1.json"]),
    ("bvn_half2.json", ["decompose", "bvn", "half2.json"]),
    ("easy_qls_example.json", ["construct", "easy-qls", "--latin", "example_latin4.json", "--basis", "standard"]),
    ("random_ds_n5_seed7.json", ["construct", "random", "--kind", "ds", "--n", "5", "--seed", "7"]),
]


def run(argv, cwd=None, env=None) -> tuple[int, str, str]:
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    old_cwd, old_env = os.getcwd(), dict(os.environ)
    try:
        if cwd is not None:
            os.chdir(cwd)
        if env:
            os.environ.update(env)
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = cli.main([str(a) for a in argv])
    finally:
        os.chdir(old_cwd)
        os.environ.clear()
        os.environ.update(old_env)
    return code, out.getvalue(), err.getvalue()


def prepare(tmp: Path) -> list[tuple[str, list, int, dict]]:
    """Write the inputs the matrix needs into ``tmp``; return (name, argv, code, env) rows."""
    tmp = Path(tmp)
    bundle = tmp / "bundle.json"
    assert run(["construct", "counterexample", "--m", "2", "-o", bundle])[0] == 0
    easy = tmp / "easy.json"
    assert run(["construct", "easy-qls", "--latin", DATA / "example_latin4.json", "--basis", "haar",
                "--seed", "3", "-o", easy])[0] == 0
    decomp = tmp / "decomp.json"
    assert run(["construct", "random", "--kind", "semiclassical", "--n", "3", "--s", "2",
                "--seed", "4", "-o", decomp])[0] == 0
    comb = tmp / "comb.json"
    assert run(["purify", decomp, "-o", comb])[0] == 0
    big = tmp / "ds7.json"
    assert run(["construct", "random", "--kind", "ds", "--n", "7", "--seed", "1", "-o", big])[0] == 0

    ds = f"{bundle}#direct_sum"
    rows = [
        # valid inputs
        ("classify qls", ["classify", DATA / "nonclassical_qls4.json"], 0, {}),
        ("classify non-member still 0", ["classify", decomp], 0, {}),
        ("bvn", ["decompose", "bvn", DATA / "half2.json"], 0, {}),
        ("rank-one easy", ["decompose", "rank-one-test", easy, "--out-dir", tmp / "cert"], 0, {}),
        ("rank-one non-easy", ["decompose", "rank-one-test", DATA / "nonclassical_qls4.json"], 1, {}),
        ("rank-one dilation", ["decompose", "rank-one-test", f"{bundle}#dilation"], 1, {}),
        ("semiclassical feasible", ["decompose", "semiclassical", decomp, "--out-dir", tmp / "sc"], 0, {}),
        ("semiclassical counterexample", ["decompose", "semiclassical", ds], 1, {}),
        ("purify", ["purify", decomp, "-o", tmp / "p.json", "--report", tmp / "r.json"], 0, {}),
        ("combine combination", ["combine", comb, "-o", tmp / "c.json"], 0, {}),
        ("combine bundle", ["combine", f"{bundle}#dilation", "--isometries", f"{bundle}#contraction",
                            "-o", tmp / "ab.json"], 0, {}),
        ("env scale", ["classify", DATA / "half2.json"], 0, {"MAGIC_TOLERANCE_SCALE": "10"}),
        # undetermined
        ("semiclassical undetermined", ["decompose", "semiclassical", ds, "--tol", "0.1",
                                        "--no-facial-reduction"], 3, {}),
        # invalid inputs
        ("malformed row", ["classify", DATA / "malformed_row.json"], 2, {}),
        ("missing file", ["classify", tmp / "missing.json"], 2, {}),
        ("purify non-POVM", ["purify", DATA / "not_povm.json"], 2, {}),
        ("combine bad family", ["combine", ds, "--isometries", DATA / "bad_isometries.json"], 2, {}),
        ("commuting bases", ["construct", "counterexample", "--m", "2", "--basis-v", "standard",
                             "--basis-w", "standard"], 2, {}),
        ("unknown flag", ["construct", "easy-qls", "--bogus"], 2, {}),
        ("missing latin", ["construct", "easy-qls"], 2, {}),
        ("n! guard", ["decompose", "semiclassical", big], 2, {}),
        ("rank-one precondition", ["decompose", "rank-one-test", decomp], 2, {}),
        ("bvn on s>1", ["decompose", "bvn", decomp], 2, {}),
        ("bad env", ["classify", DATA / "half2.json"], 2, {"MAGIC_TOLERANCE_SCALE": "abc"}),
        ("zero env", ["classify", DATA / "half2.json"], 2, {"MAGIC_TOLERANCE_SCALE": "0"}),
    ]
    return rows
