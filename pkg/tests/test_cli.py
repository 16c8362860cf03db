import subprocess
import sys

import pytest

from pseudohyperovals.appendix import load_generators
from pseudohyperovals.cli import main
from pseudohyperovals.hyperovals import regular_hyperoval
from pseudohyperovals.linalg import MatrixGF
from pseudohyperovals.textio import format_matrix_list, format_points, format_subspaces


def run(capsys, *argv):
    code = main(list(argv) + ["--no-timestamp"])
    out = capsys.readouterr().out
    return code, out


def kv(out):
    return dict(line.split("=", 1) for line in out.strip().splitlines())


@pytest.mark.parametrize("argv,code", [
    (["verify", "hyperoval", "hyperconic:3"], 0),
    (["verify", "hyperoval", "lunelli-sce"], 0),
    (["verify", "pseudo-hyperoval", "field-reduce(hyperconic:2)"], 0),
    (["verify", "pseudo-hyperoval", "appendix-a:O"], 0),
    (["verify-gq", "hyperconic:2"], 0),
    (["verify-gq", "hyperconic:2", "--delete-line", "3"], 1),
    (["build-gq", "lunelli-sce", "--guard", "100"], 3),
    (["verify", "hyperoval", "no-such-object"], 2),
    (["verify", "hyperoval", "hyperconic:99"], 2),
    (["screen", "--d", "16"], 2),
    (["screen", "--range", "13..40"], 0),
    (["kernel-field", "field-reduce(hyperconic:3)"], 0),
    (["extract", "field-reduce(hyperconic:2)"], 0),
    (["irreducible", "appendix-a:G"], 0),
])
def test_exit_codes(capsys, argv, code):
    got, out = run(capsys, *argv)
    assert got == code
    assert out.strip().splitlines()[-1] == f"exit_code: {code}"


def test_argparse_errors_exit_with_input_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "triangle", "x"])
    assert exc.value.code == 2


def test_kv_format_and_determinism(capsys):
    _, a = run(capsys, "screen", "--d", "30", "--format", "kv")
    _, b = run(capsys, "screen", "--d", "30", "--format", "kv")
    assert a == b
    d = kv(a)
    assert d["d30.target"] == "1026"
    assert d["d30.computed_large_prime"] == "19"
    assert d["d30.printed_prime"] == "17"
    assert d["exit_code"] == "0"


def test_timestamp_is_optional(capsys):
    main(["screen", "--d", "18"])
    assert capsys.readouterr().out.startswith("timestamp: ")
    _, out = run(capsys, "screen", "--d", "18")
    assert "timestamp" not in out


def test_guard_hard_cap(capsys):
    code, out = run(capsys, "build-gq", "hyperconic:2", "--guard", str(10**12))
    assert code == 2 and "hard cap" in out


def test_kernel_field_output(capsys):
    _, out = run(capsys, "kernel-field", "field-reduce(lunelli-sce)", "--format", "kv")
    d = kv(out)
    assert d["kernel_order"] == "16" and d["field_axioms"] == "true"


def test_point_file_round_trip(tmp_path, capsys):
    H = regular_hyperoval(2)
    p = tmp_path / "h.pts"
    p.write_text(format_points([x.vec for x in H.points], 3, H.field))
    code, _ = run(capsys, "verify", "hyperoval", str(p))
    assert code == 0
    p.write_text(format_points([x.vec for x in H.points[:-1]], 3, H.field))
    code, out = run(capsys, "verify", "hyperoval", str(p))
    assert code == 1 and "cardinality" in out


def test_extract_writes_subspaces(tmp_path, capsys, pseudo_conic):
    out_file = tmp_path / "o.sub"
    code, _ = run(capsys, "extract", "field-reduce(hyperconic:2)", "--output", str(out_file))
    assert code == 0
    code, _ = run(capsys, "verify", "pseudo-hyperoval", str(out_file))
    assert code == 0
    src = tmp_path / "in.sub"
    src.write_text(format_subspaces(pseudo_conic.elements))
    code, _ = run(capsys, "verify", "pseudo-hyperoval", str(src))
    assert code == 0


def test_malformed_file_is_an_input_error(tmp_path, capsys):
    p = tmp_path / "bad.pts"
    p.write_text("this is not a point file\n")
    code, _ = run(capsys, "verify", "hyperoval", str(p))
    assert code == 2


def test_appendix_selected_claims(capsys):
    code, out = run(capsys, "appendix-a", "--claims", "order,stabilises", "--format", "kv")
    d = kv(out)
    assert code == 0
    assert d["claim.order"] == "pass" and d["claim.stabilises"] == "pass"
    assert "claim.module" not in d


def test_appendix_unknown_claim(capsys):
    code, _ = run(capsys, "appendix-a", "--claims", "order,bogus")
    assert code == 2


def test_perturbed_generators_fail(tmp_path, capsys):
    a, b = load_generators()
    rows = list(b.rows)
    rows[3] ^= 1 << 5
    bad = MatrixGF(b.field, 12, 12, tuple(rows))
    f = tmp_path / "gens.mat"
    f.write_text(format_matrix_list([a, bad]))
    code, out = run(capsys, "appendix-a", "--claims", "order", "--generators", str(f), "--format", "kv")
    assert code == 1
    assert kv(out)["claim.order"] == "fail"


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "pseudohyperovals.cli", "screen", "--d", "15", "--no-timestamp"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert "d15.phi_star: 17" in r.stdout
