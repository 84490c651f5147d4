"""End-to-end tests of the command-line front end."""
from __future__ import annotations

import contextlib
import io
import os
import pathlib
import sys
import tempfile
import unittest
from unittest import mock

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))

import shuffle
from cli import main
from errors import ExitCode


def run(*argv):
    """Return (exit code, stdout lines) for one invocation."""
    out = io.StringIO()
    with contextlib.redirect_stderr(io.StringIO()):
        code = main(list(argv), out=out)
    return code, out.getvalue().splitlines()


def fields(lines):
    return dict(line.split(": ", 1) for line in lines)


class TestEval(unittest.TestCase):
    def test_c_star_values(self):
        code, lines = run("eval", "--copula", "cstar", "--dim", "4", "--point", "3/5,3/5,4/5,1")
        self.assertEqual(code, ExitCode.OK)
        self.assertEqual(fields(lines)["value"], "0")
        _, lines = run("eval", "--copula", "cstar", "--dim", "4", "--point", "1,4/5,3/5,3/5")
        self.assertEqual(fields(lines)["value"], "3/5")
        self.assertEqual(fields(lines)["decimal"], "0.6")

    def test_decimal_input(self):
        _, lines = run("eval", "--copula", "cstar", "--dim", "4", "--point", "0.6,0.6,0.8,1")
        self.assertEqual(fields(lines)["value"], "0")

    def test_independence(self):
        _, lines = run("eval", "--copula", "independence", "--dim", "2", "--point", "1/2,1/2")
        self.assertEqual(fields(lines)["value"], "1/4")

    def test_error_codes(self):
        self.assertEqual(run("eval", "--copula", "cstar", "--dim", "4", "--point", "1/2,1/2")[0], ExitCode.DIMENSION)
        self.assertEqual(run("eval", "--copula", "cstar", "--dim", "2", "--point", "a,b")[0], ExitCode.PARSE)
        self.assertEqual(run("eval", "--copula", "manifold", "--dim", "3", "--point", "1,1,1")[0],
                         ExitCode.UNSUPPORTED_DIM)

    def test_manifold_with_offsets(self):
        _, lines = run("eval", "--copula", "manifold", "--dim", "4", "--delta", "1/20,3/20",
                       "--point", "0.95,0.85,0.6,0.6")
        self.assertEqual(fields(lines)["value"], "3/5")

    def test_wrapped_permutation(self):
        _, lines = run("eval", "--copula", "cstar", "--dim", "2", "--wrap-perm", "reverse", "--point", "1/3,2/3")
        self.assertEqual(fields(lines)["value"], "1/3")

    def test_diff(self):
        _, lines = run("diff", "--copula", "cstar", "--dim", "4", "--point", "3/5,3/5,4/5,1")
        self.assertEqual(fields(lines)["difference"], "3/5")


class TestSearch(unittest.TestCase):
    def test_bivariate(self):
        code, lines = run("search", "--copula", "cstar", "--dim", "2", "--perm", "reverse", "--step", "1/30")
        self.assertEqual(code, ExitCode.OK)
        report = fields(lines)
        self.assertEqual(report["best_value"], "1/3")
        self.assertEqual(report["best_point"], "(1/3, 2/3)")
        for key in ("best_perm", "certified_upper", "gap", "evaluations"):
            self.assertIn(key, report)

    def test_exchangeable(self):
        _, lines = run("search", "--copula", "mdim", "--dim", "3", "--perm", "reverse", "--step", "1/8")
        self.assertEqual(fields(lines)["best_value"], "0")

    def test_bad_step(self):
        code, _ = run("search", "--copula", "cstar", "--dim", "2", "--step", "1/7")
        self.assertEqual(code, ExitCode.BAD_STEP)

    def test_mu(self):
        _, lines = run("mu", "--copula", "cstar", "--dim", "2", "--step", "1/6")
        self.assertEqual(fields(lines)["mu"], "1")
        _, lines = run("mu", "--copula", "mdim", "--dim", "3", "--step", "1/8")
        self.assertEqual(fields(lines)["mu"], "0")


class TestVerifyAndValidate(unittest.TestCase):
    def test_w3_fails(self):
        code, lines = run("verify", "--copula", "w", "--dim", "3", "--boxes", "200", "--samples", "100",
                          "--seed", "42")
        self.assertEqual(code, ExitCode.CHECK_FAILED)
        report = fields(lines)
        self.assertTrue(report["d_increasing"].startswith("fail"))
        self.assertIn("volume=-1/2", report["d_increasing"])
        self.assertEqual(report["result"], "fail")

    def test_w2_passes(self):
        code, _ = run("verify", "--copula", "w", "--dim", "2", "--boxes", "200", "--samples", "100", "--seed", "1")
        self.assertEqual(code, ExitCode.OK)

    def test_shuffle_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            good = pathlib.Path(tmp) / "structure.json"
            shuffle.dump_structure(shuffle.build_c_star_structure(3), good)
            code, _ = run("verify", "--file", str(good), "--boxes", "100", "--samples", "100", "--seed", "7")
            self.assertEqual(code, ExitCode.OK)
            code, lines = run("validate", "--file", str(good))
            self.assertEqual(code, ExitCode.OK)
            self.assertEqual(fields(lines)["result"], "pass")

            bad = pathlib.Path(tmp) / "overlap.json"
            bad.write_text('{"dim": 2, "cells": ['
                           '{"intervals": [["0", "1/2"], ["0", "1/2"]]},'
                           '{"intervals": [["1/4", "3/4"], ["1/2", "1"]]}]}', encoding="utf-8")
            code, lines = run("validate", "--file", str(bad))
            self.assertEqual(code, ExitCode.CHECK_FAILED)
            self.assertTrue(fields(lines)["at_most_one_endpoint"].startswith("fail"))
            self.assertEqual(run("eval", "--file", str(bad), "--point", "1,1")[0], ExitCode.PARSE)

            missing = pathlib.Path(tmp) / "missing.json"
            self.assertEqual(run("validate", "--file", str(missing))[0], ExitCode.PARSE)

    def test_malformed_files_are_parse_errors(self):
        documents = {
            "d0.json": '{"dim": 0, "cells": [{"intervals": []}]}',
            "d1.json": '{"dim": 1, "cells": [{"intervals": [["0", "1"]]}]}',
            "cells.json": '{"dim": 2, "cells": 5}',
            "intervals.json": '{"dim": 2, "cells": [{"intervals": 5}]}',
        }
        with tempfile.TemporaryDirectory() as tmp:
            for name, text in documents.items():
                path = pathlib.Path(tmp) / name
                path.write_text(text, encoding="utf-8")
                for command in ("validate", "verify"):
                    code, _ = run(command, "--file", str(path))
                    self.assertEqual(code, ExitCode.PARSE, msg=f"{command} {name}")
            binary = pathlib.Path(tmp) / "binary.json"
            binary.write_bytes(b"\xff\xfe")
            self.assertEqual(run("validate", "--file", str(binary))[0], ExitCode.PARSE)

    def test_file_with_independence_base(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = pathlib.Path(tmp) / "structure.json"
            shuffle.dump_structure(shuffle.build_c_star_structure(2), path)
            _, lines = run("eval", "--file", str(path), "--point", "1/2,1/2")
            self.assertEqual(fields(lines)["value"], "1/6")
            _, lines = run("eval", "--file", str(path), "--base", "independence", "--point", "1/2,1/2")
            self.assertEqual(fields(lines)["value"], "1/8")


class TestWorkers(unittest.TestCase):
    @mock.patch.dict(os.environ, {"NONEX_CHUNK_SIZE": "8"})
    def test_search_output_does_not_depend_on_threads(self):
        argv = ("search", "--copula", "cstar", "--dim", "3", "--perm", "reverse", "--step", "1/8")
        single = run(*argv, "--threads", "1")
        pooled = run(*argv, "--threads", "2")
        self.assertEqual(single, pooled)
        self.assertEqual(fields(single[1])["best_value"], "1/2")

    def test_verify_output_does_not_depend_on_threads(self):
        argv = ("verify", "--copula", "cstar", "--dim", "3", "--boxes", "2500", "--samples", "50", "--seed", "5")
        self.assertEqual(run(*argv, "--threads", "1"), run(*argv, "--threads", "3"))


class TestManifoldAndBound(unittest.TestCase):
    def test_manifold(self):
        self.assertEqual(run("manifold", "--dim", "3")[1], ["point: (1/2, 1/2, 1)"])
        self.assertEqual(run("manifold", "--dim", "2")[1], ["point: (1/3, 2/3)"])
        code, lines = run("manifold", "--dim", "4", "--samples", "5", "--seed", "1")
        self.assertEqual(code, ExitCode.OK)
        self.assertEqual(len(lines), 5)
        self.assertTrue(all(line.startswith("point: (3/5, 3/5, ") for line in lines))

    def test_bound(self):
        self.assertEqual(fields(run("bound", "--point", "3/5,3/5,4/5,1", "--perm", "reverse")[1])["combined"], "3/5")
        self.assertEqual(fields(run("bound", "--point", "0,1/2,1", "--perm", "reverse")[1])["combined"], "0")
        report = fields(run("bound", "--point", "1/3,2/3", "--perm", "2,1")[1])
        self.assertEqual(report["combined"], "1/3")
        self.assertEqual(report["transposition_bound"], "1/3")


class TestSurface(unittest.TestCase):
    def test_c_star_table(self):
        code, lines = run("surface", "--copula", "cstar", "--dim", "2", "--step", "1/3")
        self.assertEqual(code, ExitCode.OK)
        self.assertEqual(lines[0], "u1,u2,C(u),C(u_pi),diff")
        rows = lines[1:]
        self.assertEqual(len(rows), 16)
        self.assertIn("1/3,2/3,0,1/3,1/3", rows)
        self.assertIn("2/3,1/3,1/3,0,1/3", rows)

    def test_exchangeable_table(self):
        _, lines = run("surface", "--copula", "mdim", "--dim", "2", "--step", "1/2")
        self.assertTrue(all(row.endswith(",0") for row in lines[1:]))

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = pathlib.Path(tmp) / "surface.csv"
            code, lines = run("surface", "--copula", "cstar", "--dim", "2", "--step", "1/3", "--out", str(target))
            self.assertEqual(code, ExitCode.OK)
            self.assertEqual(fields(lines)["rows"], "16")
            self.assertEqual(len(target.read_text(encoding="utf-8").splitlines()), 17)

    def test_dimension_defaults_to_two(self):
        code, lines = run("surface", "--copula", "cstar", "--step", "1/3")
        self.assertEqual(code, ExitCode.OK)
        self.assertEqual(len(lines), 17)

    def test_bivariate_only(self):
        code, _ = run("surface", "--copula", "cstar", "--dim", "3", "--step", "1/4")
        self.assertEqual(code, ExitCode.UNSUPPORTED_DIM)


if __name__ == "__main__":
    unittest.main()
