import io
import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest import mock

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from pic2ha.cli.cli import main
from pic2ha.cli.commands import EXIT_CERTIFICATE, EXIT_OK, EXIT_PARSE, Context, parse_range, run
from pic2ha.cli.formats import dump_complex, dump_extension, dump_pic2, parse_group
from pic2ha.cli.models import Job
from pic2ha.complexes import TwoChainComplex, discrete_complex
from pic2ha.errors import ParseError
from pic2ha.pic2core import OneMor, compose_one_mor, disc, null_two_mor, pic2_from_matrix, zero_one_mor
from pic2ha.resolve import Extension
from pic2ha.zlin import AbHom, FgAbPresentation, IntMatrix


def _m(rows, cols=None):
    return IntMatrix.from_rows(rows, cols)


def _disc_map(source, target, k):
    return OneMor(source, target, AbHom.zero(source.c1, target.c1), AbHom(source.c0, target.c0, _m([[k]])))


def _times_two_extension():
    z, z2 = disc(FgAbPresentation.free(1)), disc(FgAbPresentation.cyclic(2))
    f, g = _disc_map(z, z, 2), _disc_map(z, z2, 1)
    return Extension(f, g, null_two_mor(compose_one_mor(f, g), AbHom.zero(z.c0, z2.c1)))


def _incoherent_complex():
    """Three maps between [Z −0→ Z] whose last nullhomotopy breaks coherence."""
    z = FgAbPresentation.free(1)
    w = pic2_from_matrix(z, z, _m([[0]]))
    l1 = OneMor(w, w, AbHom(z, z, _m([[1]])), AbHom.zero(z, z))
    zero = zero_one_mor(w, w)
    return TwoChainComplex((w, w, w, w), (l1, zero, zero), (AbHom.zero(z, z), AbHom(z, z, _m([[1]]))))


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as f:
            f.write(text)
        return path

    def run_job(self, command, inputs=(), **options):
        out, err = io.StringIO(), io.StringIO()
        status = run(Job(command, tuple(inputs), options), stream=out, context=Context(), errors=err)
        return status, out.getvalue(), err.getvalue()


class TestCommands(CliTestCase):
    def test_pi(self):
        path = self.write("z6.txt", dump_pic2(disc(FgAbPresentation.cyclic(6))))
        status, out, _ = self.run_job("pi", [path])
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(out, "pi0 = Z/6\npi1 = 0\n")

    def test_records_format(self):
        path = self.write("z6.txt", dump_pic2(disc(FgAbPresentation.cyclic(6))))
        status, out, _ = self.run_job("pi", [path], format="records")
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(out, "pi0=Z/6\npi1=0\n")

    def test_snf(self):
        path = self.write("m.txt", "2 2\n2 4\n6 8\n")
        status, out, _ = self.run_job("snf", [path])
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(out.split("\n")[0], "S")
        status, out, _ = self.run_job("snf", [path], format="records")
        self.assertTrue(out.startswith("S="))

    def test_homology(self):
        z = FgAbPresentation.free(1)
        path = self.write("c.txt", dump_complex(discrete_complex([z, z], [_m([[6]])])))
        status, out, _ = self.run_job("homology", [path], degree=0)
        self.assertEqual(status, EXIT_OK)
        self.assertIn("pi0 = Z/6", out)
        status, _, err = self.run_job("homology", [path], degree=4)
        self.assertEqual(status, EXIT_PARSE)
        self.assertIn("degree", err)

    def test_homology_of_incoherent_complex(self):
        path = self.write("bad.txt", dump_complex(_incoherent_complex()))
        status, out, _ = self.run_job("homology", [path], degree=0)
        self.assertEqual(status, EXIT_CERTIFICATE)
        self.assertIn("FAIL", out)

    def test_derived(self):
        path = self.write("z6.txt", dump_pic2(disc(FgAbPresentation.cyclic(6))))
        status, out, _ = self.run_job("derived", [path], functor="tensor:Z/4", degree=1)
        self.assertEqual(status, EXIT_OK)
        self.assertIn("functor = tensor:Z/4", out)
        self.assertIn("pi0 = Z/2", out)

    def test_unknown_functor(self):
        path = self.write("z6.txt", dump_pic2(disc(FgAbPresentation.cyclic(6))))
        status, _, err = self.run_job("derived", [path], functor="ext:Z/4", degree=1)
        self.assertEqual(status, EXIT_PARSE)
        self.assertIn("error:", err)

    def test_check_matrix(self):
        path = self.write("m.txt", "2 3\n1 2 3\n4 5 6\n")
        status, out, _ = self.run_job("check", [path])
        self.assertEqual(status, EXIT_OK)
        self.assertIn("kind = matrix", out)
        self.assertIn("PASS snf-identity[0]", out)

    def test_check_broken_complex(self):
        path = self.write("bad.txt", dump_complex(_incoherent_complex()))
        status, out, _ = self.run_job("check", [path])
        self.assertEqual(status, EXIT_CERTIFICATE)
        self.assertIn("[3]", out)

    def test_check_extension(self):
        path = self.write("e.txt", dump_extension(_times_two_extension()))
        status, out, _ = self.run_job("check", [path])
        self.assertEqual(status, EXIT_OK)
        self.assertIn("PASS essentially-surjective[G]", out)

    def test_longseq(self):
        path = self.write("e.txt", dump_extension(_times_two_extension()))
        status, out, _ = self.run_job("longseq", [path], functor="tensor:Z/2", length=1)
        self.assertEqual(status, EXIT_OK)
        self.assertIn("L0T(C) = pi0=Z/2", out)
        self.assertIn("PASS surjective[1]", out)
        self.assertIn("PASS oracle[3]", out)
        self.assertNotIn("FAIL", out)

    def test_table(self):
        status, out, _ = self.run_job("table", functor="tensor:Z", range="2..3", jobs=2)
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(out.count("PASS tor["), 4)
        status, _, _ = self.run_job("table", functor="hom:Z", range="2..3")
        self.assertEqual(status, EXIT_PARSE)

    def test_resolve_is_deterministic(self):
        path = self.write("m.txt", dump_pic2(pic2_from_matrix(FgAbPresentation.free(1), FgAbPresentation.free(1),
                                                             _m([[4]]))))
        first = self.run_job("resolve", [path], length=2, seed=3)
        second = self.run_job("resolve", [path], length=2, seed=3)
        self.assertEqual(first, second)
        self.assertEqual(first[0], EXIT_OK)
        self.assertIn("hash = ", first[1])
        self.assertIn("PASS exact[0]", first[1])

    def test_resolve_at_length_zero(self):
        path = self.write("z6.txt", dump_pic2(disc(FgAbPresentation.cyclic(6))))
        status, out, _ = self.run_job("resolve", [path], length=0)
        self.assertEqual(status, EXIT_OK)
        self.assertIn("PASS exact[0]", out)
        self.assertIn("PASS exact[1]", out)
        self.assertNotIn("FAIL", out)

    def test_unreadable_input(self):
        status, _, err = self.run_job("pi", [os.path.join(self.tmp.name, "missing.txt")])
        self.assertEqual(status, EXIT_PARSE)
        self.assertIn("cannot read", err)

    def test_malformed_input(self):
        path = self.write("junk.txt", "pic2\ngroup1 gens=x rels=0\n")
        status, _, _ = self.run_job("pi", [path])
        self.assertEqual(status, EXIT_PARSE)


class TestJobValidation(unittest.TestCase):
    def test_required_options(self):
        with self.assertRaises(ParseError):
            Job("derived", ("x",), {"degree": 1})
        with self.assertRaises(ParseError):
            Job("homology", ("x",), {})

    def test_inputs_and_ranges(self):
        with self.assertRaises(ParseError):
            Job("pi", (), {})
        with self.assertRaises(ParseError):
            Job("homology", ("x",), {"degree": -1})
        with self.assertRaises(ParseError):
            Job("pi", ("x",), {"format": "yaml"})

    def test_parse_range(self):
        self.assertEqual(parse_range("2..12"), (2, 12))
        for bad in ("12..2", "0..3", "a..b", "3"):
            with self.assertRaises(ParseError):
                parse_range(bad)

    def test_parse_group(self):
        self.assertEqual(parse_group("Z/4 + Z^2").describe(), "Z/4 + Z^2")
        self.assertTrue(parse_group("0").is_trivial())
        with self.assertRaises(ParseError):
            parse_group("Q")


class TestMain(CliTestCase):
    def test_main_writes_report(self):
        path = self.write("z6.txt", dump_pic2(disc(FgAbPresentation.cyclic(6))))
        with mock.patch("sys.stdout", new_callable=io.StringIO) as out:
            status = main(["pi", path])
        self.assertEqual(status, EXIT_OK)
        self.assertIn("pi0 = Z/6", out.getvalue())

    def test_usage_errors_exit_with_parse_status(self):
        with mock.patch("sys.stderr", new_callable=io.StringIO):
            self.assertEqual(main(["frobnicate", "x"]), EXIT_PARSE)
            self.assertEqual(main(["derived", "x", "--degree", "1"]), EXIT_PARSE)


if __name__ == "__main__":
    unittest.main()
