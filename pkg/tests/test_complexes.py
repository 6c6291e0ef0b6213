import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from pic2ha.complexes import (
    ChainHomotopy2,
    ComplexMorphism,
    TwoChainComplex,
    check_complex_morphism,
    check_two_chain_complex,
    check_two_chain_homotopy,
    classical_homology,
    compose_complex_morphisms,
    discrete_complex,
    homology,
    homology_via_relkc,
    homotopy_induces_equivalence,
    identity_complex_morphism,
    induced_homology_morphism,
    is_relative_2exact_at,
    truncate_left,
    zero_complex_morphism,
)
from pic2ha.errors import BoundaryMismatch, CertificateFailure, IllFormed, IndexOutOfRange
from pic2ha.pic2core import OneMor, classify_morphism, homotopy_invariants, pic2_from_matrix, zero_one_mor
from pic2ha.zlin import AbHom, FgAbPresentation, IntMatrix


def _m(rows, cols=None):
    return IntMatrix.from_rows(rows, cols)


def _unimodular(rng, n):
    """Random U with integer inverse, built from elementary row operations."""
    u = np.eye(n, dtype=np.int64)
    inv = np.eye(n, dtype=np.int64)
    for _ in range(2 * n if n > 1 else 0):
        i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
        c = int(rng.integers(-2, 3))
        e = np.eye(n, dtype=np.int64)
        e[i, j] = c
        e_inv = np.eye(n, dtype=np.int64)
        e_inv[i, j] = -c
        u = e @ u
        inv = inv @ e_inv
    return u, inv


def _random_discrete_complex(rng, top=3):
    """Direct sum of Z and Z ←d− Z pieces, disguised by unimodular base changes.

    Returns (groups, matrices, expected) with expected[n] = (torsion, free rank) of H_n.
    """
    singles = [int(rng.integers(0, 2)) for _ in range(top + 1)]
    pairs = []  # (lower degree, d)
    for k in range(top):
        if rng.integers(0, 3):
            pairs.append((k, int(rng.choice([0, 1, 2, 3, 4, 6]))))
    layout = []
    for k in range(top + 1):
        gens = [("s", None)] * singles[k]
        gens += [("lo", p) for p in pairs if p[0] == k]
        gens += [("hi", p) for p in pairs if p[0] == k - 1]
        layout.append(gens)
    mats = []
    for k in range(1, top + 1):
        d = np.zeros((len(layout[k - 1]), len(layout[k])), dtype=np.int64)
        for j, (kind, p) in enumerate(layout[k]):
            if kind == "hi":
                d[layout[k - 1].index(("lo", p)), j] = p[1]
        mats.append(d)
    bases = [_unimodular(rng, len(g)) for g in layout]
    matrices = []
    for k in range(1, top + 1):
        disguised = bases[k - 1][0] @ mats[k - 1] @ bases[k][1]
        matrices.append(_m(disguised.tolist(), len(layout[k])))
    groups = [FgAbPresentation.free(len(g)) for g in layout]
    expected = []
    for n in range(top + 2):
        free = singles[n] if n <= top else 0
        free += sum(1 for p in pairs if p[1] == 0 and p[0] in (n, n - 1))
        torsion = sorted(p[1] for p in pairs if p[0] == n and p[1] > 1)
        expected.append(FgAbPresentation.from_invariants(torsion, free).invariants())
    return groups, matrices, expected


def _loop_object():
    """[Z −0→ Z]."""
    z = FgAbPresentation.free(1)
    return pic2_from_matrix(z, z, _m([[0]]))


def _loop_complex(alpha3):
    """Three maps between [Z −0→ Z]; L_1 = (1, 0), the others zero."""
    w = _loop_object()
    z = w.c1
    l1 = OneMor(w, w, AbHom(z, z, _m([[1]])), AbHom.zero(z, z))
    zero = zero_one_mor(w, w)
    return TwoChainComplex((w, w, w, w), (l1, zero, zero), (AbHom.zero(z, z), AbHom(z, z, _m([[alpha3]]))))


class TestComplexConstruction(unittest.TestCase):
    def test_counts_are_checked(self):
        w = _loop_object()
        with self.assertRaises(IllFormed):
            TwoChainComplex((w, w), (), ())

    def test_boundaries_are_checked(self):
        w = _loop_object()
        other = pic2_from_matrix(FgAbPresentation.free(2), FgAbPresentation.free(1), _m([[0, 0]]))
        with self.assertRaises((BoundaryMismatch, IllFormed)):
            TwoChainComplex((w, other), (zero_one_mor(w, w),), ())

    def test_zero_completion(self):
        c = discrete_complex([FgAbPresentation.free(1)], [])
        self.assertTrue(homotopy_invariants(c.obj(5))[0].is_trivial())
        self.assertTrue(c.alpha_h(7).is_zero())

    def test_truncate_left(self):
        c = _loop_complex(0)
        t = truncate_left(c)
        self.assertEqual(t.length, 2)
        self.assertIs(t.L(1), c.L(2))


class TestCoherence(unittest.TestCase):
    def test_coherent_complex_passes(self):
        self.assertTrue(check_two_chain_complex(_loop_complex(0)).valid)

    def test_broken_coherence_reports_index(self):
        report = check_two_chain_complex(_loop_complex(1))
        self.assertFalse(report.valid)
        self.assertEqual([v.index for v in report.violations], [3])
        with self.assertRaises(CertificateFailure) as ctx:
            report.raise_if_invalid()
        self.assertEqual(ctx.exception.index, 3)

    def test_broken_nullhomotopy_is_reported(self):
        w = _loop_object()
        z = w.c1
        ident = OneMor(w, w, AbHom.identity(z), AbHom.identity(z))
        c = TwoChainComplex((w, w, w), (ident, ident), (AbHom.zero(z, z),))
        report = check_two_chain_complex(c)
        self.assertEqual(report.violations[0].index, 2)


class TestHomology(unittest.TestCase):
    def test_cyclic_example(self):
        z = FgAbPresentation.free(1)
        c = discrete_complex([z, z], [_m([[6]])])
        pi0, pi1 = homotopy_invariants(homology(c, 0))
        self.assertEqual(pi0.describe(), "Z/6")
        self.assertTrue(pi1.is_trivial())

    def test_degree_out_of_range(self):
        c = discrete_complex([FgAbPresentation.free(1)], [])
        with self.assertRaises(IndexOutOfRange):
            homology(c, 1)

    def test_discrete_homology_matches_classical(self):
        rng = np.random.default_rng(2024)
        for _ in range(50):
            groups, matrices, expected = _random_discrete_complex(rng)
            c = discrete_complex(groups, matrices)
            for n in range(c.length + 1):
                pi0, pi1 = homotopy_invariants(homology(c, n))
                self.assertEqual(pi0.invariants(), classical_homology(groups, matrices, n).invariants())
                self.assertEqual(pi1.invariants(), classical_homology(groups, matrices, n + 1).invariants())
                self.assertEqual(pi0.invariants(), expected[n])
                self.assertEqual(pi1.invariants(), expected[n + 1])

    def test_relkc_route_agrees(self):
        rng = np.random.default_rng(11)
        for _ in range(8):
            groups, matrices, _ = _random_discrete_complex(rng, top=2)
            c = discrete_complex(groups, matrices)
            for n in range(c.length + 1):
                direct = homotopy_invariants(homology(c, n))
                via = homotopy_invariants(homology_via_relkc(c, n))
                self.assertEqual([g.invariants() for g in direct], [g.invariants() for g in via])

    def test_relkc_route_on_loop_complex(self):
        c = _loop_complex(0)
        for n in range(c.length + 1):
            direct = homotopy_invariants(homology(c, n))
            via = homotopy_invariants(homology_via_relkc(c, n))
            self.assertEqual([g.invariants() for g in direct], [g.invariants() for g in via])

    def test_exactness_certificate(self):
        z = FgAbPresentation.free(1)
        exact = discrete_complex([z, z], [_m([[1]])])
        self.assertTrue(is_relative_2exact_at(exact, 0))
        self.assertTrue(is_relative_2exact_at(exact, 1))
        inexact = discrete_complex([z, z], [_m([[2]])])
        cert = is_relative_2exact_at(inexact, 0)
        self.assertFalse(cert)
        self.assertEqual(cert.to_dict()["pi0"], "Z/2")


class TestMorphismsOfComplexes(unittest.TestCase):
    def test_identity_and_composition(self):
        c = _loop_complex(0)
        ident = identity_complex_morphism(c)
        self.assertTrue(check_complex_morphism(ident).valid)
        twice = compose_complex_morphisms(ident, ident)
        self.assertTrue(check_complex_morphism(twice).valid)
        for n in range(c.length + 1):
            self.assertTrue(classify_morphism(induced_homology_morphism(twice, n)).equivalence)

    def test_zero_morphism_is_valid(self):
        c = _loop_complex(0)
        self.assertTrue(check_complex_morphism(zero_complex_morphism(c, c)).valid)

    def test_broken_square_is_reported(self):
        w = _loop_object()
        lw = TwoChainComplex((w, w), (OneMor(w, w, AbHom.identity(w.c1), AbHom.zero(w.c0, w.c0)),), ())
        skew = ComplexMorphism(lw, lw, (zero_one_mor(w, w), OneMor(w, w, AbHom.identity(w.c1), AbHom.identity(w.c0))),
                               (AbHom.zero(w.c0, w.c1),))
        report = check_complex_morphism(skew)
        self.assertFalse(report.valid)
        self.assertEqual(report.violations[0].index, 1)

    def test_zero_homotopy_induces_identity_cell(self):
        c = _loop_complex(0)
        ident = identity_complex_morphism(c)
        slides = tuple(zero_one_mor(c.obj(k), c.obj(k + 1)) for k in range(c.length + 1))
        cells = tuple(AbHom.zero(c.obj(k).c0, c.obj(k).c1) for k in range(c.length + 1))
        h = ChainHomotopy2(ident, ident, slides, cells)
        self.assertTrue(check_two_chain_homotopy(h).valid)
        cell = homotopy_induces_equivalence(h, 1)
        self.assertTrue(cell.h.is_zero())


if __name__ == "__main__":
    unittest.main()
