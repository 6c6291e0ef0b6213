import sys
import unittest
from math import gcd
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from pic2ha.errors import BoundaryMismatch, Incompatible
from pic2ha.pic2core import (
    OneMor,
    Pic2,
    canonical_two_mor,
    compose_one_mor,
    disc,
    homotopy_invariants,
    identity,
    is_zero_2group,
    null_two_mor,
    pic2_from_matrix,
    zero_one_mor,
    zero_pic2,
)
from pic2ha.relkc import (
    comparison_into_kernel,
    factor_through_cokernel,
    factor_through_kernel,
    is_2exact_pair,
    kernel_morphism,
    ordinary_kernel,
    relative_cokernel,
    relative_kernel,
)
from pic2ha.zlin import AbHom, FgAbPresentation, IntMatrix


def _m(rows, cols=None):
    return IntMatrix.from_rows(rows, cols)


def _disc_map(source, target, k):
    return OneMor(source, target, AbHom.zero(source.c1, target.c1), AbHom(source.c0, target.c0, _m([[k]])))


def _times_two_extension():
    """disc Z −×2→ disc Z → disc Z/2 with the zero nullhomotopy."""
    z, z2 = disc(FgAbPresentation.free(1)), disc(FgAbPresentation.cyclic(2))
    f, g = _disc_map(z, z, 2), _disc_map(z, z2, 1)
    gf = compose_one_mor(f, g)
    return f, g, null_two_mor(gf, AbHom.zero(z.c0, z2.c1))


def _loop_triple():
    """F = 0: disc Z → [Z → 0], G = id, φ = 1; the nullhomotopy of F∘X is not forced."""
    a = disc(FgAbPresentation.free(1))
    b = pic2_from_matrix(FgAbPresentation.free(1), FgAbPresentation.trivial(), IntMatrix.zeros(0, 1))
    f = zero_one_mor(a, b)
    g = identity(b)
    phi = null_two_mor(compose_one_mor(f, g), AbHom(a.c0, b.c1, _m([[1]])))
    return f, g, phi


def _random_disc_map(rng):
    """G: disc Z/a → disc Z/b, x ↦ kx, with its kernel size counted element by element."""
    a, b = (int(x) for x in rng.integers(2, 13, size=2))
    k = int(rng.integers(0, 6)) * (b // gcd(a, b))
    kernel_size = sum(1 for x in range(a) if (k * x) % b == 0)
    return _disc_map(disc(FgAbPresentation.cyclic(a)), disc(FgAbPresentation.cyclic(b)), k), kernel_size


def _ordinary_cokernel(g):
    """Coker(0 → 𝒜, G, can)."""
    f = zero_one_mor(zero_pic2(), g.source)
    return relative_cokernel(f, g, canonical_two_mor(compose_one_mor(f, g)))


def _cyclic_pic2(a1, a0, t):
    return pic2_from_matrix(FgAbPresentation.cyclic(a1), FgAbPresentation.cyclic(a0), _m([[t]]))


def _multiple(rng, a, b):
    return int(rng.integers(0, 4)) * (b // gcd(a, b))


def _random_cyclic_triple(rng):
    """(F, G, φ) between 2-groups [Z/n1 → Z/n0], found by rejection on the chain and homotopy identities."""
    while True:
        a1, a0, b1, b0, c1, c0 = (int(x) for x in rng.integers(2, 7, size=6))
        ta, tb, tc = _multiple(rng, a1, a0), _multiple(rng, b1, b0), _multiple(rng, c1, c0)
        f1, f0, g1, g0 = _multiple(rng, a1, b1), _multiple(rng, a0, b0), _multiple(rng, b1, c1), _multiple(rng, b0, c0)
        h = _multiple(rng, a0, c1)
        if (f0 * ta - tb * f1) % b0 or (g0 * tb - tc * g1) % c0:
            continue
        if (g0 * f0 + tc * h) % c0 or (g1 * f1 + h * ta) % c1:
            continue
        a, b, c = _cyclic_pic2(a1, a0, ta), _cyclic_pic2(b1, b0, tb), _cyclic_pic2(c1, c0, tc)
        f = OneMor(a, b, AbHom(a.c1, b.c1, _m([[f1]])), AbHom(a.c0, b.c0, _m([[f0]])))
        g = OneMor(b, c, AbHom(b.c1, c.c1, _m([[g1]])), AbHom(b.c0, c.c0, _m([[g0]])))
        return f, g, null_two_mor(compose_one_mor(f, g), AbHom(a.c0, c.c1, _m([[h]])))


def _dual_hom(f):
    """Character dual of x ↦ kx: Z/m → Z/n, read as Z/n → Z/m."""
    m, n = f.source.order(), f.target.order()
    return AbHom(f.target, f.source, _m([[f.matrix[0, 0] * m // n]]))


def _dual_pic2(p):
    return Pic2(p.c0, p.c1, _dual_hom(p.d))


def _dual_triple(f, g, phi):
    """(G^, F^, φ^): degrees swap, so each 1-morphism component lands in the other degree."""
    a, b, c = _dual_pic2(f.source), _dual_pic2(f.target), _dual_pic2(g.target)
    f_dual = OneMor(b, a, _dual_hom(f.f0), _dual_hom(f.f1))
    g_dual = OneMor(c, b, _dual_hom(g.f0), _dual_hom(g.f1))
    return g_dual, f_dual, null_two_mor(compose_one_mor(g_dual, f_dual), _dual_hom(phi.h))


class TestRelativeKernel(unittest.TestCase):
    def test_kernel_of_injective_map_vanishes(self):
        f, g, phi = _times_two_extension()
        kr = relative_kernel(f, g, phi)
        self.assertTrue(is_zero_2group(kr.K))

    def test_kernel_of_zero_map_is_source(self):
        z = disc(FgAbPresentation.free(1))
        f = zero_one_mor(z, z)
        g = identity(z)
        kr = relative_kernel(f, g, canonical_two_mor(compose_one_mor(f, g)))
        pi0, pi1 = homotopy_invariants(kr.K)
        self.assertEqual(pi0.describe(), "Z")
        self.assertTrue(pi1.is_trivial())
        self.assertTrue(compose_one_mor(kr.e, f).equals(kr.eps.source))

    def test_ordinary_kernel_of_discrete_maps(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            g, kernel_size = _random_disc_map(rng)
            pi0, pi1 = homotopy_invariants(ordinary_kernel(g).K)
            self.assertEqual(pi0.order(), kernel_size)
            self.assertTrue(pi1.is_trivial())

    def test_kernel_of_map_to_zero_keeps_the_source(self):
        rng = np.random.default_rng(4)
        for _ in range(15):
            r1, r0 = (int(x) for x in rng.integers(1, 4, size=2))
            a = pic2_from_matrix(FgAbPresentation.free(r1), FgAbPresentation.free(r0),
                                 _m(rng.integers(-4, 5, size=(r0, r1)).tolist(), r1))
            kr = ordinary_kernel(zero_one_mor(a, zero_pic2()))
            self.assertEqual([g.invariants() for g in homotopy_invariants(kr.K)],
                             [g.invariants() for g in homotopy_invariants(a)])

    def test_kernel_into_contractible_target(self):
        a = disc(FgAbPresentation.free(1))
        b = pic2_from_matrix(FgAbPresentation.free(1), FgAbPresentation.free(1), _m([[1]]))
        f = OneMor(a, b, AbHom.zero(a.c1, b.c1), AbHom.identity(a.c0))
        kr = ordinary_kernel(f)
        self.assertEqual(homotopy_invariants(kr.K)[0].describe(), "Z")

    def test_rejects_non_composable(self):
        f, g, phi = _times_two_extension()
        with self.assertRaises(BoundaryMismatch):
            relative_kernel(g, f, phi)

    def test_factor_through_kernel(self):
        f, g, phi = _loop_triple()
        kr = relative_kernel(f, g, phi)
        x = identity(f.source)
        null = null_two_mor(compose_one_mor(x, f), AbHom(x.source.c0, f.target.c1, _m([[1]])))
        lifted, cell = factor_through_kernel(kr, x, null)
        self.assertTrue(compose_one_mor(lifted, kr.e).equals(x))
        self.assertTrue(cell.h.is_zero())

    def test_factor_through_kernel_incompatible(self):
        f, g, phi = _loop_triple()
        kr = relative_kernel(f, g, phi)
        x = identity(f.source)
        null = null_two_mor(compose_one_mor(x, f), AbHom.zero(x.source.c0, f.target.c1))
        with self.assertRaises(Incompatible):
            factor_through_kernel(kr, x, null)

    def test_kernel_morphism_of_identity_square(self):
        f, g, phi = _loop_triple()
        kr = relative_kernel(f, g, phi)
        lam = canonical_two_mor(f)
        induced = kernel_morphism(kr, kr, identity(f.source), identity(f.target), lam)
        self.assertTrue(induced.equals(identity(kr.K)))


class TestRelativeCokernel(unittest.TestCase):
    def test_cokernel_of_extension_vanishes(self):
        f, g, phi = _times_two_extension()
        cr = relative_cokernel(f, g, phi)
        self.assertTrue(is_zero_2group(cr.C))

    def test_cokernel_of_zero_map(self):
        z, z2 = disc(FgAbPresentation.free(1)), disc(FgAbPresentation.cyclic(2))
        f = zero_one_mor(z, z)
        g = zero_one_mor(z, z2)
        cr = relative_cokernel(f, g, canonical_two_mor(compose_one_mor(f, g)))
        pi0, pi1 = homotopy_invariants(cr.C)
        self.assertEqual(pi0.describe(), "Z/2")
        self.assertEqual(pi1.describe(), "Z")

    def test_cokernel_mirrors_kernel_on_discrete_maps(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            g, kernel_size = _random_disc_map(rng)
            a, b = g.source.c0.order(), g.target.c0.order()
            pi0, pi1 = homotopy_invariants(_ordinary_cokernel(g).C)
            self.assertEqual(pi0.order(), b * kernel_size // a)
            self.assertEqual(pi1.invariants(), homotopy_invariants(ordinary_kernel(g).K)[0].invariants())

    def test_cokernel_is_dual_to_kernel_of_dual_data(self):
        rng = np.random.default_rng(7)
        for _ in range(15):
            f, g, phi = _random_cyclic_triple(rng)
            pi0, pi1 = homotopy_invariants(relative_cokernel(f, g, phi).C)
            dual_pi0, dual_pi1 = homotopy_invariants(relative_kernel(*_dual_triple(f, g, phi)).K)
            self.assertEqual(pi0.invariants(), dual_pi1.invariants())
            self.assertEqual(pi1.invariants(), dual_pi0.invariants())

    def test_factor_through_cokernel(self):
        f, g, phi = _times_two_extension()
        cr = relative_cokernel(f, g, phi)
        y = disc(FgAbPresentation.cyclic(2))
        zero_candidate = zero_one_mor(g.target, y)
        null = null_two_mor(compose_one_mor(g, zero_candidate), AbHom.zero(g.source.c0, y.c1))
        lifted, _ = factor_through_cokernel(cr, zero_candidate, null)
        self.assertTrue(compose_one_mor(cr.p, lifted).equals(zero_candidate))


class TestTwoExactness(unittest.TestCase):
    def test_extension_is_2exact(self):
        f, g, phi = _times_two_extension()
        result = is_2exact_pair(f, phi, g)
        self.assertTrue(result.exact)
        self.assertTrue(result.flags.equivalence)

    def test_classically_exact_but_not_2exact(self):
        z = disc(FgAbPresentation.free(1))
        f, g = zero_one_mor(z, z), identity(z)
        result = is_2exact_pair(f, canonical_two_mor(compose_one_mor(f, g)), g)
        self.assertTrue(result.flags.essentially_surjective)
        self.assertFalse(result.exact)

    def test_comparison_into_kernel_is_equivalence(self):
        f, g, phi = _times_two_extension()
        comparison = comparison_into_kernel(f, g, phi)
        self.assertEqual(homotopy_invariants(comparison.target)[0].describe(), "Z")


if __name__ == "__main__":
    unittest.main()
