"""Oracle suites: Newton polygons against brute-force root construction in
explicitly built splitting towers, and precision-soundness metamorphic runs.

The splitting towers reachable by declared-uniformizer relations are the
tamely ramified ones (odd ramification over F_2) with residue enlargements;
the sample stream is filtered to that class and the test insists on at least
100 constructed samples.  Wildly ramified splitting fields (even slope
denominators) have no pure-uniformizer presentation, so such samples are
counted and excluded.
"""

import random

from omod.additive import AdditivePolynomial
from omod.errors import ExtensionRequired, NoConvergence, PrecisionExhausted
from omod.series import base_field
from omod.tower import embed, find_integral_roots

from oracle_utils import (polygon_versus_towers, random_additive,
                          splitting_field)


def test_newton_polygon_versus_splitting_towers():
    constructed, wild, attempts = polygon_versus_towers(seed=20260808)
    assert constructed >= 100, (
        "only %d constructible samples out of %d attempts (%d wild)"
        % (constructed, attempts, wild))


def test_precision_soundness_root_search():
    # the same roots, recomputed at doubled precision, agree on shared terms;
    # precision must exceed ramification x the largest root valuation, so
    # coefficient orders are capped at 1 here
    rng = random.Random(555)
    F_lo = base_field(2, 1, precision=30)
    F_hi = base_field(2, 1, precision=60)
    lo = splitting_field(F_lo, 2, precision=30)
    hi = splitting_field(F_hi, 2, precision=60)
    done = 0
    while done < 12:
        P_lo = random_additive(F_lo, rng, max_qexp=2, max_order=1)
        # rebuild the same polynomial over the high-precision copy
        coeff_data = []
        for c in P_lo.coeffs:
            if c.is_zero_mod_precision():
                coeff_data.append({})
            else:
                coeff_data.append({k: c.coeff_at(k).to_int()
                                   for k in range(c.leading_exponent,
                                                  c.leading_exponent + len(c.coeffs))})
        P_hi = AdditivePolynomial(
            F_hi, tuple(F_hi.from_int_poly(d) if d else F_hi.zero()
                        for d in coeff_data), 1)
        try:
            dense_lo = [embed(c, lo) if not c.is_exact_zero() else lo.zero()
                        for c in P_lo.to_dense_coeffs()]
            dense_hi = [embed(c, hi) if not c.is_exact_zero() else hi.zero()
                        for c in P_hi.to_dense_coeffs()]
            roots_lo = find_integral_roots(dense_lo, lo)
            roots_hi = find_integral_roots(dense_hi, hi)
        except (ExtensionRequired, NoConvergence, PrecisionExhausted):
            continue
        # root orders reach 21 and the low-precision field holds 30 terms, so
        # an 8-term window is jointly known on both sides
        key_lo = sorted((r.series_key(terms=8) for r in roots_lo), key=repr)
        key_hi = sorted((r.series_key(terms=8) for r in roots_hi), key=repr)
        assert key_lo == key_hi
        done += 1
