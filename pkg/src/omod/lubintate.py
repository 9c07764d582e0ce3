"""Torsion towers of the height-one model t*T + T^Q, the torsion character,
torsion-point valuation and product identities, and the norm compatibility of
the torsion action at the multiplication-rich specialization.

All identities are checked as exact rational equalities or as series
agreements to an explicit number of terms; nothing is compared in floating
point.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .additive import AdditivePolynomial
from .errors import (CharacterViolation, DeterminantMismatch, OrbitNotFree,
                     ValuationMismatch)
from .formalmod import (FormalOModule, TorsionModule, bijective_level_structure,
                        build_torsion_chain, coord_key, lubin_tate_module,
                        multiply_by, torsion_points)
from .quotring import OModElement, OModRing
from .series import LocalFieldSpec, base_field
from .tower import (FieldAutomorphism, FieldTower, additive_roots_in_field,
                    apply_automorphism, embed, root_uniformizer_image,
                    unramified_extension)


@dataclass(eq=False)
class LubinTateTower:
    """The chain of fields generated by the t^k-torsion of t*T + T^Q over a
    base with residue F_Q, together with the distinguished generators
    lam_k satisfying [t](lam_k) = lam_{k-1}."""

    base: LocalFieldSpec
    module: FormalOModule
    tower: FieldTower
    levels: list                      # [(field_k, lam_k in field_k)]
    m_max: int
    precision: int

    @property
    def Q(self):
        return self.base.residue.q

    @property
    def top(self):
        return self.tower.top

    def degree(self, k=None):
        """[F_k : base] = (Q-1) Q^(k-1)."""
        k = self.m_max if k is None else k
        if k == 0:
            return 1
        return self.levels[k - 1][0].degree_over(self.base)

    def lam(self, k, target=None):
        fld, lam = self.levels[k - 1]
        target = target or self.top
        return lam if lam.field is target else embed(lam, target)

    def t_image(self, target=None):
        return root_uniformizer_image(target or self.top)

    def unit_ring(self, m=None):
        return OModRing(self.base.residue, m or self.m_max)

    def multiplication(self, a: OModElement) -> AdditivePolynomial:
        """[a] with coefficients embedded in the top field."""
        return multiply_by(a, self.module, target=self.top)

    def torsion_automorphism(self, a: OModElement) -> FieldAutomorphism:
        """lam_m -> [a](lam_m), the substitution realizing the Galois action."""
        if not a.is_unit():
            raise ValueError("torsion substitutions need a unit index")
        lam = self.lam(self.m_max)
        return FieldAutomorphism(self.top, self.multiplication(a)(lam))

    def torsion(self, m=None) -> "TorsionModule":
        """The fully enumerated torsion table at level m <= m_max, assembled
        from the existing chain (no new extensions)."""
        from .formalmod import orbit_torsion_from_generator

        m = m or self.m_max
        if m > self.m_max:
            raise ValueError("tower only built to level %d" % self.m_max)
        if m == 0:
            from .formalmod import torsion_points

            return torsion_points(self.module, 0, self.tower)
        return orbit_torsion_from_generator(self.module, m, self.tower, self.lam(m))


def build_tower(base: LocalFieldSpec, m: int, precision=None) -> LubinTateTower:
    """Torsion tower to level m; base residue F_Q gives relative degrees
    Q-1, Q, Q, ..."""
    precision = precision or base.default_precision
    n = base.residue.f // base.root.residue.f
    module = lubin_tate_module(base, n)
    tower = FieldTower(base)
    levels = build_torsion_chain(module, m, tower, precision, name_prefix="lam")
    return LubinTateTower(base, module, tower, levels, m, precision)


def cm_tower(q_p, q_f, n, m, precision=64):
    """Tower of the height-n multiplication-rich model: base field F_{q^n}((t))
    built as the degree-n unramified enlargement of F_q((t))."""
    F = base_field(q_p, q_f, precision=precision)
    Fp = unramified_extension(F, n) if n > 1 else F
    return build_tower(Fp, m, precision)


@dataclass(eq=False)
class CharacterTable:
    """The verified isomorphism a <-> (lam_m -> [a](lam_m)) between the unit
    group of o/t^m and the torsion substitutions over the base."""

    tower: LubinTateTower
    level: int
    table: dict          # a.lex_key() -> (a, FieldAutomorphism)
    fixed_terms: int

    def sigma(self, a: OModElement) -> FieldAutomorphism:
        return self.table[a.lex_key()][1]

    def units(self):
        return [a for a, _ in self.table.values()]

    def chi_inverse_key(self, a: OModElement):
        """Key of a^(-1): the character value of the inverse substitution."""
        return a.inv().lex_key()

    def to_json(self):
        rows = []
        for key in sorted(self.table):
            a, sigma = self.table[key]
            rows.append({"unit": list(map(int, key)),
                         "uniformizer_image": sigma.image_of_uniformizer.to_json()})
        return {"level": self.level, "order": len(rows),
                "fixed_terms": self.fixed_terms, "rows": rows}


def verify_character(lt: LubinTateTower, m=None, min_fixed_terms=40) -> CharacterTable:
    """Check that a -> (lam_m -> [a](lam_m)) is a group isomorphism from
    (o/t^m)^x onto the substitution group, with every substitution fixing the
    embedded base field to at least min_fixed_terms series terms."""
    m = m or lt.m_max
    if m != lt.m_max:
        raise ValueError("character table is built at the tower's top level")
    ring = lt.unit_ring(m)
    lam = lt.lam(m)
    t_img = lt.t_image()
    table = {}
    images = {}
    for a in ring.units():
        sigma = FieldAutomorphism(lt.top, lt.multiplication(a)(lam))
        moved = apply_automorphism(sigma, t_img)
        if not moved.agrees(t_img, min_terms=min_fixed_terms):
            raise CharacterViolation(
                "substitution by %r moves the embedded base uniformizer: %r vs %r"
                % (a, moved, t_img))
        key = sigma.image_of_uniformizer.series_key(terms=48)
        if key in images:
            raise CharacterViolation("substitutions by %r and %r coincide"
                                     % (a, images[key]))
        images[key] = a
        table[a.lex_key()] = (a, sigma)
    # multiplicativity: sigma_a(sigma_b(lam)) = sigma_{ab}(lam), exhaustively
    for a, sig_a in table.values():
        for b, sig_b in table.values():
            composed = apply_automorphism(sig_a, sig_b.image_of_uniformizer)
            direct = table[(a * b).lex_key()][1].image_of_uniformizer
            if not composed.agrees(direct, min_terms=min_fixed_terms):
                raise CharacterViolation(
                    "composition law fails at (%r, %r): %r vs %r"
                    % (a, b, composed - direct, direct))
    return CharacterTable(lt, m, table, min_fixed_terms)


def character_restriction_consistent(lt: LubinTateTower, min_terms=32) -> bool:
    """Restricting the top-level substitutions to the next generator down
    realizes the lower table through reduction mod t^(m-1)."""
    m = lt.m_max
    if m < 2:
        return True
    ring = lt.unit_ring(m)
    lam_prev = lt.lam(m - 1)
    for a in ring.units():
        sigma = lt.torsion_automorphism(a)
        moved = apply_automorphism(sigma, lam_prev)
        expected = lt.multiplication(a.reduce_to(m - 1).lift_to(ring))(lam_prev)
        if not moved.agrees(expected, min_terms=min_terms):
            return False
    return True


# --- valuation and product identities ------------------------------------------


def expected_primitive_valuation(q, n, m):
    return Fraction(1, (q ** n - 1) * q ** (n * (m - 1)))


def verify_torsion_valuations(X: FormalOModule, m: int, tower=None,
                              torsion: TorsionModule | None = None):
    """Every exact-level-k torsion point of the orbit model has valuation
    1/((q^n - 1) q^(n(k-1))), as an exact rational; v(t) = 1."""
    Tm = torsion if torsion is not None else torsion_points(X, m, tower)
    q = X.q
    n = X.n
    checked = {k: 0 for k in range(1, m + 1)}
    for key, vec in Tm.coords.items():
        level = m - min(v.level() for v in vec) if vec else 0
        pt = Tm.points[key]
        if level == 0:
            if not pt.is_zero_mod_precision():
                raise ValuationMismatch("coordinate 0 gave a nonzero point")
            continue
        expected = expected_primitive_valuation(q, n, level)
        got = pt.valuation()
        if got != expected:
            raise ValuationMismatch(
                "level-%d point %r has valuation %s, expected %s"
                % (level, key, got, expected))
        checked[level] += 1
    counts = {k: q ** (n * k) - q ** (n * (k - 1)) for k in checked}
    if checked != counts:
        raise ValuationMismatch("level population %r, expected %r" % (checked, counts))
    return {"points_checked": sum(checked.values()), "per_level": checked,
            "primitive_valuation": expected_primitive_valuation(q, n, m)}


def orbit_representatives(ring: OModRing, n: int):
    """Representatives of the unit-group orbits on primitive coordinate
    vectors, orbits checked to be free; deterministic (lexicographically
    smallest member represents)."""
    units = list(ring.units())
    vectors = [()]
    for _ in range(n):
        vectors = [v + (a,) for v in vectors for a in ring.elements()]
    primitive = [v for v in vectors if min(x.level() for x in v) == 0]
    seen = set()
    reps = []
    for v in sorted(primitive, key=coord_key):
        k = coord_key(v)
        if k in seen:
            continue
        orbit = {coord_key(tuple(u * x for x in v)) for u in units}
        if len(orbit) != len(units):
            raise OrbitNotFree("orbit of %r has size %d != %d (stabilizer"
                               " nontrivial)" % (k, len(orbit), len(units)))
        reps.append(v)
        seen |= orbit
    return reps


def verify_product_formula(X: FormalOModule, m: int, tower=None,
                           torsion: TorsionModule | None = None,
                           base_chain=None):
    """|R| = (q^n-1) q^(n(m-1)) / ((q-1) q^(m-1)); the valuations of a
    bijective level structure over R sum to 1/((q-1) q^(m-1)) = v(uniformizer
    of the level-m base torsion field); and the actual product differs from
    that embedded uniformizer by a unit."""
    tower = tower if tower is not None else (torsion.tower if torsion is not None else None)
    Tm = torsion if torsion is not None else torsion_points(X, m, tower)
    q, n = X.q, X.n
    reps = orbit_representatives(Tm.ring, n)
    expected_count = Fraction((q ** n - 1) * q ** (n * (m - 1)),
                              (q - 1) * q ** (m - 1))
    if Fraction(len(reps)) != expected_count:
        raise ValuationMismatch("|R| = %d, expected %s" % (len(reps), expected_count))
    phi = bijective_level_structure(Tm)
    total = Fraction(0)
    prod = Tm.field.one()
    for vec in reps:
        pt = phi.image_of(vec)
        total += pt.valuation()
        prod = prod * pt
    expected_sum = Fraction(1, (q - 1) * q ** (m - 1))
    if total != expected_sum:
        raise ValuationMismatch("sum of valuations %s, expected %s"
                                % (total, expected_sum))
    # compare the actual product against the embedded uniformizer of the
    # level-m torsion field of the height-one base model
    chain = base_chain if base_chain is not None else \
        locate_base_torsion_chain(Tm, m)
    varpi_m = chain[-1]
    ratio_val = prod.valuation() - varpi_m.valuation()
    if ratio_val != 0:
        raise ValuationMismatch("product/uniformizer has valuation %s, expected 0"
                                % (ratio_val,))
    return {"rep_count": len(reps), "valuation_sum": total,
            "uniformizer_valuation": varpi_m.valuation(),
            "ratio_valuation": ratio_val}


def base_height_one_polynomial(Tm_or_field, q_root=None):
    """[t](T) = t*T + T^q of the height-one model over the root field, with
    coefficients embedded in the given field."""
    field = Tm_or_field.field if hasattr(Tm_or_field, "field") else Tm_or_field
    root = field.root
    q_root = q_root or root.residue.q
    t_img = root_uniformizer_image(field)
    return AdditivePolynomial(field, (t_img, field.one()), root.residue.f)


def locate_base_torsion_chain(Tm_or_field, m):
    """mu_1, ..., mu_m inside the given field: [t](mu_1) = 0, mu_1 != 0, and
    [t](mu_k) = mu_{k-1}; mu_k generates the level-k torsion of the height-one
    root model.  Deterministic root choice (smallest series key)."""
    field = Tm_or_field.field if hasattr(Tm_or_field, "field") else Tm_or_field
    P = base_height_one_polynomial(field)
    out = []
    prev = field.zero()
    for k in range(1, m + 1):
        roots = additive_roots_in_field(P, prev if k > 1 else None)
        if k == 1:
            roots = [r for r in roots if r.is_known_nonzero()]
        if not roots:
            raise ValuationMismatch("no level-%d torsion of the base model found" % k)
        prev = min(roots, key=lambda r: r.series_key(terms=48))
        out.append(prev)
    return out


# --- the determinant / norm compatibility ---------------------------------------


@dataclass(eq=False)
class DeterminantWitness:
    q: int
    n: int
    m: int
    cm: LubinTateTower
    mu: object
    rows: list = dc_field(default_factory=list)  # (a, N(a), matched c)

    def to_json(self):
        return {"q": self.q, "n": self.n, "m": self.m,
                "cases": [{"a": list(map(int, a.lex_key())),
                           "norm": list(map(int, na.lex_key())),
                           "matched": list(map(int, c.lex_key()))}
                          for a, na, c in self.rows]}


def verify_determinant_character(q_p, q_f, n, m, precision=64,
                                 min_terms=40) -> DeterminantWitness:
    """At the multiplication-rich height-n point: every torsion substitution
    sigma_a (a a unit of o'/t^m) moves the embedded height-one torsion
    generator mu by exactly [N(a)], N the coefficient-Frobenius norm
    o'/t^m -> o/t^m.  The match is found by decoding, not assumed."""
    lt = cm_tower(q_p, q_f, n, m, precision)
    q = lt.module.q
    root_res = lt.base.root.residue
    chain = locate_base_torsion_chain(lt.top, m)
    mu = chain[-1]
    base_P = base_height_one_polynomial(lt.top)
    # primitivity: [t^(m-1)](mu) = mu_1 != 0, [t^m](mu) = 0
    img = mu
    for _ in range(m):
        img = base_P(img)
    if not img.is_zero_mod_precision():
        raise DeterminantMismatch("mu is not t^m-torsion")
    base_ring = OModRing(root_res, m)
    big_ring = OModRing(lt.base.residue, m)
    base_units = list(base_ring.units())
    base_module = _root_height_one_module(lt)
    # decode table: c -> [c](mu)
    decode = {}
    for c in base_units:
        decode[c.lex_key()] = multiply_by(c, base_module, target=lt.top)(mu)
    witness = DeterminantWitness(q, n, m, lt, mu)
    for a in big_ring.units():
        sigma = lt.torsion_automorphism(a)
        moved = apply_automorphism(sigma, mu)
        matched = None
        for c in base_units:
            if moved.agrees(decode[c.lex_key()], min_terms=min_terms):
                matched = c
                break
        if matched is None:
            raise DeterminantMismatch("sigma_a(mu) is not [c](mu) for any unit c; a = %r" % (a,))
        norm = a.norm_to(root_res)
        if matched.lex_key() != norm.lex_key():
            raise DeterminantMismatch(
                "sigma_%r moves mu by [%r], but N(a) = %r" % (a, matched, norm))
        witness.rows.append((a, norm, matched))
    if len({c.lex_key() for _, _, c in witness.rows}) != len(base_units):
        # the norm is onto the base units; the decoded values must cover them
        raise DeterminantMismatch("decoded torsion characters do not cover the unit group")
    return witness


def _root_height_one_module(lt: LubinTateTower) -> FormalOModule:
    """The height-one model over the root field, used for [c] with c in o/t^m."""
    root = lt.base.root
    return lubin_tate_module(root, 1)
