"""The component group (o/t^m)^x with its three structure maps: determinant
of the covering group GL_n(o/t^m), inverse reduced norm of the endomorphism
order, and the inverse torsion character of the Galois side; plus the full
character decomposition of the degree-zero invariants.

Characters take values in an abstract cyclic group written additively
(integers mod the unit group's exponent); no embedding into any coefficient
field is chosen.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

from .errors import (CapExceeded, FrobeniusInvarianceViolation, NotAUnit,
                     NotInvertible)
from .finitefield import GF, FieldSpec, project_fq
from .quotring import OModElement, OModRing

ENUMERATION_CAP = 1 << 16


# --- unit group -------------------------------------------------------------------


@dataclass(eq=False)
class UnitGroup:
    """(o/t^m)^x, fully enumerated, with a verified cyclic decomposition."""

    ring: OModRing
    elements: list
    generators: list          # [(element, order)], aligned with invariant_factors
    invariant_factors: list   # [d_1, d_2, ...], d_{i+1} | d_i
    dlog: dict                # element key -> exponent tuple over the generators

    @property
    def order(self):
        return len(self.elements)

    @property
    def exponent(self):
        return self.invariant_factors[0] if self.invariant_factors else 1

    def element_order(self, a):
        k = 1
        acc = a
        one = self.ring.one().lex_key()
        while acc.lex_key() != one:
            acc = acc * a
            k += 1
        return k

    def contains(self, a):
        return a.lex_key() in self.dlog

    def to_json(self):
        return {
            "q": self.ring.residue.q, "m": self.ring.m, "order": self.order,
            "invariant_factors": list(self.invariant_factors),
            "generators": [list(map(int, g.lex_key())) for g, _ in self.generators],
            "elements": [list(map(int, e.lex_key())) for e in self.elements],
        }


def unit_group(residue_or_pf, m, cap=ENUMERATION_CAP) -> UnitGroup:
    """Enumerate (o/t^m)^x, verify its order is (q-1) q^(m-1), and compute an
    explicit basis realizing the invariant-factor decomposition."""
    if isinstance(residue_or_pf, FieldSpec):
        residue = residue_or_pf
    else:
        p, f = residue_or_pf
        residue = GF(p, f)
    q = residue.q
    expected = (q - 1) * q ** (m - 1)
    if expected > cap:
        raise CapExceeded("unit group of order %d exceeds cap %d" % (expected, cap))
    ring = OModRing(residue, m)
    elements = sorted(ring.units(), key=lambda a: a.lex_key())
    if len(elements) != expected:
        raise ArithmeticError("unit count %d != (q-1)q^(m-1) = %d"
                              % (len(elements), expected))
    factors = _invariant_factors(elements, ring)
    gens, dlog = _generator_basis(elements, ring, factors)
    return UnitGroup(ring, elements, gens, factors, dlog)


def _element_order(a, one_key):
    k = 1
    acc = a
    while acc.lex_key() != one_key:
        acc = acc * a
        k += 1
    return k


def _invariant_factors(elements, ring):
    """Invariant factors from order statistics: for each prime p, the counts
    |{x : x^(p^k) = 1}| determine the p-partition (they equal
    p^(sum_i min(lambda_i, k))), and aligned products give the factors."""
    one_key = ring.one().lex_key()
    orders = [_element_order(a, one_key) for a in elements]
    n = len(elements)
    partitions = {}
    for p in _prime_divisors(n):
        sylow = sum(1 for o in orders if _p_part(o, p) == 1)
        counts = []
        k = 1
        while True:
            c = sum(1 for o in orders if _p_part(o, p) == 1 and o <= p ** k)
            counts.append(c)
            if c == sylow:
                break
            k += 1
        partitions[p] = _partition_from_counts(counts, p)
    depth = max((len(v) for v in partitions.values()), default=0)
    factors = []
    for i in range(depth):
        d = 1
        for p, part in partitions.items():
            if i < len(part):
                d *= p ** part[i]
        factors.append(d)
    return factors


def _prime_divisors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _p_part(o, p):
    """The prime-to-p part of o (1 exactly when o is a p-power)."""
    while o % p == 0:
        o //= p
    return o


def _partition_from_counts(counts, p):
    """counts[k-1] = p^(sum_i min(lambda_i, k)) recovers the partition lambda
    (largest first)."""
    import math

    exps = [0]
    for c in counts:
        exps.append(round(math.log(c, p)))
    # exps[k] - exps[k-1] = #{i : lambda_i >= k}
    ge = [exps[k] - exps[k - 1] for k in range(1, len(exps))]
    lam = []
    for i in range(ge[0] if ge else 0):
        lam.append(sum(1 for g in ge if g > i))
    return sorted(lam, reverse=True)


def _generator_basis(elements, ring, factors):
    """Explicit generators matching the invariant factors, verified by
    exhaustive span: the exponent-tuple map must hit every unit exactly once."""
    one_key = ring.one().lex_key()
    by_order = {}
    for a in elements:
        by_order.setdefault(_element_order(a, one_key), []).append(a)
    chosen = []

    def span(gens):
        table = {}
        ranges = [range(d) for _, d in gens]
        for exps in itertools.product(*ranges):
            acc = ring.one()
            for (g, _), e in zip(gens, exps):
                acc = acc * (g ** e)
            table.setdefault(acc.lex_key(), exps)
        return table

    def extend_inner(idx, gens):
        if idx == len(factors):
            table = span(gens)
            if len(table) == len(elements):
                return gens, table
            return None
        d = factors[idx]
        for cand in by_order.get(d, []):
            trial = gens + [(cand, d)]
            table = span(trial)
            if len(table) == _prod(x for _, x in trial):
                deeper = extend_inner(idx + 1, trial)
                if deeper is not None:
                    return deeper
        return None

    found = extend_inner(0, [])
    if found is None:
        raise ArithmeticError("no generator basis found for factors %r" % (factors,))
    gens, table = found
    return gens, table


def _prod(it):
    out = 1
    for x in it:
        out *= x
    return out


# --- characters -------------------------------------------------------------------


@dataclass(eq=False)
class Character:
    """A character of the unit group, valued additively in Z/exponent."""

    group: UnitGroup
    generator_values: tuple   # value on each generator, in Z/exponent

    def value(self, a: OModElement) -> int:
        exps = self.group.dlog[a.lex_key()]
        E = self.group.exponent
        return sum(e * v for e, v in zip(exps, self.generator_values)) % E

    def is_multiplicative(self):
        els = self.group.elements
        E = self.group.exponent
        for a in els:
            for b in els:
                if (self.value(a) + self.value(b)) % E != self.value(a * b):
                    return False
        return True

    def key(self):
        return tuple(self.generator_values)


def all_characters(group: UnitGroup):
    """All |G| characters: on a generator of order d the value runs over the
    multiples of exponent/d."""
    E = group.exponent
    ranges = []
    for _, d in group.generators:
        step = E // d
        ranges.append([step * i for i in range(d)])
    return [Character(group, tuple(vals)) for vals in itertools.product(*ranges)]


# --- matrices over o/t^m -----------------------------------------------------------


def matrix_determinant(g, ring: OModRing) -> OModElement:
    """Leibniz determinant over the truncated ring (no division)."""
    n = len(g)
    total = ring.zero()
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        term = ring.one()
        for i in range(n):
            term = term * g[i][perm[i]]
        total = total + (term if sign > 0 else -term)
    return total


def _perm_sign(perm):
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def determinant(g, ring: OModRing) -> OModElement:
    """Determinant of a matrix over o/t^m; NotInvertible when it is not a
    unit (g outside GL_n)."""
    d = matrix_determinant(g, ring)
    if not d.is_unit():
        raise NotInvertible("determinant %r is not a unit" % (d,))
    return d


def matrix_mul(a, b, ring):
    n = len(a)
    return tuple(tuple(_dot(a, b, i, j, ring, n) for j in range(n)) for i in range(n))


def _dot(a, b, i, j, ring, n):
    acc = ring.zero()
    for k in range(n):
        acc = acc + a[i][k] * b[k][j]
    return acc


def gl_generators(ring: OModRing, n: int, unit_gens):
    """Elementary matrices plus diagonal unit insertions: generators of
    GL_n(o/t^m)."""
    out = []
    one, zero = ring.one(), ring.zero()

    def build(fill):
        return tuple(tuple(fill(i, j) for j in range(n)) for i in range(n))

    for i in range(n):
        for j in range(n):
            if i != j:
                out.append(build(lambda r, c, i=i, j=j:
                                 one if r == c or (r == i and c == j) else zero))
    for g in unit_gens:
        out.append(build(lambda r, c, g=g: (g if r == 0 else one) if r == c else zero))
    if not out:
        out.append(build(lambda r, c: one if r == c else zero))
    return out


def random_gl_element(ring, n, rng, max_tries=64):
    for _ in range(max_tries):
        g = tuple(tuple(ring.from_int_digits(rng.randrange(ring.size))
                        for _ in range(n)) for _ in range(n))
        if matrix_determinant(g, ring).is_unit():
            return g
    raise NotInvertible("no invertible sample found")


# --- the endomorphism order --------------------------------------------------------


@dataclass(eq=False)
class DivisionOrder:
    """Elements sum_{i<n} a_i Pi^i over o'/t^m with Pi^n = t and
    Pi a = Frob(a) Pi, Frob the q-power coefficient map."""

    n: int
    big: OModRing             # o'/t^m, residue F_{q^n}
    base_residue: FieldSpec   # F_q

    @property
    def frob_step(self):
        return self.base_residue.f

    def element(self, coeffs):
        coeffs = list(coeffs) + [self.big.zero()] * (self.n - len(coeffs))
        return tuple(coeffs[: self.n])

    def one(self):
        return self.element([self.big.one()])

    def pi(self):
        return self.element([self.big.zero(), self.big.one()])

    def scalar(self, a: OModElement):
        return self.element([a])

    def mul(self, b, c):
        out = [self.big.zero()] * self.n
        for i, bi in enumerate(b):
            if bi.is_zero():
                continue
            for j, cj in enumerate(c):
                if cj.is_zero():
                    continue
                k = i + j
                coeff = bi * cj.frobenius(self.frob_step * i)
                wrap = k // self.n
                if wrap:
                    coeff = coeff * self.big.t() ** wrap
                out[k % self.n] = out[k % self.n] + coeff
        return tuple(out)

    def add(self, b, c):
        return tuple(x + y for x, y in zip(b, c))

    def is_unit(self, b):
        return b[0].is_unit()

    def key(self, b):
        return tuple(x.lex_key() for x in b)

    def unit_scalars(self):
        """The units of o' inside the order."""
        return [self.scalar(a) for a in self.big.units()]

    def random_unit(self, rng):
        while True:
            b = self.element([self.big.from_int_digits(rng.randrange(self.big.size))
                              for _ in range(self.n)])
            if self.is_unit(b):
                return b


def reduced_norm(order: DivisionOrder, b) -> OModElement:
    """Determinant of right multiplication by b on the basis {Pi^j}, computed
    over o'/t^(m+1) so the t-carrying entries keep full accuracy, then checked
    Frobenius-invariant and returned in o/t^m."""
    if not order.is_unit(b):
        raise NotAUnit("reduced norm restricted to units of the order")
    n = order.n
    big_hi = OModRing(order.big.residue, order.big.m + 1)
    lift = [a.lift_to(big_hi) for a in b]
    t_hi = big_hi.t()
    cols = []
    for j in range(n):
        # Pi^j * b = sum_i Frob^j(a_i) Pi^(i+j)
        col = [big_hi.zero()] * n
        for i, a in enumerate(lift):
            k = i + j
            entry = a.frobenius(order.frob_step * j)
            if k >= n:
                entry = entry * t_hi ** (k // n)
            col[k % n] = col[k % n] + entry
        cols.append(col)
    matrix = tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))
    det = matrix_determinant(matrix, big_hi)
    det_lo = det.reduce_to(order.big.m)
    if det_lo.frobenius(order.frob_step).lex_key() != det_lo.lex_key():
        raise FrobeniusInvarianceViolation("Nrd(%r) = %r is not Frobenius-fixed"
                                           % (b, det_lo))
    base_ring = OModRing(order.base_residue, order.big.m)
    return base_ring.element([project_fq(c, order.base_residue)
                              for c in det_lo.coeffs])


def norm_one_units(order: DivisionOrder, group: UnitGroup, sample=None):
    """Scalar units of reduced norm 1 (exhaustive over o'^x)."""
    one_key = group.ring.one().lex_key()
    out = []
    for b in order.unit_scalars():
        if reduced_norm(order, b).lex_key() == one_key:
            out.append(b)
    return out


# --- the action --------------------------------------------------------------------


@dataclass(eq=False)
class Pi0Action:
    """The verified action data: (g, b, tau) acts on the unit group by
    multiplication by det(g) * Nrd(b)^(-1) * chi(tau)^(-1)."""

    group: UnitGroup
    order: DivisionOrder
    gl_gens: list
    report: dict = dc_field(default_factory=dict)

    def act(self, c: OModElement, g=None, b=None, tau_chi=None) -> OModElement:
        out = c
        if g is not None:
            out = determinant(g, self.group.ring) * out
        if b is not None:
            out = reduced_norm(self.order, b).inv() * out
        if tau_chi is not None:
            out = tau_chi.inv() * out
        return out

    def component_table(self, g=None, b=None, tau_chi=None):
        """Full table component -> image component for one group element."""
        rows = []
        for c in self.group.elements:
            rows.append((c.lex_key(), self.act(c, g, b, tau_chi).lex_key()))
        return rows

    def to_json(self):
        """Action of the generator set on components, in deterministic
        (lexicographic) element order."""
        doc = {"group": self.group.to_json(), "generator_actions": []}
        for idx, g in enumerate(self.gl_gens):
            doc["generator_actions"].append({
                "kind": "gl", "index": idx,
                "matrix": [[list(map(int, entry.lex_key())) for entry in row]
                           for row in g],
                "table": [[list(map(int, src)), list(map(int, dst))]
                          for src, dst in self.component_table(g=g)],
            })
        for a in self.order.big.units():
            b = self.order.scalar(a)
            doc["generator_actions"].append({
                "kind": "order-scalar",
                "scalar": list(map(int, a.lex_key())),
                "table": [[list(map(int, src)), list(map(int, dst))]
                          for src, dst in self.component_table(b=b)],
            })
        return doc

    def to_csv_rows(self):
        out = [("kind", "element", "component", "image")]
        for idx, g in enumerate(self.gl_gens):
            for src, dst in self.component_table(g=g):
                out.append(("gl", "generator-%d" % idx, str(src), str(dst)))
        return out


def pi0_action_table(p, f, n, m, rng=None, pair_samples=200) -> Pi0Action:
    """Build the three structure maps, verify each is a homomorphism
    (exhaustive on generators, sampled on pair_samples random pairs), verify
    the trivial kernels, and return the assembled action."""
    import random as _random

    rng = rng or _random.Random(0)
    group = unit_group((p, f), m)
    ring = group.ring
    big = OModRing(GF(p, f * n), m)
    order = DivisionOrder(n, big, ring.residue)
    gl = gl_generators(ring, n, [g for g, _ in group.generators])
    report = {"det_pairs": 0, "nrd_pairs": 0, "action_triples": 0}
    # det is multiplicative: all generator pairs + random samples
    for a in gl:
        for b in gl:
            lhs = determinant(matrix_mul(a, b, ring), ring)
            rhs = determinant(a, ring) * determinant(b, ring)
            if lhs.lex_key() != rhs.lex_key():
                raise NotInvertible("det not multiplicative on generators")
            report["det_pairs"] += 1
    for _ in range(pair_samples):
        a = random_gl_element(ring, n, rng)
        b = random_gl_element(ring, n, rng)
        lhs = determinant(matrix_mul(a, b, ring), ring)
        rhs = determinant(a, ring) * determinant(b, ring)
        if lhs.lex_key() != rhs.lex_key():
            raise NotInvertible("det not multiplicative on a sampled pair")
        report["det_pairs"] += 1
    # Nrd is multiplicative on sampled unit pairs; restricted to o'^x it is
    # the coefficient-Frobenius norm, exhaustively
    for _ in range(pair_samples):
        b = order.random_unit(rng)
        c = order.random_unit(rng)
        lhs = reduced_norm(order, order.mul(b, c))
        rhs = reduced_norm(order, b) * reduced_norm(order, c)
        if lhs.lex_key() != rhs.lex_key():
            raise FrobeniusInvarianceViolation("Nrd not multiplicative on a sample")
        report["nrd_pairs"] += 1
    image = set()
    for a in big.units():
        got = reduced_norm(order, order.scalar(a))
        want = a.norm_to(ring.residue)
        if got.lex_key() != want.lex_key():
            raise FrobeniusInvarianceViolation(
                "Nrd(%r) = %r but the coefficient norm is %r" % (a, got, want))
        image.add(got.lex_key())
    if image != {u.lex_key() for u in group.elements}:
        raise FrobeniusInvarianceViolation("Nrd on o'^x does not cover the unit group")
    report["nrd_surjective"] = True
    # SL_n (elementaries) and norm-one scalars act trivially
    c0 = group.elements[0]
    for g in gl[: n * (n - 1)]:
        if determinant(g, ring).lex_key() != ring.one().lex_key():
            raise NotInvertible("elementary generator has det != 1")
    ones = norm_one_units(order, group)
    expected_norm_one = ((p ** (f * n) - 1) // (p ** f - 1)) * \
        (p ** (f * (n - 1))) ** (m - 1)
    if len(ones) != expected_norm_one:
        raise FrobeniusInvarianceViolation(
            "norm-one scalar count %d, expected %d" % (len(ones), expected_norm_one))
    report["norm_one_scalars"] = len(ones)
    # action axioms on sampled triples: composing group elements composes maps
    action = Pi0Action(group, order, gl, report)
    for _ in range(min(pair_samples, 50)):
        g1 = random_gl_element(ring, n, rng)
        g2 = random_gl_element(ring, n, rng)
        b1 = order.random_unit(rng)
        b2 = order.random_unit(rng)
        t1 = group.elements[rng.randrange(group.order)]
        t2 = group.elements[rng.randrange(group.order)]
        c = group.elements[rng.randrange(group.order)]
        once = action.act(action.act(c, g2, b2, t2), g1, b1, t1)
        combined = action.act(c, matrix_mul(g1, g2, ring), order.mul(b1, b2), t1 * t2)
        if once.lex_key() != combined.lex_key():
            raise NotInvertible("action does not compose on a sampled triple")
        report["action_triples"] += 1
    return action


def h0_decomposition(p, f, m, group: UnitGroup | None = None):
    """All (q-1)q^(m-1) characters of the unit group, each with its three
    pullback descriptors evaluated on generator data: through det, through the
    inverse reduced norm, and through the reciprocity normalization
    rec(tau) = chi(tau)^(-1)."""
    group = group or unit_group((p, f), m)
    chars = all_characters(group)
    if len(chars) != group.order:
        raise CapExceeded("character count %d != group order %d"
                          % (len(chars), group.order))
    E = group.exponent
    rows = []
    for om in chars:
        gen_vals = om.generator_values
        rows.append({
            "omega_on_generators": list(gen_vals),
            "value_group": "Z/%d" % E,
            # det(diag(g,1,..)) = g: the det-pullback takes the same values
            "via_det_on_diag_generators": list(gen_vals),
            # Nrd^(-1)-pullback on a scalar unit a: -omega(N(a))
            "via_nrd_inv_on_scalar_generators": [(-v) % E for v in gen_vals],
            # rec(tau) = chi(tau)^(-1): -omega on the character value
            "via_rec_on_galois_generators": [(-v) % E for v in gen_vals],
        })
    keys = {tuple(r["omega_on_generators"]) for r in rows}
    if len(keys) != len(rows):
        raise CapExceeded("characters are not separated on the generators")
    return group, chars, rows


def characters_to_csv(rows) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["omega_on_generators", "value_group", "via_det",
                     "via_nrd_inv", "via_rec"])
    for r in rows:
        writer.writerow([
            ";".join(map(str, r["omega_on_generators"])),
            r["value_group"],
            ";".join(map(str, r["via_det_on_diag_generators"])),
            ";".join(map(str, r["via_nrd_inv_on_scalar_generators"])),
            ";".join(map(str, r["via_rec_on_galois_generators"])),
        ])
    return buf.getvalue()
