"""Gröbner bases for submodules of free modules, with lift coefficients
and Schreyer syzygies.

Module terms (position, monomial) are ordered position-over-term: earlier
positions dominate, ties broken by the ring's monomial order.  Reduced
bases are canonical, so normal forms decide membership and equality.
"""

from __future__ import annotations

from .errors import StructuralError
from .rings import (
    Poly,
    PolyRing,
    monomial_div,
    monomial_divides,
    monomial_lcm,
)

Vector = tuple  # tuple of Poly, one per ambient coordinate


# ---------------------------------------------------------------------------
# vector helpers


def zero_vector(ring: PolyRing, rank: int) -> Vector:
    return tuple(ring.zero() for _ in range(rank))


def vec_is_zero(v: Vector) -> bool:
    return all(p.is_zero() for p in v)


def vec_add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vec_neg(u: Vector) -> Vector:
    return tuple(-a for a in u)


def vec_scale(q: Poly, v: Vector) -> Vector:
    return tuple(q * a for a in v)


def vec_scale_coeff(c, v: Vector) -> Vector:
    return tuple(a.scale(c) for a in v)


def vec_mul_term(coeff, mon, v: Vector) -> Vector:
    return tuple(a.mul_term(coeff, mon) for a in v)


def vec_dot(coeffs, vectors, ring: PolyRing, rank: int) -> Vector:
    """sum(c_i * v_i) for polynomial coefficients c_i."""
    acc = zero_vector(ring, rank)
    for c, v in zip(coeffs, vectors):
        if not c.is_zero():
            acc = vec_add(acc, vec_scale(c, v))
    return acc


def vec_key(v: Vector):
    return tuple(p.key() for p in v)


def vec_lead(v: Vector, ring: PolyRing):
    """Leading module term (pos, mon, coeff) under POT, or None."""
    for pos, p in enumerate(v):
        if not p.is_zero():
            mon, coeff = p.lead_term()
            return pos, mon, coeff
    return None


def _pot_key(ring: PolyRing, pos: int, mon):
    return (-pos, ring.mon_key(mon))


# ---------------------------------------------------------------------------
# reduction


def _reduce_full(v: Vector, basis: list, ring: PolyRing):
    """Full normal form of v against basis elements (list of Vectors).

    Returns (remainder, quotients) with v = remainder + sum(q_t * basis_t)
    exactly; no remainder term is divisible by a basis lead.
    """
    fld = ring.field
    rank = len(v)
    leads = [vec_lead(b, ring) for b in basis]
    quots = [ring.zero() for _ in basis]
    rem = list(zero_vector(ring, rank))
    cur = list(v)

    def current_lead():
        for pos in range(rank):
            if not cur[pos].is_zero():
                mon, coeff = cur[pos].lead_term()
                return pos, mon, coeff
        return None

    while True:
        lt = current_lead()
        if lt is None:
            break
        pos, mon, coeff = lt
        hit = None
        for t, bl in enumerate(leads):
            if bl is not None and bl[0] == pos and monomial_divides(bl[1], mon):
                hit = t
                break
        if hit is None:
            term = ring.term(coeff, mon)
            rem[pos] = rem[pos] + term
            cur[pos] = cur[pos] - term
        else:
            bpos, bmon, bcoeff = leads[hit]
            qmon = monomial_div(mon, bmon)
            qc = fld.div(coeff, bcoeff)
            quots[hit] = quots[hit] + ring.term(qc, qmon)
            b = basis[hit]
            for j in range(rank):
                if not b[j].is_zero():
                    cur[j] = cur[j] - b[j].mul_term(qc, qmon)
    return tuple(rem), quots


# ---------------------------------------------------------------------------
# free submodules


class FreeSubmodule:
    """A submodule of R^rank given by generator vectors; the reduced
    Gröbner basis, transformation matrices, and Schreyer syzygies are
    computed on demand and cached (write-once)."""

    def __init__(self, ring: PolyRing, rank: int, generators):
        if rank < 0:
            raise StructuralError("negative ambient rank")
        gens = []
        for g in generators:
            g = tuple(g)
            if len(g) != rank:
                raise StructuralError(
                    f"generator length {len(g)} != ambient rank {rank}"
                )
            for p in g:
                if not isinstance(p, Poly) or p.ring != ring:
                    raise StructuralError("generator entries must share the ring")
            gens.append(g)
        self.ring = ring
        self.rank = rank
        self.gens = tuple(gens)
        self._basis = None      # reduced GB vectors
        self._basis_rep = None  # each basis vector as combination of gens
        self._gens_lift = None  # each generator as combination of basis
        self._syzygies = None

    # -- Buchberger ------------------------------------------------------
    def groebner(self) -> "FreeSubmodule":
        if self._basis is None:
            self._compute_basis()
        return self

    def basis(self):
        self.groebner()
        return self._basis

    def _compute_basis(self):
        ring = self.ring
        fld = ring.field
        ngens = len(self.gens)

        def unit_rep(i):
            return tuple(
                ring.one() if j == i else ring.zero() for j in range(ngens)
            )

        work = []  # list of [vector, rep]
        for i, g in enumerate(self.gens):
            if not vec_is_zero(g):
                work.append([g, unit_rep(i)])

        pairs = []

        def add_pairs(new_idx):
            lt_new = vec_lead(work[new_idx][0], ring)
            for t in range(new_idx):
                lt = vec_lead(work[t][0], ring)
                if lt is not None and lt[0] == lt_new[0]:
                    pairs.append((t, new_idx))

        for idx in range(len(work)):
            add_pairs(idx)

        def pair_key(pr):
            i, j = pr
            li = vec_lead(work[i][0], ring)
            lj = vec_lead(work[j][0], ring)
            lcm = monomial_lcm(li[1], lj[1])
            return (_pot_key(ring, li[0], lcm), i, j)

        while pairs:
            pairs.sort(key=pair_key)
            i, j = pairs.pop(0)
            vi, ri = work[i]
            vj, rj = work[j]
            li = vec_lead(vi, ring)
            lj = vec_lead(vj, ring)
            lcm = monomial_lcm(li[1], lj[1])
            mi, ci = monomial_div(lcm, li[1]), fld.inv(li[2])
            mj, cj = monomial_div(lcm, lj[1]), fld.inv(lj[2])
            s_vec = vec_sub(vec_mul_term(ci, mi, vi), vec_mul_term(cj, mj, vj))
            s_rep = vec_sub(vec_mul_term(ci, mi, ri), vec_mul_term(cj, mj, rj))
            rem, quots = _reduce_full(s_vec, [w[0] for w in work], ring)
            if not vec_is_zero(rem):
                rep = s_rep
                for t, q in enumerate(quots):
                    if not q.is_zero():
                        rep = vec_sub(rep, vec_scale(q, work[t][1]))
                work.append([rem, rep])
                add_pairs(len(work) - 1)

        # minimalize: drop elements whose lead is divisible by another lead
        order = sorted(
            range(len(work)),
            key=lambda t: _pot_key(ring, *vec_lead(work[t][0], ring)[:2]),
        )
        kept = []
        for t in order:
            lt = vec_lead(work[t][0], ring)
            redundant = False
            for u in kept:
                lu = vec_lead(work[u][0], ring)
                if lu[0] == lt[0] and monomial_divides(lu[1], lt[1]):
                    redundant = True
                    break
            if not redundant:
                kept.append(t)
        work = [work[t] for t in kept]

        # tail-reduce until stable, keeping combinations in sync
        changed = True
        while changed:
            changed = False
            for t in range(len(work)):
                others = [work[u][0] for u in range(len(work)) if u != t]
                rem, quots = _reduce_full(work[t][0], others, ring)
                if vec_key(rem) != vec_key(work[t][0]):
                    rep = work[t][1]
                    u_list = [u for u in range(len(work)) if u != t]
                    for pos_q, q in enumerate(quots):
                        if not q.is_zero():
                            rep = vec_sub(rep, vec_scale(q, work[u_list[pos_q]][1]))
                    work[t] = [rem, rep]
                    changed = True

        # monic, canonical order (descending leads)
        final = []
        for vec, rep in work:
            lt = vec_lead(vec, ring)
            c = fld.inv(lt[2])
            final.append((vec_scale_coeff(c, vec), vec_scale_coeff(c, rep)))
        final.sort(
            key=lambda br: _pot_key(ring, *vec_lead(br[0], ring)[:2]), reverse=True
        )

        basis = [b for b, _ in final]
        reps = [r for _, r in final]

        # express each original generator in the basis
        lifts = []
        for g in self.gens:
            rem, quots = _reduce_full(g, basis, ring)
            if not vec_is_zero(rem):
                raise StructuralError("generator does not reduce to zero (bug)")
            lifts.append(tuple(quots))

        self._basis = tuple(basis)
        self._basis_rep = tuple(reps)
        self._gens_lift = tuple(lifts)

    # -- normal forms ----------------------------------------------------
    def normal_form(self, v) -> Vector:
        self.groebner()
        rem, _ = _reduce_full(tuple(v), list(self._basis), self.ring)
        return rem

    def normal_form_lift(self, v):
        """(remainder, lift) with v = remainder + sum(lift_i * gens_i)."""
        self.groebner()
        rem, quots = _reduce_full(tuple(v), list(self._basis), self.ring)
        ngens = len(self.gens)
        lift = [self.ring.zero() for _ in range(ngens)]
        for t, q in enumerate(quots):
            if not q.is_zero():
                rep = self._basis_rep[t]
                for i in range(ngens):
                    if not rep[i].is_zero():
                        lift[i] = lift[i] + q * rep[i]
        return rem, tuple(lift)

    def contains(self, v) -> bool:
        return vec_is_zero(self.normal_form(v))

    def is_zero_span(self) -> bool:
        return len(self.basis()) == 0

    def span_equals(self, other: "FreeSubmodule") -> bool:
        if other.ring != self.ring or other.rank != self.rank:
            return False
        mine = sorted(vec_key(b) for b in self.basis())
        theirs = sorted(vec_key(b) for b in other.basis())
        return mine == theirs

    def key(self):
        return (self.rank, tuple(sorted(vec_key(b) for b in self.basis())))

    # -- syzygies ----------------------------------------------------------
    def syzygies(self) -> "FreeSubmodule":
        """Generators of {c in R^n : sum(c_i * gens_i) = 0} (Schreyer)."""
        if self._syzygies is not None:
            return self._syzygies
        self.groebner()
        ring = self.ring
        fld = ring.field
        basis = list(self._basis)
        s = len(basis)
        r = len(self.gens)

        # Schreyer generators: syzygies among the basis elements
        basis_syz = []
        for i in range(s):
            for j in range(i + 1, s):
                li = vec_lead(basis[i], ring)
                lj = vec_lead(basis[j], ring)
                if li[0] != lj[0]:
                    continue
                lcm = monomial_lcm(li[1], lj[1])
                mi, ci = monomial_div(lcm, li[1]), fld.inv(li[2])
                mj, cj = monomial_div(lcm, lj[1]), fld.inv(lj[2])
                s_vec = vec_sub(
                    vec_mul_term(ci, mi, basis[i]), vec_mul_term(cj, mj, basis[j])
                )
                rem, quots = _reduce_full(s_vec, basis, ring)
                if not vec_is_zero(rem):
                    raise StructuralError("S-pair of a Gröbner basis not zero (bug)")
                syz = [ring.zero() for _ in range(s)]
                syz[i] = syz[i] + ring.term(ci, mi)
                syz[j] = syz[j] - ring.term(cj, mj)
                for t, q in enumerate(quots):
                    syz[t] = syz[t] - q
                if not vec_is_zero(tuple(syz)):
                    basis_syz.append(tuple(syz))

        # translate to the original generators:
        #   rows of (I - lift . rep)  and  (basis syzygy) . rep
        out = []
        seen = set()

        def push(vec):
            if vec_is_zero(vec):
                return
            k = vec_key(vec)
            if k not in seen:
                seen.add(k)
                out.append(vec)

        reps = self._basis_rep
        for jg in range(r):
            row = [
                ring.one() if i == jg else ring.zero() for i in range(r)
            ]
            for t, q in enumerate(self._gens_lift[jg]):
                if not q.is_zero():
                    rep = reps[t]
                    for i in range(r):
                        if not rep[i].is_zero():
                            row[i] = row[i] - q * rep[i]
            push(tuple(row))

        for z in basis_syz:
            row = [ring.zero() for _ in range(r)]
            for t, zt in enumerate(z):
                if not zt.is_zero():
                    rep = reps[t]
                    for i in range(r):
                        if not rep[i].is_zero():
                            row[i] = row[i] + zt * rep[i]
            push(tuple(row))

        self._syzygies = FreeSubmodule(ring, r, out)
        return self._syzygies


# ---------------------------------------------------------------------------
# module-level operation surface


def buchberger(sub: FreeSubmodule) -> FreeSubmodule:
    """Compute and cache the reduced Gröbner basis of sub."""
    return sub.groebner()


def normal_form_lift(v, sub: FreeSubmodule):
    return sub.normal_form_lift(v)


def syzygies(sub: FreeSubmodule) -> FreeSubmodule:
    return sub.syzygies()


def kernel_mod(vectors, relations, ring: PolyRing, rank: int):
    """Generators of {c : sum(c_i * vectors_i) lies in span(relations)}.

    vectors live in R^rank; the result vectors live in R^len(vectors).
    """
    vectors = [tuple(v) for v in vectors]
    relations = [tuple(n) for n in relations]
    combined = FreeSubmodule(ring, rank, vectors + relations)
    syz = combined.syzygies()
    t = len(vectors)
    out = []
    seen = set()
    for z in syz.gens:
        head = tuple(z[:t])
        if vec_is_zero(head):
            continue
        k = vec_key(head)
        if k not in seen:
            seen.add(k)
            out.append(head)
    return out


def ideal_submodule(ring: PolyRing, polys) -> FreeSubmodule:
    """An ideal as a rank-1 submodule."""
    return FreeSubmodule(ring, 1, [(p,) for p in polys])
