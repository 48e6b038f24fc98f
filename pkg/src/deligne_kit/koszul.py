"""Koszul complexes K(x^(n); M), their homology, the transition maps
between tower stages, and bounded pro-zero certificate search.

Exterior basis: sorted subsets S of {0..k-1}; the degree-i differential
sends e_S (x) m to sum over j in S of (-1)^pos(j,S) * x_j^n * e_{S\\j} (x) m.
With this convention the stage-m -> stage-n chain map is diagonal, the
subset S component being multiplication by prod_{j in S} x_j^(m-n).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import StructuralError
from .groebner import (
    FreeSubmodule,
    Vector,
    kernel_mod,
    vec_dot,
    vec_is_zero,
    vec_key,
    vec_sub,
    zero_vector,
)
from .modules import FpModule, ModuleElement, ModuleHom, module_kernel
from .rings import Poly


class SequenceSpec:
    """A sequence x_1, ..., x_k of nonzero ring elements."""

    def __init__(self, elements):
        elements = tuple(elements)
        if not elements:
            raise StructuralError("empty sequence")
        ring = elements[0].ring
        for x in elements:
            if not isinstance(x, Poly) or x.ring != ring:
                raise StructuralError("sequence entries must share the ring")
            if x.is_zero():
                raise StructuralError("sequence entries must be nonzero")
        self.elements = elements
        self.ring = ring
        self.k = len(elements)

    def powers(self, n: int):
        return tuple(x**n for x in self.elements)

    def key(self):
        return tuple(x.key() for x in self.elements)

    def __repr__(self):
        return "(" + ", ".join(str(x) for x in self.elements) + ")"


_stage_cache: dict = {}
_homology_cache: dict = {}


def koszul_subsets(k: int, i: int):
    return list(combinations(range(k), i))


def koszul_differential_columns(x: SequenceSpec, n: int, mrank: int, i: int):
    """Columns of d_i : K_i -> K_{i-1} over the ambient free modules; pure
    polynomial data, independent of any module presentation."""
    ring = x.ring
    pw = x.powers(n)
    subs_i = koszul_subsets(x.k, i)
    subs_im1 = koszul_subsets(x.k, i - 1)
    index_im1 = {S: t for t, S in enumerate(subs_im1)}
    target_rank = mrank * len(subs_im1)
    cols = []
    for S in subs_i:
        for b in range(mrank):
            img = [ring.zero()] * target_rank
            for pos, j in enumerate(S):
                T = tuple(v for v in S if v != j)
                t_idx = index_im1[T]
                coeff = pw[j] if pos % 2 == 0 else -pw[j]
                slot = t_idx * mrank + b
                img[slot] = img[slot] + coeff
            cols.append(tuple(img))
    return cols


def blockdiag_relations(relation_gens, mrank: int, blocks: int, ring):
    """Relations of M^blocks: one copy of each generator per block."""
    rels = []
    for b in range(blocks):
        for nu in relation_gens:
            vec = [ring.zero()] * (mrank * blocks)
            vec[b * mrank : (b + 1) * mrank] = list(nu)
            rels.append(tuple(vec))
    return rels


class KoszulStage:
    """The complex K(x^(n); M): chain module i is M^(k choose i), blocks
    indexed by sorted i-subsets of the sequence positions."""

    def __init__(self, x: SequenceSpec, n: int, M: FpModule):
        if n < 1:
            raise StructuralError("stage exponent must be >= 1")
        if M.ring != x.ring:
            raise StructuralError("module and sequence rings differ")
        self.x = x
        self.n = n
        self.M = M
        ring = x.ring
        k = x.k
        self.subsets = [koszul_subsets(k, i) for i in range(k + 1)]
        self.subset_index = [
            {S: t for t, S in enumerate(level)} for level in self.subsets
        ]

        self.chain = []
        for i in range(k + 1):
            blocks = len(self.subsets[i])
            rels = blockdiag_relations(M.relations.gens, M.rank, blocks, ring)
            self.chain.append(FpModule(ring, M.rank * blocks, rels))

        # differentials d_i : chain[i] -> chain[i-1], i = 1..k
        self.diff = [None]
        for i in range(1, k + 1):
            cols = koszul_differential_columns(x, n, M.rank, i)
            self.diff.append(ModuleHom(self.chain[i], self.chain[i - 1], cols))

        for i in range(2, k + 1):
            for col in self.diff[i].columns:
                if not vec_is_zero(self.diff[i - 1].apply_raw(col)):
                    raise StructuralError("d o d != 0 (bug)")

    def boundary_columns(self, i: int):
        """Ambient generators of im(d_{i+1}) inside chain[i]."""
        if i >= self.x.k:
            return []
        return list(self.diff[i + 1].columns)


def _stage(x: SequenceSpec, n: int, M: FpModule) -> KoszulStage:
    key = (x.key(), n, M.key())
    if key not in _stage_cache:
        _stage_cache[key] = KoszulStage(x, n, M)
    return _stage_cache[key]


class HomologyModule:
    """H_i of a Koszul stage: a presentation whose generators carry cycle
    representatives in the stage's ambient coordinates."""

    def __init__(self, stage: KoszulStage, i: int, presentation: FpModule,
                 representatives):
        self.stage = stage
        self.i = i
        self.presentation = presentation
        self.representatives = tuple(tuple(r) for r in representatives)
        ring = stage.x.ring
        spanned = (
            list(self.representatives)
            + stage.boundary_columns(i)
            + list(stage.chain[i].relations.gens)
        )
        self._express_span = FreeSubmodule(ring, stage.chain[i].rank, spanned)
        self._boundary_span = FreeSubmodule(
            ring,
            stage.chain[i].rank,
            stage.boundary_columns(i) + list(stage.chain[i].relations.gens),
        )

    def is_cycle(self, vec) -> bool:
        if self.i == 0:
            return True
        img = self.stage.diff[self.i].apply_raw(tuple(vec))
        return vec_is_zero(self.stage.chain[self.i - 1].reduce(img))

    def express(self, vec) -> ModuleElement:
        """Coordinates of a cycle in the homology presentation."""
        rem, lift = self._express_span.normal_form_lift(tuple(vec))
        if not vec_is_zero(rem):
            raise StructuralError("vector is not a cycle of this stage")
        coords = lift[: len(self.representatives)]
        return self.presentation.element(coords)

    def boundary_lift(self, vec):
        """For a homologically trivial cycle, return (chain, relation_lift)
        with d(chain) = vec modulo the stage relations, exactly:
        d(chain) - vec = sum(relation_lift * relation_gens).  None if the
        class is nonzero."""
        rem, lift = self._boundary_span.normal_form_lift(tuple(vec))
        if not vec_is_zero(rem):
            return None
        nb = len(self.stage.boundary_columns(self.i))
        chain = tuple(lift[:nb])
        rel_lift = tuple(-c for c in lift[nb:])
        return chain, rel_lift

    def class_is_zero(self, vec) -> bool:
        return self._boundary_span.contains(tuple(vec))


def koszul_homology(x: SequenceSpec, n: int, M: FpModule, i: int) -> HomologyModule:
    """H_i(x^(n); M) with cycle representatives; H_0 = M/x^(n)M and
    H_k = 0 :_M (x^(n))."""
    if i < 0 or i > x.k:
        raise StructuralError(f"homological degree {i} out of range 0..{x.k}")
    key = (x.key(), n, M.key(), i)
    if key in _homology_cache:
        return _homology_cache[key]
    stage = _stage(x, n, M)
    ring = x.ring
    if i == 0:
        ker_gens = []
        for t in range(stage.chain[0].rank):
            v = [ring.zero()] * stage.chain[0].rank
            v[t] = ring.one()
            ker_gens.append(tuple(v))
    else:
        ker_gens = list(module_kernel(stage.diff[i]).generators)
    relations = kernel_mod(
        ker_gens,
        stage.boundary_columns(i) + list(stage.chain[i].relations.gens),
        ring,
        stage.chain[i].rank,
    )
    pres = FpModule(ring, len(ker_gens), relations)
    hom = HomologyModule(stage, i, pres, ker_gens)
    _homology_cache[key] = hom
    return hom


# ---------------------------------------------------------------------------
# transitions between stages


def transition_multipliers(x: SequenceSpec, i: int, m: int, n: int):
    """For each i-subset S, the factor prod_{j in S} x_j^(m-n)."""
    ring = x.ring
    out = []
    for S in combinations(range(x.k), i):
        f = ring.one()
        for j in S:
            f = f * x.elements[j] ** (m - n)
        out.append(f)
    return out


def transport_cycle(x: SequenceSpec, i: int, m: int, n: int, M: FpModule, vec):
    """Apply the stage-m -> stage-n chain map in degree i."""
    mults = transition_multipliers(x, i, m, n)
    out = []
    for t, f in enumerate(mults):
        for b in range(M.rank):
            out.append(f * vec[t * M.rank + b])
    return tuple(out)


@dataclass
class HomologyTransition:
    """The induced map H_i(x^(m); M) -> H_i(x^(n); M) on presentations."""

    x: SequenceSpec
    i: int
    stage_m: int
    stage_n: int
    source: HomologyModule
    target: HomologyModule
    hom: ModuleHom

    def is_zero(self) -> bool:
        return self.hom.is_zero()


def homology_transition(
    x: SequenceSpec, i: int, m: int, n: int, M: FpModule
) -> HomologyTransition:
    if m < n:
        raise StructuralError("transition requires m >= n")
    Hm = koszul_homology(x, n=m, M=M, i=i)
    Hn = koszul_homology(x, n=n, M=M, i=i)
    cols = []
    for z in Hm.representatives:
        w = transport_cycle(x, i, m, n, M, z)
        cols.append(Hn.express(w).vec)
    hom = ModuleHom(Hm.presentation, Hn.presentation, cols)
    return HomologyTransition(x, i, m, n, Hm, Hn, hom)


# ---------------------------------------------------------------------------
# pro-zero certificates


@dataclass
class CertificateEntry:
    """One homology generator's boundary-preimage witness.

    Exact identities (no Gröbner data needed to replay):
      d_i^(m)(cycle) = sum(cycle_relation_lift * stage_m_relations)
      d_{i+1}^(n)(preimage_chain) - transported
          = sum(relation_lift * stage_n_relations)
    where transported is the stage-m cycle pushed through the chain map.
    """

    cycle: Vector
    transported: Vector
    preimage_chain: Vector
    relation_lift: tuple
    cycle_relation_lift: tuple


@dataclass
class ProZeroCertificate:
    """Witness that H_i(x^(m); M) -> H_i(x^(n); M) is the zero map."""

    x: SequenceSpec
    i: int
    base_n: int
    witness_m: int
    M: FpModule
    entries: list

    def verify(self) -> bool:
        """Replay every boundary identity exactly: pure polynomial
        arithmetic over the declared relation generators, no Gröbner data."""
        x, i, n, m, M = self.x, self.i, self.base_n, self.witness_m, self.M
        ring = x.ring
        k = x.k
        blocks_i = len(koszul_subsets(k, i))
        rank_i = M.rank * blocks_i
        rels_i = blockdiag_relations(M.relations.gens, M.rank, blocks_i, ring)
        if i >= 1:
            blocks_im1 = len(koszul_subsets(k, i - 1))
            rank_im1 = M.rank * blocks_im1
            rels_im1 = blockdiag_relations(
                M.relations.gens, M.rank, blocks_im1, ring
            )
            d_i_m = koszul_differential_columns(x, m, M.rank, i)
        if i < k:
            d_ip1_n = koszul_differential_columns(x, n, M.rank, i + 1)
        for e in self.entries:
            transported = transport_cycle(x, i, m, n, M, e.cycle)
            if vec_key(transported) != vec_key(tuple(e.transported)):
                return False
            if i >= 1:
                dz = vec_dot(e.cycle, d_i_m, ring, rank_im1)
                combo = vec_dot(e.cycle_relation_lift, rels_im1, ring, rank_im1)
                if not vec_is_zero(vec_sub(dz, combo)):
                    return False
            if i < k:
                dw = vec_dot(e.preimage_chain, d_ip1_n, ring, rank_i)
            else:
                dw = zero_vector(ring, rank_i)
            lhs = vec_sub(dw, transported)
            combo = vec_dot(e.relation_lift, rels_i, ring, rank_i)
            if not vec_is_zero(vec_sub(lhs, combo)):
                return False
        return True


@dataclass
class SearchExhausted:
    """Bounded search gave no certificate up to m_max; not a disproof."""

    x: SequenceSpec
    i: int
    base_n: int
    m_max: int


def pro_zero_search(x: SequenceSpec, i: int, n: int, M: FpModule, m_max: int):
    """Smallest m <= m_max with zero transition, as a verified
    ProZeroCertificate; otherwise SearchExhausted."""
    if m_max < n:
        raise StructuralError("m_max must be >= n")
    Hn = koszul_homology(x, n=n, M=M, i=i)
    ring = x.ring
    for m in range(n, m_max + 1):
        tr = homology_transition(x, i, m, n, M)
        if not tr.is_zero():
            continue
        stage_m = _stage(x, m, M)
        entries = []
        for z in tr.source.representatives:
            transported = transport_cycle(x, i, m, n, M, z)
            lifted = Hn.boundary_lift(transported)
            if lifted is None:
                raise StructuralError("zero transition without boundary lift (bug)")
            chain, rel_lift = lifted
            if i >= 1:
                dz = stage_m.diff[i].apply_raw(z)
                rem, cyc_lift = stage_m.chain[i - 1].relations.normal_form_lift(dz)
                if not vec_is_zero(rem):
                    raise StructuralError("representative is not a cycle (bug)")
            else:
                cyc_lift = ()
            entries.append(
                CertificateEntry(
                    cycle=tuple(z),
                    transported=tuple(transported),
                    preimage_chain=chain,
                    relation_lift=tuple(rel_lift),
                    cycle_relation_lift=tuple(cyc_lift),
                )
            )
        cert = ProZeroCertificate(x, i, n, m, M, entries)
        if not cert.verify():
            raise StructuralError("freshly built certificate failed replay (bug)")
        return cert
    return SearchExhausted(x, i, n, m_max)
