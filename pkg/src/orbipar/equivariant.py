"""Semilinear actions as matrix cocycles and product G-modules.

Conventions (fixed throughout):

* A semilinear map on R^r is a pair (M, w): x -> M * psi(w)(x), with M an
  r x r matrix over R = k[[s]]/(s^N) and w an element of the inertia group
  I acting by substitution.  Composition: (M1,w1) o (M2,w2) =
  (M1 * psi(w1)(M2), w1 w2).
* A cocycle assigns to every g in I an invertible matrix A_g with A_e = I
  and A_{hg} = A_h * psi(h)(A_g); then g -> (A_g, g) is a group action.
* A product G-module stores, for every g in G and every source component i,
  the block (target j, matrix, w in I) of the permutation-semilinear map
  Phi(g).  Every ring isomorphism between component rings is psi(w) for a
  known w once the components are identified with k[[s]], so composition and
  equality checks stay exact.
"""

from dataclasses import dataclass

from .errors import AssemblyError, DomainError, RankDeficiencyError, StructuralError
from .linalg import Matrix, smith, solve_linear, residue_det
from .series import Series


# ---------------------------------------------------------------------------
# cocycles


@dataclass(frozen=True)
class Cocycle:
    ext: object
    rank: int
    mats: tuple     # group element -> Matrix over the extension ring

    def __post_init__(self):
        if len(self.mats) != self.ext.group.order:
            raise StructuralError("cocycle needs one matrix per group element")
        for m in self.mats:
            if m.rows != self.rank or m.cols != self.rank:
                raise StructuralError("cocycle matrix of wrong shape")

    def mat(self, g):
        return self.mats[g]

    def apply(self, g, vec):
        """Phi(g) on a coordinate vector (tuple of Series)."""
        act = self.ext.act(g)
        moved = [v.compose(act) for v in vec]
        out = []
        for i in range(self.rank):
            acc = None
            for j in range(self.rank):
                term = self.mats[g].entries[i][j] * moved[j]
                acc = term if acc is None else acc + term
            out.append(acc)
        return tuple(out)

    @classmethod
    def trivial(cls, ext, rank):
        ident = Matrix.identity(ext.field, rank, ext.prec)
        return cls(ext, rank, tuple(ident for _ in range(ext.group.order)))


@dataclass
class CocycleReport:
    ok: bool
    message: str
    failing_pair: tuple = None
    entry: tuple = None
    coefficient_index: int = None


def verify_cocycle(c: Cocycle) -> CocycleReport:
    """A_e = identity and A_{hg} = A_h * psi(h)(A_g) for all ordered pairs."""
    ext = c.ext
    ident = Matrix.identity(ext.field, c.rank, ext.prec)
    mism = c.mats[0].first_mismatch(ident)
    if mism is not None:
        return CocycleReport(False, "A_e is not the identity",
                             failing_pair=(0,), entry=mism[:2], coefficient_index=mism[2])
    order = ext.group.order
    for h in range(order):
        act_h = ext.act(h)
        for g in range(order):
            lhs = c.mats[ext.group.mul(h, g)]
            rhs = c.mats[h] * c.mats[g].substitute(act_h)
            mism = lhs.first_mismatch(rhs)
            if mism is not None:
                return CocycleReport(
                    False,
                    f"cocycle law fails at pair ({h},{g}), entry {mism[:2]}, "
                    f"coefficient {mism[2]}",
                    failing_pair=(h, g), entry=mism[:2], coefficient_index=mism[2])
    return CocycleReport(True, "ok")


def coboundary(ext, b: Matrix, character=None) -> Cocycle:
    """The cocycle A_g = B * chi(g) * psi(g)(B^{-1}) (trivializable when chi = 1)."""
    rank = b.rows
    b_inv = b.inverse()
    mats = []
    for g in range(ext.group.order):
        m = b * b_inv.substitute(ext.act(g))
        if character is not None and character[g] != 1:
            m = m.scale(character[g])
        mats.append(m)
    return Cocycle(ext, rank, tuple(mats))


def twist(c: Cocycle, b: Matrix) -> Cocycle:
    """Basis change: A_g -> B^{-1} * A_g * psi(g)(B)."""
    b_inv = b.inverse()
    mats = tuple(b_inv * c.mats[g] * b.substitute(c.ext.act(g))
                 for g in range(c.ext.group.order))
    return Cocycle(c.ext, c.rank, mats)


# ---------------------------------------------------------------------------
# product G-module specifications


@dataclass(frozen=True)
class ComponentSpec:
    """One component: the identification of its stabilizer with I, and its cocycle.

    iso[u] is the G-element identified with the I-element u; the isotropy
    action on the component is Phi_i(iso[u]) = (cocycle.mats[u], u).
    """

    iso: tuple
    cocycle: Cocycle


@dataclass(frozen=True)
class ProductGModuleSpec:
    group: object                # FiniteGroup G
    ext: object                  # shared LocalExtension (inertia I = ext.group)
    components: tuple            # ComponentSpec per component
    perms: tuple                 # perms[g][i] = index action of g
    connectors: tuple            # connectors[i][j] = g_ij in G mapping i -> j
    thetas: tuple                # thetas[i][j] = (Matrix, w in I)

    @property
    def size(self):
        return len(self.components)

    @property
    def rank(self):
        return self.components[0].cocycle.rank

    def iso_inverse(self, i, g):
        """I-element u with components[i].iso[u] == g, or None."""
        try:
            return self.components[i].iso.index(g)
        except ValueError:
            return None


def compose_blocks(ext, m1, w1, m2, w2):
    """(m1, w1) o (m2, w2) as semilinear blocks."""
    return m1 * m2.substitute(ext.act(w1)), ext.group.mul(w1, w2)


def verify_spec(spec: ProductGModuleSpec):
    """Conditions (A), (B), (C) of the assembly lemma; raises AssemblyError."""
    g_, i_ = spec.group, spec.ext.group
    l = spec.size
    for i in range(l):
        comp = spec.components[i]
        if comp.iso[0] != 0:
            raise AssemblyError(f"component {i}: identity must map to identity",
                                condition="iso", indices=(i,))
        for u in range(i_.order):
            for v in range(i_.order):
                if comp.iso[i_.mul(u, v)] != g_.mul(comp.iso[u], comp.iso[v]):
                    raise AssemblyError(
                        f"component {i}: isotropy identification is not a homomorphism",
                        condition="iso", indices=(i, u, v))
        if len(set(comp.iso)) != i_.order:
            raise AssemblyError(f"component {i}: isotropy identification not injective",
                                condition="iso", indices=(i,))
    # index action must be a homomorphism to permutations
    for a in range(g_.order):
        for b in range(g_.order):
            ab = g_.mul(a, b)
            for i in range(l):
                if spec.perms[ab][i] != spec.perms[a][spec.perms[b][i]]:
                    raise AssemblyError("index action is not a group action",
                                        condition="index", indices=(a, b, i))
    # (A)
    for i in range(l):
        if spec.connectors[i][i] != 0:
            raise AssemblyError(f"g_{i}{i} must be the identity",
                                condition="A", indices=(i, i))
        for j in range(l):
            if spec.perms[spec.connectors[i][j]][i] != j:
                raise AssemblyError(f"connector g_{i}{j} does not map {i} to {j}",
                                    condition="A", indices=(i, j))
            for k in range(l):
                if spec.connectors[i][k] != g_.mul(spec.connectors[j][k],
                                                   spec.connectors[i][j]):
                    raise AssemblyError(
                        f"condition (A) fails: g_{i}{k} != g_{j}{k} g_{i}{j}",
                        condition="A", indices=(i, j, k))
    # (B)
    for i in range(l):
        m_ii, w_ii = spec.thetas[i][i]
        ident = Matrix.identity(spec.ext.field, spec.rank, spec.ext.prec)
        if w_ii != 0 or not m_ii.agrees_with(ident):
            raise AssemblyError(f"theta_{i}{i} must be the identity",
                                condition="B", indices=(i, i))
        for j in range(l):
            for k in range(l):
                m_ij, w_ij = spec.thetas[i][j]
                m_jk, w_jk = spec.thetas[j][k]
                m_ik, w_ik = spec.thetas[i][k]
                m, w = compose_blocks(spec.ext, m_jk, w_jk, m_ij, w_ij)
                if w != w_ik or not m.agrees_with(m_ik):
                    raise AssemblyError(
                        f"condition (B) fails: theta_{i}{k} != theta_{j}{k} theta_{i}{j}",
                        condition="B", indices=(i, j, k))
    # (C)
    for i in range(l):
        for j in range(l):
            g_ij = spec.connectors[i][j]
            m_ij, w_ij = spec.thetas[i][j]
            for u in range(i_.order):
                a = spec.components[i].iso[u]
                conj = g_.conj(g_ij, a)
                u2 = spec.iso_inverse(j, conj)
                if u2 is None:
                    raise AssemblyError(
                        f"condition (C) fails: conjugate of component-{i} isotropy "
                        f"element {a} by g_{i}{j} lands outside component-{j} isotropy",
                        condition="C", indices=(i, j, u))
                lhs_m, lhs_w = compose_blocks(
                    spec.ext, spec.components[j].cocycle.mats[u2], u2, m_ij, w_ij)
                rhs_m, rhs_w = compose_blocks(
                    spec.ext, m_ij, w_ij, spec.components[i].cocycle.mats[u], u)
                if lhs_w != rhs_w or not lhs_m.agrees_with(rhs_m):
                    raise AssemblyError(
                        f"condition (C) fails between components ({i},{j}) at "
                        f"isotropy element {u}",
                        condition="C", indices=(i, j, u))


@dataclass(frozen=True)
class ProductGModule:
    spec: ProductGModuleSpec
    phi: tuple    # phi[g][i] = (target j, Matrix, w in I)

    @property
    def rank(self):
        return self.spec.rank

    @property
    def size(self):
        return self.spec.size

    def block(self, g, i):
        return self.phi[g][i]


def assemble_product(spec: ProductGModuleSpec) -> ProductGModule:
    """Glue the component actions into Phi; verifies (A)-(C), the group law
    on the result, and the restriction law Phi|_{G_i} = Phi_i."""
    verify_spec(spec)
    g_ = spec.group
    phi = []
    for g in range(g_.order):
        blocks = []
        for i in range(spec.size):
            j = spec.perms[g][i]
            g_ij = spec.connectors[i][j]
            gi = g_.mul(g_.inv(g_ij), g)
            u = spec.iso_inverse(i, gi)
            if u is None:
                raise AssemblyError(
                    f"element {g} does not factor as g_{i}{j} * (isotropy) "
                    f"on component {i}", condition="factor", indices=(g, i))
            m_ij, w_ij = spec.thetas[i][j]
            m, w = compose_blocks(spec.ext, m_ij, w_ij,
                                  spec.components[i].cocycle.mats[u], u)
            blocks.append((j, m, w))
        phi.append(tuple(blocks))
    module = ProductGModule(spec=spec, phi=tuple(phi))
    rep = verify_action(module)
    if not rep.ok:
        raise AssemblyError(f"assembled action violates the group law: {rep.message}",
                            condition="law")
    # restriction law: Phi restricted to G_i on component i is Phi_i exactly
    for i in range(spec.size):
        for u in range(spec.ext.group.order):
            a = spec.components[i].iso[u]
            j, m, w = module.phi[a][i]
            if j != i or w != u or not m.agrees_with(spec.components[i].cocycle.mats[u]):
                raise AssemblyError(
                    f"restriction law fails on component {i} at isotropy element {u}",
                    condition="restriction", indices=(i, u))
    return module


@dataclass
class ActionReport:
    ok: bool
    message: str
    failing_pair: tuple = None


def verify_action(m: ProductGModule) -> ActionReport:
    """Phi(hg) = Phi(h) o Phi(g), exhaustively over all ordered pairs."""
    spec = m.spec
    g_ = spec.group
    cache = {}

    def subst(mat, w):
        key = (w, mat)
        out = cache.get(key)
        if out is None:
            out = mat.substitute(spec.ext.act(w))
            cache[key] = out
        return out

    for h in range(g_.order):
        for g in range(g_.order):
            hg = g_.mul(h, g)
            for i in range(spec.size):
                j, mg, wg = m.phi[g][i]
                k, mh, wh = m.phi[h][j]
                k2, mhg, whg = m.phi[hg][i]
                w = spec.ext.group.mul(wh, wg)
                if k2 != k or whg != w:
                    return ActionReport(False,
                                        f"block bookkeeping differs at pair ({h},{g}), "
                                        f"component {i}", failing_pair=(h, g))
                comp = mh * subst(mg, wh)
                if not comp.agrees_with(mhg):
                    return ActionReport(False,
                                        f"matrix part differs at pair ({h},{g}), "
                                        f"component {i}", failing_pair=(h, g))
    return ActionReport(True, "ok")


def make_connectors(group, perms, seeds):
    """Full connector family from seed choices g_{i,i+1}.

    seeds[i] must map component i to i+1; g_ij for i < j is the product of
    the seeds along the chain, g_ji = g_ij^{-1}, g_ii = e.  Condition (A)
    holds by construction and is re-verified.
    """
    l = len(seeds) + 1
    for i, s in enumerate(seeds):
        if perms[s][i] != i + 1:
            raise AssemblyError(f"seed {i} does not map component {i} to {i+1}",
                                condition="seed", indices=(i,))
    reach = {perms[g][0] for g in range(group.order)}
    if reach != set(range(l)):
        raise AssemblyError("index action is not transitive", condition="seed")
    conn = [[0] * l for _ in range(l)]
    for i in range(l):
        for j in range(l):
            if i < j:
                acc = 0
                for t in range(i, j):
                    acc = group.mul(seeds[t], acc)
                conn[i][j] = acc
            elif i > j:
                acc = 0
                for t in range(j, i):
                    acc = group.mul(seeds[t], acc)
                conn[i][j] = group.inv(acc)
    conn = tuple(tuple(r) for r in conn)
    for i in range(l):
        for j in range(l):
            if perms[conn[i][j]][i] != j:
                raise AssemblyError("constructed connector has wrong image",
                                    condition="A", indices=(i, j))
            for k in range(l):
                if conn[i][k] != group.mul(conn[j][k], conn[i][j]):
                    raise AssemblyError("condition (A) fails for constructed connectors",
                                        condition="A", indices=(i, j, k))
    return conn


@dataclass(frozen=True)
class EquivariantMorphism:
    blocks: tuple    # per-component Matrix (R-linear)


def assemble_morphism(source: ProductGModule, target: ProductGModule,
                      mats) -> EquivariantMorphism:
    """Glue per-component R-linear maps into a G-equivariant morphism.

    Requires theta'_{ij} f_i = f_j theta_{ij} and G_i-equivariance of each
    f_i; full G-equivariance of the glued map is then re-verified blockwise.
    """
    s_spec, t_spec = source.spec, target.spec
    if s_spec.size != t_spec.size or s_spec.group is not t_spec.group:
        if s_spec.group.table != t_spec.group.table or s_spec.size != t_spec.size:
            raise StructuralError("morphism between incompatible modules")
    ext = s_spec.ext
    l = s_spec.size
    mats = tuple(mats)
    for i in range(l):
        for j in range(l):
            m_ij, w_ij = s_spec.thetas[i][j]
            m2_ij, w2_ij = t_spec.thetas[i][j]
            if w_ij != w2_ij:
                raise AssemblyError("source and target thetas have different ring parts",
                                    condition="theta", indices=(i, j))
            lhs = m2_ij * mats[i].substitute(ext.act(w2_ij))
            rhs = mats[j] * m_ij
            if not lhs.agrees_with(rhs):
                raise AssemblyError(
                    f"compatibility theta'_{i}{j} f_{i} = f_{j} theta_{i}{j} fails",
                    condition="compat", indices=(i, j))
    for i in range(l):
        for u in range(ext.group.order):
            a = s_spec.components[i].iso[u]
            lhs = mats[i] * s_spec.components[i].cocycle.mats[u]
            rhs = t_spec.components[i].cocycle.mats[u] * mats[i].substitute(ext.act(u))
            if not lhs.agrees_with(rhs):
                raise AssemblyError(
                    f"component {i} map is not equivariant at isotropy element {u}",
                    condition="equivariance", indices=(i, a))
    # full equivariance of the glued map
    for g in range(s_spec.group.order):
        for i in range(l):
            j, m, w = source.phi[g][i]
            j2, m2, w2 = target.phi[g][i]
            if j != j2 or w != w2:
                raise AssemblyError("source/target blocks disagree structurally",
                                    condition="blocks", indices=(i, g))
            lhs = mats[j] * m
            rhs = m2 * mats[i].substitute(ext.act(w))
            if not lhs.agrees_with(rhs):
                raise AssemblyError(f"glued map not equivariant at element {g}, "
                                    f"component {i}", condition="glued", indices=(i, g))
    return EquivariantMorphism(blocks=mats)


def independence_intertwiner(mod1: ProductGModule, mod2: ProductGModule) -> EquivariantMorphism:
    """The connector-independence intertwiner tau with Phi2(g) = tau Phi1(g) tau^{-1}.

    Requires the two modules to share components at index 0 (Phi^1_1 = Phi^2_1)
    and differ only in connectors/thetas; tau_j = theta^2_{1j} o Psi(f_j^{-1})
    o (theta^1_{1j})^{-1} with f_j = (g^1_{1j})^{-1} g^2_{1j} in G_1.
    """
    s1, s2 = mod1.spec, mod2.spec
    if s1.components[0] != s2.components[0]:
        raise DomainError("intertwiner requires Phi^1_1 = Phi^2_1 (shared component 0)")
    if s1.size != s2.size:
        raise StructuralError("component count mismatch")
    ext, g_ = s1.ext, s1.group
    psi = s1.components[0]
    l = s1.size
    blocks = []
    for j in range(l):
        f_j = g_.mul(g_.inv(s1.connectors[0][j]), s2.connectors[0][j])
        u = s1.iso_inverse(0, g_.inv(f_j))
        if u is None:
            raise DomainError(f"connector difference f_{j} is not in the isotropy group")
        m2, w2 = s2.thetas[0][j]
        m1, w1 = s1.thetas[0][j]
        # theta^1_{0j} inverse as a semilinear block
        w1_inv = ext.group.inv(w1)
        m1_inv = m1.inverse().substitute(ext.act(w1_inv))
        m, w = compose_blocks(ext, psi.cocycle.mats[u], u, m1_inv, w1_inv)
        m, w = compose_blocks(ext, m2, w2, m, w)
        if w != 0:
            raise AssemblyError("intertwiner block is not R-linear "
                                "(ring parts of the two theta families disagree)",
                                condition="tau", indices=(j,))
        blocks.append(m)
    # verify Phi2(g) o tau = tau o Phi1(g) blockwise, exhaustively
    for g in range(g_.order):
        for i in range(l):
            j1, ma, wa = mod1.phi[g][i]
            j2, mb, wb = mod2.phi[g][i]
            if j1 != j2 or wa != wb:
                raise AssemblyError("modules have incompatible index actions",
                                    condition="tau", indices=(g, i))
            lhs = mb * blocks[i].substitute(ext.act(wb))
            rhs = blocks[j1] * ma
            if not lhs.agrees_with(rhs):
                raise AssemblyError(
                    f"intertwiner fails equivariance at element {g}, component {i}",
                    condition="tau", indices=(g, i))
    return EquivariantMorphism(blocks=tuple(blocks))


# ---------------------------------------------------------------------------
# invariants, induced-ness, trivialization


@dataclass
class InvariantsResult:
    generators: list      # module generators, each a tuple of Series (length rank)
    natural: Matrix       # columns = generators: the map V (x) R -> E
    base_prec: int        # trustworthy base-ring coefficients, floor(N/e)
    fixed_dim: int        # k-dimension of the truncated fixed space


def _vec_to_coords(vec, rank, prec):
    out = [0] * (rank * prec)
    for comp, s in enumerate(vec):
        for m, c in enumerate(s.coeffs):
            out[m * rank + comp] = c
    return out


def _coords_to_vec(field, coords, rank, prec):
    return tuple(Series(field, prec,
                        tuple(coords[m * rank + comp] for m in range(prec)))
                 for comp in range(rank))


def _echelonize(field, vectors):
    """Reduced echelon basis ordered by leading coordinate (degree-major)."""
    ctx = field.ctx
    ech = {}
    for v in vectors:
        v = list(v)
        while True:
            lead = next((i for i, c in enumerate(v) if c), None)
            if lead is None or lead not in ech:
                break
            f = v[lead]
            v = [ctx.sub(a, ctx.mul(f, b)) for a, b in zip(v, ech[lead])]
        if lead is not None:
            inv = ctx.inv(v[lead])
            ech[lead] = [ctx.mul(inv, c) for c in v]
    for lead in sorted(ech, reverse=True):
        for other, w in ech.items():
            if other != lead and w[lead]:
                f = w[lead]
                ech[other] = [ctx.sub(a, ctx.mul(f, b)) for a, b in zip(w, ech[lead])]
    return [ech[lead] for lead in sorted(ech)]


def _reduce_against(ctx, ech, v):
    v = list(v)
    while True:
        lead = next((i for i, c in enumerate(v) if c), None)
        if lead is None or lead not in ech:
            return v, lead
        f = v[lead]
        v = [ctx.sub(a, ctx.mul(f, b)) for a, b in zip(v, ech[lead])]


def invariants(c: Cocycle) -> InvariantsResult:
    """Fixed module of the semilinear action, as a base-ring module.

    Solves Phi(g) x = x over k for the group generators, then extracts a
    rank-r generating set by valuation-greedy leading-term reduction with
    deterministic tie-breaking (lowest degree, then lowest component).
    """
    ext = c.ext
    field = ext.field
    ctx = field.ctx
    rank, prec = c.rank, ext.prec
    dim = rank * prec
    gens = ext.group.generators()
    if not gens:
        gens = []
    rows = []
    for g in gens:
        # psi(g)(s^m e_comp) = act(g)^m e_comp, so the image of a basis vector
        # is column comp of A_g scaled by a precomputed power of act(g)
        act_pows = [Series.one(field, prec)]
        for _ in range(prec - 1):
            act_pows.append(act_pows[-1] * c.ext.act(g))
        a_g = c.mats[g]
        cols = []
        for idx in range(dim):
            m, comp = divmod(idx, rank)
            image = tuple(a_g.entries[row][comp] * act_pows[m] for row in range(rank))
            col = _vec_to_coords(image, rank, prec)
            col[idx] = ctx.sub(col[idx], 1)
            cols.append(col)
        for r_ in range(dim):
            rows.append([cols[idx][r_] for idx in range(dim)])
    if rows:
        sol = solve_linear(field, rows)
        kernel = sol.kernel
    else:
        kernel = [[1 if t == idx else 0 for t in range(dim)] for idx in range(dim)]
    candidates = _echelonize(field, kernel)
    fixed_dim = len(candidates)

    t = ext.base_uniformizer
    span = {}
    selected = []
    # candidates within half a window of the truncation boundary carry too
    # few checked coefficients to certify a module generator
    cutoff = prec - prec // 2

    def add_span(coords):
        v, lead = _reduce_against(ctx, span, coords)
        if lead is not None:
            inv = ctx.inv(v[lead])
            span[lead] = [ctx.mul(inv, x) for x in v]
        return lead

    for cand in candidates:
        if len(selected) == rank:
            break
        red, lead = _reduce_against(ctx, span, cand)
        if lead is None:
            continue
        if lead // rank >= cutoff:
            continue
        inv = ctx.inv(red[lead])
        red = [ctx.mul(inv, x) for x in red]
        vec = _coords_to_vec(field, red, rank, prec)
        selected.append(vec)
        mult = vec
        while True:
            coords = _vec_to_coords(mult, rank, prec)
            if all(x == 0 for x in coords):
                break
            if add_span(coords) is None:
                break
            mult = tuple(s * t for s in mult)

    if len(selected) < rank:
        raise RankDeficiencyError(
            f"invariants: found {len(selected)} generators, expected {rank}",
            found=len(selected), expected=rank)

    # safety: every generator is fixed by every group element
    for g in range(ext.group.order):
        for vec in selected:
            img = c.apply(g, vec)
            if any(a.coeffs != b.coeffs for a, b in zip(img, vec)):
                raise RankDeficiencyError("extracted generator is not fixed "
                                          f"by element {g}", found=len(selected),
                                          expected=rank)

    natural = Matrix([[selected[j][i] for j in range(rank)] for i in range(rank)])
    return InvariantsResult(generators=selected, natural=natural,
                            base_prec=max(prec // ext.ram_index, 1),
                            fixed_dim=fixed_dim)


def component_cocycle(m: ProductGModule) -> Cocycle:
    return m.spec.components[0].cocycle


def invariants_product(m: ProductGModule) -> InvariantsResult:
    """Invariants of the glued module.

    A G-invariant section of the product is determined by its component-0
    part, which must be fixed by the component-0 isotropy action; the other
    components are theta-transports.  So this reduces to the component-0
    cocycle.
    """
    return invariants(component_cocycle(m))


@dataclass
class InducedReport:
    induced: bool
    profile: list    # elementary divisor valuations of the natural map
    trust: int


def is_induced(m) -> InducedReport:
    """Whether the natural map V (x) R -> E is an isomorphism (unit determinant)."""
    inv = invariants_product(m) if isinstance(m, ProductGModule) else invariants(m)
    nt = inv.natural
    if nt.is_residue_invertible():
        return InducedReport(True, [0] * nt.rows, trust=nt.entries[0][0].prec)
    sf = smith(nt)
    profile = [d for d in sf.divisors]
    return InducedReport(False, profile, trust=sf.trust)


@dataclass
class TrivializeResult:
    found: bool           # True: B returned; False: proven impossible; None: inconclusive
    b: object             # Matrix or None
    stage: str
    detail: str
    proven: bool = False
    obstruction: object = None


def _verify_coboundary(c: Cocycle, b: Matrix) -> bool:
    b_inv = b.inverse()
    for g in range(c.ext.group.order):
        rhs = b * b_inv.substitute(c.ext.act(g))
        if not rhs.agrees_with(c.mats[g]):
            return False
    return True


def trivialize(c: Cocycle, budget=None, rng=None) -> TrivializeResult:
    """Search B with A_g = B * psi(g)(B^{-1}) for all g.

    Stage 1 (averaging): B = sum_g A_g psi(g)(C) is always a fixed point of
    the twisted action; seeded candidates C are tried until one lands on a
    unit.  Stage 2 (residue): since the coefficient field is fixed
    pointwise, any solution forces A_g = I mod s; a nonidentity residue is a
    proven level-0 obstruction (equivalent to the exhaustive search over
    GL_r(k), whose candidate map is constant).  Stage 3 (linear fix + residue
    image): the fixed space {B : A_g psi(g)(B) = B} is solved exactly over k;
    a solution exists iff its residue image contains an invertible matrix,
    searched exhaustively when |k|^dim fits the budget.
    """
    from .prng import SplitMix64

    ext = c.ext
    field = ext.field
    rank, prec = c.rank, ext.prec
    cap = 10 ** 6 if budget is None else budget
    rng = rng or SplitMix64(0x0B5E55ED)

    # stage 1: averaging
    candidates = [Matrix.identity(field, rank, prec)]
    for _ in range(7):
        candidates.append(Matrix([[Series(field, prec,
                                          tuple(rng.randrange(field.order)
                                                for _ in range(prec)))
                                   for _ in range(rank)] for _ in range(rank)]))
    for cand in candidates:
        acc = None
        for g in range(ext.group.order):
            term = c.mats[g] * cand.substitute(ext.act(g))
            acc = term if acc is None else acc + term
        if acc.is_residue_invertible():
            if _verify_coboundary(c, acc):
                return TrivializeResult(True, acc, "averaging", "averaged fixed point",
                                        proven=True)

    # stage 2: residue obstruction
    ident = [[1 if i == j else 0 for j in range(rank)] for i in range(rank)]
    for g in range(ext.group.order):
        if c.mats[g].residue() != ident:
            return TrivializeResult(
                False, None, "residue",
                f"residue cocycle is not the identity at element {g}; since the "
                "coefficient field is fixed pointwise, every candidate residue "
                "B * B^{-1} is the identity (exhaustive over GL_r(k))",
                proven=True, obstruction=g)

    # stage 3: linear fixed space and residue image
    ctx = field.ctx
    dim = rank * rank * prec

    def unflatten(coords):
        return Matrix([[Series(field, prec,
                               tuple(coords[(i * rank + j) * prec + m]
                                     for m in range(prec)))
                        for j in range(rank)] for i in range(rank)])

    rows = []
    gens = ext.group.generators()
    for g in gens:
        a_g = c.mats[g]
        act_pows = [Series.one(field, prec)]
        for _ in range(prec - 1):
            act_pows.append(act_pows[-1] * ext.act(g))
        cols = []
        for i in range(rank):
            for j in range(rank):
                for m in range(prec):
                    # A_g psi(g)(E_{ij} s^m): column j is column i of A_g
                    # scaled by act(g)^m, all other columns vanish
                    scaled = [a_g.entries[r_][i] * act_pows[m] for r_ in range(rank)]
                    col = [0] * dim
                    for r_ in range(rank):
                        base = (r_ * rank + j) * prec
                        for mm, cval in enumerate(scaled[r_].coeffs):
                            col[base + mm] = cval
                    idx = (i * rank + j) * prec + m
                    col[idx] = ctx.sub(col[idx], 1)
                    cols.append(col)
        for r_ in range(dim):
            rows.append([cols[idx][r_] for idx in range(dim)])
    sol = solve_linear(field, rows) if rows else None
    kernel = sol.kernel if sol else [[1 if t == i else 0 for t in range(dim)]
                                     for i in range(dim)]
    if not kernel:
        return TrivializeResult(False, None, "fixed-space",
                                "the twisted fixed space is zero", proven=True)
    # residue image basis
    res_vecs = []
    for v in kernel:
        res = [v[(i * rank + j) * prec] for i in range(rank) for j in range(rank)]
        res_vecs.append(res)
    res_basis = _echelonize(field, res_vecs)
    d = len(res_basis)
    q = field.order

    def residue_invertible(coeffs):
        mat = [[0] * rank for _ in range(rank)]
        for cf, vec in zip(coeffs, res_basis):
            if cf:
                for t, x in enumerate(vec):
                    if x:
                        r_, c_ = divmod(t, rank)
                        mat[r_][c_] = ctx.add(mat[r_][c_], ctx.mul(cf, x))
        return residue_det(field, mat) != 0

    found_combo = None
    if d and q ** d <= cap:
        combo = [0] * d
        total = q ** d
        for code in range(1, total):
            x = code
            for t in range(d):
                combo[t] = x % q
                x //= q
            if residue_invertible(combo):
                found_combo = list(combo)
                break
        if found_combo is None:
            return TrivializeResult(
                False, None, "residue-image",
                f"exhaustive search over the {q}^{d} residue combinations found no "
                "invertible residue; no trivialization exists at this precision",
                proven=True)
        exhaustive = True
    else:
        exhaustive = False
        for trial in range(200):
            combo = [rng.randrange(q) for _ in range(d)]
            if residue_invertible(combo):
                found_combo = combo
                break
        if found_combo is None:
            return TrivializeResult(
                None, None, "budget",
                f"residue image dimension {d} exceeds the exhaustive budget and "
                "randomized search found no invertible residue", proven=False)

    # lift the residue choice to a full fixed-space element
    echelon_kernel = _echelonize(field, kernel)
    target = None
    for cf, vec in zip(found_combo, res_basis):
        if cf:
            scaled = [ctx.mul(cf, x) for x in vec]
            target = scaled if target is None else [ctx.add(a, b)
                                                    for a, b in zip(target, scaled)]
    # choose any fixed vector whose residue equals target: solve in the kernel span
    kdim = len(echelon_kernel)
    rows2 = []
    for t in range(rank * rank):
        rows2.append([echelon_kernel[kv][t * prec] for kv in range(kdim)])
    sol2 = solve_linear(field, rows2, list(target))
    if not sol2.consistent:
        return TrivializeResult(None, None, "lift",
                                "residue target not reachable (internal)", proven=False)
    coords = [0] * dim
    for kv, cf in enumerate(sol2.particular):
        if cf:
            for t, x in enumerate(echelon_kernel[kv]):
                if x:
                    coords[t] = ctx.add(coords[t], ctx.mul(cf, x))
    b = unflatten(coords)
    if not _verify_coboundary(c, b):
        return TrivializeResult(None, None, "verify",
                                "lifted candidate failed re-verification", proven=False)
    detail = "exhaustive residue-image search" if exhaustive else "randomized residue choice"
    return TrivializeResult(True, b, "fixed-space", detail, proven=True)
