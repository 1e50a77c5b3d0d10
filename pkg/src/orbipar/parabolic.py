"""Parabolic data, cover scenes, glued bundles, and the two functors.

A parabolic datum is (rank, per point: extension, cocycle Psi, gluing mu)
with mu an invertible Laurent matrix satisfying A_g * psi(g)(mu) = mu (the
matrix form of the equivariance of mu between the trivially-twisted and the
twisted generic actions).

A cover scene fixes the group G, and per branch point the extension, the
identification of the component-0 stabilizer with the inertia group, and a
transversal; components are the cosets, the index action is the coset
action, and every ring-level transport is psi(w) for w determined by the
transversal.  The generic part of a glued bundle is normalized to the
trivial twist (rank alone), so the generic comparison map in round trips is
the identity.
"""

from dataclasses import dataclass

from .equivariant import (Cocycle, ComponentSpec, ProductGModule, ProductGModuleSpec,
                          assemble_product, compose_blocks, invariants_product,
                          make_connectors, verify_cocycle)
from .errors import ConfigurationError, DomainError, StructuralError
from .linalg import Matrix, smith
from .series import Laurent, Series


# ---------------------------------------------------------------------------
# parabolic data


@dataclass(frozen=True)
class ParabolicPoint:
    label: str
    ext: object
    psi: Cocycle
    mu: Matrix       # Laurent entries

    def __post_init__(self):
        if self.psi.ext != self.ext:
            raise StructuralError("cocycle attached to a different extension")
        if self.mu.rows != self.psi.rank or self.mu.cols != self.psi.rank:
            raise StructuralError("mu has the wrong shape")


@dataclass(frozen=True)
class ParabolicDatum:
    rank: int
    points: tuple

    def point(self, label):
        for pt in self.points:
            if pt.label == label:
                return pt
        raise StructuralError(f"no point labeled {label!r}")


def trivial_datum(rank, labeled_exts):
    """The trivial parabolic bundle: pure substitution action, identity gluing."""
    pts = []
    for label, ext in labeled_exts:
        mu = Matrix.identity(ext.field, rank, ext.prec).to_laurent()
        pts.append(ParabolicPoint(label=label, ext=ext,
                                  psi=Cocycle.trivial(ext, rank), mu=mu))
    return ParabolicDatum(rank=rank, points=tuple(pts))


def sign_twist_datum(field, prec, label="p"):
    """The referee example: rank 1 over Kummer(2), A_sigma = -1, mu = s."""
    from .local_galois import make_kummer

    ext = make_kummer(field, 2, prec)
    neg = Matrix([[Series.constant(field, field.ctx.neg(1), prec)]])
    psi = Cocycle(ext, 1, (Matrix.identity(field, 1, prec), neg))
    mu = Matrix([[Laurent.exact(field, 1, [1], prec)]])
    return ParabolicDatum(rank=1, points=(ParabolicPoint(label, ext, psi, mu),))


@dataclass
class ValidationReport:
    ok: bool
    message: str
    point: str = None
    detail: object = None


def check_mu_equivariance(ext, psi: Cocycle, mu: Matrix):
    """Condition (b): A_g * psi(g)(mu) = mu on the common validity window.

    Returns None, or (g, (i, j, exponent)) for the first violation.
    """
    for g in range(ext.group.order):
        lhs = psi.mats[g].to_laurent() * mu.substitute(ext.act(g))
        mism = lhs.first_mismatch(mu)
        if mism is not None:
            return (g, mism)
    return None


def validate_parabolic(d: ParabolicDatum) -> ValidationReport:
    for pt in d.points:
        rep = verify_cocycle(pt.psi)
        if not rep.ok:
            return ValidationReport(False, f"condition (a) fails at {pt.label}: "
                                    f"{rep.message}", point=pt.label, detail=rep)
        bad = check_mu_equivariance(pt.ext, pt.psi, pt.mu)
        if bad is not None:
            g, mism = bad
            return ValidationReport(False,
                                    f"condition (b) fails at {pt.label}, element {g}, "
                                    f"entry {mism[:2]}, exponent {mism[2]}",
                                    point=pt.label, detail=bad)
        try:
            pt.mu.inverse()
        except Exception:
            return ValidationReport(False, f"mu at {pt.label} is not invertible",
                                    point=pt.label)
    return ValidationReport(True, "ok")


# ---------------------------------------------------------------------------
# cover scenes


@dataclass(frozen=True)
class ScenePoint:
    label: str
    ext: object
    iso: tuple            # I-element -> G-element (component-0 stabilizer)
    transversal: tuple    # l coset representatives, transversal[0] = e

    def validate(self, group):
        i_ = self.ext.group
        if self.iso[0] != 0 or len(set(self.iso)) != i_.order:
            raise ConfigurationError(f"{self.label}: bad isotropy identification")
        for u in range(i_.order):
            for v in range(i_.order):
                if self.iso[i_.mul(u, v)] != group.mul(self.iso[u], self.iso[v]):
                    raise ConfigurationError(
                        f"{self.label}: isotropy identification is not a homomorphism")
        l = len(self.transversal)
        if self.transversal[0] != 0:
            raise ConfigurationError(f"{self.label}: transversal must start at identity")
        if l * i_.order != group.order:
            raise ConfigurationError(
                f"{self.label}: |G| = {group.order} != fiber {l} x inertia {i_.order}")
        stab = set(self.iso)
        seen = set()
        for t in self.transversal:
            coset = frozenset(group.mul(t, h) for h in stab)
            if coset in seen:
                raise ConfigurationError(f"{self.label}: transversal repeats a coset")
            seen.add(coset)

    def size(self):
        return len(self.transversal)

    def stabilizer(self):
        return set(self.iso)

    def component_of(self, group, g):
        """Index j with g in transversal[j] * G_0."""
        stab = self.stabilizer()
        for j, t in enumerate(self.transversal):
            if group.mul(group.inv(t), g) in stab:
                return j
        return None

    def perms(self, group):
        l = self.size()
        out = []
        for g in range(group.order):
            row = []
            for i in range(l):
                j = self.component_of(group, group.mul(g, self.transversal[i]))
                if j is None:
                    raise ConfigurationError(f"{self.label}: coset action broke down")
                row.append(j)
            out.append(tuple(row))
        return tuple(out)

    def q0(self, group, g):
        """I-element u with iso[u] = g (g must lie in the stabilizer)."""
        try:
            return self.iso.index(g)
        except ValueError:
            raise DomainError(f"{self.label}: element {g} not in the component-0 stabilizer")

    def ring_part(self, group, i, j, g):
        """w in I with the (j <- i) block of phi(g) equal to psi(w)."""
        t_i, t_j = self.transversal[i], self.transversal[j]
        return self.q0(group, group.mul(group.mul(group.inv(t_j), g), t_i))

    def component_iso(self, group, i):
        t = self.transversal[i]
        return tuple(group.conj(t, a) for a in self.iso)

    def default_seeds(self, group):
        return [group.mul(self.transversal[i + 1], group.inv(self.transversal[i]))
                for i in range(self.size() - 1)]


@dataclass(frozen=True)
class CoverScene:
    group: object
    points: tuple

    def __post_init__(self):
        for pt in self.points:
            pt.validate(self.group)

    def point(self, label):
        for pt in self.points:
            if pt.label == label:
                return pt
        raise StructuralError(f"scene has no point labeled {label!r}")


def totally_ramified_scene(ext, label="p"):
    """The l = 1 scene: G = I acting on a single component."""
    sp = ScenePoint(label=label, ext=ext,
                    iso=tuple(range(ext.group.order)), transversal=(0,))
    return CoverScene(group=ext.group, points=(sp,))


# ---------------------------------------------------------------------------
# glued bundles


@dataclass(frozen=True)
class GluedPoint:
    label: str
    scene_point: ScenePoint
    module: ProductGModule
    taus: tuple        # per component, Laurent Matrix


@dataclass(frozen=True)
class GluedBundle:
    rank: int
    scene: CoverScene
    points: tuple

    def point(self, label):
        for pt in self.points:
            if pt.label == label:
                return pt
        raise StructuralError(f"no glued point labeled {label!r}")


def verify_glued(b: GluedBundle) -> ValidationReport:
    """tau-equivariance Phi0(g) o tau = tau o phi0(g) blockwise, plus invertibility."""
    group = b.scene.group
    for pt in b.points:
        spec = pt.module.spec
        ext = spec.ext
        sp = pt.scene_point
        for i, tau in enumerate(pt.taus):
            try:
                tau.inverse()
            except Exception:
                return ValidationReport(False,
                                        f"tau_{i} at {pt.label} is not invertible",
                                        point=pt.label)
        for g in range(group.order):
            for i in range(spec.size):
                j, m, w = pt.module.phi[g][i]
                w_phi = sp.ring_part(group, i, j, g)
                if w != w_phi:
                    return ValidationReport(
                        False, f"ring parts of the formal and generic actions disagree "
                        f"at {pt.label}, element {g}, component {i}", point=pt.label)
                lhs = m.to_laurent() * pt.taus[i].substitute(ext.act(w))
                rhs = pt.taus[j]
                mism = lhs.first_mismatch(rhs)
                if mism is not None:
                    return ValidationReport(
                        False, f"tau-equivariance fails at {pt.label}, element {g}, "
                        f"component {i}, entry {mism[:2]}, exponent {mism[2]}",
                        point=pt.label, detail=(g, i, mism))
    return ValidationReport(True, "ok")


def _thetas_from_connectors(scene_point, group, connectors, rank):
    ext = scene_point.ext
    l = scene_point.size()
    ident = Matrix.identity(ext.field, rank, ext.prec)
    out = []
    for i in range(l):
        row = []
        for j in range(l):
            w = scene_point.ring_part(group, i, j, connectors[i][j])
            row.append((ident, w))
        out.append(tuple(row))
    return tuple(out)


def build_spec_from_scene(scene_point: ScenePoint, group, psi: Cocycle,
                          connectors=None, seeds=None) -> ProductGModuleSpec:
    """The functor-T product specification at one point.

    Component 0 carries Psi; component i carries the conjugated cocycle
    theta_{0i} o Psi(g_{0i}^{-1} a g_{0i}) o theta_{0i}^{-1}, whose ring part
    collapses to the inertia element of a, as asserted.
    """
    ext = scene_point.ext
    i_ = ext.group
    perms = scene_point.perms(group)
    if connectors is None:
        if seeds is None:
            seeds = scene_point.default_seeds(group)
        connectors = make_connectors(group, perms, seeds)
    thetas = _thetas_from_connectors(scene_point, group, connectors, psi.rank)
    comps = [ComponentSpec(iso=scene_point.iso, cocycle=psi)]
    for i in range(1, scene_point.size()):
        iso_i = scene_point.component_iso(group, i)
        g_0i = connectors[0][i]
        m_0i, w_0i = thetas[0][i]
        w_0i_inv = i_.inv(w_0i)
        mats = []
        for u in range(i_.order):
            a = iso_i[u]
            inner = group.mul(group.mul(group.inv(g_0i), a), g_0i)
            u_inner = scene_point.q0(group, inner)
            m, w = compose_blocks(ext, m_0i, w_0i, psi.mats[u_inner], u_inner)
            m, w = compose_blocks(ext, m, w,
                                  m_0i.inverse().substitute(ext.act(w_0i_inv)), w_0i_inv)
            if w != u:
                raise ConfigurationError(
                    "conjugated component action has unexpected ring part "
                    f"(component {i}, isotropy element {u})")
            mats.append(m)
        comps.append(ComponentSpec(iso=iso_i, cocycle=Cocycle(ext, psi.rank, tuple(mats))))
    return ProductGModuleSpec(group=group, ext=ext, components=tuple(comps),
                              perms=perms, connectors=connectors, thetas=thetas)


def functor_T(d: ParabolicDatum, scene: CoverScene, connectors=None) -> GluedBundle:
    """Parabolic datum -> glued bundle: assemble the formal parts and transport mu.

    connectors, when given, maps point label -> connector family; defaults to
    the scene transversal seeds.
    """
    pts = []
    for dpt in d.points:
        sp = scene.point(dpt.label)
        if sp.ext != dpt.ext:
            raise ConfigurationError(
                f"scene and datum disagree on the extension at {dpt.label}")
        conn = connectors.get(dpt.label) if connectors else None
        spec = build_spec_from_scene(sp, scene.group, dpt.psi, connectors=conn)
        module = assemble_product(spec)
        taus = []
        for i in range(sp.size()):
            w_0i = spec.thetas[0][i][1]
            taus.append(dpt.mu.substitute(dpt.ext.act(w_0i)))
        pts.append(GluedPoint(label=dpt.label, scene_point=sp, module=module,
                              taus=tuple(taus)))
    b = GluedBundle(rank=d.rank, scene=scene, points=tuple(pts))
    rep = verify_glued(b)
    if not rep.ok:
        raise ConfigurationError(f"functor_T produced an invalid glued bundle: "
                                 f"{rep.message}")
    return b


@dataclass
class SResult:
    datum: ParabolicDatum
    identifications: dict     # label -> Matrix (iota)
    induced: dict             # label -> bool


def functor_S(b: GluedBundle) -> SResult:
    """Glued bundle -> parabolic datum via invariants of the formal parts.

    The identification of V (x) R with component 0 is the natural map when
    unimodular, else the unimodular U-factor of its Smith decomposition; the
    leftover discrepancy lands in mu = iota^{-1} tau_0.
    """
    pts = []
    iotas = {}
    induced = {}
    for gpt in b.points:
        spec = gpt.module.spec
        ext = spec.ext
        inv = invariants_product(gpt.module)
        nt = inv.natural
        if nt.is_residue_invertible():
            iota = nt
            induced[gpt.label] = True
        else:
            iota = smith(nt).U
            induced[gpt.label] = False
        iota_inv = iota.inverse()
        a0 = spec.components[0].cocycle
        mats = tuple(iota_inv * a0.mats[g] * iota.substitute(ext.act(g))
                     for g in range(ext.group.order))
        psi = Cocycle(ext, b.rank, mats)
        mu = iota_inv.to_laurent() * gpt.taus[0]
        pts.append(ParabolicPoint(label=gpt.label, ext=ext, psi=psi, mu=mu))
        iotas[gpt.label] = iota
    datum = ParabolicDatum(rank=b.rank, points=tuple(pts))
    rep = validate_parabolic(datum)
    if not rep.ok:
        raise ConfigurationError(f"functor_S produced an invalid datum: {rep.message}")
    return SResult(datum=datum, identifications=iotas, induced=induced)


# ---------------------------------------------------------------------------
# morphisms and round trips


def base_to_point(ext, g_matrix: Matrix) -> Matrix:
    """Re-expand a matrix over the base ring (series in t) at the point (series in s)."""
    from .local_galois import evaluate_in_base

    return g_matrix.map(lambda e: evaluate_in_base(ext, e))


def validate_parabolic_morphism(src: ParabolicDatum, dst: ParabolicDatum,
                                g_matrix: Matrix, sigmas: dict) -> ValidationReport:
    """A morphism (g, {sigma_x}): I-equivariance of each sigma and the mu square
    mu' o (g (x) Id) = sigma^0 o mu."""
    if {p.label for p in src.points} != {p.label for p in dst.points}:
        raise StructuralError("morphism endpoints have different supports")
    for spt in src.points:
        dpt = dst.point(spt.label)
        if spt.ext != dpt.ext:
            raise StructuralError(f"extensions differ at {spt.label}")
        sigma = sigmas[spt.label]
        ext = spt.ext
        for a in range(ext.group.order):
            lhs = sigma * spt.psi.mats[a]
            rhs = dpt.psi.mats[a] * sigma.substitute(ext.act(a))
            if not lhs.agrees_with(rhs):
                return ValidationReport(False,
                                        f"sigma at {spt.label} is not equivariant at "
                                        f"element {a}", point=spt.label)
        g_local = base_to_point(ext, g_matrix).to_laurent()
        lhs = dpt.mu * g_local
        rhs = sigma.to_laurent() * spt.mu
        mism = lhs.first_mismatch(rhs)
        if mism is not None:
            return ValidationReport(False,
                                    f"mu square fails at {spt.label}, entry {mism[:2]}, "
                                    f"exponent {mism[2]}", point=spt.label, detail=mism)
    return ValidationReport(True, "ok")


def _block_inverse(ext, m, w):
    w_inv = ext.group.inv(w)
    return m.inverse().substitute(ext.act(w_inv)), w_inv


@dataclass
class RoundtripReport:
    ok: bool
    message: str
    per_point: dict          # label -> dict of step results
    sigmas: dict = None      # label -> Matrix (S o T isomorphism)
    rhos: dict = None        # label -> list of Matrix (T o S isomorphism blocks)


def roundtrip_check(d: ParabolicDatum, scene: CoverScene,
                    connectors=None) -> RoundtripReport:
    """Both round trips with explicit verified isomorphisms.

    S(T(d)) ~ d via (identity on V, sigma = iota^{-1}); T(S(T(d))) ~ T(d) via
    rho_i = theta~_{0i} o iota^{-1} o theta_{0i}^{-1} blockwise, with the
    generic comparison map normalized to the identity so the gluing square
    reads tau~_i = rho_i o tau_i.
    """
    per_point = {}
    val = validate_parabolic(d)
    if not val.ok:
        return RoundtripReport(False, f"input datum invalid: {val.message}", {})
    b = functor_T(d, scene, connectors=connectors)
    sres = functor_S(b)
    d2 = sres.datum

    sigmas = {label: iota.inverse() for label, iota in sres.identifications.items()}
    g_ident = None
    for dpt in d.points:
        base_prec = max(dpt.ext.prec // dpt.ext.ram_index, 1)
        g_ident = Matrix.identity(dpt.ext.field, d.rank, base_prec)
        break
    st_rep = validate_parabolic_morphism(d, d2, g_ident, sigmas)
    per_point["S.T"] = st_rep.message
    if not st_rep.ok:
        return RoundtripReport(False, f"S o T isomorphism failed: {st_rep.message}",
                               per_point, sigmas=sigmas)

    b2 = functor_T(d2, scene, connectors=connectors)
    rhos = {}
    for gpt in b.points:
        label = gpt.label
        gpt2 = b2.point(label)
        spec, spec2 = gpt.module.spec, gpt2.module.spec
        ext = spec.ext
        group = scene.group
        iota_inv = sigmas[label]
        l = spec.size
        blocks = []
        for i in range(l):
            g_0i = spec.connectors[0][i]
            j, m_theta, w_theta = gpt.module.phi[g_0i][0]
            j2, m_theta2, w_theta2 = gpt2.module.phi[g_0i][0]
            if j != i or j2 != i or w_theta != w_theta2:
                return RoundtripReport(False,
                                       f"transport blocks disagree at {label}", per_point)
            m_inv, w_inv = _block_inverse(ext, m_theta, w_theta)
            m, w = compose_blocks(ext, iota_inv, 0, m_inv, w_inv)
            m, w = compose_blocks(ext, m_theta2, w_theta2, m, w)
            if w != 0:
                return RoundtripReport(False, f"rho_{i} at {label} is not R-linear",
                                       per_point)
            blocks.append(m)
        # rho equivariance: rho_j o Phi(g) = Phi~(g) o rho_i blockwise
        for g in range(group.order):
            for i in range(l):
                j, m1, w1 = gpt.module.phi[g][i]
                j2, m2, w2 = gpt2.module.phi[g][i]
                if j != j2 or w1 != w2:
                    return RoundtripReport(False, "incompatible index bookkeeping",
                                           per_point)
                lhs = blocks[j] * m1
                rhs = m2 * blocks[i].substitute(ext.act(w1))
                if not lhs.agrees_with(rhs):
                    return RoundtripReport(
                        False, f"rho equivariance fails at {label}, element {g}, "
                        f"component {i}", per_point)
        # gluing square: tau~_i = rho_i o tau_i (generic comparison = identity)
        for i in range(l):
            lhs = gpt2.taus[i]
            rhs = blocks[i].to_laurent() * gpt.taus[i]
            mism = lhs.first_mismatch(rhs)
            if mism is not None:
                return RoundtripReport(
                    False, f"gluing square fails at {label}, component {i}, "
                    f"entry {mism[:2]}, exponent {mism[2]}", per_point)
        rhos[label] = blocks
        per_point[label] = {"S.T": "pass", "T.S": "pass",
                            "induced": sres.induced[label]}
    return RoundtripReport(True, "both round trips close with explicit isomorphisms",
                           per_point, sigmas=sigmas, rhos=rhos)


def multipoint_map(d: ParabolicDatum, scene: CoverScene) -> RoundtripReport:
    """Pointwise functors with per-point aggregation (errors isolated by point)."""
    per_point = {}
    ok = True
    sigmas = {}
    rhos = {}
    for dpt in d.points:
        sub_d = ParabolicDatum(rank=d.rank, points=(dpt,))
        sub_scene = CoverScene(group=scene.group, points=(scene.point(dpt.label),))
        try:
            rep = roundtrip_check(sub_d, sub_scene)
            per_point[dpt.label] = rep.per_point.get(dpt.label, rep.message)
            if rep.sigmas:
                sigmas.update(rep.sigmas)
            if rep.rhos:
                rhos.update(rep.rhos)
            ok = ok and rep.ok
        except Exception as exc:  # noqa: BLE001 - aggregate per point per contract
            per_point[dpt.label] = f"error: {exc}"
            ok = False
    return RoundtripReport(ok, "pointwise round trips " + ("pass" if ok else "fail"),
                           per_point, sigmas=sigmas, rhos=rhos)


# ---------------------------------------------------------------------------
# seeded random data


def random_unimodular(field, rank, prec, rng):
    from .linalg import residue_det

    while True:
        m = Matrix([[Series(field, prec, tuple(rng.randrange(field.order)
                                               for _ in range(prec)))
                     for _ in range(rank)] for _ in range(rank)])
        if residue_det(field, m.residue()) != 0:
            return m


def random_base_unimodular(ext, rank, rng):
    """Unimodular matrix with entries that are series in t (re-expanded in s)."""
    from .linalg import residue_det
    from .local_galois import evaluate_in_base

    field = ext.field
    base_prec = max(ext.prec // ext.ram_index, 1)
    while True:
        coeffs = [[[rng.randrange(field.order) for _ in range(base_prec)]
                   for _ in range(rank)] for _ in range(rank)]
        if residue_det(field, [[coeffs[i][j][0] for j in range(rank)]
                               for i in range(rank)]) != 0:
            break
    return Matrix([[evaluate_in_base(ext, Series(field, base_prec,
                                                 tuple(coeffs[i][j])))
                    for j in range(rank)] for i in range(rank)])


def random_datum(ext, rank, rng, label="p", character_exponent=0):
    """Coboundary-times-character cocycle with a compatible random mu.

    A_g = B chi(g) psi(g)(B^{-1}); mu = B * s^d I * W(t) with d killing the
    character and W a random unimodular base matrix, so condition (b) holds
    by construction.
    """
    from .equivariant import coboundary

    field = ext.field
    n = ext.group.order
    b = random_unimodular(field, rank, ext.prec, rng)
    character = None
    d_shift = 0
    if character_exponent % n != 0:
        zeta = field.root_of_unity(n)
        a = character_exponent % n
        character = tuple(field.pow(zeta, (a * g) % n) for g in range(n))
        d_shift = (n - a) % n
    coc = coboundary(ext, b, character=character)
    w = random_base_unimodular(ext, rank, rng)
    mu = (b * w).to_laurent().map(lambda e: e.shift(d_shift))
    return ParabolicDatum(rank=rank,
                          points=(ParabolicPoint(label=label, ext=ext, psi=coc, mu=mu),))
