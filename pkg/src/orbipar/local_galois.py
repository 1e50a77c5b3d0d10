"""Finite Galois extensions of k((t)) as substitution actions on k[[s]]/(s^N).

An extension is a finite group acting on the truncated ring by substitution
automorphisms: element g carries the image act(g) of the uniformizer s (a
valuation-1 unit series), and the ring automorphism is

    psi(g): f  |->  f(act(g)(s))      (= f.compose(act(g))).

For psi to be a group homomorphism the images must satisfy

    act(h g) = act(g).compose(act(h))

which is what verify_extension checks, along with invariance of the base
uniformizer t(s) and valuation(t) = ramification index.  All extensions here
are totally ramified (e = group order); the coefficient field is fixed
pointwise.
"""

from dataclasses import dataclass

from .errors import ConfigurationError, NotInvariantError, StructuralError
from .groups import FiniteGroup, cyclic
from .series import Laurent, Series


@dataclass(frozen=True)
class LocalExtension:
    field: object
    prec: int
    group: FiniteGroup
    action: tuple                 # element index -> Series image of s
    base_uniformizer: Series      # t(s), invariant, valuation = ram_index
    ram_index: int

    def act(self, g: int) -> Series:
        return self.action[g]

    def apply(self, g: int, x):
        """psi(g) applied to a Series or Laurent value."""
        if isinstance(x, Series):
            return x.compose(self.action[g])
        if isinstance(x, Laurent):
            return x.substitute(self.action[g])
        raise StructuralError("apply expects a Series or Laurent value")

    @property
    def is_trivial(self):
        return self.group.order == 1

    def describe(self):
        return f"extension of degree {self.group.order} over {self.field.describe()}"


def trivial_extension(field, prec) -> LocalExtension:
    s = Series.s(field, prec)
    return LocalExtension(field=field, prec=prec, group=cyclic(1),
                          action=(s,), base_uniformizer=s, ram_index=1)


def make_kummer(field, n: int, prec: int) -> LocalExtension:
    """Cyclic order-n extension, generator acting by s -> zeta*s.

    Requires gcd(n, p) = 1 and a primitive n-th root of unity in the field;
    t = Norm(s) = zeta^(n(n-1)/2) * s^n.
    """
    if n < 1:
        raise ConfigurationError("Kummer degree must be >= 1")
    if n % field.p == 0:
        raise ConfigurationError(f"Kummer degree {n} not coprime to characteristic {field.p}")
    if n == 1:
        return trivial_extension(field, prec)
    zeta = field.root_of_unity(n)
    s = Series.s(field, prec)
    action = tuple(s.scale(field.pow(zeta, j)) for j in range(n))
    t = action[0]
    for j in range(1, n):
        t = t * action[j]
    return LocalExtension(field=field, prec=prec, group=cyclic(n),
                          action=action, base_uniformizer=t, ram_index=n)


def make_artin_schreier(field, prec: int) -> LocalExtension:
    """Cyclic order-p extension, sigma^c acting by s -> s/(1+cs).

    t = Norm(s) = s^p / (1 - s^{p-1}).
    """
    p = field.p
    s = Series.s(field, prec)
    one = Series.one(field, prec)
    action = []
    for c in range(p):
        cs = Series.monomial(field, c % p, 1, prec)
        action.append(s * (one + cs).inverse())
    t = action[0]
    for c in range(1, p):
        t = t * action[c]
    return LocalExtension(field=field, prec=prec, group=cyclic(p),
                          action=tuple(action), base_uniformizer=t, ram_index=p)


def make_explicit(field, prec, group: FiniteGroup, action_images,
                  base_uniformizer) -> LocalExtension:
    """Extension from raw substitution tables; verified at construction."""
    action = tuple(Series.from_coeffs(field, c, prec) if not isinstance(c, Series) else c
                   for c in action_images)
    t = base_uniformizer if isinstance(base_uniformizer, Series) \
        else Series.from_coeffs(field, base_uniformizer, prec)
    ext = LocalExtension(field=field, prec=prec, group=group, action=action,
                         base_uniformizer=t, ram_index=group.order)
    rep = verify_extension(ext)
    if not rep.ok:
        raise ConfigurationError(f"explicit extension invalid: {rep.message}")
    return ext


@dataclass
class ExtensionReport:
    ok: bool
    message: str
    failing_pair: tuple = None
    coefficient_index: int = None


def verify_extension(ext: LocalExtension) -> ExtensionReport:
    """Check the homomorphism law for all pairs, t-invariance, and val(t) = e."""
    g_ = ext.group
    for g in range(g_.order):
        img = ext.action[g]
        if img.coeffs[0] != 0 or img.coeffs[1] == 0:
            return ExtensionReport(False, f"act({g}) is not a valuation-1 substitution",
                                   failing_pair=(g,))
    for h in range(g_.order):
        for g in range(g_.order):
            expect = ext.action[g_.mul(h, g)]
            got = ext.action[g].compose(ext.action[h])
            if expect.coeffs != got.coeffs:
                idx = next(i for i, (a, b) in enumerate(zip(expect.coeffs, got.coeffs))
                           if a != b)
                return ExtensionReport(False,
                                       f"action law fails at pair ({h},{g}), coefficient {idx}",
                                       failing_pair=(h, g), coefficient_index=idx)
    t = ext.base_uniformizer
    for g in range(g_.order):
        moved = t.compose(ext.action[g])
        if moved.coeffs != t.coeffs:
            idx = next(i for i, (a, b) in enumerate(zip(t.coeffs, moved.coeffs)) if a != b)
            return ExtensionReport(False,
                                   f"base uniformizer not invariant under {g}, coefficient {idx}",
                                   failing_pair=(g,), coefficient_index=idx)
    if t.valuation() != ext.ram_index:
        return ExtensionReport(False,
                               f"valuation(t) = {t.valuation()} != ramification index {ext.ram_index}")
    return ExtensionReport(True, "ok")


def norm(ext: LocalExtension, f: Series) -> Series:
    """Product of all Galois conjugates of f."""
    out = None
    for g in range(ext.group.order):
        conj = f.compose(ext.action[g])
        out = conj if out is None else out * conj
    return out


def rewrite_in_base(ext: LocalExtension, f: Series) -> Series:
    """Express an invariant series as a series in t; output precision floor(N/e).

    Greedy from the lowest remaining valuation, which must be divisible by e
    at every step; a non-divisible valuation certifies non-invariance.
    """
    if f.field != ext.field or f.prec != ext.prec:
        raise StructuralError("series incompatible with the extension")
    e = ext.ram_index
    n = ext.prec
    out_prec = max(n // e, 1)
    t = ext.base_uniformizer
    lead = t.coeffs[e] if e < n else 1
    ctx = ext.field.ctx
    remaining = f
    coeffs = {}
    tpows = {0: Series.one(ext.field, n)}
    while True:
        v = remaining.valuation()
        if v is None:
            break
        if v % e != 0:
            raise NotInvariantError(
                f"series is not invariant: lowest remaining valuation {v} "
                f"not divisible by e = {e}", valuation=v)
        m = v // e
        if m not in tpows:
            mm = max(k for k in tpows if k <= m)
            acc = tpows[mm]
            for _ in range(m - mm):
                acc = acc * t
                mm += 1
                tpows[mm] = acc
        c = ctx.mul(remaining.coeffs[v], ctx.inv(ext.field.pow(lead, m)))
        coeffs[m] = c
        remaining = remaining - tpows[m].scale(c)
    return Series(ext.field, out_prec,
                  tuple(coeffs.get(m, 0) for m in range(out_prec)))


def evaluate_in_base(ext: LocalExtension, h: Series) -> Series:
    """h(t(s)) as a series in s at the extension precision."""
    acc = Series.zero(ext.field, ext.prec)
    tpow = Series.one(ext.field, ext.prec)
    for m in range(h.prec):
        if h.coeffs[m]:
            acc = acc + tpow.scale(h.coeffs[m])
        tpow = tpow * ext.base_uniformizer
    return acc


@dataclass(frozen=True)
class ExtensionEmbedding:
    """P(x) inside P'(x): the small uniformizer expressed in the big one.

    s_image has valuation e_big/e_small; quotient is the surjection
    Gal(big) ->> Gal(small); the embedding of rings is f -> f(s_image).
    """

    small: LocalExtension
    big: LocalExtension
    s_image: Series
    quotient: tuple      # big element -> small element

    def expand(self, f: Series) -> Series:
        """Re-expand a small-ring series in the big ring (exact to big precision)."""
        d = self.s_image.valuation()
        out_prec = min(self.big.prec, f.prec * d)
        padded = Series(self.big.field, out_prec,
                        (f.coeffs + (0,) * out_prec)[:out_prec])
        return padded.compose(self.s_image.truncate(out_prec))

    def expand_laurent(self, x: Laurent) -> Laurent:
        d = self.s_image.valuation()
        p_in = len(x.coeffs)
        out_prec = min(self.big.prec, p_in * d)
        unit = Series(self.big.field, out_prec,
                      (x.coeffs + (0,) * out_prec)[:out_prec])
        mapped = Laurent(self.big.field, 0,
                         unit.compose(self.s_image.truncate(out_prec)).coeffs)
        if x.val_floor == 0:
            return mapped
        return Laurent.from_series(self.s_image).pow(x.val_floor) * mapped


def make_embedding(small: LocalExtension, big: LocalExtension, s_image: Series,
                   quotient) -> ExtensionEmbedding:
    """Validated embedding: valuation, quotient surjectivity/homomorphism,
    intertwining of the actions, and t-compatibility."""
    if small.field != big.field:
        raise ConfigurationError("embedding requires a common coefficient field")
    quotient = tuple(quotient)
    eb, es = big.ram_index, small.ram_index
    if eb % es != 0:
        raise ConfigurationError("ramification indices are incompatible")
    d = eb // es
    if s_image.valuation() != d:
        raise ConfigurationError(
            f"s_image has valuation {s_image.valuation()}, expected e_big/e_small = {d}")
    if len(quotient) != big.group.order or set(quotient) != set(range(small.group.order)):
        raise ConfigurationError("group quotient is not surjective onto the small group")
    for a in range(big.group.order):
        for b in range(big.group.order):
            if quotient[big.group.mul(a, b)] != small.group.mul(quotient[a], quotient[b]):
                raise ConfigurationError(f"group quotient not a homomorphism at ({a},{b})")
    emb = ExtensionEmbedding(small=small, big=big, s_image=s_image, quotient=quotient)
    for g in range(big.group.order):
        lhs = emb.expand(small.action[quotient[g]])
        rhs = s_image.compose(big.action[g]).truncate(lhs.prec)
        if lhs.coeffs != rhs.coeffs:
            raise ConfigurationError(
                f"embedding does not intertwine the actions at element {g}")
    t_push = emb.expand(small.base_uniformizer)
    if t_push.coeffs != big.base_uniformizer.truncate(t_push.prec).coeffs:
        raise ConfigurationError("base uniformizers incompatible through the embedding")
    return emb


def kummer_tower(field, n: int, m: int, prec: int) -> ExtensionEmbedding:
    """Built-in Kummer(n) inside Kummer(m) for n | m: s_small -> c * s_big^(m/n).

    The scalar c corrects the Norm normalization: c = 1 when n and m have the
    same parity of evenness, and c = -1 for odd n inside even m.
    """
    if m % n != 0:
        raise ConfigurationError("kummer_tower requires n | m")
    small = make_kummer(field, n, prec)
    big = make_kummer(field, m, prec)
    d = m // n
    c = 1 if (n % 2 == 0) == (m % 2 == 0) else field.ctx.neg(1)
    s_image = Series.monomial(field, c, d, prec)
    quotient = tuple(j % n for j in range(m))
    return make_embedding(small, big, s_image, quotient)


def identity_embedding(ext: LocalExtension) -> ExtensionEmbedding:
    return make_embedding(ext, ext, Series.s(ext.field, ext.prec),
                          tuple(range(ext.group.order)))


def trivial_into(big: LocalExtension) -> ExtensionEmbedding:
    """The trivial extension inside big: s_small -> t_big (degree-e embedding)."""
    small = trivial_extension(big.field, big.prec)
    quotient = (0,) * big.group.order
    return make_embedding(small, big, big.base_uniformizer, quotient)
