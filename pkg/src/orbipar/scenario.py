"""Scenario files: versioned JSON in, deterministic reports out.

Coefficient arrays are little-endian in the exponent (index i is the
coefficient of s^i); Laurent blocks carry an explicit val_floor; field
elements are integer encodings (base-p digit vectors).  Commands run in
order and may reference results stored by earlier commands; reports are
canonical JSON (sorted keys, no whitespace, no wall-clock data), so fixed
(scenario, seed) pairs reproduce byte-identical reports.
"""

import json
from dataclasses import dataclass, field as dc_field

from .equivariant import Cocycle, is_induced, make_connectors, trivialize, verify_cocycle
from .errors import OrbiparError, ScenarioError
from .fields import make_field
from .groups import group_from_config
from .linalg import Matrix
from .local_galois import (identity_embedding, kummer_tower, make_artin_schreier,
                           make_explicit, make_kummer, trivial_extension,
                           verify_extension)
from .parabolic import (CoverScene, ParabolicDatum, ParabolicPoint, ScenePoint,
                        build_spec_from_scene, functor_T, random_datum,
                        roundtrip_check, multipoint_map, sign_twist_datum,
                        totally_ramified_scene, trivial_datum, validate_parabolic)
from .prng import SplitMix64
from .pvect import (RefinementMap, ScenePullback, adjunction_check, dual,
                    dual_pairing_check, equiv_check, extract_weights,
                    pullback_refine, pullback_T_compat, pushforward_local, tensor)
from .series import Laurent, Series

SCENARIO_SCHEMA = "orbipar-scenario/1"
REPORT_SCHEMA = "orbipar-report/1"


# ---------------------------------------------------------------------------
# serialization helpers


def series_to_json(s: Series):
    return list(s.coeffs)

def laurent_to_json(x: Laurent):
    return {"val_floor": x.val_floor, "coeffs": list(x.coeffs)}

def matrix_to_json(m: Matrix):
    if m.kind is Laurent:
        return [[laurent_to_json(e) for e in row] for row in m.entries]
    return [[series_to_json(e) for e in row] for row in m.entries]

def series_from_json(field, prec, data):
    return Series.from_coeffs(field, data, prec)

def laurent_from_json(field, prec, data):
    if isinstance(data, dict):
        return Laurent.exact(field, int(data["val_floor"]), data["coeffs"], prec)
    return Laurent.exact(field, 0, data, prec)

def matrix_from_json(field, prec, data, laurent=False):
    if laurent:
        return Matrix([[laurent_from_json(field, prec, e) for e in row] for row in data])
    return Matrix([[series_from_json(field, prec, e) for e in row] for row in data])

def extension_to_json(ext):
    """Scenario-format form of an extension: group table, per-element action
    images, base uniformizer coefficients."""
    return {"kind": "explicit",
            "group": {"kind": "table", "table": [list(r) for r in ext.group.table]},
            "action": [list(a.coeffs) for a in ext.action],
            "t": list(ext.base_uniformizer.coeffs)}


# ---------------------------------------------------------------------------
# scenario loading


@dataclass
class Scenario:
    raw: dict
    field: object
    precision: int
    seed: int
    budgets: dict
    extensions: dict
    embeddings: dict
    scenes: dict
    data: dict
    commands: list
    quotients: dict = dc_field(default_factory=dict)


def load_scenario(doc: dict) -> Scenario:
    if doc.get("schema") != SCENARIO_SCHEMA:
        raise ScenarioError(f"unsupported schema {doc.get('schema')!r}; "
                            f"expected {SCENARIO_SCHEMA!r}")
    if "seed" not in doc:
        raise ScenarioError("scenario files must carry an explicit seed")
    fcfg = doc.get("field", {})
    field = make_field(int(fcfg.get("p", 5)), int(fcfg.get("k_deg", 1)),
                       tuple(fcfg["modulus"]) if "modulus" in fcfg else None)
    prec = int(doc.get("precision", 16))
    seed = int(doc["seed"])
    budgets = {"residue_cap": 10 ** 6, "random_tries": 300}
    budgets.update(doc.get("budgets", {}))

    exts = {}
    for name, cfg in doc.get("extensions", {}).items():
        kind = cfg.get("kind")
        if kind == "kummer":
            exts[name] = make_kummer(field, int(cfg["n"]), prec)
        elif kind == "artin_schreier":
            exts[name] = make_artin_schreier(field, prec)
        elif kind == "trivial":
            exts[name] = trivial_extension(field, prec)
        elif kind == "explicit":
            group = group_from_config(cfg["group"])
            action = [Series.from_coeffs(field, c, prec) for c in cfg["action"]]
            t = Series.from_coeffs(field, cfg["t"], prec)
            exts[name] = make_explicit(field, prec, group, action, t)
        else:
            raise ScenarioError(f"extension {name!r}: unknown kind {kind!r}")

    embs = {}
    for name, cfg in doc.get("embeddings", {}).items():
        kind = cfg.get("kind")
        if kind == "kummer_tower":
            embs[name] = kummer_tower(field, int(cfg["n"]), int(cfg["m"]), prec)
        elif kind == "identity":
            embs[name] = identity_embedding(exts[cfg["ext"]])
        elif kind == "explicit":
            from .local_galois import make_embedding
            embs[name] = make_embedding(
                exts[cfg["small"]], exts[cfg["big"]],
                Series.from_coeffs(field, cfg["s_image"], prec),
                tuple(cfg["quotient"]))
        else:
            raise ScenarioError(f"embedding {name!r}: unknown kind {kind!r}")

    scenes = {}
    for name, cfg in doc.get("scenes", {}).items():
        group = group_from_config(cfg["group"])
        pts = []
        for p in cfg["points"]:
            ext = exts[p["ext"]]
            if p.get("totally_ramified"):
                iso = tuple(range(ext.group.order))
                transversal = (0,)
            else:
                iso = tuple(p["iso"])
                transversal = tuple(p["transversal"])
            pts.append(ScenePoint(label=p["label"], ext=ext, iso=iso,
                                  transversal=transversal))
        scenes[name] = CoverScene(group=group, points=tuple(pts))

    data = {}
    master = SplitMix64(seed)
    for name in sorted(doc.get("data", {})):
        cfg = doc["data"][name]
        kind = cfg.get("kind")
        if kind == "trivial":
            data[name] = trivial_datum(int(cfg["rank"]),
                                       [(p["label"], exts[p["ext"]])
                                        for p in cfg["points"]])
        elif kind == "sign_twist":
            data[name] = sign_twist_datum(field, prec, label=cfg.get("label", "p"))
        elif kind == "random":
            rng = SplitMix64(int(cfg.get("seed", master.next_u64())))
            pts = []
            for p in cfg["points"]:
                dd = random_datum(exts[p["ext"]], int(cfg["rank"]), rng,
                                  label=p["label"],
                                  character_exponent=int(p.get("character_exponent", 0)))
                pts.append(dd.points[0])
            data[name] = ParabolicDatum(rank=int(cfg["rank"]), points=tuple(pts))
        elif kind == "explicit":
            rank = int(cfg["rank"])
            pts = []
            for p in cfg["points"]:
                ext = exts[p["ext"]]
                mats = tuple(matrix_from_json(field, prec, m) for m in p["cocycle"])
                psi = Cocycle(ext, rank, mats)
                mu = matrix_from_json(field, prec, p["mu"], laurent=True)
                pts.append(ParabolicPoint(label=p["label"], ext=ext, psi=psi, mu=mu))
            data[name] = ParabolicDatum(rank=rank, points=tuple(pts))
        else:
            raise ScenarioError(f"datum {name!r}: unknown kind {kind!r}")

    quotients = {name: tuple(q) for name, q in doc.get("group_quotients", {}).items()}

    return Scenario(raw=doc, field=field, precision=prec, seed=seed, budgets=budgets,
                    extensions=exts, embeddings=embs, scenes=scenes, data=data,
                    commands=list(doc.get("commands", [])), quotients=quotients)


# ---------------------------------------------------------------------------
# command execution


def _refinement_from(sc, cfg):
    embeddings = {label: sc.embeddings[name] for label, name in cfg.items()}
    return RefinementMap(embeddings=embeddings)


def _expect_match(expect, result):
    for key, want in expect.items():
        got = result.get(key)
        if got != want:
            return False, f"expected {key}={want!r}, got {got!r}"
    return True, ""


def run_command(sc: Scenario, cmd: dict, rng: SplitMix64):
    """Returns (status, detail, certificates)."""
    op = cmd.get("op")
    expect = cmd.get("expect", {})

    def finish(result, default_pass=True, certificates=None):
        if expect:
            ok, msg = _expect_match(expect, result)
            return ("pass" if ok else "fail",
                    result if ok else {**result, "mismatch": msg}, certificates)
        return ("pass" if default_pass else "fail", result, certificates)

    if op == "verify_extension":
        rep = verify_extension(sc.extensions[cmd["ext"]])
        return finish({"ok": rep.ok, "message": rep.message}, default_pass=rep.ok)

    if op == "verify_cocycle":
        d = sc.data[cmd["datum"]]
        results = {}
        ok = True
        for pt in d.points:
            rep = verify_cocycle(pt.psi)
            results[pt.label] = {"ok": rep.ok, "message": rep.message,
                                 "failing_pair": rep.failing_pair}
            ok = ok and rep.ok
        return finish({"ok": ok, "points": results}, default_pass=ok)

    if op == "validate_parabolic":
        rep = validate_parabolic(sc.data[cmd["datum"]])
        return finish({"ok": rep.ok, "message": rep.message}, default_pass=rep.ok)

    if op == "invariants":
        from .equivariant import invariants as inv_op
        d = sc.data[cmd["datum"]]
        pt = d.point(cmd.get("point", d.points[0].label))
        res = inv_op(pt.psi)
        certs = {"generators": [[series_to_json(s) for s in g] for g in res.generators],
                 "natural": matrix_to_json(res.natural)}
        return finish({"rank": len(res.generators), "base_prec": res.base_prec,
                       "fixed_dim": res.fixed_dim}, certificates=certs)

    if op == "is_induced":
        d = sc.data[cmd["datum"]]
        pt = d.point(cmd.get("point", d.points[0].label))
        rep = is_induced(pt.psi)
        return finish({"induced": rep.induced, "profile": rep.profile})

    if op == "trivialize":
        d = sc.data[cmd["datum"]]
        pt = d.point(cmd.get("point", d.points[0].label))
        res = trivialize(pt.psi, budget=sc.budgets["residue_cap"], rng=rng.fork())
        certs = {"b": matrix_to_json(res.b)} if res.b is not None else {}
        result = {"found": res.found, "stage": res.stage, "proven": res.proven,
                  "detail": res.detail}
        status = "pass" if res.found else ("fail" if res.found is False else "inconclusive")
        if expect:
            ok, msg = _expect_match(expect, result)
            return ("pass" if ok else "fail",
                    result if ok else {**result, "mismatch": msg}, certs)
        return (status, result, certs)

    if op == "assemble":
        d = sc.data[cmd["datum"]]
        scene = sc.scenes[cmd["scene"]]
        b = functor_T(d, scene)
        sizes = {pt.label: pt.module.spec.size for pt in b.points}
        return finish({"ok": True, "components": sizes})

    if op == "connector_independence":
        from .equivariant import assemble_product, independence_intertwiner
        d = sc.data[cmd["datum"]]
        scene = sc.scenes[cmd["scene"]]
        label = cmd.get("point", d.points[0].label)
        sp = scene.point(label)
        perms = sp.perms(scene.group)
        seeds1 = cmd.get("seeds1") or sp.default_seeds(scene.group)
        seeds2 = cmd["seeds2"]
        conn1 = make_connectors(scene.group, perms, list(seeds1))
        conn2 = make_connectors(scene.group, perms, list(seeds2))
        psi = d.point(label).psi
        m1 = assemble_product(build_spec_from_scene(sp, scene.group, psi,
                                                    connectors=conn1))
        m2 = assemble_product(build_spec_from_scene(sp, scene.group, psi,
                                                    connectors=conn2))
        tau = independence_intertwiner(m1, m2)
        certs = {"tau": [matrix_to_json(b_) for b_ in tau.blocks]}
        return finish({"ok": True, "components": len(tau.blocks)}, certificates=certs)

    if op == "roundtrip":
        d = sc.data[cmd["datum"]]
        scene = sc.scenes[cmd["scene"]]
        rep = roundtrip_check(d, scene)
        certs = {}
        if rep.sigmas:
            certs["sigmas"] = {lb: matrix_to_json(m) for lb, m in rep.sigmas.items()}
        return finish({"ok": rep.ok, "message": rep.message,
                       "per_point": rep.per_point}, default_pass=rep.ok,
                      certificates=certs)

    if op == "multipoint_roundtrip":
        d = sc.data[cmd["datum"]]
        scene = sc.scenes[cmd["scene"]]
        rep = multipoint_map(d, scene)
        return finish({"ok": rep.ok, "per_point": rep.per_point}, default_pass=rep.ok)

    if op == "random_roundtrips":
        scene = sc.scenes[cmd["scene"]]
        count = int(cmd.get("count", 20))
        max_rank = int(cmd.get("rank", 2))
        exps = cmd.get("character_exponents", [0])
        label = cmd.get("point", scene.points[0].label)
        sp = scene.point(label)
        sub = SplitMix64(int(cmd.get("seed", sc.seed)))
        failures = []
        for i in range(count):
            rank = 1 + sub.randrange(max_rank)
            exp = exps[sub.randrange(len(exps))]
            d = random_datum(sp.ext, rank, sub, label=label, character_exponent=exp)
            rep = roundtrip_check(d, CoverScene(group=scene.group, points=(sp,)))
            if not rep.ok:
                failures.append({"index": i, "rank": rank, "message": rep.message})
        return finish({"ok": not failures, "count": count, "failures": failures},
                      default_pass=not failures)

    if op == "pullback_refine":
        d = sc.data[cmd["datum"]]
        ref = _refinement_from(sc, cmd["refinement"])
        out = pullback_refine(d, ref)
        if "store_as" in cmd:
            sc.data[cmd["store_as"]] = out
        return finish({"ok": True, "rank": out.rank,
                       "group_orders": {p.label: p.ext.group.order for p in out.points}})

    if op == "equiv":
        d1, d2 = sc.data[cmd["datum1"]], sc.data[cmd["datum2"]]
        ref1 = _refinement_from(sc, cmd["refinement1"])
        ref2 = _refinement_from(sc, cmd["refinement2"])
        res = equiv_check(d1, d2, ref1, ref2, rng=rng.fork(),
                          residue_cap=sc.budgets["residue_cap"],
                          random_tries=sc.budgets["random_tries"])
        result = {"status": res.status, "proven": res.proven, "detail": res.detail}
        certs = {}
        if res.g is not None:
            certs = {"g": matrix_to_json(res.g),
                     "sigmas": {lb: matrix_to_json(m) for lb, m in res.sigmas.items()}}
        if expect:
            ok, msg = _expect_match(expect, result)
            return ("pass" if ok else "fail",
                    result if ok else {**result, "mismatch": msg}, certs)
        status = {"isomorphic": "pass", "distinct": "fail",
                  "inconclusive": "inconclusive"}[res.status]
        return (status, result, certs)

    if op == "tensor":
        out = tensor(sc.data[cmd["datum1"]], sc.data[cmd["datum2"]])
        if "store_as" in cmd:
            sc.data[cmd["store_as"]] = out
        return finish({"ok": True, "rank": out.rank})

    if op == "dual":
        out = dual(sc.data[cmd["datum"]])
        if "store_as" in cmd:
            sc.data[cmd["store_as"]] = out
        return finish({"ok": True, "rank": out.rank})

    if op == "dual_involution":
        d = sc.data[cmd["datum"]]
        dd = dual(dual(d))
        same = all(
            all(dd.point(p.label).psi.mats[g].agrees_with(p.psi.mats[g])
                for g in range(p.ext.group.order))
            and dd.point(p.label).mu.first_mismatch(p.mu) is None
            for p in d.points)
        return finish({"ok": same}, default_pass=same)

    if op == "dual_pairing":
        d = sc.data[cmd["datum"]]
        rep = dual_pairing_check(d, rng=rng.fork())
        return finish({"ok": rep.ok, "message": rep.message,
                       "iso_status": rep.iso.status}, default_pass=rep.ok)

    if op == "pushforward":
        d = sc.data[cmd["datum"]]
        scene = sc.scenes[cmd["scene"]]
        b = functor_T(d, scene)
        pushed = pushforward_local(b, label=cmd.get("point"))
        inv = pushed.invariants()
        certs = {"rep": {str(g): matrix_to_json(pushed.formal_rep[g])
                         for g in range(pushed.group.order)}}
        return finish({"rank_out": pushed.rank_out, "invariants_rank": len(inv)},
                      certificates=certs)

    if op == "adjunction":
        d = sc.data[cmd["datum"]]
        pt = d.point(cmd.get("point", d.points[0].label))
        rep = adjunction_check(int(cmd.get("source_rank", 1)), pt)
        return finish({"ok": rep.ok, "lhs_rank": rep.lhs_rank,
                       "rhs_rank": rep.rhs_rank,
                       "projection_ok": rep.projection_ok},
                      default_pass=rep.ok)

    if op == "weights":
        d = sc.data[cmd["datum"]]
        try:
            res = extract_weights(d, label=cmd.get("point"))
        except OrbiparError as exc:
            result = {"error": str(exc)}
            if expect:
                ok, msg = _expect_match(expect, result)
                return ("pass" if ok else "fail",
                        result if ok else {**result, "mismatch": msg}, None)
            return ("error", result, None)
        result = {"weights": [[a, n, mult] for a, n, mult in res.pairs],
                  "generator": res.generator}
        return finish(result)

    if op == "tower_compat":
        d = sc.data[cmd["datum"]]
        emb = sc.embeddings[cmd["embedding"]]
        label = d.points[0].label
        scene_small = totally_ramified_scene(emb.small, label=label)
        scene_big = totally_ramified_scene(emb.big, label=label)
        spb = ScenePullback(embeddings={label: emb}, scene_small=scene_small,
                            scene_big=scene_big, group_quotient=emb.quotient)
        ref = RefinementMap(embeddings={label: emb})
        rep = pullback_T_compat(d, spb, ref)
        return finish({"ok": rep.ok, "message": rep.message}, default_pass=rep.ok)

    import difflib

    known = ["verify_extension", "verify_cocycle", "validate_parabolic", "invariants",
             "is_induced", "trivialize", "assemble", "connector_independence",
             "roundtrip", "multipoint_roundtrip", "random_roundtrips",
             "pullback_refine", "equiv", "tensor", "dual", "dual_involution",
             "dual_pairing", "pushforward", "adjunction", "weights", "tower_compat"]
    close = difflib.get_close_matches(str(op), known, n=3)
    hint = f"; did you mean {', '.join(close)}?" if close else ""
    raise ScenarioError(f"unknown command op {op!r}{hint} (known: {', '.join(known)})")


def run_scenario(sc: Scenario) -> dict:
    rng = SplitMix64(sc.seed)
    results = []
    counts = {"pass": 0, "fail": 0, "inconclusive": 0, "error": 0}
    for i, cmd in enumerate(sc.commands):
        try:
            status, detail, certs = run_command(sc, cmd, rng)
        except OrbiparError as exc:
            status, detail, certs = "error", {"error": str(exc)}, None
        entry = {"index": i, "op": cmd.get("op"), "status": status, "detail": detail}
        if certs:
            entry["certificates"] = certs
        results.append(entry)
        counts[status] += 1
    return {"schema": REPORT_SCHEMA, "seed": sc.seed,
            "results": results, "summary": counts}


def canonical_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"


def exit_code(report: dict) -> int:
    c = report["summary"]
    if c["error"]:
        return 2
    if c["fail"]:
        return 1
    if c["inconclusive"]:
        return 3
    return 0
