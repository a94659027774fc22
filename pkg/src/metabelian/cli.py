"""Command-line entry point: ``metabelian <group> <command> ...``.

Exit status is 0 on success, 1 when a verification fails (the report then
carries a machine-readable ``diff``), and 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import itertools
import json
import os
import random
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from . import fman, identities as ids, mtp, oracle, reference
from .terms import (
    OPS,
    Leaf,
    LinComb,
    Node,
    TermSyntaxError,
    format_lincomb,
    format_scalar,
    format_term,
    parse_lincomb,
    parse_term,
)

THREADS_ENV = "METABELIAN_THREADS"
FORMATS = ("json", "tsv", "text")

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    group: str
    command: str
    format: str = "json"
    out: Optional[str] = None
    threads: int = 1
    variety: Optional[str] = None
    degree: Optional[int] = None
    gens: Optional[int] = None
    huge: bool = False
    args: Dict[str, Any] = field(default_factory=dict)


@dataclass
class Report:
    command: str
    ok: bool
    result: Any
    text: List[str]
    header: Optional[List[str]] = None
    rows: Optional[List[List[Any]]] = None
    diff: Optional[Any] = None
    bare_json: bool = False  # emit ``result`` alone (normalisation output)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            if self.bare_json:
                payload = self.result
            else:
                payload = {"command": self.command, "ok": self.ok, "result": self.result}
                if self.diff is not None:
                    payload["diff"] = self.diff
            return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        if fmt == "tsv":
            lines = []
            if self.header:
                lines.append("\t".join(self.header))
            for r in self.rows or []:
                lines.append("\t".join(str(x) for x in r))
            return "\n".join(lines) + "\n"
        return "\n".join(self.text) + "\n"


def _entries(lc: LinComb, fmt=format_term) -> List[Dict[str, str]]:
    return [{"monomial": fmt(k), "coefficient": format_scalar(c)} for k, c in lc.sorted_items()]


def _lincomb_report(command: str, lc: LinComb) -> Report:
    entries = _entries(lc)
    return Report(
        command,
        True,
        entries,
        [format_lincomb(lc)],
        ["monomial", "coefficient"],
        [[e["monomial"], e["coefficient"]] for e in entries],
        bare_json=True,
    )


def _read_expression(path: str) -> LinComb:
    try:
        with open(path, encoding="utf-8") as fh:
            text = " ".join(fh.read().split())
    except OSError as e:
        raise UsageError(str(e))
    if "*" in text:
        return parse_lincomb(text)
    return LinComb.single(parse_term(text))


# --------------------------------------------------------------------------
# identities


def _identity_entry(ident: ids.Identity, kind: str) -> Dict[str, Any]:
    return {
        "name": ident.name,
        "kind": kind,
        "arity": ident.arity,
        "relation": format_lincomb(ident.relation),
        "description": ident.description,
        "presets": [p for p, names in ids.PRESETS.items() if ident.name in names],
    }


def cmd_identities_list(cfg: RunConfig) -> Report:
    entries = [_identity_entry(i, "axiom") for i in ids.CATALOG.values()]
    entries += [_identity_entry(i, "derived") for i in ids.DERIVED.values()]
    text = [f"{e['name']:<18} {e['kind']:<8} {e['relation']} = 0" for e in entries]
    rows = [[e["name"], e["kind"], e["arity"], e["relation"]] for e in entries]
    return Report("identities list", True, entries, text, ["name", "kind", "arity", "relation"], rows)


def cmd_identities_show(cfg: RunConfig) -> Report:
    name = cfg.args["name"]
    try:
        ident = ids.get_identity(name)
    except KeyError as e:
        raise UsageError(str(e.args[0]))
    kind = "axiom" if name in ids.CATALOG else "derived"
    e = _identity_entry(ident, kind)
    text = [f"{ident.name} ({kind}, arity {ident.arity}): {ident.description}"]
    text += [f"  {format_scalar(c)} * {format_term(t)}" for t, c in ident.relation.sorted_items()]
    rows = [[format_term(t), format_scalar(c)] for t, c in ident.relation.sorted_items()]
    return Report("identities show", True, e, text, ["monomial", "coefficient"], rows)


CLAIMED = {
    "MTP": ("lie-tail-commute", "com-tail-commute", "head-tail-cycle", "com3-exchange"),
    "MFM": ("FMAN-MET", "lie-com-exchange", "com3-com-exchange"),
}


def cmd_identities_verify(cfg: RunConfig) -> Report:
    variety = cfg.variety
    method = cfg.args.get("method") or "operadic"
    results = []
    for name in CLAIMED[variety]:
        ok = ids.verify_derived_identity(variety, name, method=method)
        results.append({"identity": name, "holds": ok})
    bad = [r["identity"] for r in results if not r["holds"]]
    text = [f"{r['identity']:<18} {'holds' if r['holds'] else 'FAILS'}" for r in results]
    return Report(
        "identities verify", not bad, results, text, ["identity", "holds"],
        [[r["identity"], r["holds"]] for r in results], diff={"failing": bad} if bad else None,
    )


# --------------------------------------------------------------------------
# mtp


def _mtp_entry(m: mtp.MtpBasisMonomial) -> Dict[str, Any]:
    return {"shape": m.shape, "head": list(m.head), "tail": list(m.tail), "term": format_term(mtp.to_term(m))}


def cmd_mtp_normalize(cfg: RunConfig) -> Report:
    return _lincomb_report("mtp normalize", mtp.normalize_mtp(_read_expression(cfg.args["file"])))


def cmd_mtp_basis(cfg: RunConfig) -> Report:
    n, k = cfg.degree, cfg.gens
    multilinear = cfg.args.get("multilinear", False)
    if k is None:
        k = n if multilinear else None
    if k is None:
        raise UsageError("mtp basis needs --gens (or --multilinear)")
    basis = mtp.enumerate_mtp_basis(k, n, multilinear=multilinear)
    entries = [_mtp_entry(m) for m in basis]
    text = [e["term"] for e in entries] + [f"# {len(entries)} monomials"]
    rows = [[e["shape"], ",".join(map(str, e["head"])), ",".join(map(str, e["tail"])), e["term"]] for e in entries]
    return Report("mtp basis", True, {"degree": n, "gens": k, "multilinear": multilinear,
                                      "count": len(entries), "monomials": entries},
                  text, ["shape", "head", "tail", "term"], rows)


def _random_term(rng: random.Random, deg: int, gens: int):
    if deg == 1:
        return Leaf(rng.randint(1, gens))
    k = rng.randint(1, deg - 1)
    return Node(rng.choice(OPS), _random_term(rng, k, gens), _random_term(rng, deg - k, gens))


def annihilation_failures(preset: str, normalize, samples: int, max_deg: int, seed: int, gens: int = 4):
    """Random placeholder assignments of total degree <= ``max_deg``; returns the failing cases."""
    rng = random.Random(seed)
    failures = []
    for trial in range(samples):
        for ident in ids.preset_identities(preset):
            k = ident.arity
            if k > max_deg:
                continue
            degs = [1] * k
            for _ in range(rng.randint(k, max_deg) - k):
                degs[rng.randrange(k)] += 1
            sigma = {p: _random_term(rng, d, gens) for p, d in zip(ident.placeholders, degs)}
            value = normalize(ids.substitute(ident, sigma))
            if value:
                failures.append({"identity": ident.name, "trial": trial,
                                 "assignment": {"abcde"[-p - 1]: format_term(t) for p, t in sigma.items()},
                                 "value": format_lincomb(value)})
    return failures


def algebra_identity_failures(max_deg: int) -> Dict[str, Any]:
    """Evaluate each identity in the table algebra on multilinear basis substitutions."""
    checked = 0
    failures = []
    basis_cache: Dict[int, List[mtp.MtpBasisMonomial]] = {}

    def basis_on(labels):
        n = len(labels)
        if n not in basis_cache:
            basis_cache[n] = mtp.enumerate_mtp_basis(n, n, multilinear=True)
        relabel = dict(zip(range(1, n + 1), labels))
        out = []
        for m in basis_cache[n]:
            head = tuple(relabel[i] for i in m.head)
            tail = tuple(relabel[i] for i in m.tail)
            # relabelled monomials need not be canonical, so bring them back to the basis
            out.append(mtp.normalize_monomials(mtp.to_term(mtp.MtpBasisMonomial(m.shape, head, tail))))
        return out

    def evaluate(t, env):
        if isinstance(t, Leaf):
            return env[t.index]
        return mtp.product(evaluate(t.left, env), evaluate(t.right, env), t.op)

    for ident in ids.preset_identities("MTP"):
        k = ident.arity
        for n in range(k, max_deg + 1):
            for blocks in ids.ordered_set_partitions(tuple(range(1, n + 1)), k):
                if any(list(b) != sorted(b) for b in blocks):
                    continue
                choices = [basis_on(b) for b in blocks]
                for combo in itertools.product(*choices):
                    env = dict(zip(ident.placeholders, combo))
                    total = LinComb()
                    for term, c in ident.relation.items():
                        total = total + c * evaluate(term, env)
                    checked += 1
                    if total:
                        failures.append({"identity": ident.name,
                                         "assignment": [format_lincomb(v, str) for v in combo]})
    return {"checked": checked, "failures": failures}


def cmd_mtp_verify_identities(cfg: RunConfig) -> Report:
    d = cfg.args["max_deg"]
    samples = cfg.args.get("samples", 1000)
    seed = cfg.args.get("seed", 0)
    fails = annihilation_failures("MTP", mtp.normalize_mtp, samples, d, seed)
    alg = algebra_identity_failures(min(d, 6)) if cfg.args.get("algebra", True) else {"checked": 0, "failures": []}
    ok = not fails and not alg["failures"]
    result = {"max_deg": d, "samples": samples, "seed": seed, "normalize_failures": len(fails),
              "algebra_checked": alg["checked"], "algebra_failures": len(alg["failures"])}
    text = [f"normalize: {samples} random assignments per identity, {len(fails)} failures",
            f"table algebra: {alg['checked']} substitutions, {len(alg['failures'])} failures"]
    rows = [[k, v] for k, v in result.items()]
    diff = {"normalize": fails[:20], "algebra": alg["failures"][:20]} if not ok else None
    return Report("mtp verify-identities", ok, result, text, ["key", "value"], rows, diff=diff)


def cmd_mtp_table(cfg: RunConfig) -> Report:
    k = cfg.gens or 6
    lo, hi = cfg.args.get("min_deg", 4), cfg.args.get("max_deg", 6)
    rep = mtp.check_table(k, range(lo, hi + 1))
    result = {
        "gens": k,
        "degrees": [lo, hi],
        "checked": rep.checked,
        "discrepancies": len(rep.discrepancies),
        "suspect_case": mtp.SUSPECT_CASE,
        "suspect_cases": rep.suspect_cases,
        "suspect_verbatim_mismatches": rep.suspect_verbatim_mismatches,
        "suspect_with_generator_restored_mismatches": rep.suspect_repaired_mismatches,
    }
    text = [
        f"checked {rep.checked} products of basis monomials with generators (degrees {lo}-{hi}, x1..x{k})",
        f"table vs normalize discrepancies: {len(rep.discrepancies)}",
        f"com-product of a Lie monomial with a non-minimal generator: {rep.suspect_cases} cases, "
        f"verbatim formula wrong in {rep.suspect_verbatim_mismatches}, "
        f"with x_t restored in every tail wrong in {rep.suspect_repaired_mismatches}; "
        "this case is computed by normalization",
    ]
    diff = None
    if rep.discrepancies:
        diff = [{"monomial": format_term(mtp.to_term(m)), "generator": t, "op": op,
                 "table": format_lincomb(g, str), "normalize": format_lincomb(e, str)}
                for m, t, op, g, e in rep.discrepancies[:50]]
    return Report("mtp table", rep.ok, result, text, ["key", "value"], [[a, b] for a, b in result.items()], diff=diff)


# --------------------------------------------------------------------------
# fman


def _seq_entry(s: fman.FmanSequence) -> Dict[str, Any]:
    return {"vertices": [[c, i] for c, i in s.vertices], "last": s.last, "sequence": str(s),
            "term": format_term(fman.seq_to_term(s))}


def cmd_fman_basis(cfg: RunConfig) -> Report:
    n = cfg.degree
    multilinear = cfg.gens is None
    basis = fman.enumerate_fman_basis(n, multilinear=multilinear, gens=cfg.gens, threads=cfg.threads)
    entries = [_seq_entry(s) for s in basis]
    ok = True
    diff = None
    if multilinear and n in reference.FMAN_DIMS and len(basis) != reference.FMAN_DIMS[n]:
        ok = False
        diff = {"degree": n, "expected": reference.FMAN_DIMS[n], "found": len(basis)}
    text = [f"{e['sequence']}  {e['term']}" for e in entries] + [f"# {len(entries)} sequences"]
    rows = [[e["sequence"], e["term"]] for e in entries]
    return Report("fman basis", ok, {"degree": n, "multilinear": multilinear, "gens": cfg.gens,
                                     "count": len(entries), "sequences": entries},
                  text, ["sequence", "term"], rows, diff=diff)


def _pattern_code(colours) -> str:
    return "".join("b" if c == fman.BLACK else "w" for c in colours)


def cmd_fman_census(cfg: RunConfig) -> Report:
    n = cfg.degree
    try:
        rows = fman.per_tree_census(n)
    except ValueError as e:
        raise UsageError(str(e))
    counts = tuple(r.count for r in rows)
    reductions = {_pattern_code(r.colours): r.reduced for r in rows if r.reduced}
    total = sum(r.count - r.reduced for r in rows)
    ok = counts == reference.CENSUS[n] and reductions == reference.CENSUS_REDUCTIONS[n]
    result = {"degree": n, "total": total,
              "patterns": [{"pattern": _pattern_code(r.colours), "glyphs": r.glyphs, "count": r.count,
                            "reduced": r.reduced} for r in rows]}
    text = [f"{r.glyphs:<14} {r.count:>5}" + (f"  (-{r.reduced} by condition 7)" if r.reduced else "") for r in rows]
    text.append(f"total {total}")
    diff = None if ok else {"expected_counts": list(reference.CENSUS[n]), "found_counts": list(counts),
                            "expected_reductions": reference.CENSUS_REDUCTIONS[n], "found_reductions": reductions}
    return Report("fman census", ok, result, text, ["pattern", "count", "reduced"],
                  [[_pattern_code(r.colours), r.count, r.reduced] for r in rows], diff=diff)


def cmd_fman_dims(cfg: RunConfig) -> Report:
    top = cfg.args["max"]
    if not 1 <= top <= 7:
        raise UsageError("--max must be between 1 and 7")
    dims = [fman.count_fman_basis(n) for n in range(1, top + 1)]
    expected = [reference.FMAN_DIMS[n] for n in range(1, top + 1)]
    ok = dims == expected
    result = {"n": list(range(1, top + 1)), "dims": dims}
    return Report("fman dims", ok, result, [" ".join(map(str, dims))], ["n", "dim"],
                  [[n, d] for n, d in zip(range(1, top + 1), dims)],
                  diff=None if ok else {"expected": expected, "found": dims})


def cmd_fman_normalize(cfg: RunConfig) -> Report:
    return _lincomb_report("fman normalize", fman.normalize_fman(_read_expression(cfg.args["file"])))


# --------------------------------------------------------------------------
# oracle


def enumeration_count(variety: str, n: int) -> int:
    if variety == "MFM":
        return fman.count_fman_basis(n)
    return len(mtp.enumerate_mtp_basis(n, n, multilinear=True))


def cmd_oracle_dim(cfg: RunConfig) -> Report:
    n = cfg.degree
    method = cfg.args.get("method") or "operadic"
    try:
        d = oracle.dimension(cfg.variety, n, method=method, huge=cfg.huge, checkpoint_dir=cfg.args.get("checkpoint"))
    except oracle.OracleSizeError as e:
        raise UsageError(str(e))
    count = enumeration_count(cfg.variety, n)
    ok = d == count
    if cfg.variety == "MFM" and n in reference.FMAN_DIMS:
        ok = ok and d == reference.FMAN_DIMS[n]
    result = {"variety": cfg.variety, "arity": n, "method": method, "dim": d, "enumerated": count}
    return Report("oracle dim", ok, result, [str(d)], ["variety", "arity", "dim", "enumerated"],
                  [[cfg.variety, n, d, count]], diff=None if ok else {"oracle": d, "enumerated": count})


def _load_candidates(path: str, n: int):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as e:
        raise UsageError(f"cannot read basis file: {e}")
    if isinstance(data, dict):
        data = data.get("result", data)
        if isinstance(data, dict):
            data = data.get("sequences") or data.get("monomials") or data.get("basis")
    if not isinstance(data, list):
        raise UsageError("basis file must hold a list of terms")
    out = []
    for item in data:
        if isinstance(item, dict):
            item = item.get("term") or item.get("monomial")
        if isinstance(item, int):
            out.append(oracle.MonomialIndex(n).term(item))
        elif isinstance(item, str):
            out.append(parse_term(item))
        else:
            raise UsageError(f"unrecognised basis entry {item!r}")
    return out


def cmd_oracle_certify(cfg: RunConfig) -> Report:
    n = cfg.degree
    cands = _load_candidates(cfg.args["basis"], n)
    res = oracle.canonical_projection(cfg.variety, n, cands)
    if isinstance(res, oracle.CertifiedBasis):
        result = {"status": "certified", "variety": cfg.variety, "arity": n, "size": len(cands)}
        return Report("oracle certify", True, result, [f"certified basis of size {len(cands)}"],
                      ["status", "size"], [["certified", len(cands)]])
    if isinstance(res, oracle.Dependence):
        # indexed by candidate position: repeated candidates would cancel in a LinComb
        witness = [{"index": i, "monomial": format_term(cands[i]), "coefficient": format_scalar(c)}
                   for i, c in sorted(res.coefficients.items())]
        verified = res.verify(cfg.variety)
        result = {"status": "dependence", "variety": cfg.variety, "arity": n, "size": len(cands),
                  "witness": witness, "witness_verified": verified}
        text = ["dependence among candidates:"]
        text += [f"  {w['coefficient']} * [{w['index']}] {w['monomial']}" for w in witness]
        text.append(f"witness verified: {verified}")
        return Report("oracle certify", False, result, text, ["index", "monomial", "coefficient"],
                      [[w["index"], w["monomial"], w["coefficient"]] for w in witness], diff={"witness": witness})
    result = {"status": "deficient", "variety": cfg.variety, "arity": n, "size": res.found, "dim": res.dim}
    return Report("oracle certify", False, result, [f"independent but only {res.found} of {res.dim}"],
                  ["status", "size", "dim"], [["deficient", res.found, res.dim]],
                  diff={"found": res.found, "dim": res.dim})


def _parse_multidegree(text: str) -> Dict[int, int]:
    md: Dict[int, int] = {}
    try:
        for part in text.split(","):
            g, _, m = part.partition(":")
            md[int(g)] = md.get(int(g), 0) + int(m)
    except ValueError:
        raise UsageError(f"bad multidegree {text!r}; expected e.g. 1:2,2:1")
    if any(g < 1 or m < 0 for g, m in md.items()):
        raise UsageError("generator indices are positive and multiplicities nonnegative")
    return md


def cmd_oracle_graded(cfg: RunConfig) -> Report:
    md = _parse_multidegree(cfg.args["multidegree"])
    try:
        d = oracle.graded_dimension(cfg.variety, md)
    except (oracle.OracleSizeError, ValueError) as e:
        raise UsageError(str(e))
    if cfg.variety == "MTP":
        count = len(mtp.basis_on_multidegree(md))
    else:
        count = len(fman.basis_on_multidegree(md))
    ok = d == count
    key = ",".join(f"{g}:{m}" for g, m in sorted(md.items()) if m)
    result = {"variety": cfg.variety, "multidegree": key, "dim": d, "enumerated": count}
    return Report("oracle graded", ok, result, [str(d)], ["variety", "multidegree", "dim", "enumerated"],
                  [[cfg.variety, key, d, count]], diff=None if ok else {"oracle": d, "enumerated": count})


def cmd_oracle_matrix(cfg: RunConfig) -> Report:
    n = cfg.degree
    try:
        m = oracle.build_relation_matrix(cfg.variety, n, huge=cfg.huge)
    except oracle.OracleSizeError as e:
        raise UsageError(str(e))
    mm = m.to_matrix_market()
    rank, dim = oracle.rank_and_dim(m)
    result = {"variety": cfg.variety, "arity": n, "rows": len(m.rows), "cols": m.ncols, "rank": rank, "dim": dim}
    rep = Report("oracle matrix", True, result, [mm.rstrip("\n")], ["rows", "cols", "rank", "dim"],
                 [[len(m.rows), m.ncols, rank, dim]])
    return rep


# --------------------------------------------------------------------------
# argument parsing


def _variety(text: str) -> str:
    v = text.upper()
    if v not in ids.PRESETS:
        raise argparse.ArgumentTypeError(f"variety must be one of {', '.join(p.lower() for p in ids.PRESETS)}")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive, default=argparse.SUPPRESS,
                        help=f"worker threads (default from ${THREADS_ENV}, else 1)")
    common.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="write the report here instead of stdout")

    p = _Parser(prog="metabelian", description=__doc__, parents=[common])
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    g = groups.add_parser("identities", help="identity catalog").add_subparsers(dest="command", required=True)
    g.add_parser("list", parents=[common])
    s = g.add_parser("show", parents=[common])
    s.add_argument("name")
    s = g.add_parser("verify", parents=[common], help="check the derived identities of a variety")
    s.add_argument("--variety", type=_variety, required=True)
    s.add_argument("--method", choices=("operadic", "flat"), default="operadic")

    g = groups.add_parser("mtp", help="metabelian transposed Poisson algebra").add_subparsers(dest="command", required=True)
    s = g.add_parser("normalize", parents=[common])
    s.add_argument("file")
    s = g.add_parser("basis", parents=[common])
    s.add_argument("--gens", type=_positive)
    s.add_argument("--deg", type=_positive, required=True)
    s.add_argument("--multilinear", action="store_true")
    s = g.add_parser("verify-identities", parents=[common])
    s.add_argument("--max-deg", type=_positive, default=6)
    s.add_argument("--samples", type=_positive, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--no-algebra", action="store_true", help="skip the exhaustive table-algebra check")
    s = g.add_parser("table", parents=[common])
    s.add_argument("--check", action="store_true", required=True)
    s.add_argument("--gens", type=_positive, default=6)
    s.add_argument("--min-deg", type=_positive, default=4)
    s.add_argument("--max-deg", type=_positive, default=6)

    g = groups.add_parser("fman", help="metabelian F-manifold operad").add_subparsers(dest="command", required=True)
    s = g.add_parser("basis", parents=[common])
    s.add_argument("--deg", type=_positive, required=True)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--multilinear", action="store_true")
    mode.add_argument("--gens", type=_positive)
    s = g.add_parser("census", parents=[common])
    s.add_argument("--deg", type=_positive, required=True)
    s = g.add_parser("dims", parents=[common])
    s.add_argument("--max", type=_positive, default=7)
    s = g.add_parser("normalize", parents=[common])
    s.add_argument("file")

    g = groups.add_parser("oracle", help="dimension oracle").add_subparsers(dest="command", required=True)
    s = g.add_parser("dim", parents=[common])
    s.add_argument("--variety", type=_variety, required=True)
    s.add_argument("--arity", type=_positive, required=True)
    s.add_argument("--huge", action="store_true", help="allow arity 6")
    s.add_argument("--method", choices=("operadic", "flat"), default="operadic")
    s.add_argument("--checkpoint", help="directory for restartable per-level checkpoints")
    s = g.add_parser("certify", parents=[common])
    s.add_argument("--variety", type=_variety, required=True)
    s.add_argument("--arity", type=_positive, required=True)
    s.add_argument("--basis", required=True)
    s = g.add_parser("graded", parents=[common])
    s.add_argument("--variety", type=_variety, required=True)
    s.add_argument("--multidegree", required=True)
    s = g.add_parser("matrix", parents=[common], help="relation matrix as Matrix Market text")
    s.add_argument("--variety", type=_variety, required=True)
    s.add_argument("--arity", type=_positive, required=True)
    s.add_argument("--huge", action="store_true")
    return p


HANDLERS = {
    ("identities", "list"): cmd_identities_list,
    ("identities", "show"): cmd_identities_show,
    ("identities", "verify"): cmd_identities_verify,
    ("mtp", "normalize"): cmd_mtp_normalize,
    ("mtp", "basis"): cmd_mtp_basis,
    ("mtp", "verify-identities"): cmd_mtp_verify_identities,
    ("mtp", "table"): cmd_mtp_table,
    ("fman", "basis"): cmd_fman_basis,
    ("fman", "census"): cmd_fman_census,
    ("fman", "dims"): cmd_fman_dims,
    ("fman", "normalize"): cmd_fman_normalize,
    ("oracle", "dim"): cmd_oracle_dim,
    ("oracle", "certify"): cmd_oracle_certify,
    ("oracle", "graded"): cmd_oracle_graded,
    ("oracle", "matrix"): cmd_oracle_matrix,
}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = vars(ns).copy()
    cfg = RunConfig(
        group=d.pop("group"),
        command=d.pop("command"),
        format=d.pop("format", "json"),
        out=d.pop("out", None),
        threads=d.pop("threads", None) or _default_threads(),
        variety=d.pop("variety", None),
        degree=d.pop("deg", None) or d.pop("arity", None),
        gens=d.pop("gens", None),
        huge=d.pop("huge", False),
    )
    d.pop("deg", None)
    d.pop("arity", None)
    if "no_algebra" in d:
        d["algebra"] = not d.pop("no_algebra")
    cfg.args = d
    return cfg


def run(cfg: RunConfig) -> int:
    try:
        report = HANDLERS[(cfg.group, cfg.command)](cfg)
    except (UsageError, TermSyntaxError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    text = report.render(cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.ok else EXIT_MISMATCH


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
