"""Command-line batch runner.

A job is described by an INI-style config::

    [job]
    task = k1
    seed = 0

    [ring]
    spec = GF 2, trivial, lambda=1
    Lambda = max
    n = 2

    [task]
    ...task specific keys...

The report is JSON (plus a tab-separated summary next to it when ``--out``
is given).  Exit codes: 0 ok, 2 verification failure or counterexample,
3 cap exceeded, 4 configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import random
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import k1lab, polyglue
from .elemword import TABLE_PATH, derive_relation_table, load_table, session_rings
from .errors import (CapExceeded, FormRingError, NilpotentElement, NotACover,
                     NotCongruentAtZero, NotNormalizedAtZero, PreconditionViolated, RingSpecError,
                     TooLarge, UnresolvedRelation, VerificationFailed)
from .serialize import (Context, dumps, make_context, read_word_file, word_file)

log = logging.getLogger("formring")

TASKS = ("verify-relations", "derive-table", "k1", "stab-map", "orbit", "stabilizer",
         "glue", "dilate", "inject-check", "whitehead")
EXIT_OK, EXIT_FAIL, EXIT_CAP, EXIT_CONFIG = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


class Outcome:
    """Result payload plus the verdict that decides the exit code."""

    def __init__(self, result: dict, ok: bool = True, figures=None):
        self.result = result
        self.ok = ok
        self.figures = figures or {}


# ---------------------------------------------------------------------------
# config


def read_config(path: str | None) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser(interpolation=None)
    cfg.optionxform = str  # keep "Lambda" as written
    if path:
        text = Path(path).read_text()
        try:
            cfg.read_string(text, source=str(path))
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
    for section in ("job", "ring", "task"):
        if not cfg.has_section(section):
            cfg.add_section(section)
    return cfg


def resolved(cfg: configparser.ConfigParser) -> dict:
    return {s: dict(cfg[s]) for s in cfg.sections()}


def _int(cfg, section, key, default=None):
    raw = cfg[section].get(key)
    if raw is None:
        if default is None:
            raise ConfigError(f"missing [{section}] {key}")
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} must be an integer, got {raw!r}") from None


def _list(cfg, section, key, default=None):
    raw = cfg[section].get(key)
    if raw is None:
        return default
    raw = raw.strip()
    if raw.startswith("["):
        return json.loads(raw)
    return [x.strip() for x in raw.split(",") if x.strip()]


def context_from(cfg) -> Context:
    spec = cfg["ring"].get("spec")
    if not spec:
        raise ConfigError("missing [ring] spec")
    return make_context(spec, cfg["ring"].get("Lambda", "max"), _int(cfg, "ring", "n", 2),
                        cfg["ring"].get("lambda"))


# ---------------------------------------------------------------------------
# tasks


def _labels(R, xs):
    return [R.label(int(x)) for x in xs]


def task_verify_relations(cfg, ctx, seed, cap, fig_dir):
    table = load_table(cfg["task"].get("table") or TABLE_PATH, verify=False)
    rings = session_rings()
    failing = table.reverify(rings, _int(cfg, "task", "pairs", 200), seed)
    summary = table.summary()
    result = {"summary": {k: list(v) for k, v in summary.items()},
              "failing": [list(map(str, k)) for k in failing],
              "rings": [r.description for r, _ in rings]}
    figs = {}
    if fig_dir:
        from .plotting import resolution_bars
        figs["resolution"] = resolution_bars(_family_summary(table), fig_dir / "relations.png")
    return Outcome(result, not failing, figs)


def _family_summary(table):
    out = {}
    for (f1, f2, _), e in table.entries.items():
        acc, tot = out.get(f"{f1}/{f2}", (0, 0))
        out[f"{f1}/{f2}"] = (acc + e.accepted, tot + 1)
    return out


def task_derive_table(cfg, ctx, seed, cap, fig_dir):
    table = derive_relation_table(_int(cfg, "task", "n", 3), max_len=_int(cfg, "task", "max_len", 3),
                                  max_degree=_int(cfg, "task", "max_degree", 2), seed=seed,
                                  pairs=_int(cfg, "task", "pairs", 200))
    out_path = cfg["task"].get("table_out")
    if out_path:
        Path(out_path).write_text(dumps(table.to_json()))
    figs = {}
    if fig_dir:
        from .plotting import resolution_bars
        figs["resolution"] = resolution_bars(_family_summary(table), fig_dir / "relations.png")
    return Outcome({"summary": {k: list(v) for k, v in table.summary().items()},
                    "table": table.to_json()}, True, figs)


def task_k1(cfg, ctx, seed, cap, fig_dir):
    rep = k1lab.k1_compute(ctx.ring, ctx.param, ctx.n, cfg["task"].get("strategy", "auto"), cap)
    figs = {}
    if fig_dir:
        from .plotting import frontier_growth
        figs["eq_closure"] = frontier_growth(rep.eq.levels, fig_dir / "eq_frontier.png",
                                             f"EQ closure, n={ctx.n}")
    return Outcome(rep.to_json(), rep.normal, figs)


def task_stab_map(cfg, ctx, seed, cap, fig_dir):
    rep = k1lab.stab_map_test(ctx.ring, ctx.param, ctx.n, cfg["task"].get("slot", "outer"),
                              cfg["task"].get("strategy", "auto"), cap)
    ok = rep.well_defined and rep.eq_into_eq and rep.generators_to_generators
    return Outcome(rep.to_json(), ok)


def task_orbit(cfg, ctx, seed, cap, fig_dir):
    R = ctx.ring
    gens = _list(cfg, "task", "ideal")
    ideal = None
    if gens is not None:
        from .ring import ideal_elements
        ideal = sorted(ideal_elements(R, [R.element(g) for g in gens]))
    rep = k1lab.unimodular_orbit_test(R, ctx.param, ctx.n, ideal, cap)
    figs = {}
    if fig_dir:
        from .plotting import frontier_growth
        figs["orbit"] = frontier_growth(rep.frontier_sizes, fig_dir / "orbit_frontier.png",
                                        f"orbit of e_{2 * ctx.n}")
    return Outcome(rep.to_json(), rep.transitive or not rep.in_hypothesis, figs)


def task_stabilizer(cfg, ctx, seed, cap, fig_dir):
    rep = k1lab.stabilizer_decomp_test(ctx.ring, ctx.param, ctx.n,
                                       cfg["task"].get("strategy", "auto"), cap)
    return Outcome(rep.to_json(), rep.all_pass)


def task_whitehead(cfg, ctx, seed, cap, fig_dir):
    rep = k1lab.whitehead_test(ctx.ring, ctx.param, ctx.n, cfg["task"].get("strategy", "auto"), cap)
    figs = {}
    if fig_dir:
        from .plotting import coset_sizes
        counts = {"GQ": rep.gq_order, "EQ": rep.eq_order, "[GQ,GQ]": rep.commutator_order}
        figs["orders"] = coset_sizes(counts, fig_dir / "whitehead_orders.png",
                                     f"group orders, n={ctx.n}")
    return Outcome(rep.to_json(), True, figs)


def _input_word(cfg, ctx, seed):
    path = cfg["task"].get("word")
    if path:
        return read_word_file(path, ctx)
    rng = random.Random(seed)
    return polyglue.random_normalized_word(ctx.poly(), ctx.param, ctx.n,
                                           _int(cfg, "task", "length", 6), rng,
                                           _int(cfg, "task", "degree", 1))


def _word_out(cfg, out_path, suffix):
    path = cfg["task"].get("word_out")
    if path:
        return Path(path)
    if out_path:
        return Path(out_path).with_suffix(suffix)
    return None


def task_glue(cfg, ctx, seed, cap, fig_dir, out_path=None):
    R = ctx.ring
    alpha_word = _input_word(cfg, ctx, seed)
    alpha = alpha_word.evaluate()
    cover_s = [R.element(x) for x in _list(cfg, "task", "cover", [])]
    if not cover_s:
        raise ConfigError("glue needs [task] cover")
    cover = polyglue.round_trip_cover(alpha_word, cover_s)
    res = polyglue.local_global_glue(alpha, cover, mode=cfg["task"].get("mode", "auto"))
    target = _word_out(cfg, out_path, ".word.json")
    if target:
        target.write_text(dumps(word_file(res.word, ctx.ring_spec)))
    result = {"cover": _labels(R, cover_s), "b": _labels(R, res.b),
              "exponents": list(res.exponents), "letters": len(res.word.letters()),
              "unresolved_blocks": res.unresolved, "verified": True,
              "word_file": str(target) if target else None,
              "input_word": word_file(alpha_word, ctx.ring_spec)["word"]}
    return Outcome(result, True)


def task_dilate(cfg, ctx, seed, cap, fig_dir, out_path=None):
    R = ctx.ring
    alpha_word = _input_word(cfg, ctx, seed)
    s = R.element(cfg["task"].get("s", "1"))
    cover = polyglue.round_trip_cover(alpha_word, [s])
    if not cover:
        raise NilpotentElement(f"{R.label(s)} is nilpotent")
    local = cover[0][1]
    dl = polyglue.dilate(alpha_word.evaluate(), s, local, mode=cfg["task"].get("mode", "auto"))
    target = _word_out(cfg, out_path, ".beta.json")
    if target:
        target.write_text(dumps(word_file(dl.beta, ctx.ring_spec)))
    return Outcome({"s": R.label(s), "b": R.label(dl.b), "d": dl.d, "m": dl.m,
                    "letters": len(dl.beta.letters()), "unresolved_blocks": dl.unresolved,
                    "verified": True, "word_file": str(target) if target else None}, True)


def task_inject_check(cfg, ctx, seed, cap, fig_dir):
    R = ctx.ring
    s_list = [R.element(x) for x in _list(cfg, "task", "s", ["1"])]
    k = cfg["task"].get("k")
    reports = [polyglue.check_localization_injectivity(R, s, int(k) if k else None, ctx.n, ctx.param)
               for s in s_list]
    figs = {}
    if fig_dir:
        from .plotting import injectivity_bars
        for rep in reports:
            data = rep.to_json()
            figs[f"s={data['s']}"] = injectivity_bars(data["verdicts"],
                                                      fig_dir / f"inject_s{data['s']}.png",
                                                      f"{R.description}, s={data['s']}")
    return Outcome({"reports": [r.to_json() for r in reports]}, True, figs)


HANDLERS = {
    "verify-relations": task_verify_relations, "derive-table": task_derive_table,
    "k1": task_k1, "stab-map": task_stab_map, "orbit": task_orbit,
    "stabilizer": task_stabilizer, "glue": task_glue, "dilate": task_dilate,
    "inject-check": task_inject_check, "whitehead": task_whitehead,
}
NEEDS_RING = set(TASKS) - {"verify-relations", "derive-table"}


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="formring", description="form ring / quadratic group jobs")
    p.add_argument("task", nargs="?", choices=TASKS, help="overrides [job] task")
    p.add_argument("--config", help="INI job file")
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.add_argument("--seed", type=int, default=None, help="64-bit seed (default 0)")
    p.add_argument("--cap", type=int, default=None, help="closure element cap")
    p.add_argument("--threads", type=int, default=1, help="recorded only; kernels are vectorized")
    p.add_argument("--figures", help="directory for PNG figures")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    t0 = time.perf_counter()
    report: dict = {}
    code = EXIT_OK
    try:
        cfg = read_config(args.config)
        task = args.task or cfg["job"].get("task")
        if task not in TASKS:
            raise ConfigError(f"unknown or missing task {task!r}")
        seed = args.seed if args.seed is not None else _int(cfg, "job", "seed", 0)
        if not 0 <= seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        cap = args.cap if args.cap is not None else _int(cfg, "job", "cap", k1lab.DEFAULT_CAP)
        cfg["job"]["task"], cfg["job"]["seed"], cfg["job"]["cap"] = task, str(seed), str(cap)
        ctx = context_from(cfg) if task in NEEDS_RING or cfg["ring"].get("spec") else None
        fig_dir = Path(args.figures) if args.figures else None
        report["config"] = resolved(cfg)
        handler = HANDLERS[task]
        if task in ("glue", "dilate"):
            outcome = handler(cfg, ctx, seed, cap, fig_dir, args.out)
        else:
            outcome = handler(cfg, ctx, seed, cap, fig_dir)
        report["result"] = outcome.result
        report["figures"] = outcome.figures
        report["status"] = "ok" if outcome.ok else "counterexample"
        code = EXIT_OK if outcome.ok else EXIT_FAIL
    except (ConfigError, RingSpecError, NotACover, NilpotentElement, PreconditionViolated,
            NotNormalizedAtZero, NotCongruentAtZero, json.JSONDecodeError, OSError, ValueError) as exc:
        report.update(status="config-error", error=str(exc))
        code = EXIT_CONFIG
    except (CapExceeded, TooLarge) as exc:
        report.update(status="cap-exceeded", error=str(exc))
        code = EXIT_CAP
    except (VerificationFailed, UnresolvedRelation) as exc:
        report.update(status="verification-failed", error=str(exc))
        code = EXIT_FAIL
    except FormRingError as exc:
        report.update(status="error", error=f"{type(exc).__name__}: {exc}")
        code = EXIT_FAIL
    report["exit_code"] = code
    report["meta"] = {"timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                      "runtime_s": round(time.perf_counter() - t0, 3), "threads": args.threads}
    _emit(report, args.out)
    if code == EXIT_CONFIG:
        print(f"formring: {report.get('error')}", file=sys.stderr)
    return code


def _flatten(prefix, obj, rows):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], rows)
    elif isinstance(obj, (str, int, float, bool)) or obj is None:
        rows.append((prefix, obj))


def _emit(report: dict, out: str | None):
    text = dumps(report)
    if not out:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    rows: list = []
    _flatten("", {k: v for k, v in report.items() if k != "meta"}, rows)
    path.with_suffix(".tsv").write_text("".join(f"{k}\t{json.dumps(v)}\n" for k, v in rows))


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
