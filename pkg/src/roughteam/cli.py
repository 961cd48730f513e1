"""Command-line entry point: ``roughteam induce|classify|evaluate|compare|model``.

Exit codes: 0 success, 1 usage or validation error, 2 runtime failure,
3 no technique met the accuracy benchmark (``compare`` only).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from . import __version__
from .baselines import C45Params, LogisticConfig
from .evaluation import (
    TECHNIQUES,
    ConfusionMatrix,
    FoldError,
    TechniqueCandidate,
    TechniqueConfig,
    cross_validate,
    format_report,
    holdout_on_self,
    metrics,
    select_technique,
)
from .roughset import GAParams, induce_rules
from .rules import (
    EMBEDDED_MODEL_NAME,
    classify,
    format_listing,
    model_from_induction,
    resolve_model,
    schema_compatible,
    write_model,
)
from .table import TableError, get_schema, load_profiles, load_table

DEFAULT_SEED = 1729
EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_BENCHMARK = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_seed() -> int:
    env = os.environ.get("ROUGHTEAM_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"ROUGHTEAM_SEED must be an integer, got {env!r}") from None


@dataclass
class RunConfig:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    schema: str = "mbti-team-v1"
    techniques: list[str] = field(default_factory=list)
    k: int = 10
    seed: int = DEFAULT_SEED
    ga: dict = field(default_factory=dict)
    policies: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "text"

    def digest(self) -> str:
        payload = asdict(self)
        payload.pop("out")
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def meta(self) -> dict[str, str]:
        return {"seed": str(self.seed), "config_digest": self.digest(), "version": __version__}


def write_atomic(path: str, text: str) -> None:
    """Write to a temporary sibling and rename over ``path``."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _meta_block(meta: dict[str, str], fmt: str) -> str:
    if fmt == "kv":
        return "".join(f"{k}={v}\n" for k, v in meta.items())
    return "".join(f"# {k}: {v}\n" for k, v in meta.items())


def _require_file(path: str | None, what: str) -> str:
    if not path:
        raise UsageError(f"--{what} is required")
    if not Path(path).is_file():
        raise UsageError(f"{what} file not found: {path}")
    return path


def _read_table(path: str, schema_ref: str):
    schema = get_schema(schema_ref)
    with open(path, encoding="utf-8", newline="") as fh:
        return load_table(fh, schema)


def _ga_params(args) -> GAParams:
    return GAParams(
        population_size=args.ga_population,
        generations=args.ga_generations,
        mutation_rate=args.ga_mutation,
        crossover_rate=args.ga_crossover,
        seed=args.seed,
        parsimony_weight=args.ga_parsimony,
    )


def _policies(args) -> dict:
    out = {"default_policy": args.policy_default, "conflict_policy": args.policy_conflict}
    if args.policy_tie:
        out["tie_class"] = args.policy_tie
    return out


def _config(args, command: str, **inputs) -> RunConfig:
    return RunConfig(
        command=command,
        inputs={k: v for k, v in inputs.items() if v is not None},
        schema=args.schema,
        techniques=list(getattr(args, "technique", None) or []),
        k=getattr(args, "k", 10),
        seed=args.seed,
        ga=asdict(_ga_params(args)),
        policies=_policies(args),
        options={k: getattr(args, k) for k in ("scope", "benchmark", "stratified", "min_leaf", "confidence")
                 if hasattr(args, k)},
        out=args.out,
        format=args.format,
    )


def cmd_induce(args) -> int:
    _require_file(args.table, "table")
    technique = (args.technique or ["ja_rules"])[0]
    if technique not in ("ja_rules", "ga_rules"):
        raise UsageError("induce supports --technique ja_rules or ga_rules")
    if not args.out:
        raise UsageError("--out is required for induce")
    cfg = _config(args, "induce", table=args.table)
    table = _read_table(args.table, args.schema)
    algorithm = "johnson" if technique == "ja_rules" else "genetic"
    induced = induce_rules(table, scope=args.scope, algorithm=algorithm, ga_params=_ga_params(args))
    model = model_from_induction(table, induced, **_policies(args))
    write_atomic(args.out, write_model(model))
    report = _meta_block(cfg.meta(), args.format)
    if args.format == "kv":
        report += f"rules={len(model.rules)}\nmodel={args.out}\n"
    else:
        report += f"induced {len(model.rules)} rules from {len(table)} objects -> {args.out}\n"
        report += format_listing(model)
    sys.stdout.write(report)
    return EXIT_OK


def cmd_classify(args) -> int:
    _require_file(args.table, "table")
    model_ref = args.model or EMBEDDED_MODEL_NAME
    if model_ref != EMBEDDED_MODEL_NAME:
        _require_file(model_ref, "model")
    cfg = _config(args, "classify", table=args.table, model=model_ref)
    model = resolve_model(model_ref)
    overrides = {k: v for k, v in _policies(args).items() if getattr(args, "explicit_" + k, False)}
    if overrides:
        model = model.with_policies(**overrides)
    schema = get_schema(args.schema)
    if not schema_compatible(model.schema, schema):
        raise UsageError(f"model schema {model.schema.name!r} does not match profile schema {schema.name!r}")
    with open(args.table, encoding="utf-8", newline="") as fh:
        records = load_profiles(fh, schema)

    lines = [_meta_block(cfg.meta(), args.format)]
    summary = dict.fromkeys(list(model.schema.classes) + ["abstain"], 0)
    for i, rec in enumerate(records, start=1):
        v = classify(rec, model)
        label = v.decision or "abstain"
        summary[label] += 1
        fired = ",".join(str(r) for r in v.fired)
        tally = ",".join(f"{c}:{n}" for c, n in v.tally.items())
        if args.format == "kv":
            lines.append(f"record={i} decision={label} fired={fired or '-'} tally={tally}\n")
        else:
            lines.append(f"{i}: {label} fired=[{fired}] tally {tally}\n")
    if args.format == "kv":
        lines.append("".join(f"count_{c}={n}\n" for c, n in summary.items()))
    else:
        lines.append("summary: " + ", ".join(f"{c}={n}" for c, n in summary.items()) + "\n")
    _emit("".join(lines), args.out)
    return EXIT_OK


def _read_matrix(path: str) -> ConfusionMatrix:
    values = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            key, _, value = stripped.partition(":")
        values[key.strip().lower()] = value.strip()
    try:
        return ConfusionMatrix(*(int(values[k]) for k in ("tp", "tn", "fp", "fn")))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"matrix file needs integer tp, tn, fp, fn ({exc})") from None


def _technique_config(args) -> TechniqueConfig:
    pol = _policies(args)
    return TechniqueConfig(
        ga=_ga_params(args),
        c45=C45Params(min_leaf=args.min_leaf, confidence=args.confidence),
        logistic=LogisticConfig(),
        default_policy=pol["default_policy"],
        conflict_policy=pol["conflict_policy"],
    )


def cmd_evaluate(args) -> int:
    if args.matrix:
        cfg = _config(args, "evaluate", matrix=_require_file(args.matrix, "matrix"))
        report = metrics(_read_matrix(args.matrix))
    elif args.model:
        _require_file(args.table, "table")
        if args.model != EMBEDDED_MODEL_NAME:
            _require_file(args.model, "model")
        cfg = _config(args, "evaluate", table=args.table, model=args.model)
        model = resolve_model(args.model)
        table = _read_table(args.table, args.schema)
        if not schema_compatible(model.schema, table.schema):
            raise UsageError("model and table schemas differ")
        report = holdout_on_self(lambda r: classify(r, model).decision, table, technique="model",
                                 complexity=len(model.rules))
    else:
        _require_file(args.table, "table")
        techniques = args.technique or ["ja_rules"]
        if len(techniques) != 1:
            raise UsageError("evaluate takes exactly one --technique")
        if techniques[0] not in TECHNIQUES:
            raise UsageError(f"unknown technique {techniques[0]!r}")
        cfg = _config(args, "evaluate", table=args.table)
        table = _read_table(args.table, args.schema)
        if not 2 <= args.k <= len(table):
            raise UsageError(f"--k must lie in [2, {len(table)}], got {args.k}")
        report = cross_validate(techniques[0], table, k=args.k, seed=args.seed,
                                stratified=args.stratified, config=_technique_config(args))
    report = _with_meta(report, cfg)
    _emit(format_report(report, args.format), args.out)
    return EXIT_OK


def _with_meta(report, cfg: RunConfig):
    return replace(report, meta=cfg.meta())


def _read_candidates(path: str) -> list[TechniqueCandidate]:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(line for line in fh if line.strip() and not line.lstrip().startswith("#"))
        for row in reader:
            comp = (row.get("complexity") or "").strip()
            rows.append(TechniqueCandidate(row["name"].strip(), float(row["accuracy"]),
                                           int(comp) if comp not in ("", "-", "none") else None))
    if not rows:
        raise UsageError("candidate file lists no techniques")
    return rows


def cmd_compare(args) -> int:
    failures: dict[str, str] = {}
    if args.candidates:
        cfg = _config(args, "compare", candidates=_require_file(args.candidates, "candidates"))
        candidates = _read_candidates(args.candidates)
        reports = {}
    else:
        _require_file(args.table, "table")
        techniques = args.technique or list(TECHNIQUES)
        for t in techniques:
            if t not in TECHNIQUES:
                raise UsageError(f"unknown technique {t!r}")
        cfg = _config(args, "compare", table=args.table)
        table = _read_table(args.table, args.schema)
        if not 2 <= args.k <= len(table):
            raise UsageError(f"--k must lie in [2, {len(table)}], got {args.k}")
        tc = _technique_config(args)
        reports = {}
        for t in techniques:
            try:
                reports[t] = cross_validate(t, table, k=args.k, seed=args.seed, stratified=args.stratified, config=tc)
            except FoldError as exc:
                failures[t] = str(exc)
        candidates = [TechniqueCandidate(t, r.accuracy, r.complexity) for t, r in reports.items()]

    winner, ranking = select_technique(candidates, args.benchmark) if candidates else (None, [])
    meta = cfg.meta()
    if args.format == "kv":
        out = [f"{k}={v}\n" for k, v in meta.items()]
        out.append(f"benchmark={args.benchmark:g}\n")
        for a in ranking:
            c = a.candidate
            comp = "none" if c.complexity is None else c.complexity
            out.append(f"candidate={c.name} accuracy={c.accuracy:.4f} complexity={comp} "
                       f"decision={'accepted' if a.accepted else 'rejected'} reason={a.reason}\n")
        for t, msg in failures.items():
            out.append(f"failed={t} error={msg}\n")
        out.append(f"accepted={winner or 'none'}\n")
    else:
        out = [_meta_block(meta, "text"), f"benchmark {args.benchmark:g}%\n"]
        out.append(f"{'technique':<22}{'accuracy':>10}{'rules':>8}  decision\n")
        for a in ranking:
            c = a.candidate
            comp = "-" if c.complexity is None else str(c.complexity)
            out.append(f"{c.name:<22}{c.accuracy:>9.4f}%{comp:>8}  "
                       f"{'Accepted' if a.accepted else 'Rejected'} ({a.reason})\n")
        for t, msg in failures.items():
            out.append(f"{t:<22}{'FAILED':>10}          {msg}\n")
        out.append(f"verdict: {winner if winner else 'none accepted'}\n")
    _emit("".join(out), args.out)
    return EXIT_OK if winner else EXIT_BENCHMARK


def cmd_model(args) -> int:
    ref = args.name
    if ref != EMBEDDED_MODEL_NAME:
        _require_file(ref, "model")
    model = resolve_model(ref)
    if args.action == "export" or args.format == "model":
        _emit(write_model(model), args.out)
    else:
        _emit(format_listing(model), args.out)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--table", help="decision table / profile CSV")
    p.add_argument("--schema", default="mbti-team-v1", help="built-in schema name or JSON schema file")
    p.add_argument("--model", help=f"model file or {EMBEDDED_MODEL_NAME}")
    p.add_argument("--technique", action="append", help="ja_rules, ga_rules, c45 or logistic (repeatable)")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--format", choices=("text", "kv"), default="text")
    p.add_argument("--policy-default", choices=("abstain", "majority_class"), default="abstain")
    p.add_argument("--policy-conflict", choices=("support_voting", "first_match"), default="support_voting")
    p.add_argument("--policy-tie", default=None, help="class receiving ties (default: first schema class)")
    p.add_argument("--ga-population", type=int, default=64)
    p.add_argument("--ga-generations", type=int, default=100)
    p.add_argument("--ga-mutation", type=float, default=None)
    p.add_argument("--ga-crossover", type=float, default=0.9)
    p.add_argument("--ga-parsimony", type=float, default=0.05)
    p.add_argument("--min-leaf", type=int, default=2)
    p.add_argument("--confidence", type=float, default=0.25)
    p.add_argument("--no-stratify", dest="stratified", action="store_false")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="roughteam", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("induce", help="induce a rule model from a decision table")
    _add_common(p)
    p.add_argument("--scope", choices=("object_related", "full"), default="object_related")
    p.set_defaults(func=cmd_induce)

    p = sub.add_parser("classify", help="classify profiles with a rule model")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="cross-validate a technique, score a model, or compute metrics")
    _add_common(p)
    p.add_argument("--matrix", help="confusion-matrix file (tp=, tn=, fp=, fn=) for metrics only")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="compare techniques and apply the selection rule")
    _add_common(p)
    p.add_argument("--candidates", help="CSV of precomputed name,accuracy,complexity")
    p.add_argument("--benchmark", type=float, default=70.0)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("model", help="inspect or export rule models")
    p.add_argument("action", choices=("show", "export"))
    p.add_argument("name", nargs="?", default=EMBEDDED_MODEL_NAME)
    p.add_argument("--format", choices=("text", "model"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_model)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    for flag, key in (("--policy-default", "default_policy"), ("--policy-conflict", "conflict_policy"),
                      ("--policy-tie", "tie_class")):
        setattr(args, "explicit_" + key, any(a == flag or a.startswith(flag + "=") for a in argv))
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = default_seed()
        return args.func(args)
    except (UsageError, TableError) as exc:
        print(f"roughteam: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        print(f"roughteam: validation error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"roughteam: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
