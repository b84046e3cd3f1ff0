"""Command line interface.

Subcommands:

* ``recommend``       maps use case flags to the metric families to run
* ``ftu-check``       scans prompts for protected attribute words
* ``counterfactuals`` builds a counterfactual prompt-pairs file
* ``audit``           runs the full metric pipeline and emits a report
* ``version``         prints the package version

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 provider
error, 4 invariance tolerance breached while ``--enforce-epsilon`` is set.
"""

from __future__ import annotations

import argparse
import json
import sys
import uuid
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .audit import AuditConfig, invariance_breaches, run_audit
from .core.counterfactual import (
    ftu_check,
    generate_counterfactual_pairs,
    validate_pair_groups,
)
from .core.lexicon import default_lexicons, load_lexicons
from .core.profile import INTERVENTIONS, TASKS, Prompt, UseCaseProfile
from .errors import AuditError, ConfigError, IngestError, ProviderUnavailableError
from .framework import recommend_metrics
from .ingest import read_prompts
from .report import canonical_json, render_text

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROVIDER = 3
EXIT_EPSILON = 4


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for
    data errors, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _bool_flag(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {value!r}")


def _load_lexicons(path: str | None):
    return load_lexicons(path) if path else default_lexicons()


def _cmd_recommend(args) -> int:
    profile = UseCaseProfile(
        task=args.task,
        ftu_satisfied=args.ftu_satisfied,
        person_level=args.person_level,
        equal_prevalence_desired=args.equal_prevalence_desired,
        intervention=args.intervention,
        counterfactual_invariance_desired=args.invariance_desired,
        similarity_relevant=args.similarity_relevant,
    )
    plan = recommend_metrics(profile)
    print(json.dumps(plan.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_ftu_check(args) -> int:
    lexicons = _load_lexicons(args.lexicon)
    prompts = [Prompt(pid, text) for pid, text in read_prompts(args.input)]
    report = ftu_check(prompts, lexicons)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_counterfactuals(args) -> int:
    lexicons = _load_lexicons(args.lexicon)
    validate_pair_groups(lexicons, args.group_a, args.group_b)
    prompts = [Prompt(pid, text) for pid, text in read_prompts(args.input)]
    result = generate_counterfactual_pairs(prompts, lexicons, args.group_a, args.group_b)
    with open(args.output, "w", encoding="utf-8") as handle:
        for number, pair in enumerate(result.pairs, start=1):
            handle.write(
                json.dumps(
                    {
                        "pair_id": f"pair-{number}",
                        "base_prompt_id": pair.base_prompt_id,
                        "group_a": pair.group_a,
                        "group_b": pair.group_b,
                        "prompt_a": pair.prompt_a,
                        "prompt_b": pair.prompt_b,
                        "output_a": None,
                        "output_b": None,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    summary = {
        "pairs_written": len(result.pairs),
        "prompts_skipped": [
            {"prompt_id": s.prompt_id, "word": s.word, "reason": s.reason}
            for s in result.skipped
        ],
        "output": str(args.output),
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_audit(args) -> int:
    config_path = Path(args.config)
    try:
        data = json.loads(config_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        print(f"config file not found: {config_path}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(f"config file is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_USAGE

    # flags mirror config keys and win over the file
    if args.workers is not None:
        data["workers"] = args.workers
    if args.enforce_epsilon:
        data["enforce_epsilon"] = True
    if args.epsilon is not None:
        data.setdefault("params", {})["epsilon"] = args.epsilon
    if args.group_a and args.group_b:
        data["groups"] = [args.group_a, args.group_b]
    for key, value in (
        ("generation", args.generation_file),
        ("classification", args.classification_file),
        ("recommendation", args.recommendation_file),
        ("counterfactual", args.counterfactual_file),
    ):
        if value is not None:
            # command-line paths are relative to the caller's directory,
            # config-file paths to the config's directory
            data.setdefault("inputs", {})[key] = str(Path(value).resolve())

    config = AuditConfig.from_dict(data, base_dir=config_path.parent)
    run_id = args.run_id or uuid.uuid4().hex
    timestamp = args.timestamp or datetime.now(timezone.utc).strftime(
        "%Y-%m-%dT%H:%M:%SZ"
    )
    report = run_audit(config, run_id=run_id, timestamp=timestamp)

    rendered = canonical_json(report)
    if args.output:
        Path(args.output).write_text(rendered, encoding="utf-8")
    if args.text or not args.output:
        print(render_text(report) if args.text else rendered, end="")

    data_errors = {"MalformedLineError", "SchemaViolationError", "DuplicateIdError",
                   "LexiconError", "ValueError", "FileNotFoundError", "PermissionError",
                   "IsADirectoryError", "OSError"}
    if report.error_types & data_errors:
        return EXIT_DATA
    if "ProviderUnavailableError" in report.error_types:
        return EXIT_PROVIDER
    if config.enforce_epsilon and invariance_breaches(report):
        breached = ", ".join(invariance_breaches(report))
        print(f"invariance tolerance breached by: {breached}", file=sys.stderr)
        return EXIT_EPSILON
    return EXIT_OK


def _cmd_version(_args) -> int:
    print(__version__)
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="biasaudit", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    rec = sub.add_parser("recommend", help="select metric families for a use case")
    rec.add_argument("--task", required=True, choices=TASKS)
    rec.add_argument(
        "--ftu-satisfied",
        type=_bool_flag,
        required=True,
        help="whether prompts avoid all protected attribute words",
    )
    rec.add_argument("--person-level", type=_bool_flag, default=False)
    rec.add_argument("--equal-prevalence-desired", type=_bool_flag, default=False)
    rec.add_argument("--intervention", choices=INTERVENTIONS, default="assistive")
    rec.add_argument("--invariance-desired", type=_bool_flag, default=True)
    rec.add_argument("--similarity-relevant", type=_bool_flag, default=True)
    rec.set_defaults(func=_cmd_recommend)

    ftu = sub.add_parser("ftu-check", help="scan prompts for protected words")
    ftu.add_argument("--input", required=True, help="JSONL file with prompt_id/prompt")
    ftu.add_argument("--lexicon", help="lexicon JSON file (default: packaged)")
    ftu.set_defaults(func=_cmd_ftu_check)

    cf = sub.add_parser("counterfactuals", help="build a counterfactual pairs file")
    cf.add_argument("--input", required=True, help="JSONL file with prompt_id/prompt")
    cf.add_argument("--output", required=True, help="pairs JSONL to write")
    cf.add_argument("--lexicon", help="lexicon JSON file (default: packaged)")
    cf.add_argument("--group-a", default="male")
    cf.add_argument("--group-b", default="female")
    cf.set_defaults(func=_cmd_counterfactuals)

    audit = sub.add_parser(
        "audit",
        help="run the configured audit",
        epilog=(
            "Sampling guidance: the max-based generation metrics (expected "
            "maximum toxicity/stereotype and the toxicity/stereotype "
            "probabilities) are usually run with 25 generations per prompt; "
            "the fraction metrics work from 1 per prompt. Smaller samples "
            "are accepted with a warning, never rejected."
        ),
    )
    audit.add_argument("--config", required=True, help="audit config JSON file")
    audit.add_argument("--output", help="write the canonical JSON report here")
    audit.add_argument("--text", action="store_true", help="print the text rendering")
    audit.add_argument("--run-id", help="fixed run id (default: random)")
    audit.add_argument("--timestamp", help="fixed timestamp (default: now, UTC)")
    audit.add_argument("--workers", type=int)
    audit.add_argument("--epsilon", type=float, help="invariance tolerance")
    audit.add_argument("--enforce-epsilon", action="store_true")
    audit.add_argument("--group-a")
    audit.add_argument("--group-b")
    audit.add_argument("--generation-file")
    audit.add_argument("--classification-file")
    audit.add_argument("--recommendation-file")
    audit.add_argument("--counterfactual-file")
    audit.set_defaults(func=_cmd_audit)

    ver = sub.add_parser("version", help="print the package version")
    ver.set_defaults(func=_cmd_version)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProviderUnavailableError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except IngestError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (AuditError, ValueError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
