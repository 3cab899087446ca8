"""Command-line interface.

Commands: ``optima``, ``verify``, ``synthesize``, ``dynamics``,
``region``, ``simulate``, ``rule print``.  Exit status 0 on success or a
Supported verdict, 1 on a negative verdict (NotSupported, infeasible,
non-converged, failed internal verification), 2 on usage or
configuration errors.

Values can come from a config file (flat key-value with sections, e.g.
``[rate] family = sqrt_ratio``) with command-line flags taking
precedence.  Output is aligned text by default; ``--format csv|tsv``
emits machine-readable rows whose floats round-trip exactly.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .equilibrium import (
    TOL_EQ,
    Mode,
    best_response_dynamics,
    near_constant_feasibility,
    synthesize_rule,
    verify_equilibrium,
)
from .errors import SeqInvestError
from .optima import (
    first_best_investment,
    initiator_optimal,
    region_sweep,
    self_financed_optimal,
    socially_optimal,
)
from .profiles import ConstantTailProfile
from .rates import SuccessRate, rate_from_config, validate
from .rules import RewardRule, rule_from_config
from .simulate import SimulationConfig, summarize

_RATE_KEYS = {"family", "epsilon", "domain_cap"}
_PROFILE_KEYS = {"prefix", "tail"}


class UsageError(SeqInvestError):
    pass


def _fmt(value: float, machine: bool) -> str:
    if machine:
        return repr(float(value))
    return f"{value:.10g}"


def _emit(rows: Iterable[Sequence[object]], fmt: str, out) -> None:
    machine = fmt in ("csv", "tsv")
    sep = {"csv": ",", "tsv": "\t"}.get(fmt, "  ")
    rendered = [
        [_fmt(v, machine) if isinstance(v, float) else str(v) for v in row]
        for row in rows
    ]
    if machine:
        for row in rendered:
            print(sep.join(row), file=out)
        return
    widths: dict[int, int] = {}
    for row in rendered:
        for j, cell in enumerate(row):
            widths[j] = max(widths.get(j, 0), len(cell))
    for row in rendered:
        print(
            "  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip(),
            file=out,
        )


def _parse_kv(text: str, what: str) -> dict[str, str]:
    out: dict[str, str] = {}
    depth = 0
    part = ""
    parts = []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(part)
            part = ""
        else:
            part += ch
    if part:
        parts.append(part)
    for item in parts:
        if "=" not in item:
            raise UsageError(f"malformed {what} item {item.strip()!r}; expected key=value")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _parse_profile(text: str) -> ConstantTailProfile:
    fields = _parse_kv(text, "profile")
    unknown = set(fields) - _PROFILE_KEYS
    if unknown:
        raise UsageError(f"unknown profile key {sorted(unknown)[0]!r}")
    if "tail" not in fields:
        raise UsageError("profile needs a tail value (tail=...)")
    prefix: tuple[float, ...] = ()
    raw = fields.get("prefix", "[]").strip()
    if not (raw.startswith("[") and raw.endswith("]")):
        raise UsageError("profile prefix must look like prefix=[a, b, ...]")
    inner = raw[1:-1].strip()
    if inner:
        prefix = tuple(float(v) for v in inner.split(","))
    return ConstantTailProfile(prefix, float(fields["tail"]))


def _parse_rule(text: str) -> RewardRule:
    fields = _parse_kv(text, "rule")
    if "kind" not in fields:
        raise UsageError("rule needs a kind (kind=...)")
    kind = fields.pop("kind")
    params = {k: float(v) for k, v in fields.items()}
    return rule_from_config(kind, params)


def _load_config(path: str | None) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    if path:
        read = parser.read(path)
        if not read:
            raise UsageError(f"cannot read config file {path!r}")
    return parser


def _section(cfg: configparser.ConfigParser, name: str, allowed: set[str]) -> dict[str, str]:
    if not cfg.has_section(name):
        return {}
    fields = dict(cfg.items(name))
    unknown = set(fields) - allowed
    if unknown:
        raise UsageError(f"unknown config key {sorted(unknown)[0]!r} in [{name}]")
    return fields


def _resolve_rate(args, cfg) -> SuccessRate:
    section = _section(cfg, "rate", _RATE_KEYS)
    family = args.rate or section.get("family", "sqrt_ratio").strip('"')
    epsilon = args.epsilon if args.epsilon is not None else float(section.get("epsilon", 0.0))
    cap = float(section.get("domain_cap", 1e6))
    rate = rate_from_config(family, epsilon, domain_cap=cap)
    if not args.no_validate:
        report = validate(rate, points=128)
        if report.passed:
            print(
                f"# rate {rate.name}: validation passed ({len(report.checks)} checks)",
                file=sys.stderr,
            )
        else:
            for line in report.lines():
                print(f"# rate {rate.name}: {line}", file=sys.stderr)
    return rate


def _resolve_profile(args, cfg) -> ConstantTailProfile:
    if getattr(args, "profile", None):
        return _parse_profile(args.profile)
    section = _section(cfg, "profile", _PROFILE_KEYS)
    if section:
        text = ", ".join(f"{k}={v}" for k, v in section.items())
        return _parse_profile(text)
    raise UsageError("no profile given (use --profile or a [profile] section)")


def _resolve_rule(args, cfg) -> RewardRule:
    if getattr(args, "rule", None):
        return _parse_rule(args.rule)
    if cfg.has_section("rule"):
        fields = dict(cfg.items("rule"))
        text = ", ".join(f"{k}={v}" for k, v in fields.items())
        return _parse_rule(text)
    raise UsageError("no rule given (use --rule or a [rule] section)")


def _open_output(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _cmd_optima(args, cfg) -> int:
    sr = _resolve_rate(args, cfg)
    out, close = _open_output(args.output)
    try:
        rows: list[tuple[object, ...]] = [("quantity", "value", "detail")]
        rows.append(("c_fb", first_best_investment(sr), "first-best constant"))
        failures = 0
        for result in (socially_optimal(sr), initiator_optimal(sr), self_financed_optimal(sr)):
            ok = result.report.supported
            failures += 0 if ok else 1
            head = result.profile.prefix[0] if result.profile.prefix else result.profile.tail
            if result.profile.prefix:
                rows.append((f"x0_{result.name}", float(head), result.rule.describe()))
            rows.append(
                (
                    f"c_{result.name}",
                    float(result.profile.tail),
                    f"objective={_fmt(result.objective, False)}"
                    f" residual={result.max_residual:.3g}"
                    f" verified={'yes' if ok else 'NO'}",
                )
            )
        _emit(rows, args.format, out)
        return 1 if failures else 0
    finally:
        if close:
            out.close()


def _cmd_verify(args, cfg) -> int:
    sr = _resolve_rate(args, cfg)
    rule = _resolve_rule(args, cfg)
    profile = _resolve_profile(args, cfg)
    mode = Mode.SELF_FINANCED if args.self_financed else Mode.UNCONSTRAINED
    report = verify_equilibrium(sr, rule, profile, mode=mode, tol=args.tol_eq)
    out, close = _open_output(args.output)
    try:
        rows: list[tuple[object, ...]] = [
            ("verdict", report.verdict, ""),
            ("mode", mode.value, ""),
            ("profile", profile.describe(), ""),
            ("max_residual", report.max_residual, ""),
        ]
        for chk in report.checks:
            rows.append(
                (
                    f"agent_{chk.agent}",
                    chk.residual,
                    f"investment={_fmt(chk.investment, False)}"
                    f" payoff={_fmt(chk.payoff, False)}"
                    + (f" corner={chk.corner}" if chk.corner else ""),
                )
            )
        for failure in report.failures:
            rows.append(("failure", failure, ""))
        _emit(rows, args.format, out)
        return 0 if report.supported else 1
    finally:
        if close:
            out.close()


def _cmd_synthesize(args, cfg) -> int:
    sr = _resolve_rate(args, cfg)
    feas = near_constant_feasibility(sr, args.x0, args.c, args.gamma)
    out, close = _open_output(args.output)
    try:
        rows: list[tuple[object, ...]] = [
            ("verdict", feas.verdict, ""),
            ("initiator_return", feas.ratio, ""),
            ("lower_bound", feas.lower, "binding at max(lower, 0)"),
            ("upper_bound", feas.upper, ""),
        ]
        if not feas.feasible:
            _emit(rows, args.format, out)
            return 1
        rule = synthesize_rule(sr, args.x0, args.c, args.gamma)
        profile = ConstantTailProfile((args.x0,), args.c)
        mode = Mode.SELF_FINANCED if args.self_financed else Mode.UNCONSTRAINED
        report = verify_equilibrium(sr, rule, profile, mode=mode)
        rows.append(("rule", rule.describe(), ""))
        rows.append(("verified", report.verdict, f"max_residual={report.max_residual:.3g}"))
        _emit(rows, args.format, out)
        return 0 if report.supported else 1
    finally:
        if close:
            out.close()


def _cmd_dynamics(args, cfg) -> int:
    sr = _resolve_rate(args, cfg)
    rule = _resolve_rule(args, cfg)
    init = _parse_profile(args.init) if args.init else None
    result = best_response_dynamics(
        sr,
        rule,
        args.horizon,
        init,
        sweeps=args.sweeps,
        damping=args.damping,
    )
    out, close = _open_output(args.output)
    try:
        rows: list[tuple[object, ...]] = [
            ("converged", "yes" if result.converged else "no", f"sweeps={result.sweeps}"),
            ("max_change", result.max_change, ""),
            ("max_residual", result.max_residual, "over swept agents"),
        ]
        for i in range(args.horizon):
            rows.append((f"x_{i}", float(result.profile.at(i)), ""))
        _emit(rows, args.format, out)
        return 0 if result.converged else 1
    finally:
        if close:
            out.close()


def _cmd_region(args, cfg) -> int:
    sr = _resolve_rate(args, cfg)
    if args.points < 1:
        raise UsageError(f"--points must be >= 1, got {args.points}")
    mode = Mode(args.mode)
    if args.c_max is not None:
        c_max = args.c_max
    else:
        # largest feasible tail for the mode: prize (+ tail floor) reaches 1
        from .solvers import bisect, expand_bracket

        def headroom(c: float) -> float:
            gamma = c if mode is Mode.SELF_FINANCED else 0.0
            return 1.0 - sr.incentive_prize(c) - gamma

        lo, hi = expand_bracket(headroom, 1e-12, 1.0, limit=sr.domain_cap)
        c_max = bisect(headroom, lo, hi)
    grid = np.linspace(c_max / (args.points + 1), c_max, args.points, endpoint=False)
    rows: list[tuple[object, ...]] = [("c", "diagonal", "lower", "upper")]
    for row in region_sweep(sr, grid, mode):
        rows.append(
            (
                float(row.c),
                float(row.diagonal),
                "" if row.lower is None else float(row.lower),
                "" if row.upper is None else float(row.upper),
            )
        )
    out, close = _open_output(args.output)
    try:
        _emit(rows, args.format, out)
        return 0
    finally:
        if close:
            out.close()


def _cmd_simulate(args, cfg) -> int:
    sr = _resolve_rate(args, cfg)
    rule = _resolve_rule(args, cfg)
    profile = _resolve_profile(args, cfg)
    config = SimulationConfig(
        episodes=args.episodes,
        seed=args.seed,
        max_chain_length=args.max_chain_length,
        shards=args.shards,
        payoff_horizon=args.payoff_horizon,
    )
    summary = summarize(sr, profile, rule, config)
    out, close = _open_output(args.output)
    try:
        rows: list[tuple[object, ...]] = [
            ("episodes", str(summary.episodes), ""),
            ("discarded", str(summary.discarded), ""),
            ("terminal_index", summary.terminal_index.mean, f"se={summary.terminal_index.se:.3g}"),
            ("total_value", summary.total_value.mean, f"se={summary.total_value.se:.3g}"),
            ("total_investment", summary.total_investment.mean, f"se={summary.total_investment.se:.3g}"),
            ("welfare", summary.welfare.mean, f"se={summary.welfare.se:.3g}"),
        ]
        for pay in summary.payoffs:
            rows.append(
                (
                    f"payoff_{pay.agent}",
                    pay.mean,
                    f"se={pay.se:.3g} reached={pay.reached}",
                )
            )
        if args.histogram:
            for k, count in enumerate(summary.histogram):
                rows.append((f"chain_length_{k}", str(count), ""))
        _emit(rows, args.format, out)
        return 0
    finally:
        if close:
            out.close()


def _cmd_rule_print(args, cfg) -> int:
    rule = _resolve_rule(args, cfg)
    out, close = _open_output(args.output)
    try:
        rows = [tuple(float(v) for v in rule.row(k)) for k in range(args.rows)]
        _emit(rows, args.format if args.format != "table" else "tsv", out)
        return 0
    finally:
        if close:
            out.close()


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rate", choices=["sqrt_ratio", "scaled_sqrt_ratio"], default=None,
                   help="success-rate family (default sqrt_ratio)")
    p.add_argument("--epsilon", type=float, default=None, help="cap parameter")
    p.add_argument("--config", default=None, help="config file (flags override it)")
    p.add_argument("--format", choices=["table", "csv", "tsv"], default="table")
    p.add_argument("--output", default=None, help="output path (default stdout)")
    p.add_argument("--no-validate", action="store_true",
                   help="skip the advisory rate validation printout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqinvest",
        description="equilibria and optimal reward rules for sequential investment chains",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optima", help="solve and verify the four optimum programs")
    _add_common(p)
    p.set_defaults(handler=_cmd_optima)

    p = sub.add_parser("verify", help="check whether a rule supports a profile")
    _add_common(p)
    p.add_argument("--rule", help='e.g. "kind=equal_split" or "kind=fixed_fraction,alpha=0.4"')
    p.add_argument("--profile", help='e.g. "prefix=[0.0995],tail=0.0264"')
    p.add_argument("--self-financed", action="store_true")
    p.add_argument("--tol-eq", type=float, default=TOL_EQ, dest="tol_eq",
                   help="best-response residual tolerance")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("synthesize", help="build a rule supporting (x0, c, c, ...)")
    _add_common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--c", type=float, required=True, help="tail investment")
    p.add_argument("--gamma", type=float, default=0.0, help="per-agent floor")
    p.add_argument("--self-financed", action="store_true")
    p.set_defaults(handler=_cmd_synthesize)

    p = sub.add_parser("dynamics", help="truncated best-response sweeps")
    _add_common(p)
    p.add_argument("--rule", required=False)
    p.add_argument("--horizon", type=int, default=8)
    p.add_argument("--init", default=None, help="initial profile (default all zeros)")
    p.add_argument("--sweeps", type=int, default=200)
    p.add_argument("--damping", type=float, default=1.0)
    p.set_defaults(handler=_cmd_dynamics)

    p = sub.add_parser("region", help="near-constant support-region boundary curves")
    _add_common(p)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.UNCONSTRAINED.value)
    p.add_argument("--points", type=int, default=256)
    p.add_argument("--c-max", type=float, default=None, dest="c_max")
    p.set_defaults(handler=_cmd_region)

    p = sub.add_parser("simulate", help="seeded Monte Carlo of the chain")
    _add_common(p)
    p.add_argument("--rule", required=False)
    p.add_argument("--profile", required=False)
    p.add_argument("--episodes", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--max-chain-length", type=int, default=10_000, dest="max_chain_length")
    p.add_argument("--payoff-horizon", type=int, default=8, dest="payoff_horizon")
    p.add_argument("--histogram", action="store_true")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("rule", help="inspect reward rules")
    rule_sub = p.add_subparsers(dest="rule_command", required=True)
    q = rule_sub.add_parser("print", help="emit the first K rows of a rule")
    _add_common(q)
    q.add_argument("--rule", required=False)
    q.add_argument("--rows", type=int, default=8)
    q.set_defaults(handler=_cmd_rule_print)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return args.handler(args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SeqInvestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
