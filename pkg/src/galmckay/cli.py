"""Command line entry point: enumerate parameters, run verifications, dump tables."""
import json
import sys
from pathlib import Path

import click

from .cyclo import d_ell
from .relweyl import exclusion_reason

TYPES = ["A1", "C2", "C3", "B3", "B4", "D4", "G2", "F4"]


def _common(f):
    f = click.option("--type", "label", type=click.Choice(TYPES), required=True)(f)
    f = click.option("--q", type=int, required=True, help="Odd prime power.")(f)
    f = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the JSON report here.")(f)
    f = click.option("--cache", type=click.Path(file_okay=False), default=None,
                     help="Directory for cached character tables and reports.")(f)
    f = click.option("--strict", is_flag=True, help="Treat flagged and indeterminate checks as failures.")(f)
    return f


def _emit(report, out, cache, name: str, strict: bool) -> None:
    text = report.to_json(indent=2)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text)
    if cache:
        Path(cache).mkdir(parents=True, exist_ok=True)
        (Path(cache) / f"{name}.json").write_text(text)
    bad = {"fail"} | ({"flagged", "indeterminate"} if strict else set())
    failed = [c["name"] for c in report.checks if c["status"] in bad]
    for name in dict.fromkeys(c["name"] for c in report.checks):
        click.echo(f"{report.status_of(name):>13}  {name}", err=True)
    sys.exit(1 if failed else 0)


def _check_q(label: str, q: int, ell: int = None) -> None:
    from .hecke import _prime_power

    try:
        _prime_power(q)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--q")
    if q % 2 == 0:
        raise click.BadParameter("q must be odd", param_hint="--q")
    if ell is not None and q % ell == 0:
        raise click.BadParameter(f"ell = {ell} divides q", param_hint="--ell")


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Galois-equivariance checks for principal-series McKay bijections."""


@main.command()
@_common
@click.option("--ell", type=int, required=True)
@click.option("--twisted", is_flag=True, help="Use the torus T1 with q = 3 mod 4 (ell = 2).")
def enumerate(label, q, out, cache, strict, ell, twisted):
    """List the parameters (lambda, eta) of ell'-degree."""
    from .mckaybij import Context, VerificationReport, _meta, _param_json

    _check_q(label, q, ell)
    ctx = Context(label, q, ell, twisted)
    try:
        ps = ctx.params
    except ValueError as exc:
        raise click.UsageError(str(exc))
    report = VerificationReport(_meta(ctx))
    report.params = [_param_json(p) for p in ps.params]
    for flag in ps.flags:
        report.add("exclusion", "flagged", {"reason": flag})
    _emit(report, out, cache, f"enumerate-{label}-{q}-{ell}", strict)


@main.command()
@_common
@click.option("--ell", type=int, required=True)
@click.option("--twisted", is_flag=True)
@click.option("--jobs", type=int, default=1, help="Worker threads for the equivariance cells.")
def verify(label, q, out, cache, strict, ell, twisted, jobs):
    """Full verification of Omega; type C with ell = 2 and q != 1 mod 8 goes to the Sp pairing."""
    from .mckaybij import hecke_suite, sp_pairing, verify_equivariance, verify_rationality_N1

    _check_q(label, q, ell)
    if label[0] == "C" and ell == 2 and q % 8 != 1:
        click.echo(f"routed to sp-pairing: {exclusion_reason('C', q, ell)}", err=True)
        report = sp_pairing(int(label[1:]), q)
        _emit(report, out, cache, f"sp-{label}-{q}", strict)
        return
    d = d_ell(q, ell)
    if twisted or d != 1:
        if ell == 2 and d == 2:
            report = verify_rationality_N1(label, q)
            _emit(report, out, cache, f"rationality-{label}-{q}", strict)
            return
        raise click.UsageError(f"d = {d}: only d = 1 (split torus) or ell = 2, d = 2 (twisted torus) are covered")
    report = verify_equivariance(label, q, ell, jobs=jobs)
    extra = hecke_suite(label, q, ell)
    for c in extra.checks:
        report.checks.append({**c, "name": "hecke." + c["name"]})
    _emit(report, out, cache, f"verify-{label}-{q}-{ell}", strict)


@main.command()
@_common
def rationality(label, q, out, cache, strict):
    """Rationality of the odd-degree characters of N1 (q = 3 mod 4)."""
    from .mckaybij import verify_rationality_N1

    _check_q(label, q, 2)
    if q % 4 != 3:
        raise click.BadParameter("needs q = 3 mod 4", param_hint="--q")
    report = verify_rationality_N1(label, q)
    _emit(report, out, cache, f"rationality-{label}-{q}", strict)


@main.command("sp-pairing")
@_common
def sp_pairing_cmd(label, q, out, cache, strict):
    """Parameter-level pairing for Sp_2n(q), ell = 2, q != 1 mod 8."""
    from .mckaybij import sp_pairing

    _check_q(label, q, 2)
    if label[0] != "C":
        raise click.BadParameter("the pairing is for type C", param_hint="--type")
    try:
        report = sp_pairing(int(label[1:]), q)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _emit(report, out, cache, f"sp-{label}-{q}", strict)


@main.command()
@_common
@click.option("--ell", type=int, required=True)
@click.option("--twisted", is_flag=True)
def table(label, q, out, cache, strict, ell, twisted):
    """Character tables of the relative Weyl groups W(lambda) met by the parameters."""
    from .mckaybij import Context

    _check_q(label, q, ell)
    ctx = Context(label, q, ell, twisted)
    data = []
    for lam, rel in ctx.params.rel.items():
        tab = ctx.chars.wlambda_table(rel)
        G = tab.group
        data.append({
            "lambda": list(lam.exps),
            "class_reps": [G.labels[r] for r in G.class_reps],
            "class_sizes": G.class_sizes,
            "characters": [[v.to_json() for v in chi.values] for chi in tab.irreducibles],
        })
    text = json.dumps({"type": label, "q": q, "ell": ell, "tables": data}, indent=2)
    if cache:
        Path(cache).mkdir(parents=True, exist_ok=True)
        (Path(cache) / f"tables-{label}-{q}-{ell}.json").write_text(text)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text)


if __name__ == "__main__":
    main()
