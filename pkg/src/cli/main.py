"""``nielsen`` command line: load a spec file, run one computation, print a report."""
import functools
import logging
import sys
from dataclasses import replace

import click
import numpy as np

from common.counts import count_to_json, is_finite
from common.errors import HypothesisViolation, InconsistentResult, NielsenError
from exactla.matrices import IntegerMatrix, bareiss_determinant, cofactor_determinant, det, det_i_minus
from exactla.smith import cokernel_classes
from qpoly.multipoly import finite_difference_jacobian
from canonical.maps import compose_maps, jacobian_at, linearisation
from spectra.certify import CERTIFIED, Certification, SpectralReport, net_certify, spectral_report
from reidemeister.classes import (
    TwistedClasses,
    brute_force_coker,
    check_addition_inequality,
    reidemeister_abelian,
)
from nielsen.formulas import (
    DEFAULT_NET_SUBGROUP,
    DEFAULT_SUBGROUP,
    nielsen_average_invariant,
    nielsen_average_net,
    nielsen_via_jacobian,
    random_points,
    resolve_subgroup,
)
from nielsen.checks import n_equals_r_check
from fixedpoints.solver import count_fixed_points_on_quotient
from cli.report import Report
from cli.settings import load_settings, setup_logging
from cli.spec_loader import load_and_validate, parse_param_overrides

logger = logging.getLogger(__name__)

EXIT_INPUT_ERROR = 1
EXIT_REFUTED = 2


def spec_command(func):
    """Shared arguments of every spec-driven command, plus error-to-exit-code mapping."""

    @click.argument("spec_path", type=click.Path(dir_okay=False))
    @click.option("--param", "params", multiple=True, help="Parameter values, e.g. k=2 or a=-1,c=-1")
    @click.option("--json", "as_json", is_flag=True, help="Machine-readable output")
    @click.pass_obj
    @functools.wraps(func)
    def wrapper(settings, spec_path, params, as_json, **kwargs):
        try:
            spec = load_and_validate(spec_path, parse_param_overrides(params))
            report = func(settings, spec, **kwargs)
        except HypothesisViolation as e:
            logger.error(f"❌ hypothesis refuted: {e}")
            sys.exit(EXIT_REFUTED)
        except NielsenError as e:
            logger.error(f"❌ {type(e).__name__}: {e}")
            sys.exit(EXIT_INPUT_ERROR)
        report.spec = spec.name or spec_path
        report.parameters = spec.params
        click.echo(report.render(as_json))
        if report.exit_code:
            sys.exit(report.exit_code)

    return wrapper


def _pick(value, settings, section, key):
    return value if value is not None else settings[section][key]


@click.group()
@click.option("--config", "config_path", default=None, help="Path to config.yaml")
@click.pass_context
def cli(ctx, config_path):
    """Nielsen and Reidemeister numbers of maps on infra-solvmanifolds."""
    settings = load_settings(config_path)
    setup_logging(settings["logging"]["level"])
    ctx.obj = settings


@cli.command()
@spec_command
def validate(settings, spec):
    """Check a spec file: schema, canonical form and equivariance of the lift."""
    group = spec.group
    report = Report("validate")
    report.results = {
        "status": "ok",
        "filtration": list(group.filtration.block_dims),
        "generators": sorted(group.generators),
        "subgroups": {name: sub.index for name, sub in sorted(group.subgroups.items())},
        "equivariant": True,
    }
    report.notes = spec.notes
    return report


@cli.command()
@click.option("--route", type=click.Choice(["invariant", "net", "jacobian"]), default="invariant")
@click.option("--samples", type=int, default=None, help="Sample points for the Jacobian route")
@click.option("--seed", type=int, default=None)
@click.option("--word-bound", type=int, default=None)
@click.option("--exponent-bound", type=int, default=None)
@click.option("--subgroup", default=None, help="Subgroup to average over")
@spec_command
def nielsen(settings, spec, route, samples, seed, word_bound, exponent_bound, subgroup):
    """N(f) by one of the averaging formulas."""
    word_bound = _pick(word_bound, settings, "certification", "word_bound")
    if route == "invariant":
        result = nielsen_average_invariant(spec.group, spec.endo, subgroup or DEFAULT_SUBGROUP, word_bound)
    elif route == "net":
        result = nielsen_average_net(
            spec.group, spec.endo, subgroup or DEFAULT_NET_SUBGROUP,
            exponent_bound=_pick(exponent_bound, settings, "certification", "exponent_bound"),
        )
    else:
        result = nielsen_via_jacobian(
            spec.group, spec.endo,
            samples=_pick(samples, settings, "jacobian", "samples"),
            seed=_pick(seed, settings, "jacobian", "seed"),
            subgroup=subgroup or DEFAULT_SUBGROUP,
            word_bound=word_bound,
        )
    report = Report("nielsen")
    report.results = {"route": route, "value": result.value, "index": result.index}
    if route == "jacobian":
        report.results["constant_over_points"] = True
    report.add_table("coset terms", [
        {"rep": t.rep or "1", "determinants": t.determinants, "term": t.value} for t in result.terms
    ])
    report.hypotheses = result.hypotheses
    report.notes = spec.notes
    return report


@cli.command()
@click.option("--addition-subgroup", default=None, help="Also check the addition inequality for this subgroup")
@click.option("--compare-nielsen", is_flag=True, help="Also compute N(f) and check N = R when finite")
@spec_command
def reidemeister(settings, spec, addition_subgroup, compare_nielsen):
    """R(f) with one representative per twisted-conjugacy class."""
    counter = TwistedClasses(spec.group.view(), spec.endo)
    result = counter.result()
    report = Report("reidemeister")
    report.results = {"count": count_to_json(result.count)}
    report.add_table("representatives", [
        {"class": i, "element": rep.format()} for i, rep in enumerate(result.representatives)
    ])
    if addition_subgroup:
        outcome = check_addition_inequality(spec.group, addition_subgroup, spec.endo)
        report.results["addition_inequality"] = {
            "left": count_to_json(outcome.left), "right": count_to_json(outcome.right), "ok": outcome.ok,
        }
    if compare_nielsen:
        check = n_equals_r_check(
            spec.group, spec.endo, notes=spec.notes,
            word_bound=settings["certification"]["word_bound"],
        )
        report.results["nielsen"] = check.nielsen.value
        report.add_table("cover terms", [
            {"rep": t.rep or "1", "reidemeister": count_to_json(t.reidemeister), "nielsen": t.nielsen}
            for t in check.cover_terms
        ])
        report.hypotheses = check.nielsen.hypotheses
    report.notes = spec.notes
    return report


@cli.command("fixed-points")
@click.option("--search-radius", type=int, default=None)
@spec_command
def fixed_points(settings, spec, search_radius):
    """Fixed points of the induced map: Finite(N(f)) or Uncountable."""
    outcome = count_fixed_points_on_quotient(
        spec.group, spec.endo,
        search_radius=_pick(search_radius, settings, "fixed_points", "search_radius"),
        word_bound=settings["certification"]["word_bound"],
    )
    report = Report("fixed-points")
    report.results = {"result": str(outcome)}
    report.add_table("lifts", [
        {"lift": i, "kind": s.kind, "point": s.point if s.point is not None else "-",
         "degenerate_level": s.first_degenerate_level or "-"}
        for i, s in enumerate(outcome.structures)
    ])
    return report


def _certification_report(command, spectral, require_certified):
    report = Report(command)
    report.results = {"verdict": str(spectral.verdict), "certification": spectral.verdict.to_json()}
    report.add_table("spectra", spectral.rows())
    if require_certified and not spectral.verdict.certified:
        logger.error(f"❌ certification required, got {spectral.verdict}")
        report.exit_code = EXIT_REFUTED
    return report


@cli.command("certify-nr")
@click.option("--subgroup", default=DEFAULT_SUBGROUP)
@click.option("--word-bound", type=int, default=None)
@click.option("--require-certified", is_flag=True)
@spec_command
def certify_nr(settings, spec, subgroup, word_bound, require_certified):
    """NR certificate for the level actions of a subgroup's generators."""
    sub = resolve_subgroup(spec.group, subgroup)
    logger.info(f"🔎 NR search for {sub.name}")
    spectral = spectral_report(
        spec.group.level_actions(sub.generators),
        _pick(word_bound, settings, "certification", "word_bound"),
    )
    return _certification_report("certify-nr", spectral, require_certified)


@cli.command("certify-net")
@click.option("--subgroup", default=DEFAULT_NET_SUBGROUP)
@click.option("--exponent-bound", type=int, default=None)
@click.option("--require-certified", is_flag=True)
@spec_command
def certify_net(settings, spec, subgroup, exponent_bound, require_certified):
    """Net certificate for every non-trivial level block of a subgroup's generators."""
    sub = resolve_subgroup(spec.group, subgroup)
    bound = _pick(exponent_bound, settings, "certification", "exponent_bound")
    logger.info(f"🔎 net search for {sub.name}")
    spectral = SpectralReport()
    verdicts = []
    for level, blocks in spec.group.level_actions(sub.generators).items():
        for word, block in blocks.items():
            if block.is_identity():
                continue
            scratch = SpectralReport()
            verdicts.append(net_certify(block, bound, report=scratch))
            spectral.entries.extend(
                replace(e, level=level, word=f"{word}: {e.word}") for e in scratch.entries
            )
    refuted = [c for c in verdicts if c.refuted]
    open_ = [c for c in verdicts if not c.certified]
    if refuted:
        spectral.verdict = refuted[0]
    elif open_:
        spectral.verdict = open_[0]
    else:
        spectral.verdict = Certification(CERTIFIED, method="all level blocks certified")
    return _certification_report("certify-net", spectral, require_certified)


@cli.command()
@click.option("--subgroup", default=DEFAULT_SUBGROUP)
@spec_command
def linearise(settings, spec, subgroup):
    """Diagonal blocks of ρ(α) ∘ p for every coset representative α."""
    sub = resolve_subgroup(spec.group, subgroup)
    rows = []
    for rep in sub.coset_reps:
        blocks = linearisation(compose_maps(spec.group.element(rep), spec.endo.lift))
        for level, block in enumerate(blocks, start=1):
            rows.append({"rep": rep or "1", "level": level, "block": str(block), "det(I - D)": det_i_minus(block)})
    report = Report("linearise")
    report.results = {"lift": spec.endo.lift.format()}
    report.add_table("blocks", rows)
    return report


def _random_matrix(rng, n, entry_range):
    return IntegerMatrix.from_rows(
        rng.integers(-entry_range, entry_range + 1, size=(n, n)).tolist()
    )


@cli.command()
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=None)
@spec_command
def oracle(settings, spec, trials, seed):
    """Brute-force cross-checks of the exact machinery, on random data and on the spec."""
    trials = _pick(trials, settings, "oracle", "trials")
    entry_range = settings["oracle"]["entry_range"]
    rng = np.random.default_rng(_pick(seed, settings, "jacobian", "seed"))
    rows = []

    failures = 0
    done = 0
    while done < trials:
        F = _random_matrix(rng, int(rng.integers(2, 4)), entry_range)
        M = IntegerMatrix.identity(F.rows) - F
        if det(M) == 0:
            continue
        done += 1
        result = reidemeister_abelian(F)
        classes = cokernel_classes(M)
        reps = result.representatives
        distinct = all(
            not classes.contains(tuple(a - b for a, b in zip(reps[i], reps[j])))
            for i in range(len(reps)) for j in range(i + 1, len(reps))
        )
        if result.count != brute_force_coker(M) or not distinct:
            failures += 1
    rows.append({"check": "smith vs brute force cokernel", "trials": trials, "failures": failures})

    failures = 0
    for _ in range(trials):
        A = _random_matrix(rng, int(rng.integers(1, 5)), entry_range)
        if cofactor_determinant(A.to_rows()) != bareiss_determinant(A.to_rows()):
            failures += 1
    rows.append({"check": "cofactor vs Bareiss determinant", "trials": trials, "failures": failures})

    maps = dict(spec.group.generators)
    maps["lift"] = spec.endo.lift
    points = random_points(spec.group.filtration.dimension, 5, int(rng.integers(0, 10 ** 6)))
    failures = 0
    for name in sorted(maps):
        for x in points:
            exact = np.array([[float(v) for v in row] for row in jacobian_at(maps[name], x).to_rows()])
            approx = finite_difference_jacobian(list(maps[name].components), x)
            if not np.allclose(exact, approx, rtol=1e-6, atol=1e-6):
                failures += 1
    rows.append({"check": "finite-difference Jacobians", "trials": len(maps) * len(points), "failures": failures})

    counter = TwistedClasses(spec.group.view(), spec.endo)
    classes = counter.result()
    if is_finite(classes.count):
        failures = sum(
            1 for i, rep in enumerate(classes.representatives) if counter.class_index(rep) != i
        )
        rows.append({"check": "class representatives inequivalent", "trials": classes.count, "failures": failures})

    report = Report("oracle")
    total = sum(r["failures"] for r in rows)
    report.results = {"failures": total}
    report.add_table("checks", rows)
    if total:
        raise InconsistentResult(f"{total} oracle checks failed")
    return report


def main():
    cli(prog_name="nielsen")


if __name__ == "__main__":
    main()
