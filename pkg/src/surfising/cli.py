"""Command-line surface: fixture management, cross-method verification, and
machine-readable result blocks (one JSON object per line, or a table)."""

from __future__ import annotations

import json
import sys
import time
from dataclasses import asdict, dataclass, field

import click
import numpy as np

from . import bruteforce, dimer, dirac, fixtures
from .cycles import spin_indices
from .embedding import load_embedded_graph
from .iharafeyn import (
    ihara_selberg_det,
    ising_generating_function,
    ising_partition_function,
    truncated_cycle_product,
    univariate_even_counts,
)
from .polyring import MultiPoly, max_coeff_diff, render
from .transition import build_delta, build_delta_prime


@dataclass
class ResultBlock:
    command: str
    fixture: str
    method: str
    result: str                      # integer-snapped rendering
    raw_result: str                  # full-precision rendering
    residual: float | None = None
    max_deviation: float | None = None
    ok: bool = True
    timing: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, default=str)

    def to_table(self) -> str:
        lines = [f"== {self.command} [{self.fixture}] method={self.method} "
                 f"ok={self.ok}",
                 f"   result: {self.result}"]
        if self.residual is not None:
            lines.append(f"   residual: {self.residual:.3e}")
        if self.max_deviation is not None:
            lines.append(f"   max deviation: {self.max_deviation:.3e}")
        for k, v in self.diagnostics.items():
            lines.append(f"   {k}: {v}")
        if self.timing is not None:
            lines.append(f"   time: {self.timing:.3f}s")
        return "\n".join(lines)


def compare(block_a: ResultBlock, block_b: ResultBlock) -> dict:
    """Coefficientwise diff of two result blocks over the same quantity."""
    if block_a.fixture != block_b.fixture or block_a.command != block_b.command:
        raise ValueError("blocks are not comparable")
    same = block_a.result == block_b.result
    return {"equal": same,
            "left": block_a.result, "right": block_b.result,
            "fixture": block_a.fixture}


def _emit(ctx, block: ResultBlock) -> None:
    if not ctx.obj["timing"]:
        block.timing = None
    if ctx.obj["output"] == "json":
        click.echo(block.to_json())
    else:
        click.echo(block.to_table())
    if not block.ok:
        ctx.exit(1)


def _load(path_or_name: str):
    try:
        return fixtures.load_fixture(path_or_name), path_or_name
    except KeyError:
        return load_embedded_graph(path_or_name), path_or_name


@click.group()
@click.option("--cap", type=int, default=None, help="total-degree cap")
@click.option("--tolerance", type=float, default=1e-6, help="integer-snap tolerance")
@click.option("--threads", type=int, default=1,
              help="worker hint; 1 keeps output byte-identical")
@click.option("--sign-rule", type=click.Choice(["arf", "literal"]), default="arf")
@click.option("--output", type=click.Choice(["json", "table"]), default="table")
@click.option("--timing/--no-timing", default=False,
              help="include wall-clock times (breaks byte-identical output)")
@click.pass_context
def main(ctx, cap, tolerance, threads, sign_rule, output, timing):
    """Exact Ising / dimer partition functions on surface-embedded graphs."""
    ctx.obj = {"cap": cap, "tolerance": tolerance, "threads": threads,
               "sign_rule": sign_rule, "output": output, "timing": timing}


@main.command("fixtures")
@click.argument("action", type=click.Choice(["list"]))
def fixtures_cmd(action):
    """Bundled fixture corpus."""
    for name in sorted(fixtures.BUNDLED):
        click.echo(name)


@main.command("ising")
@click.option("--input", "input_", required=True, help="fixture name or JSON path")
@click.option("--method", type=click.Choice(["feynman", "bruteforce"]),
              default="feynman")
@click.option("--specialize-univariate", is_flag=True, default=False)
@click.pass_context
def ising_cmd(ctx, input_, method, specialize_univariate):
    """Even-set generating function E(G, x)."""
    graph, name = _load(input_)
    t0 = time.time()
    if method == "bruteforce":
        if specialize_univariate:
            counts = bruteforce.brute_even_set_counts(graph)
            poly = MultiPoly({((("t", d),) if d else ()): float(c)
                              for d, c in enumerate(counts) if c})
        else:
            poly = bruteforce.brute_even_sets(graph)
        block = ResultBlock(command="ising", fixture=name, method=method,
                            result=render(poly, integer_snap=True),
                            raw_result=render(poly), residual=0.0,
                            timing=time.time() - t0)
    else:
        res = ising_generating_function(
            graph, ctx.obj["cap"], sign_rule=ctx.obj["sign_rule"],
            univariate=specialize_univariate, snap_tol=ctx.obj["tolerance"],
            raise_on_residual=False)
        ok = res.residual <= ctx.obj["tolerance"]
        diagnostics = {}
        if res.reduction is not None:
            diagnostics["reduced"] = (f"|V'|={len(res.reduction.graph.vertex_order)} "
                                      f"|Z|={len(res.reduction.zero_edges)} "
                                      f"|O|={len(res.reduction.one_edges)}")
        block = ResultBlock(command="ising", fixture=name, method=method,
                            result=render(res.polynomial, integer_snap=True),
                            raw_result=render(res.raw), residual=res.residual,
                            ok=ok, timing=time.time() - t0,
                            diagnostics=diagnostics)
    _emit(ctx, block)


@main.command("partition")
@click.option("--input", "input_", required=True)
@click.option("--beta", type=float, required=True)
@click.option("--couplings", type=click.Path(exists=True), default=None,
              help="JSON file {edge id: J}; default J=1 everywhere")
@click.option("--method", type=click.Choice(["feynman", "bruteforce"]),
              default="feynman")
@click.pass_context
def partition_cmd(ctx, input_, beta, couplings, method):
    """Ising partition function Z(beta)."""
    graph, name = _load(input_)
    if couplings:
        with open(couplings) as fh:
            j = {str(k): float(v) for k, v in json.load(fh).items()}
    else:
        j = 1.0
    t0 = time.time()
    z = ising_partition_function(graph, j, beta, method=method)
    block = ResultBlock(command="partition", fixture=name, method=method,
                        result=f"{z:.12g}", raw_result=repr(z),
                        timing=time.time() - t0,
                        diagnostics={"beta": beta})
    _emit(ctx, block)


@main.command("verify-fz")
@click.option("--input", "input_", required=True)
@click.option("--max-len", type=int, default=6)
@click.pass_context
def verify_fz_cmd(ctx, input_, max_len):
    """Truncated cycle product against det(I - Delta') for every spin index."""
    graph, name = _load(input_)
    t0 = time.time()
    worst = 0.0
    per_spin = {}
    for s in spin_indices(graph.genus):
        det = ihara_selberg_det(build_delta_prime(build_delta(graph, s)), max_len)
        prod = truncated_cycle_product(graph, s, max_len)
        dev = max_coeff_diff(det.truncate(max_len), prod)
        per_spin[str(s)] = f"{dev:.3e}"
        worst = max(worst, dev)
    ok = worst < 1e-8
    block = ResultBlock(command="verify-fz", fixture=name, method="determinant",
                        result=f"max deviation {worst:.3e} (L={max_len})",
                        raw_result=f"{worst!r}", max_deviation=worst, ok=ok,
                        timing=time.time() - t0, diagnostics=per_spin)
    _emit(ctx, block)


@main.command("dimer")
@click.option("--input", "input_", required=True)
@click.option("--method", type=click.Choice(["pfaffian", "bruteforce"]),
              default="pfaffian")
@click.pass_context
def dimer_cmd(ctx, input_, method):
    """Perfect-matching generating function P(G, x)."""
    graph, name = _load(input_)
    t0 = time.time()
    if method == "bruteforce":
        poly = bruteforce.brute_perfect_matchings(graph)
        block = ResultBlock(command="dimer", fixture=name, method=method,
                            result=render(poly, integer_snap=True),
                            raw_result=render(poly), residual=0.0,
                            timing=time.time() - t0)
    else:
        report = dimer.dimer_pfaffian_combination(graph)
        block = ResultBlock(
            command="dimer", fixture=name, method=method,
            result=render(report.polynomial, integer_snap=True),
            raw_result=render(report.polynomial),
            residual=report.residual, ok=report.residual < 1e-9,
            timing=time.time() - t0,
            diagnostics={"orientations": 4 ** graph.genus,
                         "default_arf_signs": report.used_default_signs})
    _emit(ctx, block)


@main.command("kasteleyn")
@click.argument("action", type=click.Choice(["check", "normalize"]))
@click.option("--input", "input_", required=True)
@click.option("--weights", type=click.Path(exists=True), default=None,
              help="JSON file {edge id: weight}; default all ones")
@click.pass_context
def kasteleyn_cmd(ctx, action, input_, weights):
    """Kasteleyn flatness check / weight normalization."""
    graph, name = _load(input_)
    if weights:
        with open(weights) as fh:
            w = {str(k): complex(v) for k, v in json.load(fh).items()}
    else:
        w = {eid: 1.0 for eid in graph.edge_order}
    t0 = time.time()
    if action == "check":
        flat = dimer.is_kasteleyn_flat(graph, w)
        block = ResultBlock(command="kasteleyn-check", fixture=name,
                            method="curvature", result=f"flat={flat}",
                            raw_result=f"{flat}", ok=True,
                            timing=time.time() - t0)
    else:
        new_w, factors = dimer.normalize_to_simple_flat(graph, w)
        rendered = {k: (f"{v.real:+.0f}" if abs(v.imag) < 1e-12 else str(v))
                    for k, v in sorted(new_w.items())}
        block = ResultBlock(command="kasteleyn-normalize", fixture=name,
                            method="vertex-multiplication",
                            result=json.dumps(rendered, sort_keys=True),
                            raw_result=json.dumps({str(k): str(v) for k, v in
                                                   sorted(factors.items())},
                                                  sort_keys=True),
                            ok=True, timing=time.time() - t0)
    _emit(ctx, block)


@main.command("dirac")
@click.argument("action", type=click.Choice(["check"]))
@click.option("--input", "input_", required=True)
@click.option("--spin", default=None,
              help="comma-separated bits; default checks every spin index")
@click.pass_context
def dirac_cmd(ctx, action, input_, spin):
    """Row-proportionality report and extracted constants."""
    graph, name = _load(input_)
    t0 = time.time()
    spins = ([tuple(int(b) for b in spin.split(","))] if spin
             else spin_indices(graph.genus))
    worst_pair = worst_dirac = 0.0
    constants = {}
    for s in spins:
        dm = dirac.build_delta2(graph, s)
        rep = dirac.check_row_proportionality(dm)
        worst_pair = max(worst_pair, rep.max_pair_spread)
        worst_dirac = max(worst_dirac, rep.max_dirac_spread)
        if s == spins[0]:
            constants = {f"{o[0]}{'+' if o[1] else '-'}": f"{c:.12g}"
                         for o, c in sorted(rep.constants.items())}
    ok = worst_pair < 1e-9 and worst_dirac < 1e-9
    block = ResultBlock(command="dirac-check", fixture=name, method="delta2",
                        result=f"proportional={ok} "
                               f"(pair {worst_pair:.2e}, dirac {worst_dirac:.2e})",
                        raw_result=f"{(worst_pair, worst_dirac)!r}", ok=ok,
                        timing=time.time() - t0,
                        diagnostics={"constants": constants})
    _emit(ctx, block)


@main.command("fermi")
@click.argument("action", type=click.Choice(["selftest"]))
@click.option("--trials", type=int, default=200)
@click.option("--seed", type=int, default=2024)
@click.pass_context
def fermi_cmd(ctx, action, trials, seed):
    """Fermionic expansion and regularized-determinant self-tests."""
    rng = np.random.default_rng(seed)
    t0 = time.time()
    worst_exp = worst_det = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 11))
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        ok, lhs, rhs = dirac.fermionic_expansion_check(a)
        worst_exp = max(worst_exp, abs(lhs - rhs) / max(1.0, abs(rhs)))
        t = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        det = np.linalg.det(t)
        if abs(det) > 1e-6:
            reg = dirac.regularized_det_finite(t)
            worst_det = max(worst_det, abs(reg - det) / abs(det))
    ok = worst_exp < 1e-9 and worst_det < 1e-8
    block = ResultBlock(command="fermi-selftest", fixture="-", method="random",
                        result=f"expansion {worst_exp:.2e}, det' {worst_det:.2e}",
                        raw_result=f"{(worst_exp, worst_det)!r}", ok=ok,
                        timing=time.time() - t0,
                        diagnostics={"trials": trials, "seed": seed})
    _emit(ctx, block)


if __name__ == "__main__":
    main()
