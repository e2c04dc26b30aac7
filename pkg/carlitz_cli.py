"""
Carlitz Toolkit CLI - Typer-based command line for Carlitz-module arithmetic.
Install with: pip install -e .
Then run: carlitz --help
"""
import json
import time
from typing import Any, Callable, Dict, List, Optional

import typer
from pydantic import BaseModel
from rich.table import Table

from carlitz_algebra import FiniteField, ThetaPoly, extension_of, field_for_q
from carlitz_classmod import bernoulli_carlitz, bernoulli_goss, compute_B, fitting_at_char
from carlitz_config import append_run_log, err_console, get_settings, load_settings, setup_logging, use_settings
from carlitz_errors import CarlitzError, UsageError
from carlitz_lseries import (
    CyclotomicRing,
    DirichletCharacter,
    character_lseries,
    gauss_identities,
    gauss_thakur,
    gauss_thakur_char,
    lseries_euler,
    lseries_infinity,
)
from carlitz_module import DrinfeldModule
from carlitz_padic import PadicContext, lp_direct_sum, lp_via_units, routes_agree
from carlitz_series import theta_leading
from carlitz_units import compute_uC, default_unit_precision, log_algebraicity, uC_profile
from carlitz_verify import run_suite

# Initialize
app = typer.Typer(
    name="carlitz",
    help="Carlitz Toolkit - exact arithmetic for the Carlitz module, its L-series, units and P-adic L-values",
    rich_markup_mode="markdown",
    no_args_is_help=True,
)

# ══════════════════════════════════════════════════════════════════════════════
# RESULT MODELS
# ══════════════════════════════════════════════════════════════════════════════


class UnitResult(BaseModel):
    q: int
    n: int
    prec: int
    effective_precision: int
    character: Optional[str] = None
    u: str
    deg_theta: int
    leading: str
    at_one: str
    matches_closed_form: Optional[bool] = None


class BNumberResult(BaseModel):
    kind: str
    m: int
    q: int
    prec: Optional[int] = None
    effective_precision: Optional[int] = None
    value: str
    reduced_mod: Optional[str] = None


class BFittingResult(BaseModel):
    q: int
    n: int
    prec: int
    effective_precision: int
    B: str
    deg_theta: int
    character: Optional[str] = None
    at_character: Optional[str] = None


class LSeriesResult(BaseModel):
    q: int
    n: int
    prec: int
    effective_precision: int
    source: str
    series: str


class GaussResult(BaseModel):
    q: int
    P: str
    prec: Optional[int] = None
    effective_precision: Optional[int] = None
    zeta: Optional[str] = None
    character: Optional[str] = None
    g: str
    identities: Dict[str, bool] = {}


class LpResult(BaseModel):
    q: int
    P: str
    M: int
    effective_precision: int
    character: str
    odd: bool
    derivative: bool
    direct: Optional[str] = None
    direct_blocks: Optional[int] = None
    case: Optional[int] = None
    galois_sum: Optional[str] = None
    units_value: Optional[str] = None
    valuation: Optional[str] = None
    routes_agree: Optional[bool] = None


class LogAlgResult(BaseModel):
    q: int
    m: int
    z_max: int
    prec: Optional[int] = None
    effective_precision: Optional[int] = None
    f: List[str]
    x_valuations: List[Optional[int]]
    trailing_zero_witness: int


class CheckReport(BaseModel):
    id: str
    name: str
    passed: bool
    detail: str


class VerifyReport(BaseModel):
    suite: str
    seed: int
    passed: bool
    checks: List[CheckReport]


class ErrorReport(BaseModel):
    error: str
    detail: str
    context: Dict[str, Any] = {}


# ══════════════════════════════════════════════════════════════════════════════
# HELPERS
# ══════════════════════════════════════════════════════════════════════════════


def _emit(model: BaseModel) -> None:
    typer.echo(json.dumps(model.model_dump(), indent=2))


def _run(command: str, arguments: Dict[str, Any], body: Callable[[], BaseModel]) -> BaseModel:
    """Run a command body, print its JSON and log the run; library errors become an ErrorReport and exit code"""
    settings = get_settings()
    start = time.perf_counter()
    try:
        result = body()
    except CarlitzError as e:
        append_run_log(settings.run_log, command, False, arguments=arguments, error=type(e).__name__,
                       elapsed=round(time.perf_counter() - start, 3))
        _emit(ErrorReport(**e.to_dict()))
        raise typer.Exit(e.exit_code)
    except ValueError as e:
        append_run_log(settings.run_log, command, False, arguments=arguments, error="ValueError",
                       elapsed=round(time.perf_counter() - start, 3))
        _emit(ErrorReport(error="UsageError", detail=str(e)))
        raise typer.Exit(UsageError.exit_code)
    append_run_log(settings.run_log, command, True, arguments=arguments, elapsed=round(time.perf_counter() - start, 3))
    _emit(result)
    return result


def _character(F: FiniteField, spec: Optional[str], P: Optional[str] = None,
               exponent: Optional[int] = None) -> Optional[DirichletCharacter]:
    if spec:
        return DirichletCharacter.parse(spec, F)
    if P is not None and exponent is not None:
        return DirichletCharacter.from_exponent(ThetaPoly.parse(P, F), exponent)
    return None


# ══════════════════════════════════════════════════════════════════════════════
# GLOBAL OPTIONS
# ══════════════════════════════════════════════════════════════════════════════


@app.callback()
def configure(
    config: Optional[str] = typer.Option(None, "--config", "-c", help="key=value settings file"),
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads for block sums"),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING or ERROR"),
    run_log: Optional[str] = typer.Option(None, "--run-log", help="Append a JSONL record per command"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of the randomized property checks"),
):
    """
    Global options apply to every subcommand; flags override the config file.
    """
    try:
        settings = load_settings(config, threads=threads, log_level=log_level, run_log=run_log, seed=seed)
    except CarlitzError as e:
        _emit(ErrorReport(**e.to_dict()))
        raise typer.Exit(e.exit_code)
    use_settings(settings)
    setup_logging(settings.log_level)


# ══════════════════════════════════════════════════════════════════════════════
# UNITS & CLASS MODULES
# ══════════════════════════════════════════════════════════════════════════════


@app.command(rich_help_panel="Units")
def unit(
    q: int = typer.Option(..., "--q", help="Size of the constant field"),
    n: int = typer.Option(0, "--n", help="Number of t-variables"),
    prec: Optional[int] = typer.Option(None, "--prec", help="Absolute precision (default guard + 1)"),
    specialize: Optional[str] = typer.Option(None, "--specialize", help="Character spec: t_k -> eta_k"),
):
    """
    **u_C(t_1..t_n; z)** as an exact polynomial, with its theta-degree and leading coefficient.

    Examples:
    - `carlitz unit --q 2 --n 1 --prec 20`
    - `carlitz unit --q 3 --specialize "P=T^2+1;exponent=4"`
    """
    def body() -> UnitResult:
        F = field_for_q(q)
        N = prec or default_unit_precision()
        chi = _character(F, specialize)
        if chi is not None:
            u = compute_uC(F, chi.type, prec=N, etas=chi.etas, ext=chi.ext)
        else:
            u = compute_uC(F, n, prec=N)
        profile = uC_profile(u)
        return UnitResult(
            q=q, n=chi.type if chi else n, prec=N, effective_precision=N,
            character=str(chi) if chi else None,
            u=str(u), deg_theta=profile.deg_theta, leading=str(profile.leading), at_one=str(profile.at_one),
            matches_closed_form=None if chi else profile.matches_closed_form(q, n),
        )

    _run("unit", {"q": q, "n": n, "prec": prec, "specialize": specialize}, body)


@app.command(rich_help_panel="Class modules")
def bnumber(
    kind: str = typer.Option(..., "--kind", help="carlitz or goss"),
    m: int = typer.Option(..., "--m", help="Index"),
    q: int = typer.Option(..., "--q", help="Size of the constant field"),
    mod: Optional[str] = typer.Option(None, "--mod", help="Monic irreducible P to reduce modulo"),
):
    """
    **Bernoulli-Carlitz BC(m)** or **Bernoulli-Goss beta(m)** exactly.

    Examples:
    - `carlitz bnumber --kind carlitz --m 10 --q 3 --mod "T^3+2*T+2"`
    - `carlitz bnumber --kind goss --m 16 --q 3`
    """
    if kind not in ("carlitz", "goss"):
        err_console.print(f"[red]--kind must be carlitz or goss, not {kind}[/red]")
        raise typer.Exit(2)

    def body() -> BNumberResult:
        F = field_for_q(q)
        b = bernoulli_carlitz(F, m) if kind == "carlitz" else bernoulli_goss(F, m)
        reduced = None
        if mod:
            P = ThetaPoly.parse(mod, F)
            reduced = str(b.reduced_mod(P))
        return BNumberResult(kind=kind, m=m, q=q, value=str(b), reduced_mod=reduced)

    _run("bnumber", {"kind": kind, "m": m, "q": q, "mod": mod}, body)


@app.command(rich_help_panel="Class modules")
def bfitting(
    q: int = typer.Option(..., "--q", help="Size of the constant field"),
    n: int = typer.Option(..., "--n", help="Number of t-variables"),
    prec: Optional[int] = typer.Option(None, "--prec", help="Absolute precision (default guard + 1)"),
    chi: Optional[str] = typer.Option(None, "--chi", help="Character spec to evaluate B at"),
    strict: bool = typer.Option(False, "--strict", help="Fail when n is not 1 mod q-1"),
):
    """
    **Fitting generator B(t_1..t_n)** of the class module, optionally evaluated at a character.
    """
    def body() -> BFittingResult:
        F = field_for_q(q)
        N = prec or default_unit_precision()
        B = compute_B(F, n, prec=N, strict=strict)
        character = _character(F, chi)
        at = fitting_at_char(B, character) if character else None
        return BFittingResult(
            q=q, n=n, prec=N, effective_precision=N, B=str(B), deg_theta=theta_leading(B)[0],
            character=str(character) if character else None, at_character=str(at) if at is not None else None,
        )

    _run("bfitting", {"q": q, "n": n, "prec": prec, "chi": chi, "strict": strict}, body)


# ══════════════════════════════════════════════════════════════════════════════
# L-SERIES & GAUSS SUMS
# ══════════════════════════════════════════════════════════════════════════════


@app.command(rich_help_panel="L-series")
def lseries(
    q: int = typer.Option(..., "--q", help="Size of the constant field"),
    n: int = typer.Option(0, "--n", help="Number of t-variables"),
    prec: int = typer.Option(10, "--prec", help="Absolute precision"),
    no_z: bool = typer.Option(False, "--no-z", help="Set z = 1"),
    euler: bool = typer.Option(False, "--euler", help="Use the Euler product (n = 0)"),
    rank2: bool = typer.Option(False, "--rank2", help="Euler product of phi_T = T + tau + tau^2"),
    phi: Optional[str] = typer.Option(None, "--phi", help="Comma-separated alpha_1..alpha_r for --euler"),
    chi: Optional[str] = typer.Option(None, "--chi", help="Character spec: sum chi(a) z^deg(a) / a"),
):
    """
    **L-series** of the deformed Carlitz module, a Drinfeld module's Euler product, or a character.

    Examples:
    - `carlitz lseries --q 3 --n 2 --prec 8`
    - `carlitz lseries --q 2 --euler --rank2 --prec 6`
    """
    def body() -> LSeriesResult:
        F = field_for_q(q)
        character = _character(F, chi)
        if character is not None:
            series, source, arity = character_lseries(character, prec, with_z=not no_z), "character", character.type
        elif euler or rank2 or phi:
            coefficients = ["1", "1"] if rank2 else (phi.split(",") if phi else ["1"])
            module = DrinfeldModule.from_strings(F, [c.strip() for c in coefficients])
            series, source, arity = lseries_euler(module, prec, with_z=not no_z), f"euler:{module}", 0
        else:
            series, source, arity = lseries_infinity(F, n, prec, with_z=not no_z), "direct", n
        return LSeriesResult(q=q, n=arity, prec=prec, effective_precision=int(series.prec), source=source,
                             series=str(series))

    _run("lseries", {"q": q, "n": n, "prec": prec, "no_z": no_z, "euler": euler, "rank2": rank2,
                     "phi": phi, "chi": chi}, body)


@app.command(rich_help_panel="L-series")
def gauss(
    q: int = typer.Option(..., "--q", help="Size of the constant field"),
    conductor: str = typer.Option(..., "--P", help="Monic irreducible conductor"),
    zeta: Optional[str] = typer.Option(None, "--zeta", help="Root of P, written in u"),
    chi: Optional[str] = typer.Option(None, "--chi", help="Character spec (product of Gauss-Thakur sums)"),
):
    """
    **Gauss-Thakur sum** g(rho_zeta) in F_{q^d}[T][lambda_P] with its identity checks, or g(chi).
    """
    def body() -> GaussResult:
        F = field_for_q(q)
        prime = ThetaPoly.parse(conductor, F)
        ext = extension_of(F, prime.degree)
        ring = CyclotomicRing(prime, ext)
        character = _character(F, chi)
        if character is not None:
            g = gauss_thakur_char(character, ring)
            return GaussResult(q=q, P=str(prime), character=str(character), g=str(g))
        root = ext.parse(zeta) if zeta else DirichletCharacter.from_exponent(prime, 1).zeta0
        g = gauss_thakur(root, prime, ring)
        return GaussResult(q=q, P=str(prime), zeta=ext.format(root), g=str(g),
                           identities=gauss_identities(root, prime, ring))

    _run("gauss", {"q": q, "P": conductor, "zeta": zeta, "chi": chi}, body)


# ══════════════════════════════════════════════════════════════════════════════
# P-ADIC L-VALUES & LOG-ALGEBRAICITY
# ══════════════════════════════════════════════════════════════════════════════


@app.command(rich_help_panel="P-adic")
def lp(
    q: int = typer.Option(..., "--q", help="Size of the constant field"),
    conductor: Optional[str] = typer.Option(None, "--P", help="Monic irreducible conductor (with --exponent)"),
    exponent: Optional[int] = typer.Option(None, "--exponent", help="chi = omega^N, the Teichmueller power"),
    chi: Optional[str] = typer.Option(None, "--chi", help="Character spec"),
    precision: int = typer.Option(4, "--M", help="P-adic precision"),
    route: str = typer.Option("both", "--route", help="direct, units or both"),
):
    """
    **P-adic L-value** L_P(1, chi) (even chi) or L_P'(1, chi) (odd chi).

    Examples:
    - `carlitz lp --q 3 --P "T^3+2*T+2" --exponent 17 --M 2`
    """
    if route not in ("direct", "units", "both"):
        err_console.print(f"[red]--route must be direct, units or both, not {route}[/red]")
        raise typer.Exit(2)

    def body() -> LpResult:
        F = field_for_q(q)
        character = _character(F, chi, conductor, exponent)
        if character is None:
            raise UsageError("give --chi, or --P with --exponent")
        ctx = PadicContext(character.P, precision)
        derivative = character.is_odd
        result = LpResult(q=q, P=str(character.P), M=precision, effective_precision=precision, character=str(character),
                          odd=character.is_odd, derivative=derivative)
        direct = None
        if route in ("direct", "both"):
            summed = lp_direct_sum(character, ctx, derivative)
            direct = summed.value
            result.direct = str(direct)
            result.direct_blocks = summed.blocks
        if route in ("units", "both"):
            units = lp_via_units(character, ctx)
            result.case = units.case
            result.galois_sum = str(units.galois_sum)
            result.units_value = str(units.value) if units.value is not None else None
            result.valuation = str(units.valuation)
            result.effective_precision = units.effective_precision
            if direct is not None:
                result.routes_agree = routes_agree(direct, units)
        return result

    _run("lp", {"q": q, "P": conductor, "exponent": exponent, "chi": chi, "M": precision, "route": route}, body)


@app.command(rich_help_panel="P-adic")
def logalg(
    q: int = typer.Option(..., "--q", help="Size of the constant field"),
    m: int = typer.Option(1, "--m", help="Power of C_a(X)"),
    zmax: int = typer.Option(4, "--zmax", help="Last z-block"),
):
    """
    **Log-algebraic series** f_0..f_zmax in A[X], checked for integrality.
    """
    def body() -> LogAlgResult:
        series = log_algebraicity(field_for_q(q), m, zmax)
        return LogAlgResult(
            q=q, m=m, z_max=zmax, f=[str(f) for f in series.coefficients],
            x_valuations=[series.x_valuation(k) for k in range(zmax + 1)],
            trailing_zero_witness=series.trailing_zero_witness,
        )

    _run("logalg", {"q": q, "m": m, "zmax": zmax}, body)


# ══════════════════════════════════════════════════════════════════════════════
# VERIFICATION
# ══════════════════════════════════════════════════════════════════════════════


@app.command(rich_help_panel="Verification")
def verify(
    suite: str = typer.Option("paper", "--suite", help="paper or properties"),
    only: Optional[str] = typer.Option(None, "--only", help="Comma-separated check ids"),
):
    """
    **Run a verification suite**; exits 0 iff every check passes.

    Examples:
    - `carlitz verify --suite paper --only 1,2`
    - `carlitz --seed 7 verify --suite properties`
    """
    if suite not in ("paper", "properties"):
        err_console.print(f"[red]--suite must be paper or properties, not {suite}[/red]")
        raise typer.Exit(2)
    seed = get_settings().seed

    def body() -> VerifyReport:
        results = run_suite(suite, seed=seed, only=only.split(",") if only else None)
        table = Table(title=f"verify --suite {suite}")
        table.add_column("Check", style="cyan")
        table.add_column("Name")
        table.add_column("Result")
        table.add_column("Detail", overflow="fold")
        for r in results:
            table.add_row(r.check_id, r.name, "[green]✔ pass[/green]" if r.passed else "[red]✘ FAIL[/red]", r.detail)
        err_console.print(table)
        return VerifyReport(
            suite=suite, seed=seed, passed=all(r.passed for r in results),
            checks=[CheckReport(id=r.check_id, name=r.name, passed=r.passed, detail=r.detail) for r in results],
        )

    report = _run("verify", {"suite": suite, "only": only, "seed": seed}, body)
    if not report.passed:
        raise typer.Exit(1)


# ══════════════════════════════════════════════════════════════════════════════
# ENTRY POINT
# ══════════════════════════════════════════════════════════════════════════════

def main():
    app()

if __name__ == "__main__":
    main()
