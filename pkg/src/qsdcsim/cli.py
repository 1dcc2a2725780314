"""Thin command-line client for the qsdcsim service.

By default commands run against an in-process app instance; point
``--server`` at a ``qsdcsim serve`` process to drive a remote one.  Exit
codes are stable for scripting: 0 success, 1 tampering alarm or failed
conformance, 2 usage error.
"""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path

import click
import httpx

EXIT_OK = 0
EXIT_ALARM = 1
EXIT_USAGE = 2


async def _post_in_process(path: str, payload: dict) -> httpx.Response:
    from .service import create_app
    transport = httpx.ASGITransport(app=create_app())
    async with httpx.AsyncClient(transport=transport,
                                 base_url="http://qsdcsim.local",
                                 timeout=600.0) as client:
        return await client.post(path, json=payload)


def _post(server: str | None, path: str, payload: dict | None = None) -> dict:
    payload = payload or {}
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            response = client.post(path, json=payload)
    else:
        response = asyncio.run(_post_in_process(path, payload))
    if response.status_code == 422:
        detail = response.json().get("detail", "invalid request")
        raise click.UsageError(str(detail))
    response.raise_for_status()
    return response.json()


server_option = click.option("--server", default=None, envvar="QSDC_SERVER",
                             help="base URL of a running service; default in-process")


@click.group()
def main() -> None:
    """Simulate N-user quantum secure direct communication sessions."""


@main.command()
@click.option("--n-users", default=2, show_default=True, help="number of disjoint users")
@click.option("--mode", type=click.Choice(["partial", "full"]), default="partial",
              show_default=True)
@click.option("--message", default="100111", show_default=True,
              help="bit string or 0x-prefixed hex")
@click.option("--attack", type=click.Choice(
    ["none", "masquerade", "oneway", "twoway", "intercept"]), default="none",
    show_default=True)
@click.option("--theta-eps", default=1.5707963267948966, show_default=True,
              help="two-way probe overlap angle (radians)")
@click.option("--seed", type=int, required=True, envvar="QSDC_SEED",
              help="session seed (env QSDC_SEED)")
@click.option("--trials", type=int, default=None,
              help="Monte Carlo rounds/symbols for attack statistics")
@click.option("--threshold", default=0.05, show_default=True,
              help="termination threshold on observed error rates")
@click.option("--auth-rounds", default=64, show_default=True,
              help="authentication rounds per user")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path),
              default=Path("transcript.json"), show_default=True,
              help="where to write the session transcript")
@server_option
def run(n_users: int, mode: str, message: str, attack: str, theta_eps: float,
        seed: int, trials: int | None, threshold: float, auth_rounds: int,
        out: Path, server: str | None) -> None:
    """Authenticate, distribute GHZ states, transmit, and check."""
    if n_users < 2:
        raise click.UsageError("--n-users must be at least 2")
    payload = {
        "n_users": n_users, "mode": mode, "message": message, "attack": attack,
        "theta_eps": theta_eps, "seed": seed, "trials": trials,
        "threshold": threshold, "auth_rounds": auth_rounds,
    }
    result = _post(server, "/run", payload)

    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(result["transcript"], indent=2) + "\n")

    click.echo(f"sent:    {result['sent']}")
    click.echo(f"decoded: {result['decoded']}")
    for entry in result["auth"]:
        click.echo(f"auth {entry['user']}: {entry['verdict']} "
                   f"(error rate {entry['error_rate']:.4f} "
                   f"over {entry['rounds']} rounds)")
    if result["check"]:
        check = result["check"]
        click.echo(f"eavesdrop check: {check['verdict']} "
                   f"(errors {check['errors']}/{check['sampled']}, "
                   f"rate {check['error_rate']:.4f})")
    stats = result.get("trial_stats")
    if stats:
        click.echo(f"{stats['what']}: mean {stats['mean']:.6f} "
                   f"+/- {stats['three_sigma']:.6f} (3-sigma, "
                   f"n={stats['count']})")
        for key, value in (stats.get("extra") or {}).items():
            click.echo(f"  {key}: {value}")
    if result.get("holevo_chi_bits") is not None:
        click.echo(f"holevo chi: {result['holevo_chi_bits']:.3e} bits")
    click.echo(f"transcript written to {out}")

    if result["alarm"]:
        click.echo("ALARM: session terminated")
        sys.exit(EXIT_ALARM)
    sys.exit(EXIT_OK)


@main.command()
@click.option("--csv-dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("curves"), show_default=True)
@server_option
def curves(csv_dir: Path, server: str | None) -> None:
    """Emit the security-analysis curve CSVs and spot-value summary."""
    result = _post(server, "/curves")
    csv_dir.mkdir(parents=True, exist_ok=True)
    for name, text in result["files"].items():
        (csv_dir / name).write_text(text)
        click.echo(f"wrote {csv_dir / name}")
    click.echo("spot values:")
    for spot in result["summary"]:
        status = "PASS" if spot["passed"] else "FAIL"
        line = (f"  [{status}] {spot['name']}: {spot['computed']:.6g} "
                f"(expected {spot['expected']:.6g}, tol {spot['rel_tol']:g})")
        if spot["note"]:
            line += f" -- {spot['note']}"
        click.echo(line)
    sys.exit(EXIT_OK if result["all_passed"] else EXIT_ALARM)


@main.command()
@click.option("--out", type=click.Path(file_okay=False, path_type=Path),
              default=Path("tables"), show_default=True)
@server_option
def tables(out: Path, server: str | None) -> None:
    """Generate decode tables and the conformance report."""
    result = _post(server, "/tables")
    out.mkdir(parents=True, exist_ok=True)
    (out / "decode_tables.json").write_text(json.dumps(
        {"ok": result["ok"], "tables": result["tables"],
         "mismatches": result["mismatches"]}, indent=2) + "\n")
    (out / "conformance.txt").write_text(result["text"])
    click.echo(result["text"])
    click.echo(f"report written to {out}")
    sys.exit(EXIT_OK if result["ok"] else EXIT_ALARM)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
