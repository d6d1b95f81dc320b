"""Batch command-line front end.

Subcommands wire the simulation and analysis stages together:

    simulate       write a quadrature batch or voltage record (CSV + sidecar)
    analyze        batch -> photocount moments with bootstrap errors (JSON)
    classify       photocount moments -> classicality report (JSON)
    wideband       voltage record -> energy / photon-number report (JSON)
    verify-oracle  run the exact number-basis identity suite

Every option can come from a flat-key JSON config file (--config); explicit
flags override it, unknown config keys are rejected, and the resolved
configuration is persisted next to the primary output.  Exit codes: 0 ok,
2 config error, 3 I/O error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import classicality, fock, io, moments, wideband
from .moments import PhotonStats
from .sampler import PulseSpec, StateSpec, sample_quadratures, sample_timetrace
from scipy.constants import h as PLANCK

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_VERIFY = 4


class ConfigError(ValueError):
    pass


class VerificationError(RuntimeError):
    pass


def _int(v):
    return int(float(v))


# per-command option schema: name -> (caster, default); None default means
# "unset", requiredness is validated per command after merging
_SCHEMAS = {
    "simulate": {
        "kind": (str, "quadrature"),
        "state": (str, None),
        "nbar": (float, None),
        "r": (float, None),
        "angle": (float, None),
        "added_noise": (float, None),
        "phase": (str, "averaged"),
        "theta": (float, None),
        "n": (_int, None),
        "seed": (_int, 0),
        "out": (str, None),
        "carrier": (float, None),
        "sigma_t": (float, None),
        "amplitude": (float, None),
        "noise_floor": (float, 0.0),
        "fs": (float, None),
        "duration": (float, None),
        "impedance": (float, 50.0),
    },
    "analyze": {
        "input": (str, None),
        "reference": (str, None),
        "bootstrap": (_int, 200),
        "seed": (_int, 0),
        "out": (str, None),
    },
    "classify": {
        "input": (str, None),
        "k_sigma": (float, 3.0),
        "n_small": (float, 0.1),
        "out": (str, None),
        "boundary_out": (str, None),
        "boundary_max": (float, 2.0),
        "boundary_points": (_int, 101),
    },
    "wideband": {
        "input": (str, None),
        "nu0": (float, None),
        "out": (str, None),
        "quadratures_out": (str, None),
    },
    "verify-oracle": {
        "dim": (_int, 40),
        "max_k": (_int, 4),
    },
}


def _resolve(command: str, cli_values: dict, config_path: str | None) -> dict:
    schema = _SCHEMAS[command]
    resolved = {k: default for k, (_, default) in schema.items()}
    if config_path:
        path = Path(config_path)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a JSON object of flat keys")
        file_command = loaded.pop("command", command)
        if file_command != command:
            raise ConfigError(
                f"config is for command {file_command!r}, not {command!r}"
            )
        unknown = sorted(set(loaded) - set(schema))
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {unknown}")
        for key, value in loaded.items():
            caster, _ = schema[key]
            try:
                resolved[key] = caster(value) if value is not None else None
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    for key, value in cli_values.items():
        if value is not None:
            resolved[key] = value
    return resolved


def _persist_config(command: str, resolved: dict, primary_out) -> None:
    if primary_out is None:
        return
    out = Path(primary_out).with_suffix(".config.json")
    io.write_report({"command": command, **resolved}, out)


def _require(resolved: dict, *keys) -> None:
    missing = [k for k in keys if resolved.get(k) is None]
    if missing:
        raise ConfigError(f"missing required option(s): {missing}")


def _state_from_config(cfg: dict) -> StateSpec:
    name = cfg["state"]
    if name in ("squeezed", "squeezed_vacuum"):
        if cfg.get("r") is None:
            raise ConfigError("squeezed state requires --r")
        return StateSpec.squeezed(
            cfg["r"], cfg.get("angle") or 0.0, added_noise=cfg.get("added_noise")
        )
    if name == "vacuum":
        return StateSpec.vacuum(added_noise=cfg.get("added_noise"))
    if name in ("coherent", "thermal"):
        if cfg.get("nbar") is None:
            raise ConfigError(f"{name} state requires --nbar")
        maker = StateSpec.coherent if name == "coherent" else StateSpec.thermal
        return maker(cfg["nbar"], added_noise=cfg.get("added_noise"))
    raise ConfigError(f"unknown state {name!r}")


def _cmd_simulate(cfg: dict) -> int:
    _require(cfg, "out")
    if cfg["kind"] == "quadrature":
        _require(cfg, "state", "n")
        spec = _state_from_config(cfg)
        batch = sample_quadratures(
            spec, cfg["phase"], cfg["n"], cfg["seed"], theta=cfg.get("theta")
        )
        io.write_quadrature_batch(batch, cfg["out"], state=spec)
    elif cfg["kind"] == "trace":
        _require(cfg, "carrier", "sigma_t", "amplitude", "fs", "duration")
        pulse = PulseSpec(
            cfg["carrier"], cfg["sigma_t"], cfg["amplitude"], cfg["noise_floor"]
        )
        trace = sample_timetrace(
            pulse, cfg["fs"], cfg["duration"], cfg["impedance"], cfg["seed"]
        )
        io.write_timetrace(trace, cfg["out"], extra={"pulse": pulse.to_dict()})
    else:
        raise ConfigError(f"kind must be 'quadrature' or 'trace', got {cfg['kind']!r}")
    _persist_config("simulate", cfg, cfg["out"])
    return EXIT_OK


def _stats_report(stats: PhotonStats, extra: dict | None = None) -> dict:
    report = {
        "n_mean": stats.n_mean,
        "n_var": stats.n_var,
        "n_skew3": stats.n_skew3,
        "fano": stats.fano,
        "errors": stats.errors,
        "flags": list(stats.flags),
    }
    if extra:
        report.update(extra)
    return report


def _cmd_analyze(cfg: dict) -> int:
    _require(cfg, "input", "out")
    batch, _ = io.read_quadrature_batch(cfg["input"])
    reference = None
    if cfg.get("reference"):
        reference, _ = io.read_quadrature_batch(cfg["reference"])
    stats = moments.bootstrap_errors(
        batch, cfg["bootstrap"], cfg["seed"], reference=reference
    )
    report = _stats_report(
        stats,
        {
            "n_samples": batch.count,
            "n_resamples": cfg["bootstrap"],
            "vacuum_included": reference is None,
            "reference": cfg.get("reference"),
        },
    )
    io.write_report(report, cfg["out"])
    _persist_config("analyze", cfg, cfg["out"])
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_classify(cfg: dict) -> int:
    _require(cfg, "input", "out")
    path = Path(cfg["input"])
    if not path.exists():
        raise FileNotFoundError(f"no such stats report: {path}")
    data = io.read_json(path)
    stats = PhotonStats(
        n_mean=data["n_mean"],
        n_var=data["n_var"],
        n_skew3=data["n_skew3"],
        fano=data.get("fano", math.nan),
        errors=data.get("errors"),
        flags=tuple(data.get("flags", ())),
    )
    report = classicality.classify(stats, cfg["k_sigma"], cfg["n_small"])
    io.write_report(report.to_dict(), cfg["out"])
    if cfg.get("boundary_out"):
        grid = np.linspace(0.0, cfg["boundary_max"], cfg["boundary_points"])
        io.write_boundary_csv(classicality.boundary_curve(grid), cfg["boundary_out"])
    _persist_config("classify", cfg, cfg["out"])
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_wideband(cfg: dict) -> int:
    _require(cfg, "input", "out")
    trace, _ = io.read_timetrace(cfg["input"])
    energy = wideband.energy_of(trace)
    photons = wideband.photon_number_of(trace)
    photons_spectral = wideband.photon_number_spectral(trace)
    nu0 = cfg.get("nu0") or wideband.spectral_centroid(trace)
    ratio = photons * PLANCK * nu0 / energy if energy > 0 and nu0 > 0 else math.nan
    report = {
        "energy_J": energy,
        "photons": photons,
        "photons_spectral": photons_spectral,
        "nu0_Hz": nu0,
        "ratio_to_hnu0": ratio,
    }
    io.write_report(report, cfg["out"])
    if cfg.get("quadratures_out"):
        x, p = wideband.hilbert_pair(trace)
        io.write_quadrature_pair(x, p, cfg["quadratures_out"])
    _persist_config("wideband", cfg, cfg["out"])
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_verify_oracle(cfg: dict) -> int:
    dim, max_k = cfg["dim"], cfg["max_k"]
    failures = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        line = f"{'ok  ' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  ({detail})"
        print(line)
        if not ok:
            failures.append(name)

    for k in range(1, max_k + 1):
        enum = fock.symmetric_sum_enumerated(k, dim, exact=True)
        closed = fock.symmetric_sum_closed(k, dim, exact=True)
        check(
            f"symmetric sum identity k={k} dim={dim}",
            fock.trusted_equal(enum, closed),
            "exact rational",
        )

    states = {
        "vacuum": fock.vacuum_state(30),
        "thermal nbar=0.5": fock.thermal_state(0.5, 80),
        "thermal nbar=1": fock.thermal_state(1.0, 100),
        "thermal nbar=2": fock.thermal_state(2.0, 140),
        "coherent nbar=0.1": fock.coherent_phase_averaged(0.1, 40),
        "coherent nbar=0.5": fock.coherent_phase_averaged(0.5, 40),
        "coherent nbar=1": fock.coherent_phase_averaged(1.0, 60),
    }
    for name, state in states.items():
        direct = fock.exact_photon_stats(state)
        looped = fock.photon_stats_via_quadratures(state)
        gap = max(
            abs(direct.n_mean - looped.n_mean),
            abs(direct.n_var - looped.n_var),
            abs(direct.n_skew3 - looped.n_skew3),
        )
        check(f"closed loop {name}", gap < 1e-10, f"max gap {gap:.2e}")

    ld = fock.make_ladder(6, "annihilation")
    check(
        "guard arithmetic",
        (ld @ ld).guard == 2 and fock.make_ladder(6, "number").guard == 0,
    )

    if failures:
        raise VerificationError(f"{len(failures)} oracle check(s) failed: {failures}")
    print(f"all oracle checks passed (dim={dim}, k<={max_k})")
    return EXIT_OK


_HANDLERS = {
    "simulate": _cmd_simulate,
    "analyze": _cmd_analyze,
    "classify": _cmd_classify,
    "wideband": _cmd_wideband,
    "verify-oracle": _cmd_verify_oracle,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photocount",
        description="Photocount statistics from continuous quadrature and voltage records",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(cmdname: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(cmdname, help=help_text)
        p.add_argument("--config", help="flat-key JSON config file")
        for key, (caster, _) in _SCHEMAS[cmdname].items():
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, dest=key, type=caster, default=None)
        return p

    add("simulate", "generate a quadrature batch or voltage record")
    add("analyze", "reconstruct photocount moments from a quadrature batch")
    add("classify", "evaluate classicality conditions on a stats report")
    add("wideband", "energy and photon-number functionals of a voltage record")
    add("verify-oracle", "run the exact number-basis identity suite")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    command = args.command
    cli_values = {
        k: getattr(args, k) for k in _SCHEMAS[command] if hasattr(args, k)
    }
    try:
        resolved = _resolve(command, cli_values, args.config)
        return _HANDLERS[command](resolved)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError) as exc:
        # bad parameters reaching domain validation are config errors too
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
