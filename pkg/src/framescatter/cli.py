"""``framescatter`` command line.

Exit codes: 0 success, 1 configuration or I/O error, 2 hypothesis or
certification failure, 3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import deformation as deform
from . import frames as fr
from . import verify as vf
from .config import RunConfig, load_config
from .errors import ConfigurationError, HypothesisError, NotAFrameError
from .fileio import read_pgm, read_signal, write_signal
from .scattering import extract_features
from .signal import Grid, Signal

EXIT_OK, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_VERIFY = 0, 1, 2, 3


def derive_seed(seed: int, *keys: int) -> int:
    """Independent child seed for a (command, item) pair."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)[0])


def _dump(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def build_frame(spec, grid: Grid) -> fr.SemiDiscreteFrame:
    p = spec.params
    if spec.kind == "wavelet":
        frame = fr.build_wavelet_frame(grid, p["J"], p.get("K", 1), tighten=False)
    elif spec.kind == "gabor":
        frame = fr.build_gabor_frame(grid, p["frequency_step"], p.get("width"), tighten=False)
    elif spec.kind == "shearlet":
        frame = fr.build_shearlet_frame(grid, p["scales"], p.get("shears_per_scale", 1), tighten=False)
    else:
        frame = fr.load_frame(p["path"])
        if frame.grid != grid:
            raise ConfigurationError(f"imported bank {p['path']} is on {frame.grid}, config says {grid}")
    if spec.scale != 1.0:
        frame = fr.SemiDiscreteFrame([a.scaled(spec.scale) for a in frame.atoms], frame.output_index)
    if spec.normalize == "parseval":
        frame = frame.tightened()
    elif spec.normalize == "bound":
        frame = frame.normalized(spec.bound)
    return frame


def build_collection(cfg: RunConfig) -> fr.FrameCollection:
    grid = Grid(cfg.d, cfg.n)
    built = [build_frame(spec, grid) for spec in cfg.frames]
    return fr.FrameCollection([built[i] for i in cfg.collection])


# -- frame-check -------------------------------------------------------------

def cmd_frame_check(cfg: RunConfig) -> int:
    grid = Grid(cfg.d, cfg.n)
    records, status = [], EXIT_OK
    for i, spec in enumerate(cfg.frames):
        rec = {"index": i, "kind": spec.kind, "normalize": spec.normalize}
        try:
            frame = build_frame(spec, grid)
        except NotAFrameError as exc:
            rec.update(certified=False, diagnostic=str(exc))
            print(f"frame[{i}] {spec.kind}: NOT A FRAME ({exc})")
            status = EXIT_HYPOTHESIS
        else:
            bank = cfg.out / "frames" / f"frame_{i:02d}"
            fr.save_frame(frame, bank)
            rec.update(certified=True, A=frame.A, B=frame.B, atoms=len(frame.atoms),
                       output_index=frame.output_index, bank=str(bank.relative_to(cfg.out)))
            print(f"frame[{i}] {spec.kind}: A={frame.A:.12f} B={frame.B:.12f} "
                  f"atoms={len(frame.atoms)} -> {bank}")
        records.append(rec)
    _dump(cfg.out / "frames" / "report.json", {"grid": {"d": cfg.d, "n": cfg.n}, "frames": records})
    return status


# -- extract -----------------------------------------------------------------

def read_input(path: Path, grid: Grid) -> Signal:
    f = read_pgm(path) if path.suffix.lower() == ".pgm" else read_signal(path)
    if f.grid != grid:
        raise ConfigurationError(f"{path}: signal on {f.grid}, config expects {grid}")
    return f


def cmd_extract(cfg: RunConfig, input_path: Path | None = None) -> int:
    input_path = input_path or cfg.input
    if input_path is None:
        raise ConfigurationError("io.input: no input signal given (use --input or io.input)")
    collection = build_collection(cfg)
    f = read_input(Path(input_path), collection.grid)
    features = extract_features(collection, f, cfg.max_depth, cfg.prune_rel)

    outdir = cfg.out / "features"
    outdir.mkdir(parents=True, exist_ok=True)
    records = []
    for k, (q, s) in enumerate(features.items()):
        name = f"feature_{k:05d}.fsct"
        write_signal(outdir / name, s)
        records.append({"path": list(q), "norm": s.norm, "file": name})
    energy = features.energy_by_depth()
    _dump(outdir / "manifest.json", {
        "format": "framescatter-features",
        "version": 1,
        "grid": {"d": cfg.d, "n": cfg.n},
        "max_depth": cfg.max_depth,
        "prune_rel": cfg.prune_rel,
        "seed": cfg.seed,
        "input_norm": f.norm,
        "feature_norm": features.norm(),
        "energy_by_depth": {str(k): v for k, v in sorted(energy.items())},
        "features": records,
    })
    print(f"seed {cfg.seed}: {len(features)} features, |||Phi(f)||| = {features.norm():.12g}, "
          f"||f|| = {f.norm:.12g}")
    print("depth  paths  energy")
    counts = {}
    for q in features:
        counts[len(q)] = counts.get(len(q), 0) + 1
    for depth in sorted(energy):
        print(f"{depth:5d}  {counts[depth]:5d}  {energy[depth]:.6e}")
    return EXIT_OK


# -- deform ------------------------------------------------------------------

def cmd_deform(cfg: RunConfig) -> int:
    grid = Grid(cfg.d, cfg.n)
    t = cfg.deformation
    limit = deform.admissibility_threshold(cfg.d)
    if t.dtau > limit:
        raise HypothesisError(
            f"requested ||D tau|| = {t.dtau} exceeds 1/(2d) = {limit}, the bound needed for "
            f"|det(Id - D tau)| >= 1 - d ||D tau|| >= 1/2")
    outdir = cfg.out / "fields"
    records = []
    for k in range(cfg.fields):
        seed = derive_seed(cfg.seed, 3, k)
        field = deform.random_smooth_field(grid, seed, t.dtau, t.omega, t.tau, t.max_freq)
        verdict = deform.check_admissible(field)
        sub = outdir / f"field_{k:03d}"
        sub.mkdir(parents=True, exist_ok=True)
        files = []
        for i in range(cfg.d):
            write_signal(sub / f"tau_{i}.fsct", Signal(grid, field.tau[i]))
            files.append(f"field_{k:03d}/tau_{i}.fsct")
        write_signal(sub / "omega.fsct", Signal(grid, field.omega))
        files.append(f"field_{k:03d}/omega.fsct")
        records.append({"seed": seed, "files": files, "measured": field.norms(),
                        "admissible": verdict.admissible,
                        "min_determinant": verdict.min_determinant})
        print(f"field {k}: seed {seed} ||tau||={field.tau_norm:.4g} ||D tau||={field.dtau_norm:.4g} "
              f"||omega||={field.omega_norm:.4g} admissible={verdict.admissible}")
    _dump(outdir / "manifest.json", {
        "format": "framescatter-fields", "version": 1, "grid": {"d": cfg.d, "n": cfg.n},
        "seed": cfg.seed,
        "targets": {"dtau": t.dtau, "omega": t.omega, "tau": t.tau, "max_freq": t.max_freq},
        "fields": records,
    })
    return EXIT_OK


def load_field(directory: Path, index: int = 0) -> deform.DeformationField:
    """Read a field written by ``deform`` back from its manifest."""
    manifest = json.loads((directory / "manifest.json").read_text())
    files = manifest["fields"][index]["files"]
    tau = [read_signal(directory / name).values.real for name in files[:-1]]
    omega = read_signal(directory / files[-1]).values.real
    grid = Grid(manifest["grid"]["d"], manifest["grid"]["n"])
    return deform.DeformationField(grid, np.array(tau), omega)


# -- verify ------------------------------------------------------------------

def _unit(f: Signal) -> Signal:
    return f * (1.0 / f.norm) if f.norm > 0 else f


def _run_suite(name, fn, reports, refusals):
    try:
        out = fn()
    except HypothesisError as exc:
        refusals.append({"name": name, "refused": True, "reason": str(exc), "pass": False})
        print(f"{name}: REFUSED ({exc})")
        return
    for rep in out if isinstance(out, list) else [out]:
        reports.append(rep)
        print(f"{rep.name}: {'PASS' if rep.passed else 'FAIL'} measured={rep.measured:.6g} "
              f"bound={rep.bound:.6g}")


def cmd_verify(cfg: RunConfig) -> int:
    v = cfg.verification
    collection = build_collection(cfg)
    grid = collection.grid
    seed = cfg.seed
    rng = np.random.default_rng(derive_seed(seed, 4, 0))
    base = read_input(cfg.input, grid) if cfg.input else Signal.random(grid, rng)
    base = _unit(base)
    reports, refusals = [], []

    if v.suites["invariance"]:
        shifts = [tuple(int(s) for s in rng.integers(-grid.n, grid.n, size=grid.d))
                  for _ in range(v.shifts)]
        _run_suite("invariance", lambda: vf.verify_translation_invariance(
            collection, base, shifts, v.max_depth, v.invariance_tol, seed=seed), reports, refusals)

    if v.suites["lipschitz"]:
        pair_rng = np.random.default_rng(derive_seed(seed, 4, 1))
        pairs = [(_unit(Signal.random(grid, pair_rng)), _unit(Signal.random(grid, pair_rng)))
                 for _ in range(v.pairs)]
        _run_suite("lipschitz", lambda: [
            vf.verify_lipschitz(collection, pairs, v.max_depth, v.lipschitz_atol, seed=seed),
            vf.verify_nonexpansive(collection, [p[0] for p in pairs], v.max_depth,
                                   v.lipschitz_atol, seed=seed)], reports, refusals)

    t = v.deformation
    fields = [deform.random_smooth_field(grid, derive_seed(seed, 5, k), t.dtau, t.omega, t.tau,
                                         t.max_freq) for k in range(v.fields)]
    wants_fields = any(v.suites[s] for s in ("stability", "intermediate", "energy"))
    if wants_fields and t.dtau > deform.admissibility_threshold(grid.d):
        raise HypothesisError(
            f"verification.deformation.dtau = {t.dtau} exceeds 1/(2d) = "
            f"{deform.admissibility_threshold(grid.d)}")
    mollifier = vf.Mollifier(grid, v.R) if wants_fields else None
    sweep = []
    if v.suites["stability"]:
        _run_suite("stability", lambda: [
            vf.verify_deformation_stability(collection, base, fld, v.R, v.max_depth,
                                            v.interpolation_tol, seed=seed, mollifier=mollifier)
            for fld in fields], reports, refusals)
        if fields and not any(r["name"] == "stability" for r in refusals):
            sweep = vf.tau_sweep(collection, base, fields[0], v.R, v.sweep, v.max_depth)
    if v.suites["intermediate"]:
        _run_suite("intermediate", lambda: [
            vf.verify_intermediate_bound(base, fld, v.R, v.interpolation_tol, seed=seed,
                                         mollifier=mollifier) for fld in fields],
            reports, refusals)
    if v.suites["energy"]:
        _run_suite("energy", lambda: [
            vf.verify_energy_bound(vf.bandlimit_project(base, mollifier), fld, v.energy_tol, seed=seed)
            for fld in fields], reports, refusals)

    outdir = cfg.out / "verify"
    outdir.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps(r.to_record(), sort_keys=True) for r in reports]
    lines += [json.dumps(r, sort_keys=True) for r in refusals]
    (outdir / "report.jsonl").write_text("".join(line + "\n" for line in lines))
    if sweep:
        rows = ["factor\ttau_norm\tdtau_norm\tbound\tmeasured"]
        rows += [f"{r['factor']!r}\t{r['tau_norm']!r}\t{r['dtau_norm']!r}\t{r['bound']!r}\t"
                 f"{r['measured']!r}" for r in sweep]
        (outdir / "sweep.tsv").write_text("\n".join(rows) + "\n")

    failed = [r.name for r in reports if not r.passed]
    status = EXIT_HYPOTHESIS if refusals else (EXIT_VERIFY if failed else EXIT_OK)
    _dump(outdir / "summary.json", {"seed": seed, "checks": len(reports), "failed": failed,
                                    "refused": [r["name"] for r in refusals], "exit": status})
    print(f"seed {seed}: {len(reports)} checks, {len(failed)} failed, {len(refusals)} refused")
    return status


# -- entry point -------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="framescatter",
                                     description="Generalized scattering features and their guarantees")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("frame-check", "build and certify frames, write banks"),
                        ("extract", "compute features of an input signal"),
                        ("deform", "generate admissible deformation fields"),
                        ("verify", "run the verification suites")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, type=Path, help="YAML run configuration")
        p.add_argument("--seed", type=int, help="override the configured seed (u64)")
        p.add_argument("--out", type=Path, help="override the output directory")
        if name == "extract":
            p.add_argument("--input", type=Path, help="raw .fsct signal or 8-bit .pgm image")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2 ** 64:
                raise ConfigurationError("--seed must be an unsigned 64-bit integer")
            cfg.seed = args.seed
        if args.out is not None:
            cfg.out = args.out
        if args.command == "frame-check":
            return cmd_frame_check(cfg)
        if args.command == "extract":
            return cmd_extract(cfg, args.input)
        if args.command == "deform":
            return cmd_deform(cfg)
        return cmd_verify(cfg)
    except (ConfigurationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotAFrameError, HypothesisError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())
