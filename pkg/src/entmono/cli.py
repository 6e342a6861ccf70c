"""
Command-line entry point: ``entmono {sweep,experiment,check,oracle}``.

Every flag can also be given in a JSON config file (``--config``) using the
flag name with dashes replaced by underscores; flags on the command line win.
Exit codes: 0 success, 1 validation error, 2 runtime or convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, monogamy, tomosim
from .errors import EntmonoError, InvalidState, NoConvergence, ParseError, Unsupported
from .matcomp import matrix_from_json
from .measures import A1A2_B, concurrence_pure_cut, negativity_pure_cut
from .oracle import fuzz_mixed, fuzz_pure, random_spectra, spectrum_oracle
from .states import QUBITS3, DensityMatrix, FamilyParams, PureState, family_state, pure_fidelity

DEFAULT_ANGLES = (0.0, 15.0, 30.0, 45.0, 50.0, 60.0, 70.0, 80.0, 90.0)

SWEEP_COLUMNS = (
    "phi_deg", "ef_internal", "ef_external", "ef_sum",
    "en_internal", "en_external_pair", "en_pair_sum",
    "en_cut_pure", "g_en", "en_single_sum",
    "c_internal", "c_cut_pure", "g_tilde_c", "c_single_sum",
    "ckw_lhs", "ckw_rhs", "three_tangle",
)
EXPERIMENT_QUANTITIES = SWEEP_COLUMNS[1:] + ("fidelity",)


class ValidationError(EntmonoError, ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    phi_start_deg: float = 0.0
    phi_end_deg: float = 90.0
    phi_step_deg: float = 1.0
    theta_deg: float = 45.0

    def __post_init__(self):
        vals = (self.phi_start_deg, self.phi_end_deg, self.theta_deg)
        if any(not 0.0 <= v <= 90.0 for v in vals):
            raise ValidationError("sweep angles must lie in [0, 90] degrees")
        if self.phi_start_deg > self.phi_end_deg or self.phi_step_deg <= 0:
            raise ValidationError("sweep needs start <= end and step > 0")

    def angles(self) -> list[float]:
        n = int(math.floor((self.phi_end_deg - self.phi_start_deg) / self.phi_step_deg + 1e-9)) + 1
        return [min(self.phi_start_deg + i * self.phi_step_deg, self.phi_end_deg) for i in range(n)]


@dataclass(frozen=True)
class ExperimentSpec:
    phi_list_deg: tuple = DEFAULT_ANGLES
    noise: tomosim.NoiseSpec = field(default_factory=tomosim.NoiseSpec)
    tomo: tomosim.TomoConfig = field(default_factory=tomosim.TomoConfig)
    repeats: int = 50
    theta_deg: float = 45.0
    exact_counts: bool = False

    def __post_init__(self):
        if any(not 0.0 <= a <= 90.0 for a in self.phi_list_deg):
            raise ValidationError("experiment angles must lie in [0, 90] degrees")
        if self.repeats < 1:
            raise ValidationError("repeats must be >= 1")


def state_row(psi, pivot: int = 0) -> dict:
    """All sweep quantities for a pure three-qubit state."""
    ef = monogamy.check_ef_pair(psi)
    en = monogamy.check_en_pair(psi)
    ens = monogamy.check_en_single(psi)
    cs = monogamy.check_c_single(psi)
    ckw = monogamy.check_ckw(psi, pivot)
    return {
        "ef_internal": ef.internal_term, "ef_external": ef.external_term, "ef_sum": ef.total,
        "en_internal": en.internal_term, "en_external_pair": en.external_term, "en_pair_sum": en.total,
        "en_cut_pure": negativity_pure_cut(psi, A1A2_B, QUBITS3), "g_en": ens.external_term,
        "en_single_sum": ens.total,
        "c_internal": cs.internal_term, "c_cut_pure": concurrence_pure_cut(psi, A1A2_B, QUBITS3),
        "g_tilde_c": cs.external_term, "c_single_sum": cs.total,
        "ckw_lhs": ckw.internal_term, "ckw_rhs": ckw.bound, "three_tangle": ckw.three_tangle,
    }


def _fmt(x) -> str:
    return repr(float(x))


def sweep_rows(spec: SweepSpec) -> list[dict]:
    rows = []
    for deg in spec.angles():
        psi = family_state(FamilyParams.from_degrees(deg, spec.theta_deg))
        rows.append({"phi_deg": deg, **state_row(psi)})
    return rows


def cmd_sweep(spec: SweepSpec, out_path) -> list[dict]:
    rows = sweep_rows(spec)
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in SWEEP_COLUMNS])
    return rows


def trial_seed(master: int, angle_index: int, repeat: int) -> int:
    ss = np.random.SeedSequence([master, angle_index, repeat])
    return int(ss.generate_state(1, np.uint64)[0])


def run_trial(args) -> dict:
    """One simulated tomography run; picklable for process pools."""
    spec, ai, rep = args
    deg = spec.phi_list_deg[ai]
    psi = family_state(FamilyParams.from_degrees(deg, spec.theta_deg))
    cfg = tomosim.TomoConfig(spec.tomo.counts_per_setting, trial_seed(spec.tomo.seed, ai, rep),
                             spec.tomo.max_iterations, spec.tomo.gradient_tolerance)
    ps = tomosim.build_projectors(3)
    probs = tomosim.born_probs(tomosim.apply_noise(psi, spec.noise), ps)
    counts = tomosim.expected_counts(probs, cfg) if spec.exact_counts else tomosim.sample_counts(probs, cfg)
    try:
        res = tomosim.mle_reconstruct(counts, ps, cfg)
        converged = True
    except NoConvergence as exc:
        res = exc.best
        converged = False
    rho = res.rho
    # Pure-state-only quantities use the dominant eigenvector of the reconstruction.
    w, v = np.linalg.eigh(rho.matrix)
    top = PureState.normalized(v[:, -1], QUBITS3)
    pure_part = state_row(top)
    ef = monogamy.check_ef_pair(rho)
    en = monogamy.check_en_pair(rho)
    cs = monogamy.check_c_single(rho)
    values = dict(pure_part)
    values.update({
        "ef_internal": ef.internal_term, "ef_external": ef.external_term, "ef_sum": ef.total,
        "en_internal": en.internal_term, "en_external_pair": en.external_term, "en_pair_sum": en.total,
        "c_internal": cs.internal_term, "g_tilde_c": cs.external_term, "c_single_sum": cs.total,
    })
    values["en_single_sum"] = values["en_internal"] + values["g_en"]
    values["fidelity"] = pure_fidelity(psi, rho)
    return {
        "phi_deg": deg, "repeat": rep, "seed": cfg.seed, "converged": converged,
        "stop_reason": res.stop_reason, "iterations": res.iterations,
        "top_eigenvalue": float(w[-1]), "values": values,
    }


def _stats(xs) -> dict:
    a = np.asarray(xs, dtype=float)
    std = float(np.std(a, ddof=1)) if a.size > 1 else 0.0
    return {"mean": float(np.mean(a)), "std": std}


def experiment_result(spec: ExperimentSpec, jobs: int = 1) -> dict:
    tasks = [(spec, ai, rep) for ai in range(len(spec.phi_list_deg)) for rep in range(spec.repeats)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            trials = list(pool.map(run_trial, tasks, chunksize=4))
    else:
        trials = [run_trial(t) for t in tasks]
    per_angle = []
    for ai, deg in enumerate(spec.phi_list_deg):
        ts = trials[ai * spec.repeats:(ai + 1) * spec.repeats]
        entry = {"phi_deg": deg, "n_trials": len(ts),
                 "n_unconverged": sum(not t["converged"] for t in ts)}
        for q in EXPERIMENT_QUANTITIES:
            entry[q] = _stats([t["values"][q] for t in ts])
        per_angle.append(entry)
    fids = [t["values"]["fidelity"] for t in trials]
    return {
        "metadata": {
            "tool": "entmono experiment",
            "version": __version__,
            "master_seed": spec.tomo.seed,
            "phi_list_deg": list(spec.phi_list_deg),
            "theta_deg": spec.theta_deg,
            "repeats": spec.repeats,
            "exact_counts": spec.exact_counts,
            "noise": asdict(spec.noise),
            "tomo": asdict(spec.tomo),
            "pure_only_quantities_use": "dominant eigenvector of the reconstruction",
        },
        "mean_fidelity": float(np.mean(fids)),
        "angles": per_angle,
        "trials": trials,
    }


def cmd_experiment(spec: ExperimentSpec, out_path, jobs: int = 1) -> dict:
    result = experiment_result(spec, jobs)
    with open(out_path, "w") as fh:
        json.dump(result, fh, indent=1)
        fh.write("\n")
    return result


def load_state(path, pure: bool = False):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read state file {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("state file must hold a JSON object")
    if pure or "dim" in obj:
        try:
            re = np.asarray(obj["re"], dtype=float)
            im = np.asarray(obj.get("im", [0.0] * len(re)), dtype=float)
            dim = int(obj.get("dim", re.size))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed pure state: {exc}") from exc
        if re.size != dim or im.size != dim:
            raise ParseError(f"pure state declares dim {dim} but has {re.size} amplitudes")
        return PureState(re + 1j * im, tuple(obj.get("dims", QUBITS3)))
    m = matrix_from_json(obj)
    return DensityMatrix(m, tuple(obj.get("dims", QUBITS3)))


def cmd_check(state_path, pure_flag: bool = False, tol: float = monogamy.DEFAULT_TOL, pivot: int = 0) -> dict:
    state = load_state(state_path, pure_flag)
    if tuple(state.dims) != QUBITS3:
        raise InvalidState(f"expected dims [2, 2, 2], got {list(state.dims)}")
    reports = monogamy.check_all(state, tol, pivot)
    skipped = []
    ids = {r.inequality_id for r in reports}
    for ident in ("EN_SINGLE", "CKW"):
        if ident not in ids:
            skipped.append(ident)
    return {
        "input": str(state_path),
        "kind": "pure" if isinstance(state, PureState) else "density",
        "reports": [r.to_json() for r in reports],
        "skipped": skipped,
        "satisfied": all(r.satisfied for r in reports),
    }


def cmd_oracle(n_samples: int, seed: int, out_path, n_unitaries: int = 10_000,
               n_pure: int = 100_000, n_mixed: int = 10_000, climb: bool = True) -> dict:
    if n_samples < 1:
        raise ValidationError("--samples must be >= 1")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 0])))
    rows = [spectrum_oracle(lam, rng, n_unitaries, climb) for lam in random_spectra(rng, n_samples)]
    pure = fuzz_pure(np.random.default_rng([seed, 1]), n_pure) if n_pure else {}
    mixed = fuzz_mixed(np.random.default_rng([seed, 2]), n_mixed) if n_mixed else {}
    summary = {
        "metadata": {"tool": "entmono oracle", "version": __version__, "seed": seed,
                     "spectra": n_samples, "unitaries_per_spectrum": n_unitaries, "hill_climb": climb},
        "max_eof_violation": max(r.eof_violation for r in rows),
        "max_neg_violation": max(r.neg_violation for r in rows),
        "max_eof_gap": max(r.eof_gap for r in rows),
        "max_neg_gap": max(r.neg_gap for r in rows),
        "pure_fuzz_min_slack": pure,
        "mixed_fuzz_min_slack": mixed,
        "spectra": [{**asdict(r), "eof_gap": r.eof_gap, "neg_gap": r.neg_gap} for r in rows],
    }
    with open(out_path, "w") as fh:
        json.dump(summary, fh, indent=1)
        fh.write("\n")
    return summary


def _parse_angles(s) -> tuple:
    if isinstance(s, (list, tuple)):
        return tuple(float(x) for x in s)
    return tuple(float(x) for x in str(s).split(",") if x.strip())


def _seed(s) -> int:
    return int(s, 0) if isinstance(s, str) else int(s)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entmono", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default):
        sp.add_argument("--out", default=None, help=f"output path (default {out_default})")
        sp.add_argument("--seed", default=None, help="master seed, decimal or 0x-hex")
        sp.add_argument("--config", default=None, help="JSON file with default flag values")

    sw = sub.add_parser("sweep", help="theory curves along the state family (CSV)")
    common(sw, "sweep.csv")
    sw.add_argument("--phi-start", type=float, default=None)
    sw.add_argument("--phi-end", type=float, default=None)
    sw.add_argument("--phi-step", type=float, default=None)
    sw.add_argument("--theta", type=float, default=None)

    ex = sub.add_parser("experiment", help="simulated tomography of family states (JSON)")
    common(ex, "experiment.json")
    ex.add_argument("--angles", default=None, help="comma-separated phi values in degrees")
    ex.add_argument("--theta", type=float, default=None)
    ex.add_argument("--visibility", type=float, default=None)
    ex.add_argument("--white-noise", type=float, default=None)
    ex.add_argument("--counts", type=int, default=None, help="expected counts per setting")
    ex.add_argument("--repeats", type=int, default=None)
    ex.add_argument("--max-iterations", type=int, default=None)
    ex.add_argument("--gradient-tolerance", type=float, default=None)
    ex.add_argument("--exact-counts", action="store_true", default=None,
                    help="use expected counts instead of Poisson draws")
    ex.add_argument("--jobs", type=int, default=None)

    ck = sub.add_parser("check", help="run every applicable inequality on a state file (JSON)")
    common(ck, "stdout only")
    ck.add_argument("--input", default=None, help="state JSON file")
    ck.add_argument("--pure", action="store_true", default=None, help="parse the file as a pure state")
    ck.add_argument("--tol", type=float, default=None)
    ck.add_argument("--pivot", type=int, default=None)

    orc = sub.add_parser("oracle", help="sampling oracles for spectrum maxima and fuzzing (JSON)")
    common(orc, "oracle.json")
    orc.add_argument("--samples", type=int, default=None, help="number of random spectra")
    orc.add_argument("--unitaries", type=int, default=None)
    orc.add_argument("--fuzz-pure", type=int, default=None)
    orc.add_argument("--fuzz-mixed", type=int, default=None)
    orc.add_argument("--no-climb", action="store_true", default=None)
    return p


def _merged(args) -> dict:
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ParseError("config file must hold a JSON object")
    out = {k.replace("-", "_"): v for k, v in cfg.items()}
    for k, v in vars(args).items():
        if v is not None:
            out[k] = v
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        o = _merged(args)
        seed = _seed(o.get("seed", tomosim.DEFAULT_SEED))
        cmd = args.command
        if cmd == "sweep":
            spec = SweepSpec(o.get("phi_start", 0.0), o.get("phi_end", 90.0),
                             o.get("phi_step", 1.0), o.get("theta", 45.0))
            out = o.get("out", "sweep.csv")
            rows = cmd_sweep(spec, out)
            print(f"wrote {len(rows)} rows to {out}")
        elif cmd == "experiment":
            spec = ExperimentSpec(
                phi_list_deg=_parse_angles(o.get("angles", DEFAULT_ANGLES)),
                noise=tomosim.NoiseSpec(o.get("visibility", tomosim.visibility_from_ratio(100.0)),
                                        o.get("white_noise", 0.0)),
                tomo=tomosim.TomoConfig(o.get("counts", 10000), seed,
                                        o.get("max_iterations", 5000), o.get("gradient_tolerance", 1e-8)),
                repeats=o.get("repeats", 50),
                theta_deg=o.get("theta", 45.0),
                exact_counts=bool(o.get("exact_counts", False)),
            )
            out = o.get("out", "experiment.json")
            res = cmd_experiment(spec, out, int(o.get("jobs", 1)))
            print(f"master seed {seed:#x}; mean fidelity {res['mean_fidelity']:.5f}; wrote {out}")
            bad = sum(a["n_unconverged"] for a in res["angles"])
            if bad:
                print(f"warning: {bad} trial(s) hit the iteration cap", file=sys.stderr)
        elif cmd == "check":
            if not o.get("input"):
                raise ValidationError("check needs --input")
            res = cmd_check(o["input"], bool(o.get("pure", False)),
                            o.get("tol", monogamy.DEFAULT_TOL), int(o.get("pivot", 0)))
            text = json.dumps(res, indent=1)
            print(text)
            if o.get("out"):
                with open(o["out"], "w") as fh:
                    fh.write(text + "\n")
        elif cmd == "oracle":
            out = o.get("out", "oracle.json")
            res = cmd_oracle(int(o.get("samples", 100)), seed, out, int(o.get("unitaries", 10_000)),
                             int(o.get("fuzz_pure", 100_000)), int(o.get("fuzz_mixed", 10_000)),
                             not o.get("no_climb", False))
            print(f"seed {seed:#x}; max E_F violation {res['max_eof_violation']:.3e}; "
                  f"max E_N violation {res['max_neg_violation']:.3e}; wrote {out}")
    except (ValueError, ParseError, InvalidState, Unsupported) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
