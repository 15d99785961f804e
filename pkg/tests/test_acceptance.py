"""Acceptance gate: one test (and one pass/fail line) per criterion.

Run with ``pytest -v tests/test_acceptance.py``; each criterion prints an
``ACCEPTANCE criterion N: PASS/FAIL`` line and fails with a per-check
breakdown when any sub-check misses its tolerance.  The full quenched table
sweep is behind the ``slow`` marker (``pytest -m slow``).
"""

import dataclasses

import numpy as np
import pytest

from qdc.analysis import QuenchConfig, find_pc, quenched_capacity
from qdc.capacity import (PartyLayout, bound_two_receivers, capacity_noiseless,
                          capacity_one_receiver, evaluate)
from qdc.channels import (ChannelKind, ChannelSpec, apply_local_channel,
                          deterministic_kraus, sample_per_qubit_kraus,
                          unitary_from_params, UnitaryParams)
from qdc.cli import (TABLE_I_ALPHAS, TABLE_III, TABLE_III_ALPHAS,
                     TABLE_III_EPSILONS, _table_problem,
                     _table_rows_deterministic)
from qdc.optimizer import OptimizerConfig
from qdc.oracles import (bell_depolarizing_threshold, pa_closed_form,
                         pc_closed_form, run_all_oracles, theorem3_bound)
from qdc.qmath import I2, check_density_matrix, dm_from_statevector
from qdc.states import GGHZ, WUniform, build

OPT = OptimizerConfig()
FAST_OPT = OptimizerConfig(max_evaluations=3000, restarts=2)


_CAPFD = None


@pytest.fixture(autouse=True)
def _gate_output(capfd):
    global _CAPFD
    _CAPFD = capfd
    yield
    _CAPFD = None


def report(criterion: int, failures: list[str]) -> None:
    status = "PASS" if not failures else "FAIL"
    line = f"ACCEPTANCE criterion {criterion}: {status}"
    print("\n" + line)
    if _CAPFD is not None:      # emit past the capture so PASS lines show too
        with _CAPFD.disabled():
            print(line, flush=True)
    assert not failures, (f"criterion {criterion}: {len(failures)} "
                          "check(s) outside tolerance:\n" + "\n".join(failures))


def table_failures(rows: list[dict]) -> list[str]:
    return [f"  table {r['table']} {r['quantity']} {r['state']} "
            f"{r['n_senders']}S-{r['receivers']}R alpha={r['alpha']}"
            f"{' eps=' + str(r['epsilon']) if r['epsilon'] != '' else ''}: "
            f"computed={r['computed']} reference={r['reference']}"
            for r in rows if not r["pass"]]


def test_criterion_1_table_i_dephasing():
    rows = _table_rows_deterministic("I", ChannelKind.DEPHASING, 1e-3, 1e-4, OPT)
    failures = table_failures(rows)
    # spot check that the identity encoding used in the scan is optimal
    rho, layout = _table_problem("ghz", 2, 1)
    for alpha, p in ((0.5, 0.2), (0.9, 0.35)):
        spec = ChannelSpec(ChannelKind.DEPHASING, alpha, p)
        c_id = capacity_one_receiver(rho, layout, spec, optimize=False)
        c_opt = capacity_one_receiver(rho, layout, spec, opt=FAST_OPT)
        if abs(c_opt.capacity_bits - c_id.capacity_bits) > 1e-6:
            failures.append(f"  identity encoding suboptimal at alpha={alpha}, "
                            f"p={p}: {c_opt.capacity_bits} vs {c_id.capacity_bits}")
    report(1, failures)


def test_criterion_2_table_ii_depolarizing():
    rows = _table_rows_deterministic("II", ChannelKind.DEPOLARIZING, 1e-3,
                                     1e-4, OPT)
    report(2, table_failures(rows))


def test_criterion_3_closed_form_oracles():
    failures = []
    for rep in run_all_oracles(fast=False):
        if not rep.passed:
            failures.append(f"  oracle {rep.name}: numeric={rep.numeric_value} "
                            f"closed={rep.closed_form_value} "
                            f"abs_err={rep.abs_error}")
    if abs(pa_closed_form(0.5) - 0.43845) > 5e-6:
        failures.append("  pa_closed_form(0.5) != 0.43845")
    if abs(pa_closed_form(0.9) - 0.39268) > 5e-6:
        failures.append("  pa_closed_form(0.9) != 0.39268")
    if abs(bell_depolarizing_threshold(0.0) - 0.189) > 1e-3:
        failures.append("  Bell Markovian depolarizing threshold != 0.189")
    for a in np.linspace(0.05, 1.0, 25):
        m = 1 - 2 * pc_closed_form(a) + 2 * (pc_closed_form(a) - 1) \
            * pc_closed_form(a) * a
        if abs(m) > 1e-12:
            failures.append(f"  pc_closed_form root property fails at a={a}")
    report(3, failures)


def test_criterion_4_theorem_3_flatness():
    failures = []
    layout = PartyLayout(2, 2, split=1)
    for x in np.arange(0.1, 0.95, 0.1):
        rho = build(GGHZ(4, x))
        expect = theorem3_bound(x)
        for p in np.arange(0.0, 0.55, 0.1):
            for alpha in (0.0, 0.5, 0.9):
                spec = ChannelSpec(ChannelKind.DEPHASING, alpha, min(p, 0.5))
                res = bound_two_receivers(rho, layout, spec, optimize=False)
                if abs(res.capacity_bits - expect) > 1e-6:
                    failures.append(f"  x={x:.1f} p={p:.1f} alpha={alpha}: "
                                    f"{res.capacity_bits} != {expect}")
    report(4, failures)


def test_criterion_5_theorem_1_identity_optimality():
    failures = []
    rng = np.random.default_rng(2024)
    for i in range(50):
        n = int(rng.integers(2, 4))
        x = float(rng.uniform(0.05, 0.95))
        p = float(rng.uniform(0.0, 0.5))
        alpha = float(rng.uniform(0.0, 1.0))
        rho = build(GGHZ(n + 1, x))
        layout = PartyLayout(n, 1)
        spec = ChannelSpec(ChannelKind.DEPHASING, alpha, p)
        s_id = capacity_one_receiver(rho, layout, spec,
                                     optimize=False).channel_output_entropy
        opt = dataclasses.replace(FAST_OPT, seed=i)
        s_opt = capacity_one_receiver(rho, layout, spec,
                                      opt=opt).channel_output_entropy
        if not (s_opt <= s_id + 1e-6 and s_opt >= s_id - 1e-6):
            failures.append(f"  instance {i} (N={n}, x={x:.3f}, p={p:.3f}, "
                            f"alpha={alpha:.3f}): optimized {s_opt} vs "
                            f"identity {s_id}")
    report(5, failures)


# fast CI subset of the quenched table: (state, senders, alpha, eps)
FAST_QUENCH_CELLS = [("ghz", 2, 0.3, 0.5), ("ghz", 2, 0.9, 1.0),
                     ("ghz", 3, 0.5, 0.7), ("w", 2, 0.3, 1.0),
                     ("w", 2, 0.9, 0.5), ("w", 3, 0.5, 1.0)]


def quenched_pc(family, ns, alpha, eps, realizations, scan_step=5e-3):
    rho, layout = _table_problem(family, ns, 1)
    spec = ChannelSpec(ChannelKind.DEPOLARIZING, alpha, 0.0, eps)
    qc = QuenchConfig(realizations=realizations, master_seed=0, threads=4)
    return find_pc(rho, layout, spec, OPT, scan_step=scan_step, refine=1e-3,
                   optimize=False, quench=qc)


def table_iii_reference(family, ns, alpha, eps):
    i = TABLE_III_ALPHAS.index(alpha)
    j = TABLE_III_EPSILONS.index(eps)
    return TABLE_III[(family, ns, 1)][i][j]


def test_criterion_6_table_iii_quenched_fast():
    failures = []
    for family, ns, alpha, eps in FAST_QUENCH_CELLS:
        ref = table_iii_reference(family, ns, alpha, eps)
        pc = quenched_pc(family, ns, alpha, eps, realizations=500)
        if pc is None or abs(pc - ref) > 0.03:
            failures.append(f"  {family} {ns}S-1R alpha={alpha} eps={eps}: "
                            f"computed={pc} reference={ref}")
    report(6, failures)


@pytest.mark.slow
def test_criterion_6_table_iii_quenched_full():
    failures = []
    for (family, ns, _nr), grid in TABLE_III.items():
        for alpha, refs in zip(TABLE_III_ALPHAS, grid):
            for eps, ref in zip(TABLE_III_EPSILONS, refs):
                pc = quenched_pc(family, ns, alpha, eps, realizations=4000)
                if pc is None or abs(pc - ref) > 0.02:
                    failures.append(f"  {family} {ns}S-1R alpha={alpha} "
                                    f"eps={eps}: computed={pc} reference={ref}")
    report(6, failures)


def test_criterion_7_theorem_4_random_dephasing():
    # the quenched capacity here is the maximized one (encoding optimized per
    # channel realization); with the identity encoding the randomness raises
    # the output entropy instead and the improvement disappears
    failures = []
    rho = build(GGHZ(3, 1 / np.sqrt(2)))
    layout = PartyLayout(2, 1)
    opt = OptimizerConfig(max_evaluations=1200, restarts=1)

    def quench(alpha, p, eps, realizations):
        det = capacity_one_receiver(
            rho, layout, ChannelSpec(ChannelKind.DEPHASING, alpha, p),
            optimize=False).capacity_bits
        q = quenched_capacity(
            rho, layout, ChannelSpec(ChannelKind.DEPHASING, alpha, p, eps),
            QuenchConfig(realizations=realizations, master_seed=1,
                         optimize_per_realization=True, threads=4), opt=opt)
        return det, q

    # one-sided bound over the randomness/noise grid
    for eps in (0.3, 0.5):
        for alpha in (0.0, 0.5):
            for p in (0.1, 0.3):
                det, q = quench(alpha, p, eps, realizations=80)
                if q.mean_capacity_bits - det < -3 * q.std_error_bits:
                    failures.append(
                        f"  eps={eps} alpha={alpha} p={p}: quenched mean "
                        f"{q.mean_capacity_bits} below deterministic {det} "
                        f"by more than 3 stderr ({q.std_error_bits})")

    # strict improvement over the deterministic channel at alpha = 0.8
    for eps in (0.5, 0.7, 1.0):
        det, q = quench(0.8, 0.3, eps, realizations=200)
        improvement = q.mean_capacity_bits - det
        if improvement <= 3 * q.std_error_bits:
            failures.append(
                f"  eps={eps} alpha=0.8 p=0.3: no strict improvement "
                f"({improvement} +- {q.std_error_bits})")
    report(7, failures)


def test_criterion_8_property_suites():
    failures = []
    rng = np.random.default_rng(7)

    # CPTP completeness of 1000 sampled random Kraus sets
    worst = 0.0
    for kind in ChannelKind:
        spec = ChannelSpec(kind, 0.4, 0.1, epsilon=1.0)
        for _ in range(500):
            for ks in sample_per_qubit_kraus(spec, 1, rng):
                acc = sum(k.conj().T @ k for k in ks.operators)
                worst = max(worst, float(np.max(np.abs(acc - I2))))
    if worst > 1e-10:
        failures.append(f"  CPTP completeness residual {worst} > 1e-10")

    # density-matrix invariants after channel application
    for _ in range(20):
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        rho = dm_from_statevector(psi / np.linalg.norm(psi))
        spec = ChannelSpec(ChannelKind.DEPOLARIZING, 0.3, 0.1, epsilon=0.8)
        kraus = sample_per_qubit_kraus(spec, 2, rng)
        try:
            check_density_matrix(apply_local_channel(rho, kraus, [0, 1]),
                                 tol_herm=1e-9)
        except Exception as exc:   # noqa: BLE001 - collect into the report
            failures.append(f"  channel output not a density matrix: {exc}")

    # depolarizing covariance identity and dephasing violation
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    rho = dm_from_statevector(psi / np.linalg.norm(psi))
    u = np.kron(unitary_from_params(UnitaryParams(0.9, 1.1, 2.3)), I2)
    ks = deterministic_kraus(ChannelSpec(ChannelKind.DEPOLARIZING, 0.4, 0.2))
    resid = np.max(np.abs(
        apply_local_channel(u @ rho @ u.conj().T, [ks], [0])
        - u @ apply_local_channel(rho, [ks], [0]) @ u.conj().T))
    if resid > 1e-10:
        failures.append(f"  depolarizing covariance residual {resid} > 1e-10")
    ks = deterministic_kraus(ChannelSpec(ChannelKind.DEPHASING, 0.4, 0.2))
    resid = np.max(np.abs(
        apply_local_channel(u @ rho @ u.conj().T, [ks], [0])
        - u @ apply_local_channel(rho, [ks], [0]) @ u.conj().T))
    if resid < 1e-6:
        failures.append("  dephasing covariance violation not detected")

    # capacity at p = 0 equals the noiseless capacity
    for state, layout in ((GGHZ(3, 1 / np.sqrt(2)), PartyLayout(2, 1)),
                          (WUniform(4), PartyLayout(2, 2, split=1))):
        rho = build(state)
        base = capacity_noiseless(rho, layout).capacity_bits
        for kind in ChannelKind:
            spec = ChannelSpec(kind, 0.6, 0.0)
            cap = evaluate(rho, layout, spec, optimize=False).capacity_bits
            if abs(cap - base) > 1e-9:
                failures.append(f"  p=0 capacity {cap} != noiseless {base} "
                                f"({state}, {kind})")

    # thread-count independence (bit-exact)
    rho = build(GGHZ(3, 1 / np.sqrt(2)))
    spec = ChannelSpec(ChannelKind.DEPOLARIZING, 0.3, 0.05, epsilon=0.7)
    runs = [quenched_capacity(rho, PartyLayout(2, 1), spec,
                              QuenchConfig(300, master_seed=9, threads=t))
            for t in (1, 2, 5)]
    if len({(r.mean_capacity_bits, r.std_error_bits) for r in runs}) != 1:
        failures.append("  quenched mean depends on thread count")

    report(8, failures)
