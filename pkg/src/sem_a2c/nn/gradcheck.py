"""Central-finite-difference verification of analytic gradients.

The function under test receives the parameter dict, runs its own forward
and backward, and returns the scalar loss with gradients accumulated in the
parameters. The checker then perturbs individual weight entries and compares
(f(w+eps) - f(w-eps)) / 2eps against the recorded analytic gradient.

Exhaustive checks are only affordable for tiny layers; for full networks a
fixed-size random sample of entries per parameter is compared instead. Run
in float64: at 32-bit the difference quotient drowns in rounding noise.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ParamCheck:
    name: str
    max_rel_error: float
    worst_index: int
    n_checked: int
    frozen: bool


@dataclass
class GradCheckReport:
    checks: list = field(default_factory=list)

    @property
    def max_rel_error(self):
        return max((c.max_rel_error for c in self.checks), default=0.0)

    def passed(self, tol):
        return all(c.max_rel_error < tol for c in self.checks)

    def format(self, tol=None):
        lines = []
        for c in self.checks:
            flag = " [frozen: excluded from updates]" if c.frozen else ""
            verdict = ""
            if tol is not None:
                verdict = "  ok" if c.max_rel_error < tol else "  FAIL"
            lines.append(
                f"{c.name:24s} max_rel_err={c.max_rel_error:.3e} "
                f"(entry {c.worst_index}, {c.n_checked} checked){verdict}{flag}"
            )
        return "\n".join(lines)


def grad_check(f, params, eps=1e-5, max_entries=None, rng=None):
    """Compare analytic gradients of ``f(params)`` against central differences.

    f must return a finite scalar and leave d(loss)/d(param) in each
    Parameter's grad buffer. max_entries, if given, caps how many entries of
    each parameter are perturbed (chosen with ``rng``); otherwise every entry
    is checked. Frozen parameters are checked too and flagged in the report.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    for p in params.values():
        p.zero_grad()
    base = float(f(params))
    if not np.isfinite(base):
        raise FloatingPointError(f"loss is not finite at the base point: {base}")
    analytic = {name: p.grad.copy() for name, p in params.items()}

    report = GradCheckReport()
    for name, p in params.items():
        flat = p.value.reshape(-1)
        n = flat.shape[0]
        if max_entries is not None and n > max_entries:
            idx = rng.choice(n, size=max_entries, replace=False)
        else:
            idx = np.arange(n)
        worst = 0.0
        worst_i = -1
        a_flat = analytic[name].reshape(-1)
        for i in idx:
            orig = flat[i]
            flat[i] = orig + eps
            fp = float(f(params))
            flat[i] = orig - eps
            fm = float(f(params))
            flat[i] = orig
            if not (np.isfinite(fp) and np.isfinite(fm)):
                raise FloatingPointError(
                    f"loss not finite while perturbing {name}[{i}]"
                )
            numeric = (fp - fm) / (2.0 * eps)
            a = a_flat[i]
            rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-5)
            if rel > worst:
                worst = rel
                worst_i = int(i)
        report.checks.append(
            ParamCheck(name, worst, worst_i, len(idx), p.frozen)
        )
    # restore analytic grads so callers can inspect them after the check
    for name, p in params.items():
        p.grad[...] = analytic[name]
    return report
