"""Reference values the library must reproduce, run by `ranklab check`.

Each fixture computes one number and compares it to a reference value.
Fixtures that need the external curve database are reported as SKIPPED.
"""

from dataclasses import dataclass
from typing import Callable

from .constants import KAPPA, poonen_rains_s, s_weighted_sum
from .curve_enum import HeightInterval, count_minimal
from .predictor import predict_avg_rank, predict_pi_Rr, predicted_std_errors
from .rank_model import rank_probability, rho, theta


@dataclass(frozen=True)
class Fixture:
    name: str
    expected: float
    tol: float
    compute: Callable[[], float] | None
    relative: bool = False
    needs_database: bool = False

    def run(self) -> tuple[str, float | None]:
        """Return ("PASS" | "FAIL" | "SKIPPED", computed value)."""
        if self.needs_database or self.compute is None:
            return "SKIPPED", None
        got = self.compute()
        err = abs(got - self.expected)
        if self.relative:
            err /= abs(self.expected)
        return ("PASS" if err <= self.tol else "FAIL"), got


def _fixtures() -> list[Fixture]:
    out: list[Fixture] = []
    for n, v in enumerate([0.20971122, 0.41942244, 0.27961496, 0.07988998, 0.01065199, 0.00068722, 0.00002181]):
        out.append(Fixture(f"selmer_density_s{n}", v, 1e-7, lambda n=n: poonen_rains_s(n)))
    out.append(Fixture("kappa", 0.484462004349, 1e-10, lambda: KAPPA))
    out.append(Fixture("mean_selmer_density", 1.26449978, 1e-7, lambda: s_weighted_sum("first_moment", 30)))
    out.append(Fixture("odd_densities_to_5", 0.49999965, 1e-7, lambda: s_weighted_sum("odd", 5)))
    out.append(Fixture("count_upto_26998673868", 238764310, 0, lambda: count_minimal(HeightInterval(0, 26998673868))))
    out.append(
        Fixture("count_window_2e10", 1955593, 0, lambda: count_minimal(HeightInterval(20_000_000_000, 20_250_000_000)))
    )
    out.append(
        Fixture("count_window_2.5e10", 1852352, 0, lambda: count_minimal(HeightInterval(25_000_000_000, 25_250_000_000)))
    )
    for n, v in zip(range(1, 6), [0.44223400, 0.26066727, 0.05781814, 0.00451697, 0.00009141]):
        out.append(Fixture(f"theta{n}_at_2.6975e10", v, 1e-7, lambda n=n: theta(n, 2.6975e10)))
    for n, v in zip(range(1, 6), [0.42678631, 0.27550444, 0.07516196, 0.00968314, 0.00066148]):
        out.append(Fixture(f"theta{n}_at_1e16", v, 1e-7, lambda n=n: theta(n, 1e16)))
    for n, v in zip(range(2, 6), [0.63996477, 0.45404630, 0.64309203, 0.62550968]):
        out.append(Fixture(f"rho{n}_at_2.675e10", v, 1e-7, lambda n=n: rho(n, 2.675e10)))
    for n, v in zip(range(1, 6), [0.00115688, 0.00102258, 0.00054367, 0.00015619, 0.00002227]):
        out.append(
            Fixture(f"theta_error{n}", v, 1e-6, lambda n=n: predicted_std_errors("theta", n, 2.6975e10, 0.025e9))
        )
    for n, v in zip(range(2, 6), [0.00069208, 0.00152440, 0.00700827, 0.05462609]):
        out.append(
            Fixture(f"rho_model_error{n}", v, 1e-6, lambda n=n: predicted_std_errors("rho2", n, 2.675e10, 0.25e9))
        )
    hist = {
        2: (509845, {0: 181246.58, 2: 328598.41}),
        3: (111926, {1: 60455.09, 3: 51470.90}),
        4: (8399, {0: 836.68, 2: 4256.52, 4: 3305.78}),
        5: (158, {1: 21.24, 3: 73.38, 5: 63.36}),
    }
    for n, (count, by_rank) in hist.items():
        for r, v in by_rank.items():
            out.append(
                Fixture(
                    f"rank_histogram_n{n}_r{r}", v, 1e-2,
                    lambda n=n, r=r, count=count: count * rank_probability(n, r, 2.0125e10), relative=True,
                )
            )
    for r, v in zip(range(1, 6), [113133971, 41005107, 6273138, 381272, 6438]):
        out.append(
            Fixture(f"rank_count_r{r}", v, 1e-3 if r == 5 else 1e-4, lambda r=r: predict_pi_Rr(r, 2.7e10), relative=True)
        )
    avg = [(1e10, 0.905665), (1e15, 0.846828), (1e20, 0.766868), (1e30, 0.649901), (1e40, 0.585108),
           (1e50, 0.548880), (1e75, 0.512531), (1e100, 0.503256), (1e150, 0.500215), (1e200, 0.500006)]
    for X, v in avg:
        out.append(Fixture(f"average_rank_{X:.0e}", v, 1e-4, lambda X=X: predict_avg_rank(X)))
    out.append(Fixture("database_average_rank_2.7e10", 0.90197580, 1e-8, None, needs_database=True))
    out.append(Fixture("database_theta1_window", 0.44083621, 1e-8, None, needs_database=True))
    out.append(Fixture("database_rho3_window", 0.45496654, 1e-8, None, needs_database=True))
    return out


FIXTURES = _fixtures()


def run_fixtures(name_filter: str | None = None):
    """Yield (fixture, status, value) for fixtures whose name contains name_filter."""
    for fx in FIXTURES:
        if name_filter and name_filter not in fx.name:
            continue
        status, value = fx.run()
        yield fx, status, value
