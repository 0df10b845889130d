# Written by the acorp developers - 2026
#####################################################
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from tqdm import tqdm

from ..core.errors import ConfigInvalid
from .config import sim_config
from .world import (
    CAUSES,
    coherence_index,
    lineage_counts,
    new_world,
    run_generation,
    treasury_summary,
)

logger = logging.getLogger(__name__)


@dataclass
class RunMetrics:
    seed: int
    survivor_counts: list = field(default_factory=list)
    coherence: list = field(default_factory=list)
    treasury: list = field(default_factory=list)
    lineages: list = field(default_factory=list)
    alive_traces: list = field(default_factory=list)
    causes: dict = field(default_factory=lambda: {c: 0 for c in CAUSES})

    @property
    def deaths(self) -> int:
        return sum(self.causes.values())


@dataclass
class SimMetrics:
    config: dict
    runs: list

    @property
    def seeds(self) -> list:
        return [run.seed for run in self.runs]

    @property
    def cause_histogram(self) -> dict:
        return {c: sum(run.causes[c] for run in self.runs) for c in CAUSES}

    @property
    def total_deaths(self) -> int:
        return sum(run.deaths for run in self.runs)

    # Mean over seeds; generations where no seed had a broad grant stay None
    @property
    def coherence_series(self) -> list:
        series = []
        for g in range(len(self.runs[0].coherence)):
            values = [run.coherence[g] for run in self.runs if run.coherence[g] is not None]
            series.append(float(np.mean(values)) if values else None)
        return series

    @property
    def mean_survivors(self) -> list:
        counts = np.asarray([run.survivor_counts for run in self.runs], dtype=np.float64)
        return [float(v) for v in counts.mean(axis=0)] if counts.size else []

    # Output
    ################################################
    def to_json_lines(self) -> str:
        lines = []
        for run in self.runs:
            for g, survivors in enumerate(run.survivor_counts):
                record = {
                    "seed": run.seed,
                    "generation": g,
                    "survivors": survivors,
                    "coherence": run.coherence[g],
                    "treasury": run.treasury[g],
                    "lineages": run.lineages[g],
                }
                lines.append(json.dumps(record, sort_keys=True))
        lines.append(
            json.dumps(
                {
                    "summary": True,
                    "seeds": self.seeds,
                    "coherence_series": self.coherence_series,
                    "cause_histogram": self.cause_histogram,
                    "total_deaths": self.total_deaths,
                },
                sort_keys=True,
            )
        )
        return "\n".join(lines) + "\n"

    def to_bytes(self) -> bytes:
        return self.to_json_lines().encode("utf-8")

    def summary_table(self) -> str:
        header = "{:>10} {:>12} {:>12} {:>10} {:>14}".format(
            "generation", "survivors", "coherence", "screeners", "non-screeners"
        )
        rows = [header, "-" * len(header)]
        coherence = self.coherence_series
        for g, survivors in enumerate(self.mean_survivors):
            screeners = np.mean([run.lineages[g]["screener"] for run in self.runs])
            others = np.mean([run.lineages[g]["non-screener"] for run in self.runs])
            value = "n/a" if coherence[g] is None else "{:.4f}".format(coherence[g])
            row = "{:>10} {:>12.2f} {:>12} {:>10.2f} {:>14.2f}"
            rows.append(row.format(g, survivors, value, screeners, others))
        rows.append("")
        rows.append(
            "deaths: "
            + ", ".join(c + "=" + str(n) for c, n in self.cause_histogram.items())
            + " (total " + str(self.total_deaths) + ")"
        )
        return "\n".join(rows) + "\n"

    # Whitespace-separated columns for gnuplot: generation, mean survivors, mean coherence
    def gnuplot_columns(self) -> str:
        lines = ["# generation survivors coherence"]
        coherence = self.coherence_series
        for g, survivors in enumerate(self.mean_survivors):
            value = "NaN" if coherence[g] is None else repr(coherence[g])
            lines.append(str(g) + " " + repr(survivors) + " " + value)
        return "\n".join(lines) + "\n"


def _record(world, metrics: RunMetrics) -> None:
    metrics.survivor_counts.append(len(world.living))
    metrics.coherence.append(coherence_index(world))
    metrics.treasury.append(treasury_summary(world))
    metrics.lineages.append(lineage_counts(world))


# Generation 0 is measured on the founding population, later entries on the survivors of each
# generation before reproduction refills the population
def run_world(config: dict, seed: int, verbose: bool = False) -> RunMetrics:
    world = new_world(config, seed)
    metrics = RunMetrics(seed=int(seed))
    _record(world, metrics)

    def observe(world) -> None:
        _record(world, metrics)
        metrics.alive_traces.append(list(world.alive_trace))

    for _ in tqdm(range(config["generations"]), disable=not verbose, leave=False):
        run_generation(world, observe=observe)

    for cause in world.deaths:
        metrics.causes[cause] += 1
    logger.debug("seed %d: %d deaths", seed, metrics.deaths)
    return metrics


def _run_world_quiet(args: tuple) -> RunMetrics:
    config, seed = args
    return run_world(config, seed)


def run_experiment(
    config: Union[dict, None], seeds: list, verbose: bool = False, processes: int = 1
) -> SimMetrics:
    if not seeds:
        raise ConfigInvalid("run_experiment needs at least one seed")
    config = sim_config(**(config or {}))

    # Seeds share nothing, so they may run in separate processes
    if processes > 1:
        with ProcessPoolExecutor(max_workers=processes) as pool:
            jobs = pool.map(_run_world_quiet, [(config, int(s)) for s in seeds])
            runs = list(tqdm(jobs, total=len(seeds), disable=not verbose))
    else:
        runs = [run_world(config, int(s)) for s in tqdm(seeds, disable=not verbose)]

    logger.info("ran %d seeds x %d generations", len(seeds), config["generations"])
    return SimMetrics(config=config, runs=runs)


# "1..10" -> [1, ..., 10]; "1,4,9" -> [1, 4, 9]
def parse_seeds(text: str) -> list:
    seeds = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                low, high = part.split("..", 1)
                seeds.extend(range(int(low), int(high) + 1))
            elif part:
                seeds.append(int(part))
    except ValueError as e:
        raise ConfigInvalid("bad seed list " + repr(text)) from e
    if not seeds:
        raise ConfigInvalid("empty seed list " + repr(text))
    return seeds
