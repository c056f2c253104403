"""Command-line driver for simplex-directions.

Subcommands:
    simulate   Draw a dataset from one of the simulation scenarios.
    extract    Turn composition pairs into a direction dataset.
    em-init    Fit a regularized EM estimate to initialise chains.
    fit        Run MCMC chains for one model and summarise them.
    predict    Score a fitted model on withheld observations.
    select     Fit several models on a split and pick the best predictor.
    summarize  Re-summarise chain files written by `fit`.

Exit codes: 0 success, 1 input or configuration error, 2 chains did not
converge (outputs still written), 3 numerical failure.
"""

import argparse
import copy
import logging
import os
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import colorlog
import numpy as np

from src.config_loader import DEFAULT_MAIN_CONFIG, apply_overrides, deep_update, load_config
from src.dataset import Dataset
from src.dirext import dedup, extract_directions, load_dataset, load_pairs, save_dataset
from src.dirext.io import save_observations
from src.em import EmConfig, em_ivm, em_svmc, em_svmp, load_init, save_init
from src.errors import ChainAbortedError, NumericError, SimplexDirectionsError
from src.evalsel import Scenario, log_posterior_predictive, save_truth, score_models, select_model, simulate_scenario, split_dataset
from src.models.factory import create_model
from src.models.model_spec import ModelKind, ModelSpec
from src.models.param_state import ParamState
from src.output import BaseOutput, ChainWriter, ScoreTableWriter, SummaryWriter, read_chains
from src.samplers.chain import Chain, max_r_hat
from src.samplers.runner import R_HAT_WARNING, chain_seeds, run_chains
from src.samplers.summary import summarize_chain

# --- Logging Configuration ---
handler = colorlog.StreamHandler()
handler.setFormatter(
    colorlog.ColoredFormatter(
        "%(log_color)s%(asctime)s [%(levelname)s] - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        log_colors={
            "DEBUG": "cyan",
            "INFO": "green",
            "WARNING": "yellow",
            "ERROR": "red",
            "CRITICAL": "red,bg_white",
        },
    )
)
root_logger = logging.getLogger()
root_logger.addHandler(handler)
root_logger.setLevel(logging.INFO)

logger = logging.getLogger("main")

for h in logging.root.handlers[:]:
    if isinstance(h, logging.StreamHandler) and not isinstance(h, colorlog.StreamHandler):
        logging.root.removeHandler(h)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_NUMERIC_FAILURE = 3


# --- Utility Functions ---
def print_separator(char="=", length=70):
    """Prints a separator line to the console for better visual structure."""
    print(char * length)


def print_headline(title: str, width: int = 70):
    padding = (width - len(title) - 2) // 2
    print(f"\x1b[37m{'=' * padding} {title} {'=' * (width - padding - len(title) - 2)}\x1b[0m")


@dataclass
class RunConfig:
    """Merged configuration plus the parsed command line; together they fix every output."""

    config: Dict[str, Any]
    args: argparse.Namespace

    @property
    def seed(self) -> int:
        seed = self.args.seed if self.args.seed is not None else self.config.get("seed", 0)
        return int(seed)

    @property
    def threads(self) -> int:
        threads = self.args.threads if self.args.threads is not None else self.config.get("threads", 1)
        return max(1, int(threads))

    @property
    def out(self) -> str:
        return self.args.out

    def evaluation(self, key: str, default: Any) -> Any:
        return (self.config.get("evaluation") or {}).get(key, default)


# --- Factory Functions ---
def model_section(config: Dict[str, Any], kind: ModelKind) -> Dict[str, Any]:
    """Model settings of one kind without its `sampler` subsection."""
    section = dict((config.get("models") or {}).get(kind.value) or {})
    section.pop("sampler", None)
    return section


def sampler_settings(config: Dict[str, Any], kind: ModelKind) -> Dict[str, Any]:
    """Shared sampler settings overridden by the model's own `sampler` subsection."""
    shared = copy.deepcopy(config.get("sampler") or {})
    own = ((config.get("models") or {}).get(kind.value) or {}).get("sampler") or {}
    return deep_update(shared, copy.deepcopy(own))


def create_spec(config: Dict[str, Any], name: str) -> Optional[ModelSpec]:
    """Model specification for a model name, configured from `config['models'][name]`."""
    try:
        kind = ModelKind.parse(name)
    except ValueError:
        logger.error(f"❌ Unknown model specified: '{name}'")
        return None
    model = create_model(kind, model_section(config, kind))
    return model.spec if model is not None else None


def create_output_handlers(config: Dict[str, Any]) -> Dict[str, BaseOutput]:
    """Creates the chain, summary and score writers from the `output` section."""
    output_config = config.get("output") or {}
    handlers: Dict[str, BaseOutput] = {}
    for name, cls in (("chains", ChainWriter), ("summary", SummaryWriter), ("scores", ScoreTableWriter)):
        try:
            writer = cls()
            writer.configure(output_config)
            handlers[name] = writer
        except Exception as e:
            logger.error(f"❌ Failed to create or configure {cls.__name__}: {e}", exc_info=True)
    return handlers


def _handler(run: RunConfig, name: str) -> BaseOutput:
    handlers = create_output_handlers(run.config)
    if name not in handlers:
        raise SimplexDirectionsError(f"Output handler '{name}' is not available")
    return handlers[name]


# --- Commands ---
def fit_model(run: RunConfig, data: Dataset, spec: ModelSpec, seed: int, init: Optional[ParamState] = None) -> List[Chain]:
    settings = sampler_settings(run.config, spec.kind)
    n_chains = int(settings.pop("n_chains", 4))
    inits = [init] * n_chains if init is not None else None
    logger.info(f"Fitting {spec.name} with {n_chains} chains (seed {seed})")
    return run_chains(None, data, spec, settings, seed, n_chains=n_chains, threads=run.threads, inits=inits)


def cmd_simulate(run: RunConfig) -> int:
    print_headline("Simulating Scenario")
    scenario = Scenario(run.args.scenario, run.args.n, seed=run.seed, omega=run.args.omega)
    sim = simulate_scenario(scenario)
    save_dataset(sim.data, os.path.join(run.out, "data.csv"))
    save_truth(sim, os.path.join(run.out, "truth.json"))
    return EXIT_OK


def cmd_extract(run: RunConfig) -> int:
    print_headline("Extracting Directions")
    pairs = load_pairs(run.args.pairs)
    observations, skipped = extract_directions(pairs, show_progress=sys.stderr.isatty())
    kept, removed = dedup(observations, run.args.tol)
    save_observations(kept, os.path.join(run.out, "directions.csv"))
    logger.info(f"📄 {len(kept)} directions kept, {skipped} degenerate pairs skipped, {removed} duplicates removed")
    return EXIT_OK


def cmd_em_init(run: RunConfig) -> int:
    print_headline("EM Initialisation")
    data = load_dataset(run.args.data)
    spec = create_spec(run.config, run.args.model)
    if spec is None:
        return EXIT_INPUT_ERROR
    em_config = EmConfig.from_config(run.config.get("em"))
    rng = np.random.default_rng(run.seed)
    if spec.kind == ModelKind.IVM:
        result = em_ivm(data, spec.K, em_config, rng, threads=run.threads)
    elif spec.kind == ModelKind.SVMC:
        result = em_svmc(data, spec, em_config, rng, threads=run.threads)
    elif spec.kind == ModelKind.SVMP:
        result = em_svmp(data, spec, em_config, rng, threads=run.threads)
    else:
        logger.error(f"❌ No EM initializer for model '{spec.name}'; use ivm, svmc or svmp")
        return EXIT_INPUT_ERROR
    os.makedirs(run.out, exist_ok=True)
    save_init(result, os.path.join(run.out, f"init_{spec.name}.json"))
    return EXIT_OK


def _write_fit(run: RunConfig, chains: List[Chain], out_dir: str) -> int:
    _handler(run, "chains").output(chains, out_dir)
    _handler(run, "summary").output(summarize_chain(chains), out_dir)
    worst = max_r_hat(chains[0].diagnostics)
    if worst is not None and worst > R_HAT_WARNING:
        logger.warning(f"⚠️ Max split-R-hat {worst:.3f} exceeds {R_HAT_WARNING}; outputs written anyway")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _write_aborted(run: RunConfig, error: ChainAbortedError, out_dir: str):
    logger.error(f"❌ Sampling aborted: {error}")
    _handler(run, "chains").output_aborted(error, out_dir)


def cmd_fit(run: RunConfig) -> int:
    print_headline("Fitting Model")
    data = load_dataset(run.args.data)
    spec = create_spec(run.config, run.args.model)
    if spec is None:
        return EXIT_INPUT_ERROR
    init = None
    if run.args.init:
        init_spec, init = load_init(run.args.init)
        if init_spec.kind != spec.kind or init_spec.K != spec.K:
            logger.error(f"❌ Init file is for {init_spec.name} (K={init_spec.K}), not {spec.name} (K={spec.K})")
            return EXIT_INPUT_ERROR
    try:
        chains = fit_model(run, data, spec, run.seed, init)
    except ChainAbortedError as e:
        _write_aborted(run, e, run.out)
        return EXIT_NUMERIC_FAILURE
    print_headline("Writing Outputs")
    return _write_fit(run, chains, run.out)


def cmd_summarize(run: RunConfig) -> int:
    print_headline("Summarising Chains")
    chains = read_chains(run.args.fit_dir)
    _handler(run, "summary").output(summarize_chain(chains), run.out)
    return EXIT_OK


def cmd_predict(run: RunConfig) -> int:
    print_headline("Posterior Predictive Scoring")
    chains = read_chains(run.args.fit_dir)
    train, test = load_dataset(run.args.train), load_dataset(run.args.test)
    score = log_posterior_predictive(
        chains[0].spec,
        chains,
        train,
        test,
        n_pred_draws=int(run.evaluation("n_pred_draws", 100)),
        rng=np.random.default_rng(run.seed),
        n_bootstrap=int(run.evaluation("n_bootstrap", 200)),
        threads=run.threads,
        max_posterior_draws=run.evaluation("max_posterior_draws", None),
        seed=run.seed,
    )
    _handler(run, "scores").output(([score], None), run.out)
    return EXIT_OK


def cmd_select(run: RunConfig) -> int:
    print_headline("Model Selection")
    names: Sequence[str] = run.args.models or run.config.get("active_models", [])
    if len(names) < 2:
        logger.error(f"❌ Model selection needs at least two models, got {list(names)}")
        return EXIT_INPUT_ERROR
    specs = {}
    for name in names:
        spec = create_spec(run.config, name)
        if spec is None:
            return EXIT_INPUT_ERROR
        specs[spec.name] = spec
    data = load_dataset(run.args.data)
    seeds = chain_seeds(run.seed, len(specs) + 1)
    n_test = run.args.n_test or int(run.evaluation("n_test", 20))
    train, test = split_dataset(data, n_test, np.random.default_rng(seeds[0]))
    logger.info(f"Split {len(data)} observations into {len(train)} train and {len(test)} test")

    status = EXIT_OK
    fits = {}
    for (name, spec), seed in zip(specs.items(), seeds[1:]):
        print_separator("-")
        try:
            chains = fit_model(run, train, spec, seed)
        except ChainAbortedError as e:
            _write_aborted(run, e, os.path.join(run.out, name))
            logger.error(f"❌ {name} left out of the comparison")
            status = max(status, EXIT_NUMERIC_FAILURE)
            continue
        except SimplexDirectionsError as e:
            logger.error(f"❌ Fitting {name} failed; left out of the comparison: {e}", exc_info=True)
            status = max(status, EXIT_NUMERIC_FAILURE if isinstance(e, NumericError) else EXIT_INPUT_ERROR)
            continue
        fit_status = _write_fit(run, chains, os.path.join(run.out, name))
        status = max(status, fit_status)
        fits[name] = (spec, chains)

    print_headline("Scoring Models")
    if not fits:
        logger.error("❌ No model could be fitted")
        return status or EXIT_NUMERIC_FAILURE
    scores = score_models(
        fits,
        train,
        test,
        n_pred_draws=int(run.evaluation("n_pred_draws", 100)),
        rng=np.random.default_rng(run.seed),
        n_bootstrap=int(run.evaluation("n_bootstrap", 200)),
        threads=run.threads,
        max_posterior_draws=run.evaluation("max_posterior_draws", None),
        seed=run.seed,
    )
    selection = select_model(scores, tie_se=float(run.evaluation("tie_se", 2.0)))
    _handler(run, "scores").output((scores, selection), run.out)
    tie = f" (tied with {', '.join(selection.tied_with)})" if selection.tie else ""
    print(f"winner: {selection.model}{tie}")
    return status


COMMANDS = {
    "simulate": cmd_simulate,
    "extract": cmd_extract,
    "em-init": cmd_em_init,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "select": cmd_select,
    "summarize": cmd_summarize,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=DEFAULT_MAIN_CONFIG, help="Main YAML configuration file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="Override a config value")
    common.add_argument("--seed", type=int, default=None, help="Root seed (overrides config 'seed')")
    common.add_argument("--threads", type=int, default=None, help="Worker threads")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--out", default="results", help="Output directory")

    parser = argparse.ArgumentParser(description="Spatial von Mises models for directions on the simplex")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="Simulate a scenario dataset")
    p.add_argument("--scenario", required=True, help="iv, ivm, svm, svmc, svmp or svm_zero")
    p.add_argument("--n", type=int, required=True, help="Number of locations")
    p.add_argument("--omega", type=float, default=0.1, help="Kernel length scale")

    p = sub.add_parser("extract", parents=[common], help="Extract directions from composition pairs")
    p.add_argument("--pairs", required=True, help="CSV with x1a,x2a,x3a,x1b,x2b,x3b")
    p.add_argument("--tol", type=float, default=0.0, help="Duplicate-location tolerance")

    p = sub.add_parser("em-init", parents=[common], help="Regularized EM initial values")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True, help="ivm, svmc or svmp")

    p = sub.add_parser("fit", parents=[common], help="Fit one model by MCMC")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--init", default=None, help="EM init file written by em-init")

    p = sub.add_parser("predict", parents=[common], help="Score a fitted model on test data")
    p.add_argument("--fit-dir", required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)

    p = sub.add_parser("select", parents=[common], help="Fit and compare models on a train/test split")
    p.add_argument("--data", required=True)
    p.add_argument("--models", nargs="+", default=None, help="Defaults to active_models")
    p.add_argument("--n-test", type=int, default=None)

    p = sub.add_parser("summarize", parents=[common], help="Summarise chain files")
    p.add_argument("--fit-dir", required=True)
    return parser


def configure_logging(level: Optional[str]):
    name = (level or "INFO").upper()
    value = getattr(logging, name, None)
    if not isinstance(value, int):
        logger.warning(f"Unknown log level '{level}'; using INFO")
        value = logging.INFO
    logging.getLogger().setLevel(value)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = load_config(args.config)
    if config is None:
        logger.critical("❌ Failed to load configuration. Exiting.")
        return EXIT_INPUT_ERROR
    try:
        config = apply_overrides(config, args.set)
    except ValueError as e:
        logger.error(f"❌ {e}")
        return EXIT_INPUT_ERROR
    configure_logging(args.log_level or (config.get("logging") or {}).get("level"))
    run = RunConfig(config, args)

    print_separator()
    logger.info(f"🚀 Running '{args.command}' with seed {run.seed} and {run.threads} thread(s)")
    try:
        status = COMMANDS[args.command](run)
    except NumericError as e:
        logger.error(f"❌ Numerical failure: {e}", exc_info=True)
        status = EXIT_NUMERIC_FAILURE
    except (SimplexDirectionsError, ValueError, OSError) as e:
        logger.error(f"❌ {args.command} failed: {e}", exc_info=True)
        status = EXIT_INPUT_ERROR
    print_separator()
    logger.info(f"Finished '{args.command}' with exit code {status}")
    return status


# --- Script Entry Point ---
if __name__ == "__main__":
    sys.exit(main())
