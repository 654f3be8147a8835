"""Command-line entry point: ``stratkit <command> ...``.

Domain errors print ``error: <code>: <detail>`` and exit 1; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib.metadata import PackageNotFoundError, version

try:
    VERSION = version("stratkit")
except PackageNotFoundError:  # running from a source tree
    VERSION = "0.0.0"

THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")
# kept in sync with detect.generators.GENERATORS (checked by the tests); listed
# here so parsing arguments does not import numpy before --threads is applied
GENERATOR_NAMES = ("circle", "half_cylinder", "hourglass", "line3d", "room_corridor", "segment", "segment_tube", "square")


def _pair(text: str, kind=float) -> tuple:
    try:
        return tuple(kind(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _cell(text: str) -> tuple[int, int]:
    v = _pair(text, int)
    if len(v) != 2:
        raise argparse.ArgumentTypeError(f"expected r,c got {text!r}")
    return v


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    # SUPPRESS keeps a subcommand's defaults from clobbering flags given before it
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    g.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="cap on BLAS threads")
    g.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="suppress informational output")
    g.add_argument("--version", action="version", version=f"stratkit {VERSION}")
    return p


class _Ctx:
    def __init__(self, args):
        self.args = args
        self.seed = getattr(args, "seed", 0)
        self.quiet = bool(getattr(args, "quiet", False))

    def info(self, msg: str):
        if not self.quiet:
            print(msg)


# -- handlers ------------------------------------------------------------------


def cmd_gen(ctx: _Ctx):
    from .detect import GENERATORS
    from .io import write_cloud

    a = ctx.args
    fn = GENERATORS[a.kind]
    kw = {"seed": ctx.seed}
    if a.kind == "room_corridor":
        kw["noise"] = a.noise
    if a.kind == "segment_tube":
        kw.update(L=a.L, r=a.r)
    if a.kind == "segment":
        kw["L"] = a.L
    s = fn(a.n, **kw)
    write_cloud(a.output, s.points, s.labels)
    ctx.info(f"wrote {len(s)} points to {a.output}")


def _load_cloud(path):
    from .io import read_cloud

    return read_cloud(path)[0]


def cmd_vgt(ctx: _Ctx):
    import numpy as np

    from .detect import radius_grid, vgt_matrix
    from .io import write_csv

    X = _load_cloud(ctx.args.input)
    idx = ctx.args.index or [0]
    for i in idx:
        if not 0 <= i < len(X):
            from .errors import StratError

            raise StratError("index-out-of-range", f"{i} not in [0, {len(X)})")
    grid = radius_grid(X, ctx.args.grid_m)
    log_r, log_c = vgt_matrix(X, grid, idx)
    header = ["log_r"] + [f"p{i}" for i in idx]
    write_csv(ctx.args.output, header, np.column_stack([log_r, log_c.T]).tolist())
    ctx.info(f"wrote {len(idx)} VGT curves to {ctx.args.output}")


def cmd_vgtdot(ctx: _Ctx):
    from .detect import radius_grid, vgt_dot_features
    from .io import fmt, write_features

    X = _load_cloud(ctx.args.input)
    grid = radius_grid(X, ctx.args.grid_m)
    F = vgt_dot_features(X, grid, ctx.args.bandwidth)
    write_features(ctx.args.output, F, comment=f"radii {fmt(grid[0])} .. {fmt(grid[-1])} ({len(grid)} geometric)")
    ctx.info(f"wrote {F.shape[0]} x {F.shape[1]} features to {ctx.args.output}")


def cmd_dim(ctx: _Ctx):
    import numpy as np

    from .detect import local_dims, two_nn_dim
    from .io import fmt, write_csv

    X = _load_cloud(ctx.args.input)
    if ctx.args.method == "twonn":
        est, log_mu = two_nn_dim(X)
        if ctx.args.output:
            write_csv(ctx.args.output, ["index", "log_mu"], ([i, v] for i, v in enumerate(log_mu.tolist())), comment=f"twonn {fmt(est)}")
        print(fmt(est))
        return
    d = local_dims(X, ctx.args.window)
    if ctx.args.output:
        write_csv(ctx.args.output, ["index", "dim"], ([i, v] for i, v in enumerate(d.tolist())))
    print(fmt(float(np.median(d))))


def cmd_cluster(ctx: _Ctx):
    from .detect import agglomerative, kmeans, standardize
    from .io import read_features, write_labels

    F = read_features(ctx.args.input)
    if not ctx.args.no_standardize:
        F = standardize(F)
    if ctx.args.method == "kmeans":
        labels = kmeans(F, ctx.args.k, ctx.seed)
    else:
        labels = agglomerative(F, ctx.args.k)
    write_labels(ctx.args.output, labels)
    ctx.info(f"wrote {len(labels)} labels to {ctx.args.output}")


def cmd_isomap(ctx: _Ctx):
    from .detect import isomap_lite
    from .io import fmt, write_csv

    X = _load_cloud(ctx.args.input)
    e = isomap_lite(X, ctx.args.k, ctx.args.d_out, ctx.args.landmarks, seed=ctx.seed)
    header = [f"c{j + 1}" for j in range(e.coords.shape[1])]
    write_csv(ctx.args.output, header, e.coords.tolist(), comment=f"residual {fmt(e.residual)}")
    ctx.info(f"residual {fmt(e.residual)}")


def cmd_dct(ctx: _Ctx):
    from .detect import dct_project
    from .io import write_cloud

    X = _load_cloud(ctx.args.input)
    write_cloud(ctx.args.output, dct_project(X, ctx.args.d_out, rescale=not ctx.args.no_rescale))


def _formula_text(args) -> str:
    from pathlib import Path

    from .errors import StratError

    if args.formula is not None:
        return args.formula
    try:
        return Path(args.formula_file).read_text(encoding="utf-8")
    except OSError as exc:
        raise StratError("io-error", str(exc)) from None


def cmd_stl_eval(ctx: _Ctx):
    from .io import fmt, read_json, read_trace
    from .stl import FunctionRegistry, normalize, parse, robustness

    a = ctx.args
    phi = parse(_formula_text(a))
    tr = read_trace(a.trace, irregular=a.irregular)
    reg = FunctionRegistry()
    if a.family:
        from .predicates import StratifiedFamily

        reg = StratifiedFamily.from_dict(read_json(a.family)).registry()
    from .errors import StratError

    if not 0 <= a.at < len(tr):
        raise StratError("index-out-of-range", f"--at {a.at} not in [0, {len(tr)})")
    rho = robustness(phi, tr, a.at, reg)
    if a.normalize is not None:
        rho = normalize(rho, a.normalize)
    print(fmt(rho))


def cmd_grid_stratify(ctx: _Ctx):
    from pathlib import Path

    from .errors import StratError
    from .io import read_json, write_json
    from .poset import GridComplex, is_monotone
    from .spaces.grid import lemma1_stratification

    a = ctx.args
    g = GridComplex(a.rows, a.cols)
    if a.policy:
        raw = read_json(a.policy)
        try:
            policy = {tuple(int(v) for v in k.strip("()").split(",")): act for k, act in raw.items()}
        except (ValueError, AttributeError):
            raise StratError("bad-policy", "keys must look like '(r,c)'") from None
    else:
        from .rl import GridEnv, value_iteration

        env = GridEnv(a.rows, a.cols, a.goal, a.horizon or a.rows * a.cols)
        policy = value_iteration(env)[0].stationary()
    m = lemma1_stratification(g, policy)
    ok, witness = is_monotone(m)
    if not ok:
        raise StratError("not-monotone", f"cover {witness} violated", witness=witness)
    out = {"tree": m.target.to_dict(), "assignment": {k: m.assignment[k] for k in m.source.elements}, "monotone": ok}
    write_json(a.output, out)
    if a.dot:
        Path(a.dot).write_text(m.target.to_dot("policy_tree"))
    ctx.info(f"{len(m.source)} cells -> {len(m.target)} tree nodes; monotone")


def _coin_cfg(path):
    from .io import read_json
    from .spaces import CoinConfig, default_coin_config

    return default_coin_config() if path is None else CoinConfig.from_dict(read_json(path))


def cmd_coin(ctx: _Ctx):
    from pathlib import Path

    from .io import write_json
    from .spaces import overlap_poset, overlap_poset_bruteforce, strat_label

    a = ctx.args
    cfg = _coin_cfg(a.config)
    if a.coin_cmd == "export":
        write_json(a.output, cfg.to_dict())
        return
    if a.coin_cmd == "label":
        print(strat_label(cfg, a.point))
        return
    op = overlap_poset_bruteforce(cfg, a.resolution) if a.resolution else overlap_poset(cfg)
    write_json(a.output, op.to_dict())
    if a.dot:
        Path(a.dot).write_text(op.poset.to_dot("overlap"))
    ctx.info(f"{len(op)} elements")


def cmd_traj_stratify(ctx: _Ctx):
    from .errors import StratError
    from .io import read_trace, write_json
    from .spaces import TargetSet, traj_stratify
    from .spaces.trajectories import label_id

    a = ctx.args
    if (a.box is None) == (a.ball is None):
        raise StratError("bad-target", "give exactly one of --box or --ball")
    if a.box is not None:
        lo, hi = a.box
        target = TargetSet.box(_pair(lo), _pair(hi))
    else:
        c, r = a.ball
        target = TargetSet.ball(_pair(c), float(r))
    traces = [read_trace(p) for p in a.traces]
    labels, P = traj_stratify(traces, target)
    out = {"labels": {p: label_id(z) for p, z in zip(a.traces, labels)}, "poset": P.to_dict()}
    write_json(a.output, out)
    ctx.info(f"{len(P)} distinct labels")


def cmd_rl_train(ctx: _Ctx):
    from pathlib import Path

    from .io import write_csv, write_json
    from .rl import QParams, build_env, evaluate, q_learning, value_iteration

    a = ctx.args
    env = build_env(a.env)
    if a.formula is not None or a.formula_file is not None:
        spec = env.to_dict()
        spec["formula"] = _formula_text(a)
        spec.pop("cue_window", None)
        env = build_env(spec)
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    if a.method == "vi":
        pol, values = value_iteration(env)
        write_csv(out / "values.csv", ["state", "value"], ([env.state_id(i), v] for i, v in enumerate(values.tolist())))
    else:
        pol, curve, _ = q_learning(env, QParams(episodes=a.episodes), ctx.seed)
        write_csv(out / "curve.csv", ["episode", "reward"], ([i, v] for i, v in enumerate(curve.tolist())))
    (out / "policy.json").write_text(pol.to_json())
    write_json(out / "env.json", env.to_dict())
    r = evaluate(env, pol)
    ctx.info(f"greedy reward > 0 from {int((r > 0).sum())}/{len(r)} start states")


def cmd_rl_tokens(ctx: _Ctx):
    from .io import write_cloud
    from .rl import QParams, build_env, q_learning, sample_token_states

    a = ctx.args
    env = build_env(a.env)
    pol, _, _ = q_learning(env, QParams(episodes=a.episodes), ctx.seed)
    tc = sample_token_states(env, [pol], a.n_traj, ctx.seed, a.epsilon)
    write_cloud(a.output, tc.points, ["active" if v else "inactive" for v in tc.active])
    ctx.info(f"{len(tc.points)} distinct token states")


def cmd_plot(ctx: _Ctx):
    import numpy as np

    from .io import read_cloud, read_csv, read_labels
    from .plot import line_plot, scatter_plot

    a = ctx.args
    if a.plot_cmd == "curves":
        header, rows, _ = read_csv(a.input)
        data = np.array([[float(v) for v in r] for r in rows], dtype=float).reshape(len(rows), len(header))
        series = [(header[j], data[:, 0], data[:, j]) for j in range(1, len(header))]
        if a.derivative and series:
            series = [(n, x, np.gradient(y, x)) for n, x, y in series]
        line_plot(series, a.output, title=a.title, xlabel=header[0], ylabel=a.ylabel)
    else:
        X, lab = read_cloud(a.input)
        labels = read_labels(a.labels) if a.labels else (np.array(lab) if lab is not None else None)
        scatter_plot(X, labels, a.output, title=a.title)
    ctx.info(f"wrote {a.output}")


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = argparse.ArgumentParser(prog="stratkit", description="Poset stratifications, STL robustness and stratification detection.", parents=[common])
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help, parent=sub):
        sp = parent.add_parser(name, help=help, parents=[common], description=help)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("gen", cmd_gen, "generate a synthetic point cloud")
    sp.add_argument("kind", choices=GENERATOR_NAMES)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--noise", type=float, default=0.01)
    sp.add_argument("--L", type=float, default=1.0)
    sp.add_argument("--r", type=float, default=0.25)
    sp.add_argument("-o", "--output", required=True)

    sp = add("vgt", cmd_vgt, "VGT curves for selected points")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--index", type=int, action="append", help="point index (repeatable; default 0)")
    sp.add_argument("--grid-m", type=int, default=64)
    sp.add_argument("-o", "--output", required=True)

    sp = add("vgtdot", cmd_vgtdot, "VGT-dot feature matrix for every point")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--grid-m", type=int, default=64)
    sp.add_argument("--bandwidth", type=float, default=None)
    sp.add_argument("-o", "--output", required=True)

    sp = add("dim", cmd_dim, "local or global intrinsic dimension")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--method", choices=("ls", "twonn"), default="ls")
    sp.add_argument("--window", type=_pair, default=None, help="radius window lo,hi")
    sp.add_argument("-o", "--output")

    sp = add("cluster", cmd_cluster, "cluster a feature matrix")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--method", choices=("kmeans", "agglomerative"), default="kmeans")
    sp.add_argument("--no-standardize", action="store_true", help="skip per-column z-scoring")
    sp.add_argument("-o", "--output", required=True)

    sp = add("isomap", cmd_isomap, "geodesic embedding")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--k", type=int, default=10)
    sp.add_argument("--d-out", type=int, default=2)
    sp.add_argument("--landmarks", type=int, default=None)
    sp.add_argument("-o", "--output", required=True)

    sp = add("dct", cmd_dct, "project onto the leading cosine basis vectors")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--d-out", type=int, required=True)
    sp.add_argument("--no-rescale", action="store_true")
    sp.add_argument("-o", "--output", required=True)

    stl = sub.add_parser("stl", help="signal temporal logic tools", parents=[common]).add_subparsers(dest="stl_cmd", required=True)
    sp = add("eval", cmd_stl_eval, "robustness of a formula on a trace", stl)
    f = sp.add_mutually_exclusive_group(required=True)
    f.add_argument("--formula")
    f.add_argument("--formula-file")
    sp.add_argument("--trace", required=True)
    sp.add_argument("--at", type=int, default=0)
    sp.add_argument("--normalize", type=float, default=None, metavar="SCALE")
    sp.add_argument("--family", help="stratified family JSON registering d_<id> functions")
    sp.add_argument("--irregular", action="store_true")

    grid = sub.add_parser("grid", help="grid complexes", parents=[common]).add_subparsers(dest="grid_cmd", required=True)
    sp = add("stratify", cmd_grid_stratify, "face-poset stratification from a grid policy", grid)
    sp.add_argument("--rows", type=int, required=True)
    sp.add_argument("--cols", type=int, required=True)
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--policy", help="JSON '(r,c)' -> action")
    src.add_argument("--goal", type=_cell, help="use the value-iteration policy for this goal")
    sp.add_argument("--horizon", type=int, default=None)
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--dot")

    coin = sub.add_parser("coin", help="coin-collection games", parents=[common]).add_subparsers(dest="coin_cmd", required=True)
    sp = add("overlap", cmd_coin, "overlap poset of a coin configuration", coin)
    sp.add_argument("--config", help="coin config JSON (default: packaged five-coin config)")
    sp.add_argument("--resolution", type=float, default=None, help="use the grid brute force at this spacing")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--dot")
    sp = add("label", cmd_coin, "stratum label of a space-time point", coin)
    sp.add_argument("--config")
    sp.add_argument("--point", type=_pair, required=True, help="t,y")
    sp = add("export", cmd_coin, "write the packaged default configuration", coin)
    sp.add_argument("--config")
    sp.add_argument("-o", "--output", required=True)

    traj = sub.add_parser("traj", help="trajectory spaces", parents=[common]).add_subparsers(dest="traj_cmd", required=True)
    sp = add("stratify", cmd_traj_stratify, "stratify traces by their target-visit times", traj)
    sp.add_argument("--traces", nargs="+", required=True)
    sp.add_argument("--box", nargs=2, metavar=("LO", "HI"))
    sp.add_argument("--ball", nargs=2, metavar=("CENTER", "RADIUS"))
    sp.add_argument("-o", "--output", required=True)

    rl = sub.add_parser("rl", help="gridworld learning", parents=[common]).add_subparsers(dest="rl_cmd", required=True)
    sp = add("train", cmd_rl_train, "train a policy with delayed STL reward", rl)
    sp.add_argument("--env", required=True)
    f = sp.add_mutually_exclusive_group()
    f.add_argument("--formula")
    f.add_argument("--formula-file")
    sp.add_argument("--episodes", type=int, default=1000)
    sp.add_argument("--method", choices=("q", "vi"), default="q")
    sp.add_argument("--out", required=True)

    sp = add("tokens", cmd_rl_tokens, "train, then encode visited states as a point cloud", rl)
    sp.add_argument("--env", required=True)
    sp.add_argument("--episodes", type=int, default=1000)
    sp.add_argument("--n-traj", type=int, default=250)
    sp.add_argument("--epsilon", type=float, default=0.2)
    sp.add_argument("-o", "--output", required=True)

    plot = sub.add_parser("plot", help="SVG plots", parents=[common]).add_subparsers(dest="plot_cmd", required=True)
    sp = add("curves", cmd_plot, "line plot of CSV columns against the first column", plot)
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--derivative", action="store_true", help="plot numerical derivatives")
    sp.add_argument("--title", default="")
    sp.add_argument("--ylabel", default="")
    sp.add_argument("-o", "--output", required=True)
    sp = add("scatter", cmd_plot, "2-D scatter of a point cloud", plot)
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--labels")
    sp.add_argument("--title", default="")
    sp.add_argument("-o", "--output", required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = getattr(args, "threads", None)
    if threads is not None:
        if threads < 1:
            parser.error("--threads must be >= 1")
        for var in THREAD_VARS:
            os.environ[var] = str(threads)
    from .errors import StratError

    try:
        args.fn(_Ctx(args))
    except StratError as exc:
        print(f"error: {exc.code}: {exc.detail}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: io-error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
