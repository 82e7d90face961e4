"""Command line front end: dataset generation, theory curves, sweeps and
single-shot store/query debugging."""

import sys

import click

from . import codecs, datasets, network, sweep, theory
from .validation import ERASED


def _fail(err) -> "click.ClickException":
    return click.ClickException(str(err))


def _parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _parse_sizes(text: str) -> list[int]:
    """Cluster sizes as '256,256,...' or 'NxS' groups joined by '+'."""
    sizes = []
    for group in text.replace(" ", "").split("+"):
        for part in group.split(","):
            if not part:
                continue
            if "x" in part:
                count, size = part.split("x", 1)
                sizes.extend([int(size)] * int(count))
            else:
                sizes.append(int(part))
    return sizes


def _parse_rc(text: str) -> tuple[int, int]:
    try:
        r, size = text.split(":")
        return int(r), int(size)
    except ValueError:
        raise _fail("--random-clusters expects R:SIZE, e.g. 7:5000") from None


@click.group()
def main():
    """Clique-network associative memory experiments."""


@main.command()
@click.option("--family", type=click.Choice(sorted(datasets.GENERATORS)),
              default="uniform", show_default=True)
@click.option("--m", "n_messages", type=int, required=True,
              help="Number of messages.")
@click.option("--c", "n_positions", type=int, default=8, show_default=True)
@click.option("--base", type=int, default=256, show_default=True)
@click.option("--sigma", type=float, default=16.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def gen(family, n_messages, n_positions, base, sigma, seed, out):
    """Generate a dataset file."""
    try:
        X = datasets.generate(family, n_messages, n_positions, base, sigma,
                              seed=seed)
        datasets.save_messages(X, base, out)
    except ValueError as err:
        raise _fail(err)
    click.echo(f"wrote {n_messages} {family} messages to {out}")


@main.command("theory")
@click.option("--sweep", "sweep_list", default="1000,2000,5000,10000,15000",
              show_default=True, help="Comma-separated message counts.")
@click.option("--c", "n_clusters", type=int, default=8, show_default=True)
@click.option("--l", "cluster_size", type=int, default=256, show_default=True)
@click.option("--ce", "n_erased", type=int, default=4, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def theory_cmd(sweep_list, n_clusters, cluster_size, n_erased, out):
    """Print the closed-form density / error CSV."""
    try:
        points = theory.theory_curve(_parse_int_list(sweep_list), n_clusters,
                                     cluster_size, n_erased)
    except ValueError as err:
        raise _fail(err)
    lines = ["M,d,p_e"] + [
        f"{p.n_messages},{p.density},{p.error_probability}" for p in points
    ]
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@main.command("sweep")
@click.option("--family", type=click.Choice(sorted(datasets.GENERATORS)),
              default="uniform", show_default=True)
@click.option("--strategy", type=click.Choice(sweep.STRATEGIES),
              default="identity", show_default=True)
@click.option("--sweep", "sweep_list", default="1000,2000,5000,10000,15000",
              show_default=True)
@click.option("--c", "n_positions", type=int, default=8, show_default=True)
@click.option("--base", type=int, default=256, show_default=True)
@click.option("--sigma", type=float, default=16.0, show_default=True)
@click.option("--bits", type=int, default=2, show_default=True,
              help="Extra bits for the bit-extension / Huffman strategies.")
@click.option("--random-clusters", "rc", default="7:5000", show_default=True,
              help="R:SIZE stamp clusters for the random-clusters strategy.")
@click.option("--ce", "n_erased", type=int, default=4, show_default=True)
@click.option("--scope", type=click.Choice(["auto", "original", "all"]),
              default="auto", show_default=True)
@click.option("--iterations", type=int, default=4, show_default=True)
@click.option("--gamma", type=int, default=0, show_default=True)
@click.option("--probes", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def sweep_cmd(family, strategy, sweep_list, n_positions, base, sigma, bits,
              rc, n_erased, scope, iterations, gamma, probes, seed, out):
    """Run an error-rate sweep and emit the experiment CSV."""
    config = sweep.ExperimentConfig(
        family=family, strategy=strategy, sweep=tuple(_parse_int_list(sweep_list)),
        n_positions=n_positions, base=base, sigma=sigma, bits=bits,
        random_clusters=_parse_rc(rc), n_erased=n_erased, erase_scope=scope,
        probes=probes, max_iterations=iterations, memory_weight=gamma,
        seed=seed,
    )
    try:
        results = sweep.run_sweep(config)
    except ValueError as err:
        raise _fail(err)
    text = sweep.results_to_csv(results)
    if out:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    flagged = [r.n_messages for r in results if r.flagged]
    if flagged:
        click.echo(f"warning: codec overflow at M={flagged}", err=True)


@main.command("material")
@click.argument("sizes")
def material_cmd(sizes):
    """Potential connections of a cluster layout ('8x256+7x5000' or '256,256')."""
    try:
        layout = _parse_sizes(sizes)
        click.echo(str(theory.material(layout)))
    except ValueError as err:
        raise _fail(err)


@main.command("store")
@click.option("--in", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="GBMSG1 dataset file.")
@click.option("--strategy", type=click.Choice(sweep.STRATEGIES),
              default="identity", show_default=True)
@click.option("--bits", type=int, default=2, show_default=True)
@click.option("--random-clusters", "rc", default="7:5000", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Network output file (GBNET1).")
@click.option("--codec-out", type=click.Path(dir_okay=False), default=None,
              help="Codec output file (GBCODEC1).")
def store_cmd(input_path, strategy, bits, rc, seed, out, codec_out):
    """Encode a dataset, store it into a fresh network and save both."""
    try:
        X, base = datasets.load_messages(input_path)
        config = sweep.ExperimentConfig(
            strategy=strategy, base=base, bits=bits,
            random_clusters=_parse_rc(rc), n_positions=X.shape[1],
        )
        codec = sweep.make_codec(config, seed).fit(X)
        augmented = codec.transform(X)
        net = network.CliqueNetwork(codec.output_sizes_).fit(augmented)
        net.save(out)
        if codec_out:
            codecs.save_codec(codec, codec_out)
    except (ValueError, codecs.CodecError) as err:
        raise _fail(err)
    click.echo(f"stored {X.shape[0]} messages into {out}")


@main.command("query")
@click.option("--net", "net_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--codec", "codec_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--probe", required=True,
              help="Comma-separated symbols, '?' for erased positions.")
@click.option("--iterations", type=int, default=4, show_default=True)
@click.option("--gamma", type=int, default=0, show_default=True)
def query_cmd(net_path, codec_path, probe, iterations, gamma):
    """Retrieve one probe from a stored network."""
    try:
        net = network.CliqueNetwork.load(
            net_path, max_iterations=iterations, memory_weight=gamma)
        entries = [
            ERASED if part.strip() in ("?", str(ERASED)) else int(part)
            for part in probe.split(",")
        ]
        result = net.retrieve(entries)
    except ValueError as err:
        raise _fail(err)
    for pos in range(len(result.symbols)):
        status = result.status(pos)
        if status == "unique":
            click.echo(f"position {pos}: unique {int(result.symbols[pos])}")
        elif status == "empty":
            click.echo(f"position {pos}: empty")
        else:
            options = ",".join(str(int(v)) for v in result.candidates[pos])
            click.echo(f"position {pos}: ambiguous {{{options}}}")
    click.echo(f"iterations: {result.iterations}")
    if codec_path:
        codec = codecs.load_codec(codec_path)
        if result.is_unique:
            try:
                decoded = codec.inverse_transform(result.symbols[None, :])[0]
                click.echo("decoded: " + " ".join(str(int(v)) for v in decoded))
            except codecs.DecodeError as err:
                click.echo(f"decoded: failure ({err})")
        else:
            click.echo("decoded: unresolved positions, nothing to decode")


if __name__ == "__main__":
    sys.exit(main())
