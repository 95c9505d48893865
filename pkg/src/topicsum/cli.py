"""Command-line client for the summarization service.

Every subcommand is a thin wrapper over one service endpoint. By default
requests run against an in-process application instance via an ASGI
transport (no server needed); pass --server to target a running one.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

import asyncio
import json
import sys

import click
import httpx


class ServiceCallError(Exception):
    """A non-2xx service response, carrying the CLI exit code."""

    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _detail_to_error(status_code: int, detail) -> ServiceCallError:
    if isinstance(detail, dict) and "message" in detail:
        kind = detail.get("kind", "data")
        message = detail["message"]
    elif isinstance(detail, list):
        kind = "usage"
        parts = []
        for item in detail:
            loc = ".".join(str(p) for p in item.get("loc", []) if p != "body")
            parts.append(f"{loc}: {item.get('msg', 'invalid value')}")
        message = "; ".join(parts) or f"HTTP {status_code}"
    else:
        kind = "usage" if status_code == 422 else "data"
        message = str(detail) if detail else f"HTTP {status_code}"
    return ServiceCallError(message, 1 if kind == "usage" else 2)


class ServiceClient:
    """Posts JSON payloads either to a remote server or in process."""

    def __init__(self, server: str | None = None):
        self.server = server

    def post(self, path: str, payload: dict) -> dict:
        if self.server is not None:
            try:
                with httpx.Client(base_url=self.server, timeout=None) as client:
                    response = client.post(path, json=payload)
            except httpx.HTTPError as exc:
                raise ServiceCallError(f"cannot reach {self.server}: {exc}", 2) from exc
        else:
            response = asyncio.run(self._post_in_process(path, payload))
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail")
            except ValueError:
                detail = response.text
            raise _detail_to_error(response.status_code, detail)
        return response.json()

    @staticmethod
    async def _post_in_process(path: str, payload: dict) -> httpx.Response:
        from topicsum.service.app import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://topicsum", timeout=None
        ) as client:
            return await client.post(path, json=payload)


def _echo_report(report: dict) -> None:
    click.echo(json.dumps(report))


@click.group()
@click.option(
    "--server",
    metavar="URL",
    default=None,
    help="Base URL of a running service; defaults to an in-process instance.",
)
@click.pass_context
def cli(ctx: click.Context, server: str | None) -> None:
    """Topic-guided code summarization pipeline."""
    ctx.obj = ServiceClient(server)


@cli.command()
@click.argument("src_dir")
@click.argument("out")
@click.pass_obj
def extract(client: ServiceClient, src_dir: str, out: str) -> None:
    """Extract classes and commented methods from a source tree."""
    _echo_report(client.post("/extract", {"source_dir": src_dir, "out_path": out}))


@cli.command("train-lda")
@click.argument("classes")
@click.argument("model_out")
@click.option("--k", type=int, required=True, help="Topic count.")
@click.option("--alpha", type=float, default=None, help="Document-topic prior (default 50/k).")
@click.option("--eta", type=float, default=0.01, show_default=True, help="Topic-word prior.")
@click.option("--iters", type=int, default=200, show_default=True, help="Gibbs sweeps.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--vocab-size", type=int, default=50000, show_default=True)
@click.option("--min-count", type=int, default=1, show_default=True)
@click.pass_obj
def train_lda(client, classes, model_out, k, alpha, eta, iters, seed, vocab_size, min_count):
    """Fit the topic model over extracted class documents."""
    _echo_report(
        client.post(
            "/lda/train",
            {
                "classes_path": classes,
                "model_path": model_out,
                "k": k,
                "alpha": alpha,
                "eta": eta,
                "iterations": iters,
                "seed": seed,
                "vocab_size": vocab_size,
                "min_count": min_count,
            },
        )
    )


@cli.command()
@click.argument("classes")
@click.argument("lda_model")
@click.argument("out")
@click.option("--n-topics", type=int, default=10, show_default=True, help="Topics per instance.")
@click.option("--max-code", type=int, default=100, show_default=True, help="Code-token limit.")
@click.option("--max-sum", type=int, default=30, show_default=True, help="Summary-token limit.")
@click.option("--code-vocab-size", type=int, default=20000, show_default=True)
@click.option("--sum-vocab-size", type=int, default=10000, show_default=True)
@click.option("--min-count", type=int, default=1, show_default=True)
@click.option("--infer-iters", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_obj
def build(client, classes, lda_model, out, n_topics, max_code, max_sum,
          code_vocab_size, sum_vocab_size, min_count, infer_iters, seed):
    """Build the training corpus (instances plus vocabularies)."""
    _echo_report(
        client.post(
            "/build",
            {
                "classes_path": classes,
                "lda_model_path": lda_model,
                "out_dir": out,
                "n_topics": n_topics,
                "max_code_len": max_code,
                "max_sum_len": max_sum,
                "code_vocab_size": code_vocab_size,
                "sum_vocab_size": sum_vocab_size,
                "min_count": min_count,
                "infer_iterations": infer_iters,
                "seed": seed,
            },
        )
    )


@cli.command()
@click.argument("instances")
@click.argument("ckpt_dir")
@click.option("--config", "config_path", type=str, default=None,
              help="JSON file with {\"model\": {...}, \"training\": {...}} settings.")
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--learning-rate", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--hidden-dim", type=int, default=None)
@click.option("--embed-dim", type=int, default=None)
@click.option("--checkpoint-every", type=int, default=None)
@click.pass_obj
def train(client, instances, ckpt_dir, config_path, epochs, batch_size,
          learning_rate, seed, hidden_dim, embed_dim, checkpoint_every):
    """Train the summarization model on a built corpus."""
    model_settings: dict = {}
    training_settings: dict = {}
    if config_path is not None:
        with open(config_path, encoding="utf-8") as fh:
            file_config = json.load(fh)
        model_settings.update(file_config.get("model", {}))
        training_settings.update(file_config.get("training", {}))
    flag_training = {
        "epochs": epochs,
        "batch_size": batch_size,
        "learning_rate": learning_rate,
        "seed": seed,
        "checkpoint_every": checkpoint_every,
    }
    training_settings.update({k: v for k, v in flag_training.items() if v is not None})
    flag_model = {"hidden_dim": hidden_dim, "embed_dim": embed_dim}
    model_settings.update({k: v for k, v in flag_model.items() if v is not None})
    _echo_report(
        client.post(
            "/train",
            {
                "instances_path": instances,
                "checkpoint_dir": ckpt_dir,
                "model": model_settings,
                "training": training_settings,
            },
        )
    )


@cli.command()
@click.argument("ckpt")
@click.argument("lda_model")
@click.argument("java_file")
@click.option("--beam", "-b", type=int, default=1, show_default=True, help="Beam width.")
@click.option("--out", "out_path", type=str, default=None,
              help="Also write {\"method\", \"summary\"} JSON Lines here.")
@click.pass_obj
def summarize(client, ckpt, lda_model, java_file, beam, out_path):
    """Summarize every method in a source file (one line per method)."""
    with open(java_file, encoding="utf-8", errors="replace") as fh:
        source = fh.read()
    response = client.post(
        "/summarize",
        {"checkpoint": ckpt, "lda_model": lda_model, "source": source, "beam": beam},
    )
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            for entry in response["summaries"]:
                record = {"method": entry["method"], "summary": entry["summary"]}
                fh.write(json.dumps(record, ensure_ascii=False))
                fh.write("\n")
    for entry in response["summaries"]:
        click.echo(entry["summary"])


@cli.command("eval")
@click.argument("hyp")
@click.argument("ref")
@click.pass_obj
def eval_cmd(client, hyp, ref):
    """Score hypothesis summaries against references."""
    _echo_report(
        client.post("/eval", {"hypotheses_path": hyp, "references_path": ref})
    )


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the service with uvicorn."""
    import uvicorn

    uvicorn.run("topicsum.service.app:app", host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False, prog_name="topicsum")
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 130
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except ServiceCallError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except json.JSONDecodeError as exc:
        click.echo(f"error: invalid JSON input: {exc}", err=True)
        return 2
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
