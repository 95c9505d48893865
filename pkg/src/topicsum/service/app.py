"""FastAPI application exposing the pipeline stages.

All endpoints are synchronous wrappers over topicsum.workflows; domain
errors surface as structured JSON with a "kind" of usage or data, which
clients map onto exit codes.
"""

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

import topicsum
from topicsum import topics as topiclib
from topicsum import workflows
from topicsum.errors import ConfigError, SummarizerError
from topicsum.service import schemas


def _error_response(kind: str, message: str) -> JSONResponse:
    status = 422 if kind == "usage" else 400
    return JSONResponse(
        status_code=status, content={"detail": {"kind": kind, "message": message}}
    )


def create_app() -> FastAPI:
    app = FastAPI(title="topicsum", version=topicsum.__version__)

    @app.exception_handler(SummarizerError)
    async def _domain_error(request: Request, exc: SummarizerError):
        kind = "usage" if isinstance(exc, ConfigError) else "data"
        return _error_response(kind, str(exc))

    @app.exception_handler(FileNotFoundError)
    async def _missing_file(request: Request, exc: FileNotFoundError):
        return _error_response("data", str(exc))

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(version=topicsum.__version__)

    @app.post("/extract", response_model=schemas.ExtractResponse)
    def extract(request: schemas.ExtractRequest) -> schemas.ExtractResponse:
        stats = workflows.extract_to_file(request.source_dir, request.out_path)
        return schemas.ExtractResponse(
            files=stats.files,
            classes=stats.classes,
            methods=stats.methods,
            errors=stats.errors,
            out_path=request.out_path,
        )

    @app.post("/lda/train", response_model=schemas.LdaTrainResponse)
    def train_lda(request: schemas.LdaTrainRequest) -> schemas.LdaTrainResponse:
        config = topiclib.LdaConfig(
            k=request.k,
            alpha=request.alpha,
            eta=request.eta,
            n_iterations=request.iterations,
            seed=request.seed,
        )
        stats = workflows.train_lda_files(
            request.classes_path,
            request.model_path,
            config,
            vocab_size=request.vocab_size,
            min_count=request.min_count,
        )
        return schemas.LdaTrainResponse(
            k=stats.k,
            documents=stats.documents,
            vocab_size=stats.vocab_size,
            iterations=stats.iterations,
            model_path=request.model_path,
        )

    @app.post("/build", response_model=schemas.BuildResponse)
    def build(request: schemas.BuildRequest) -> schemas.BuildResponse:
        stats = workflows.build_files(
            request.classes_path,
            request.lda_model_path,
            request.out_dir,
            n_topics=request.n_topics,
            max_code_len=request.max_code_len,
            max_sum_len=request.max_sum_len,
            code_vocab_size=request.code_vocab_size,
            sum_vocab_size=request.sum_vocab_size,
            min_count=request.min_count,
            infer_iterations=request.infer_iterations,
            seed=request.seed,
        )
        return schemas.BuildResponse(out_dir=request.out_dir, **stats.__dict__)

    @app.post("/train", response_model=schemas.TrainResponse)
    def train(request: schemas.TrainRequest) -> schemas.TrainResponse:
        stats = workflows.train_files(
            request.instances_path,
            request.checkpoint_dir,
            model_overrides=request.model.model_dump(),
            training_overrides=request.training.model_dump(),
        )
        return schemas.TrainResponse(**stats.__dict__)

    @app.post("/summarize", response_model=schemas.SummarizeResponse)
    def summarize(request: schemas.SummarizeRequest) -> schemas.SummarizeResponse:
        if request.source is not None:
            source = request.source
        else:
            source = Path(request.source_path).read_text(
                encoding="utf-8", errors="replace"
            )
        results = workflows.summarize_source(
            request.checkpoint, request.lda_model, source, beam=request.beam
        )
        return schemas.SummarizeResponse(
            summaries=[schemas.MethodSummary(**r) for r in results]
        )

    @app.post("/eval", response_model=schemas.EvalResponse)
    def evaluate(request: schemas.EvalRequest) -> schemas.EvalResponse:
        report = workflows.eval_files(
            request.hypotheses_path, request.references_path
        )
        return schemas.EvalResponse(**report.as_dict())

    return app


app = create_app()
