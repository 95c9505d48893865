"""Pydantic request/response models for the service endpoints."""

from pydantic import BaseModel, Field, model_validator


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str


class ExtractRequest(BaseModel):
    source_dir: str
    out_path: str


class ExtractResponse(BaseModel):
    files: int
    classes: int
    methods: int
    errors: list[str]
    out_path: str


class LdaTrainRequest(BaseModel):
    classes_path: str
    model_path: str
    k: int = Field(ge=1)
    alpha: float | None = Field(default=None, gt=0)
    eta: float = Field(default=0.01, gt=0)
    iterations: int = Field(default=200, ge=1)
    seed: int = 0
    vocab_size: int = Field(default=50000, gt=4)
    min_count: int = Field(default=1, ge=1)


class LdaTrainResponse(BaseModel):
    k: int
    documents: int
    vocab_size: int
    iterations: int
    model_path: str


class BuildRequest(BaseModel):
    classes_path: str
    lda_model_path: str
    out_dir: str
    n_topics: int = Field(default=10, ge=1)
    max_code_len: int = Field(default=100, ge=1)
    max_sum_len: int = Field(default=30, ge=3)
    code_vocab_size: int = Field(default=20000, gt=4)
    sum_vocab_size: int = Field(default=10000, gt=4)
    min_count: int = Field(default=1, ge=1)
    infer_iterations: int = Field(default=50, ge=1)
    seed: int = 0


class BuildResponse(BaseModel):
    instances: int
    methods_total: int
    skipped_no_summary: int
    skipped_short_code: int
    skipped_short_summary: int
    code_vocab_size: int
    sum_vocab_size: int
    out_dir: str


class ModelSettings(BaseModel):
    """Optional network-size overrides; None keeps the built-in default."""

    embed_dim: int | None = Field(default=None, ge=1)
    topic_embed_dim: int | None = Field(default=None, ge=1)
    hidden_dim: int | None = Field(default=None, ge=1)
    n_topics: int | None = Field(default=None, ge=1)
    max_code_len: int | None = Field(default=None, ge=1)
    max_sum_len: int | None = Field(default=None, ge=3)
    use_topics: bool | None = None


class TrainingSettings(BaseModel):
    epochs: int = Field(default=50, ge=1)
    batch_size: int = Field(default=16, ge=1)
    learning_rate: float = Field(default=1e-3, ge=0)
    adam_beta1: float = Field(default=0.9, gt=0, lt=1)
    adam_beta2: float = Field(default=0.999, gt=0, lt=1)
    adam_eps: float = Field(default=1e-8, gt=0)
    clip_norm: float = Field(default=5.0, gt=0)
    seed: int = 0
    checkpoint_every: int = Field(default=0, ge=0)


class TrainRequest(BaseModel):
    instances_path: str
    checkpoint_dir: str
    model: ModelSettings = ModelSettings()
    training: TrainingSettings = TrainingSettings()


class TrainResponse(BaseModel):
    instances: int
    epochs: int
    final_loss: float
    checkpoint_dir: str
    loss_log: str


class SummarizeRequest(BaseModel):
    checkpoint: str
    lda_model: str
    source: str | None = None
    source_path: str | None = None
    beam: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.source is None) == (self.source_path is None):
            raise ValueError("provide exactly one of source or source_path")
        return self


class MethodSummary(BaseModel):
    class_name: str
    method: str
    summary: str


class SummarizeResponse(BaseModel):
    summaries: list[MethodSummary]


class EvalRequest(BaseModel):
    hypotheses_path: str
    references_path: str


class EvalResponse(BaseModel):
    corpus_bleu4: float
    rouge_l_f1: float
    exact_match_rate: float
    n: int
    per_sentence_bleu: list[float]
