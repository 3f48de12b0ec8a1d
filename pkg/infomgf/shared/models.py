from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    PositiveInt,
    field_validator,
    model_validator,
)

from infomgf.shared import constants

__all__ = [
    'DatasetMeta',
    'EvalReport',
    'KnnMode',
    'MetricSummary',
    'PerturbManifest',
    'RunManifest',
    'SbmSpec',
    'SweepSpec',
    'TrainConfig',
]

Probability = Annotated[float, Field(ge=0.0, le=1.0)]


class KnnMode(BaseModel):
    kind: Literal['exact', 'approx'] = 'exact'
    batch: Optional[PositiveInt] = None

    @model_validator(mode='before')
    @classmethod
    def parse_short_form(cls, data: Any) -> Any:
        # 'exact', 'approx' or 'approx:<batch>'
        if isinstance(data, str):
            kind, _, batch = data.partition(':')
            parsed = {'kind': kind.strip()}
            if batch:
                parsed['batch'] = int(batch)
            return parsed
        return data

    @model_validator(mode='after')
    def check_batch(self) -> 'KnnMode':
        if self.kind == 'approx' and self.batch is None:
            raise ValueError('approximate kNN requires a batch size')
        return self


class TrainConfig(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra='forbid')

    preset: Literal['acm', 'dblp', 'yelp', 'mag', 'custom'] = 'custom'
    variant: Literal['RA', 'LA'] = 'RA'
    ablation: Literal[
        'none',
        'no_shared',
        'no_unique',
        'no_aug',
        'no_recon',
        'no_refine',
    ] = 'none'
    epochs: PositiveInt
    lr: PositiveFloat
    lr_gen: PositiveFloat
    d_h: PositiveInt
    d: PositiveInt
    k: PositiveInt
    r: int = Field(ge=0)
    n_layers: PositiveInt
    rho: Probability
    rho_s: Probability
    tau_c: PositiveFloat
    tau: PositiveFloat
    lambda_: NonNegativeFloat = Field(alias='lambda')
    seed: int = 0
    batch_contrastive: Optional[int] = Field(default=None, ge=2)
    knn_mode: KnnMode = KnnMode()
    dataset: Optional[str] = None
    out_dir: str = 'runs/latest'
    eval_seeds: List[int] = list(constants.DEFAULT_EVAL_SEEDS)

    @model_validator(mode='before')
    @classmethod
    def fill_from_preset(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if 'lambda_' in data:
            data['lambda'] = data.pop('lambda_')
        preset = data.get('preset', 'custom')
        if preset not in constants.PRESETS:
            # Let the Literal check report it
            return data
        return {**constants.PRESETS[preset], **data}

    @model_validator(mode='after')
    def check_ablation(self) -> 'TrainConfig':
        if self.ablation == 'no_recon' and self.variant != 'LA':
            raise ValueError('no_recon ablation applies to the LA variant only')
        return self

    def snapshot(self) -> Dict[str, Any]:
        return self.model_dump(mode='json', by_alias=True)


class SbmSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    n: PositiveInt
    blocks: PositiveInt
    views: PositiveInt
    p_in_shared: Probability
    p_in_unique: Union[float, List[float]] = 0.0
    p_out: Probability
    feature_dim: PositiveInt
    feature_noise: NonNegativeFloat = 0.0
    seed: int = 0

    @field_validator('p_in_unique')
    @classmethod
    def check_unique_probs(cls, value):
        values = value if isinstance(value, list) else [value]
        if any(not 0.0 <= p <= 1.0 for p in values):
            raise ValueError('p_in_unique must lie in [0, 1]')
        return value

    @model_validator(mode='after')
    def check_structure(self) -> 'SbmSpec':
        if self.n % self.blocks:
            raise ValueError('n must be divisible by blocks')
        if self.feature_dim < self.blocks:
            raise ValueError('feature_dim must be at least blocks')
        if isinstance(self.p_in_unique, list) and (
            len(self.p_in_unique) != self.views
        ):
            raise ValueError('p_in_unique needs one entry per view')
        for p_unique in self.unique_probs:
            if self.p_in_shared + p_unique <= self.p_out:
                raise ValueError(
                    'intra-block probability must exceed p_out'
                )
        return self

    @property
    def unique_probs(self) -> List[float]:
        if isinstance(self.p_in_unique, list):
            return list(self.p_in_unique)
        return [self.p_in_unique] * self.views


class DatasetMeta(BaseModel):
    n: PositiveInt
    v: PositiveInt
    d_f: PositiveInt
    class_count: int = Field(default=0, ge=0)
    view_names: List[str] = []

    @model_validator(mode='after')
    def check_names(self) -> 'DatasetMeta':
        if not self.view_names:
            self.view_names = [f'view_{i}' for i in range(self.v)]
        if len(self.view_names) != self.v:
            raise ValueError('view_names must have one entry per view')
        return self


class RunManifest(BaseModel):
    config: Dict[str, Any]
    seeds: List[int]
    dataset_path: str
    dataset_hash: str
    outputs: Dict[str, str] = {}


class PerturbManifest(BaseModel):
    source_path: str
    source_hash: str
    mode: Literal['add', 'delete', 'feature']
    rate: NonNegativeFloat
    seed: int


class MetricSummary(BaseModel):
    mean: float
    std: float
    values: List[float]


class EvalReport(BaseModel):
    task: Literal['cluster', 'classify']
    dataset: str
    variant: str
    seeds: List[int]
    metrics: Dict[str, MetricSummary]


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    config: Dict[str, Any]
    param: str
    values: List[Any]
    seeds: List[int] = list(constants.DEFAULT_EVAL_SEEDS)
    out_dir: str = 'runs/sweep'
    workers: PositiveInt = 1
    task: Literal['cluster', 'classify'] = 'cluster'
