from infomgf.shared.types import ImmutableDict

__all__ = [
    'ADAM_BETAS',
    'ADAM_EPS',
    'APPROX_KNN_ROUNDS',
    'CLASSIFY_MAX_EPOCHS',
    'CLASSIFY_PATIENCE',
    'CONTRASTIVE_BATCH',
    'CONTRASTIVE_FULL_BATCH_LIMIT',
    'DEFAULT_EVAL_SEEDS',
    'EXIT_INPUT_ERROR',
    'EXIT_NUMERIC_ERROR',
    'EXIT_OK',
    'KMEANS_MAX_ITER',
    'KMEANS_TOL',
    'PRESETS',
    'THREADS_ENV_VAR',
]


# Table of per-dataset training settings; keys are TrainConfig field names
_ACM = ImmutableDict(
    epochs=100,
    lr=0.01,
    d_h=128,
    d=64,
    k=15,
    r=2,
    n_layers=2,
    rho=0.5,
    tau_c=0.2,
    rho_s=0.5,
    lr_gen=0.001,
    tau=1.0,
    **{'lambda': 0.01},
)
PRESETS = ImmutableDict(
    acm=_ACM,
    dblp=ImmutableDict(
        _ACM.thaw(), d_h=64, d=32, k=10, **{'lambda': 1.0},
    ),
    yelp=ImmutableDict(_ACM.thaw(), lr=0.001, **{'lambda': 1.0}),
    # Generative augmentation was not run at this scale; LA values fall
    # back to the shared ones
    mag=ImmutableDict(
        _ACM.thaw(),
        epochs=200,
        lr=0.005,
        d_h=256,
        k=15,
        r=3,
        n_layers=3,
        rho=0.0,
        **{'lambda': 1.0},
    ),
    custom=_ACM,
)

ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8

APPROX_KNN_ROUNDS = 2
# Above this node count negatives are sampled in batches
CONTRASTIVE_FULL_BATCH_LIMIT = 4096
CONTRASTIVE_BATCH = 2560

KMEANS_TOL = 1e-6
KMEANS_MAX_ITER = 300

CLASSIFY_PATIENCE = 30
CLASSIFY_MAX_EPOCHS = 500
DEFAULT_EVAL_SEEDS = (0, 1, 2, 3, 4)

THREADS_ENV_VAR = 'INFOMGF_THREADS'

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_NUMERIC_ERROR = 3
