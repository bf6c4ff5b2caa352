LOG_NAME = 'dscf'
LOG_MESSAGE_FORMAT = "%(asctime)s :: %(levelname)s :: %(message)s"
LOG_DATE_FORMAT = "%d.%m.%Y :: %H:%M:%S"


# PARTITIONS
TRAIN = "train"
VAL = "val"
TEST = "test"
PARTITIONS = (TRAIN, VAL, TEST)
DROPPED = "dropped"


# ARTIFACTS
DATASET_FILE = "dataset.npz"
SPLIT_MANIFEST_FILE = "split_manifest.tsv"
TRUST_FILE = "trust.npz"
FEATURES_FILE = "item_features.npy"
PLANTED_FEATURES_FILE = "planted_features.npy"
SEQUENCES_FILE = "sequences_l{l}_h{h}.bin"
WALK_CORPUS_FILE = "walks_l{l}.txt"
CHECKPOINT_FILE = "model_{variant}.ckpt"
METRICS_FILE = "metrics_{variant}.jsonl"
SUMMARY_FILE = "summary_{variant}.json"
RUN_CONFIG_FILE = "run.env"
ABLATION_TABLE_FILE = "ablation.tsv"
SWEEP_TABLE_FILE = "sweep_{param}.tsv"
BASELINE_FILE = "baseline_{model}.json"


# BINARY FORMATS
SEQUENCE_MAGIC = b"DSCFSEQ\x00"
SEQUENCE_FORMAT_VERSION = 1
CHECKPOINT_MAGIC = b"DSCFCKPT"
CHECKPOINT_FORMAT_VERSION = 1


# MESSAGES
MESSAGE_RUN_CONFIG = "Resolved run config"
MESSAGE_MISSING_ARTIFACT = "Missing artifact {path}; run `dscf {command}` first"
MESSAGE_MISSING_SEQUENCES = "No cached sequences for pair (user={user}, item={item})"
MESSAGE_EARLY_STOP = "Validation RMSE rose for {patience} successive epochs; stopping at epoch {epoch}"
MESSAGE_NON_FINITE_LOSS = "Non-finite loss at epoch {epoch}, batch {batch}"
MESSAGE_NON_FINITE_GRADIENT = "Non-finite gradient in parameter {name}"
MESSAGE_UNKNOWN_VARIANT = "Unknown variant kind {kind!r}; expected one of {kinds}"
