from dscf.dataset.loader import IdMap, IngestFormat, RatingLog, TrustNetwork, load_ratings, load_trust, remap_trust
from dscf.dataset.split import RatingDataset, partition_sizes, split_dataset, write_split_manifest, read_split_manifest
from dscf.dataset.synthetic import SyntheticData, generate_homophily_dataset
