"""
Synthetic social rating data with planted homophily.

Users fall into communities and items into clusters. Each community holds an
opinion (a rating level) per item cluster, so a user's rating of an item is a
noisy copy of what the user's friends, who mostly share the community, gave to
items of the same cluster. Individual users rate only a handful of items,
which leaves the social signal as the main source of information.

Every item also gets a planted feature vector, its cluster centroid plus
noise, so item similarity reflects the clusters without any pretraining.
"""
from pathlib import Path
from typing import Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel

from dscf.dataset.loader import RatingLog, TrustNetwork, remap_trust
from dscf.utils.logger import log
from dscf.utils.rng import make_rng

MODULE_NAME = "synthetic"


class SyntheticData(BaseModel):
    ratings: RatingLog
    trust: TrustNetwork
    communities: np.ndarray
    clusters: np.ndarray
    item_features: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False


def generate_homophily_dataset(n_users: int = 200, n_items: int = 300, n_communities: int = 4,
                               n_clusters: int = 6, ratings_per_user: int = 12, friends_per_user: int = 6,
                               homophily: float = 0.9, noise: float = 0.5, n_levels: int = 5,
                               feature_dim: int = 8, feature_noise: float = 0.3,
                               seed: int = 0) -> SyntheticData:
    """
    Generate an opinion-sensitive rating dataset and its trust network.

    Args:
        n_users: Number of users.
        n_items: Number of items.
        n_communities: Number of user communities.
        n_clusters: Number of item clusters.
        ratings_per_user: Items rated by each user.
        friends_per_user: Outgoing trust edges per user.
        homophily: Probability that a trust edge stays inside the community.
        noise: Standard deviation of the Gaussian noise added before rounding.
        n_levels: Rating scale 1..n_levels.
        feature_dim: Dimension of the planted item features.
        feature_noise: Standard deviation of the feature noise around the cluster centroid.
        seed: Seed of every draw.

    Returns:
        SyntheticData: Ratings, trust, the planted community/cluster labels and item features.
    """
    rng = np.random.default_rng(seed)
    communities = rng.integers(0, n_communities, size=n_users)
    clusters = rng.integers(0, n_clusters, size=n_items)
    opinions = rng.integers(1, n_levels + 1, size=(n_communities, n_clusters))

    users, items, values = [], [], []
    for user in range(n_users):
        rated = rng.choice(n_items, size=min(ratings_per_user, n_items), replace=False)
        taste = opinions[communities[user], clusters[rated]]
        score = np.clip(np.rint(taste + rng.normal(0.0, noise, size=len(rated))), 1, n_levels)
        users.extend([user] * len(rated))
        items.extend(rated.tolist())
        values.extend(score.astype(np.int64).tolist())

    sources, targets = [], []
    members = [np.flatnonzero(communities == c) for c in range(n_communities)]
    for user in range(n_users):
        for _ in range(friends_per_user):
            own = members[communities[user]]
            pool = own if rng.random() < homophily and len(own) > 1 else np.arange(n_users)
            friend = int(rng.choice(pool))
            if friend != user:
                sources.append(user)
                targets.append(friend)

    ratings = RatingLog.from_arrays(users, items, values, n_levels)
    trust = remap_trust(np.asarray(sources), np.asarray(targets), ratings.user_ids)
    log(MODULE_NAME, f"Generated {len(ratings)} ratings and {len(trust)} trust edges (seed {seed})")

    user_order = ratings.user_ids.raw_ids.astype(np.int64)
    item_order = ratings.item_ids.raw_ids.astype(np.int64)

    feature_rng = make_rng(seed, 1)
    centroids = feature_rng.normal(size=(n_clusters, feature_dim))
    planted = centroids[clusters] + feature_rng.normal(0.0, feature_noise, size=(n_items, feature_dim))
    return SyntheticData(ratings=ratings, trust=trust, communities=communities[user_order],
                         clusters=clusters[item_order], item_features=planted[item_order])


def write_tsv(synthetic: SyntheticData, out_dir) -> Tuple[Path, Path]:
    """
    Write the synthetic data as canonical rating and trust TSV files.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ratings = synthetic.ratings
    ratings_path = out_dir / "ratings.tsv"
    trust_path = out_dir / "trust.tsv"
    pd.DataFrame({
        "user": ratings.user_ids.raw_ids[ratings.users],
        "item": ratings.item_ids.raw_ids[ratings.items],
        "rating": ratings.ratings,
    }).to_csv(ratings_path, sep="\t", header=False, index=False)
    pd.DataFrame({
        "user": ratings.user_ids.raw_ids[synthetic.trust.sources],
        "friend": ratings.user_ids.raw_ids[synthetic.trust.targets],
    }).to_csv(trust_path, sep="\t", header=False, index=False)
    return ratings_path, trust_path
