from dscf.features.similarity import ItemFeatureTable, cosine_similarity
from dscf.features.sequences import (SequenceStore, audit_leakage, build_item_aware_sequences, build_sequence_store,
                                     item_aware_steps, select_relevant_item)
from dscf.features.cache import load_sequence_store, save_sequence_store
