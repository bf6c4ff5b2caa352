from dscf.model.variants import VariantConfig, make_variant, shuffle_steps
from dscf.model.dscf import DSCF, load_model, save_model
