from dscf.nn.tensor import Parameter, Tensor, get_default_dtype, set_default_dtype
from dscf.nn.layers import LSTM, MLP, Embedding, Linear, Module
from dscf.nn.optim import Adam, AdamState, adam_step
from dscf.nn.checkpoint import load_checkpoint, save_checkpoint
