"""
Scalar reference implementations the vectorized network is checked against.
"""
import math


def sigmoid(value):
    return 1.0 / (1.0 + math.exp(-value))


def scalar_lstm(x, weight, bias, reverse=False):
    """
    LSTM recurrence written one scalar at a time; gates packed [input, forget, output, candidate].
    """
    steps, in_dim = len(x), len(x[0])
    hidden = len(bias) // 4
    h, c = [0.0] * hidden, [0.0] * hidden
    outputs = [None] * steps
    order = range(steps - 1, -1, -1) if reverse else range(steps)
    for t in order:
        z = list(x[t]) + h
        pre = [bias[j] + sum(z[k] * weight[k][j] for k in range(in_dim + hidden)) for j in range(4 * hidden)]
        new_h, new_c = [], []
        for j in range(hidden):
            i_gate = sigmoid(pre[j])
            f_gate = sigmoid(pre[hidden + j])
            o_gate = sigmoid(pre[2 * hidden + j])
            g_gate = math.tanh(pre[3 * hidden + j])
            cell = f_gate * c[j] + i_gate * g_gate
            new_c.append(cell)
            new_h.append(o_gate * math.tanh(cell))
        h, c = new_h, new_c
        outputs[t] = h
    return outputs


def scalar_attention(vectors, weight, bias, context):
    """
    softmax_k(context . tanh(vectors[k] @ weight + bias)) and the weighted sum of `vectors`.
    """
    width = len(bias)
    scores = []
    for vector in vectors:
        hidden = [math.tanh(bias[j] + sum(vector[i] * weight[i][j] for i in range(len(vector))))
                  for j in range(width)]
        scores.append(sum(context[j] * hidden[j] for j in range(width)))
    top = max(scores)
    exps = [math.exp(s - top) for s in scores]
    total = sum(exps)
    weights = [e / total for e in exps]
    pooled = [sum(weights[k] * vectors[k][i] for k in range(len(vectors))) for i in range(len(vectors[0]))]
    return weights, pooled
