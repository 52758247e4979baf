"""Numpy fallback kernel.

Both kernels honor the same evaluation-order contract so a batch row is
bit-identical to a single-row call: for each destination neuron the
accumulator starts at the bias and the weighted inputs are added in
fan-in order. The vectorized loop below runs over the fan-in axis, so
every row/neuron cell sees exactly that scalar sequence of IEEE adds.
"""

import numpy as np


def forward_batch(params, sizes, X):
    """Evaluate the network for every row of ``X``.

    params: flat float64 vector (per-layer weights row-major, then biases).
    sizes: layer widths, input first, output last.
    X: C-contiguous float64 matrix, one sample per row.

    Returns an (n_rows, output_width) float64 matrix. Hidden layers apply
    the hyperbolic-tangent sigmoid, the output layer is linear.
    """
    n = X.shape[0]
    n_layers = len(sizes) - 1
    prev = X
    offset = 0
    for layer in range(n_layers):
        fan_in = sizes[layer]
        fan_out = sizes[layer + 1]
        w_end = offset + fan_in * fan_out
        W = params[offset:w_end].reshape(fan_out, fan_in)
        b = params[w_end:w_end + fan_out]
        offset = w_end + fan_out
        acc = np.broadcast_to(b, (n, fan_out)).copy()
        for k in range(fan_in):
            acc += prev[:, k, None] * W[None, :, k]
        if layer < n_layers - 1:
            np.tanh(acc, out=acc)
        prev = acc
    return prev
