"""Analytic gradients against central finite differences."""

import numpy as np

import visemelab as vl
from visemelab.learner import ModelParams, cross_entropy_loss, loss_gradient


def finite_difference_grads(params, feats, labels, eps=1e-6):
    grad_w = np.zeros_like(params.weights)
    grad_b = np.zeros_like(params.bias)
    for idx in np.ndindex(*params.weights.shape):
        bumped = params.weights.copy()
        bumped[idx] += eps
        up = cross_entropy_loss(ModelParams(bumped, params.bias, params.inventory_labels), feats, labels)
        bumped[idx] -= 2 * eps
        down = cross_entropy_loss(ModelParams(bumped, params.bias, params.inventory_labels), feats, labels)
        grad_w[idx] = (up - down) / (2 * eps)
    for k in range(len(params.bias)):
        bumped = params.bias.copy()
        bumped[k] += eps
        up = cross_entropy_loss(ModelParams(params.weights, bumped, params.inventory_labels), feats, labels)
        bumped[k] -= 2 * eps
        down = cross_entropy_loss(ModelParams(params.weights, bumped, params.inventory_labels), feats, labels)
        grad_b[k] = (up - down) / (2 * eps)
    return grad_w, grad_b


def relative_error(a, b):
    denom = max(np.abs(a).max(), np.abs(b).max(), 1e-12)
    return np.abs(a - b).max() / denom


def test_gradient_matches_finite_differences_three_classes():
    rng = np.random.default_rng(0)
    feats = rng.standard_normal((12, 5))
    labels = rng.integers(0, 3, 12)
    params = ModelParams(rng.standard_normal((3, 5)), rng.standard_normal(3), ("a", "b", "c"))
    grad_w, grad_b = loss_gradient(params, feats, labels)
    fd_w, fd_b = finite_difference_grads(params, feats, labels)
    assert relative_error(grad_w, fd_w) < 1e-4
    assert relative_error(grad_b, fd_b) < 1e-4


def test_gradient_matches_on_fifty_random_instances():
    rng = np.random.default_rng(42)
    for _ in range(50):
        n = int(rng.integers(2, 10))
        dim = int(rng.integers(2, 6))
        classes = int(rng.integers(2, 5))
        feats = rng.standard_normal((n, dim)) * float(rng.uniform(0.2, 3.0))
        labels = rng.integers(0, classes, n)
        params = ModelParams(
            rng.standard_normal((classes, dim)),
            rng.standard_normal(classes),
            tuple(f"c{k}" for k in range(classes)),
        )
        grad_w, grad_b = loss_gradient(params, feats, labels)
        fd_w, fd_b = finite_difference_grads(params, feats, labels)
        assert relative_error(grad_w, fd_w) < 1e-4
        assert relative_error(grad_b, fd_b) < 1e-4
