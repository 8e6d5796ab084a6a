"""
Differentiable parameterized families theta -> GaussianState.

Families built from a Recipe get exact forward-mode derivatives: every stage supplies its
tangent (dS, d_noise, d_shift) and the moments are propagated with

    d lambda' = S d lambda + dS lambda + d_shift
    d Sigma'  = S d Sigma S^T + dS Sigma S^T + S Sigma dS^T + d_noise.

Any other family falls back to central finite differences.
"""
import numpy as np

import gqcrb
from gqcrb.exceptions import DomainError
from gqcrb.states.channels import apply
from gqcrb.states.gaussian import GaussianState, thermal


def realize(recipe):
    """The GaussianState a Recipe describes."""
    state = thermal(recipe.n_modes, recipe.occupations)
    for stage in recipe.stages:
        state = apply(stage.to_map(recipe.n_modes), state)
    return state


def realize_with_tangents(recipe, dim_theta):
    """
    The GaussianState of a Recipe and its derivatives along every theta_k.

    Parameters
    ----------
    recipe: Recipe
        The pipeline; stage jacobians give d(param)/d(theta).
    dim_theta: int
        The number of parameters d.

    Returns
    -------
    state: GaussianState
        The state.
    tangents: list
        d pairs (d_lambda, d_Sigma).
    """
    n = recipe.n_modes
    state = thermal(n, recipe.occupations)
    tangents = [(np.zeros(2 * n, dtype=complex), np.zeros((2 * n, 2 * n), dtype=complex))] * dim_theta
    for stage in recipe.stages:
        channel = stage.to_map(n)
        S = channel.scale
        new_tangents = []
        for k, (d_lam, d_sigma) in enumerate(tangents):
            d_lam = S @ d_lam
            d_sigma = S @ d_sigma @ S.T
            stage_tangent = stage.tangent(n, k)
            if stage_tangent is not None:
                dS, d_noise, d_shift = stage_tangent
                d_lam = d_lam + dS @ state.lam + d_shift
                d_sigma = d_sigma + dS @ state.sigma @ S.T + S @ state.sigma @ dS.T + d_noise
            new_tangents.append((d_lam, (d_sigma + d_sigma.T) / 2))
        tangents = new_tangents
        state = apply(channel, state)
    return state, tangents


class ParameterizedFamily:
    """
    A differentiable map from a real parameter vector theta to a GaussianState.

    Parameters
    ----------
    dim_theta: int
        The number of parameters d.
    recipe_at: callable, optional
        theta -> Recipe. Families defined this way get analytic derivatives and can be
        rebuilt in Fock space by the oracle.
    state_at: callable, optional
        theta -> GaussianState, for families without a recipe (finite differences only).
    param_names: list of str, optional
        Names of the parameters, defaults to theta_0, theta_1, ...
    bounds: list of (low, high), optional
        Per-parameter closed domain, None for an unbounded side.
    analytic: bool
        Use the recipe tangents for derivatives. If False, use finite differences.
    fd_step: float, optional
        The base finite-difference step, defaults to gqcrb.config['FD_STEP']. The step
        for theta_k is max(fd_step, fd_step*|theta_k|).

    Example
    -------
    | family = ParameterizedFamily(
    |     1, recipe_at=lambda theta: Recipe(1, 0.0).then(Stage('phase', 0, {'phi': theta[0]}, {'phi': [1]}))
    | )
    | d_lam, d_sigma = family.derivative([0.3], 0)
    """

    def __init__(
        self,
        dim_theta,
        recipe_at=None,
        state_at=None,
        param_names=None,
        bounds=None,
        analytic=True,
        fd_step=None,
    ):
        if int(dim_theta) != dim_theta or dim_theta < 1:
            raise DomainError(f'dim_theta must be a positive integer, got {dim_theta}.')
        if recipe_at is None and state_at is None:
            raise DomainError('A family needs either recipe_at or state_at.')
        self.dim_theta = int(dim_theta)
        self._recipe_at = recipe_at
        self._state_at = state_at
        self.param_names = (
            list(param_names) if param_names is not None else [f'theta_{k}' for k in range(dim_theta)]
        )
        assert len(self.param_names) == self.dim_theta, (
            f'{len(self.param_names)} names for {self.dim_theta} parameters.'
        )
        self.bounds = list(bounds) if bounds is not None else self.dim_theta * [(None, None)]
        self.analytic = bool(analytic) and recipe_at is not None
        self.fd_step = fd_step
        return

    @property
    def mode(self):
        return 'analytic' if self.analytic else 'finite-difference'

    @property
    def has_recipe(self):
        return self._recipe_at is not None

    def check_domain(self, theta):
        """Returns theta as a float array, raising DomainError outside the domain."""
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.shape != (self.dim_theta,):
            raise DomainError(f'theta must have {self.dim_theta} entries, got {theta.shape}.')
        for name, value, (low, high) in zip(self.param_names, theta, self.bounds):
            if not np.isfinite(value) or (low is not None and value < low) or (
                high is not None and value > high
            ):
                raise DomainError(f'{name} = {value} is outside the domain [{low}, {high}].')
        return theta

    def recipe_at(self, theta):
        if not self.has_recipe:
            raise DomainError('This family is not defined by a recipe.')
        return self._recipe_at(self.check_domain(theta))

    def state_at(self, theta):
        theta = self.check_domain(theta)
        if self._state_at is not None:
            return self._state_at(theta)
        return realize(self._recipe_at(theta))

    def derivative(self, theta, k):
        """
        (d lambda / d theta_k, d Sigma / d theta_k) at theta.

        Raises
        ------
        DomainError
            If theta is outside the domain or k is not a parameter index.
        """
        theta = self.check_domain(theta)
        if not 0 <= k < self.dim_theta:
            raise DomainError(f'Parameter index {k} out of range for d = {self.dim_theta}.')
        if self.analytic:
            _, tangents = realize_with_tangents(self._recipe_at(theta), self.dim_theta)
            return tangents[k]
        return self.finite_difference(theta, k)

    def derivatives(self, theta):
        """The state at theta and all d derivative pairs, sharing one forward pass."""
        theta = self.check_domain(theta)
        if self.analytic:
            return realize_with_tangents(self._recipe_at(theta), self.dim_theta)
        return self.state_at(theta), [self.finite_difference(theta, k) for k in range(self.dim_theta)]

    def finite_difference(self, theta, k, h=None):
        """Central difference (f(theta + h e_k) - f(theta - h e_k))/(2h) of (lambda, Sigma)."""
        theta = np.asarray(theta, dtype=float)
        if h is None:
            step = self.fd_step if self.fd_step is not None else gqcrb.config['FD_STEP']
            h = max(step, step * abs(theta[k]))
        offset = np.zeros_like(theta)
        offset[k] = h
        plus = self.state_at(theta + offset)
        minus = self.state_at(theta - offset)
        d_lam = (plus.lam - minus.lam) / (2 * h)
        d_sigma = (plus.sigma - minus.sigma) / (2 * h)
        return d_lam, (d_sigma + d_sigma.T) / 2


def derivative(family, theta, k):
    """Module-level alias of ParameterizedFamily.derivative."""
    return family.derivative(theta, k)


def constant_family(state, dim_theta=1):
    """A family whose state does not depend on theta (all derivatives vanish)."""
    assert isinstance(state, GaussianState)
    return ParameterizedFamily(dim_theta, state_at=lambda theta: state, analytic=False)
