"""
Truncated Fock-space density matrices built by brute force from a Recipe.

The state is carried on cutoff + padding levels per mode while the stages are applied and
projected onto the cutoff at the end; the lost weight is the trace deficit. Unitary stages
exponentiate their quadratic generators with scipy.sparse.linalg.expm_multiply. Thermal
loss is the exact Kraus map of a beam splitter coupling the mode to a thermal ancilla,
evaluated in the finite excitation-number sectors of the mode and the ancilla.
"""
import dataclasses
import functools

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

import gqcrb
from gqcrb.exceptions import DomainError, IncreaseCutoffError, InternalConsistencyError
from gqcrb.states.channels import Recipe

MIN_CUTOFF = 8
MAX_MODES = 2
HERMITICITY_TOL = 1e-10
EIGENVALUE_TOL = 1e-8
# Ancilla occupations are kept until the thermal tail drops below this weight.
ANCILLA_TAIL = 1e-12


@dataclasses.dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """
    A density matrix on the truncated Fock space of n_modes modes.

    Parameters
    ----------
    n_modes: int
        The number of modes.
    cutoff: int
        The number of levels D per mode.
    rho: np.ndarray
        The D^n x D^n matrix, mode 1 being the most significant index.
    deficit: float
        1 - Tr(rho), the weight lost to the truncation.
    """

    n_modes: int
    cutoff: int
    rho: np.ndarray
    deficit: float = 0.0

    def __post_init__(self):
        dim = self.cutoff**self.n_modes
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (dim, dim):
            raise DomainError(
                f'A {self.n_modes}-mode state with cutoff {self.cutoff} needs a {dim}x{dim} '
                f'matrix, got {rho.shape}.'
            )
        if np.abs(rho - rho.conj().T).max() > HERMITICITY_TOL:
            raise InternalConsistencyError('The Fock density matrix is not Hermitian.')
        object.__setattr__(self, 'rho', rho)

    @property
    def dim(self):
        return self.rho.shape[0]

    def validate(self, budget=None):
        """
        Checks the trace and the spectrum.

        Raises
        ------
        IncreaseCutoffError
            If the trace deficit exceeds the budget.
        InternalConsistencyError
            If an eigenvalue is below -1e-8.
        """
        if budget is None:
            budget = gqcrb.config['TRUNCATION_BUDGET']
        if self.deficit > budget:
            raise IncreaseCutoffError(self.deficit)
        min_eigenvalue = np.linalg.eigvalsh(self.rho).min()
        if min_eigenvalue < -EIGENVALUE_TOL:
            raise InternalConsistencyError(
                f'The Fock density matrix has eigenvalue {min_eigenvalue:.3e} < 0.'
            )
        return self

    def trace(self):
        return float(np.trace(self.rho).real)

    def purity(self):
        return float(np.einsum('ij,ji->', self.rho, self.rho).real)

    def expectation(self, operator):
        """Tr[rho O] for an operator on the same truncated space."""
        operator = np.asarray(operator)
        if operator.shape != self.rho.shape:
            raise DomainError(f'Operator shape {operator.shape} does not match {self.rho.shape}.')
        return complex(np.einsum('ij,ji->', self.rho, operator))

    def number(self, mode):
        """<a_k^dag a_k>."""
        return self.expectation(
            mode_operator(number_matrix(self.cutoff), mode, self.n_modes, self.cutoff).toarray()
        ).real

    def reduced(self, mode):
        """The single-mode state of one mode (partial trace over the others)."""
        tensor = self.rho.reshape(2 * self.n_modes * (self.cutoff,))
        n = self.n_modes
        for other in reversed(range(n)):
            if other != mode:
                tensor = np.trace(tensor, axis1=other, axis2=other + tensor.ndim // 2)
        return FockDensityMatrix(1, self.cutoff, tensor, self.deficit)


def annihilation(levels):
    """The truncated annihilation operator as a sparse matrix, a|n> = sqrt(n)|n-1>."""
    return scipy.sparse.diags(np.sqrt(np.arange(1, levels)), 1, format='csr', dtype=complex)


def number_matrix(levels):
    return scipy.sparse.diags(np.arange(levels, dtype=complex), 0, format='csr')


def mode_operator(operator, mode, n_modes, levels):
    """Embeds a single-mode operator into the n-mode space (kron with identities)."""
    factors = [scipy.sparse.identity(levels, dtype=complex, format='csr')] * n_modes
    factors[mode] = operator
    result = factors[0]
    for factor in factors[1:]:
        result = scipy.sparse.kron(result, factor, format='csr')
    return result


def _thermal_populations(nu, levels):
    n = np.arange(levels)
    if nu == 0:
        return (n == 0).astype(float)
    return nu**n / (nu + 1) ** (n + 1)


def _generator(stage, n_modes, levels):
    """The anti-Hermitian generator G of the stage unitary U = exp(G)."""
    a = [mode_operator(annihilation(levels), k, n_modes, levels) for k in range(n_modes)]
    ad = [op.conj().T.tocsr() for op in a]
    p = stage.params
    if stage.kind == 'phase':
        k = stage.modes[0]
        return 1j * p['phi'] * (ad[k] @ a[k])
    elif stage.kind == 'displace':
        k = stage.modes[0]
        alpha = complex(p['alpha'])
        return alpha * ad[k] - np.conj(alpha) * a[k]
    elif stage.kind == 'squeeze1':
        k = stage.modes[0]
        zeta = p['s'] * np.exp(2j * p.get('phi', 0.0))
        return (np.conj(zeta) * (a[k] @ a[k]) - zeta * (ad[k] @ ad[k])) / 2
    elif stage.kind == 'squeeze2':
        j, k = stage.modes
        return p['r'] * (a[j] @ a[k] - ad[j] @ ad[k])
    elif stage.kind == 'beam_splitter':
        j, k = stage.modes
        return p['angle'] * (ad[j] @ a[k] - a[j] @ ad[k])
    raise DomainError(f'Stage {stage.kind} has no unitary generator.')


def _apply_unitary(rho, generator):
    # U rho U^dag as U (U rho)^dag, valid for Hermitian rho.
    half = scipy.sparse.linalg.expm_multiply(generator, rho)
    rho = scipy.sparse.linalg.expm_multiply(generator, half.conj().T)
    return (rho + rho.conj().T) / 2


def _ancilla_levels(N):
    if N == 0:
        return 1
    ratio = N / (N + 1)
    return int(np.ceil(np.log(ANCILLA_TAIL) / np.log(ratio)))


@functools.lru_cache(maxsize=32)
def loss_superoperator(eps, N, levels):
    """
    The thermal-loss map as a tensor Phi[m, m', n, n'], rho'_{mm'} = Phi_{mm'nn'} rho_{nn'}.

    The mode and a thermal ancilla of occupation N meet on a beam splitter with
    transmissivity eps, exp(theta(a^dag v - a v^dag)) with cos(theta) = sqrt(eps). The
    splitter conserves the total excitation number T, so within the sector
    {|n, T - n>} it is the exact (T + 1) x (T + 1) matrix exponential. Tracing out the
    ancilla gives the Kraus amplitudes sqrt(p_l) <m, j|U|n, l> with m + j = n + l.

    Parameters
    ----------
    eps: float
        The transmissivity.
    N: float
        The bath occupation.
    levels: int
        The number of mode levels kept.
    """
    theta = np.arccos(np.sqrt(eps))
    ancilla = _ancilla_levels(N)
    weights = _thermal_populations(N, ancilla)

    sector_unitaries = []
    for total in range(levels + ancilla):
        n = np.arange(total)
        G = np.zeros((total + 1, total + 1))
        G[n + 1, n] = theta * np.sqrt((n + 1) * (total - n))
        G[n, n + 1] = -theta * np.sqrt((n + 1) * (total - n))
        sector_unitaries.append(scipy.linalg.expm(G))

    m = np.arange(levels)
    # Number conservation: only m - m' = n - n' survives the ancilla trace.
    mask = (m[:, None, None, None] - m[None, :, None, None]) == (
        m[None, None, :, None] - m[None, None, None, :]
    )
    phi = np.zeros(4 * (levels,), dtype=complex)
    for l, weight in enumerate(weights):
        W = np.zeros((levels, levels))
        for n in range(levels):
            U = sector_unitaries[n + l]
            top = min(levels, n + l + 1)
            W[:top, n] = U[:top, n]
        phi += weight * np.einsum('mn,ab->manb', W, W)
    return np.where(mask, phi, 0)


def _apply_loss(rho, stage, n_modes, levels):
    p = stage.params
    eps, N = float(p['eps']), float(p.get('N', 0.0))
    if eps == 1:
        return rho
    k = stage.modes[0]
    tensor = rho.reshape(2 * n_modes * (levels,))
    phi = loss_superoperator(eps, N, levels)
    out = np.tensordot(phi, tensor, axes=([2, 3], [k, n_modes + k]))
    out = np.moveaxis(out, [0, 1], [k, n_modes + k])
    rho = out.reshape(rho.shape)
    return (rho + rho.conj().T) / 2


def _check_recipe(recipe, cutoff):
    if cutoff < MIN_CUTOFF:
        raise DomainError(f'The Fock cutoff must be at least {MIN_CUTOFF}, got {cutoff}.')
    if recipe.n_modes > MAX_MODES:
        raise DomainError(
            f'The Fock oracle handles at most {MAX_MODES} modes, got {recipe.n_modes}.'
        )


def build_state(recipe, cutoff=None, padding=None, budget=None):
    """
    Builds the truncated Fock density matrix of a recipe.

    Parameters
    ----------
    recipe: Recipe or ScenarioConfig
        The preparation pipeline; a ScenarioConfig is realized at config.theta().
    cutoff: int, optional
        The number of levels D per mode, at least 8. Defaults to
        gqcrb.config['ORACLE_CUTOFF'].
    padding: int, optional
        Extra levels carried while the stages are applied, defaults to
        gqcrb.config['ORACLE_PADDING'].
    budget: float, optional
        The largest acceptable trace deficit, defaults to gqcrb.config['TRUNCATION_BUDGET'].

    Returns
    -------
    FockDensityMatrix
        The state projected onto D levels per mode.

    Raises
    ------
    DomainError
        If D < 8 or the recipe has more than two modes.
    IncreaseCutoffError
        If 1 - Tr(rho) exceeds the budget. The measured deficit is attached.

    Example
    -------
    | rho = build_state(Recipe(1, 0.2), cutoff=40)
    | rho.purity()  # -> 1/1.4
    """
    if not isinstance(recipe, Recipe):
        from gqcrb.analysis.scenarios import build_family

        recipe = build_family(recipe).recipe_at(recipe.theta())
    if cutoff is None:
        cutoff = gqcrb.config['ORACLE_CUTOFF']
    if padding is None:
        padding = gqcrb.config['ORACLE_PADDING']
    cutoff, padding = int(cutoff), int(padding)
    _check_recipe(recipe, cutoff)
    n = recipe.n_modes
    levels = cutoff + padding

    populations = _thermal_populations(recipe.occupations[0], levels)
    for nu in recipe.occupations[1:]:
        populations = np.kron(populations, _thermal_populations(nu, levels))
    rho = np.diag(populations).astype(complex)

    for stage in recipe.stages:
        if stage.kind == 'loss':
            rho = _apply_loss(rho, stage, n, levels)
        else:
            rho = _apply_unitary(rho, _generator(stage, n, levels))

    tensor = rho.reshape(2 * n * (levels,))[tuple(2 * n * [slice(0, cutoff)])]
    rho = tensor.reshape(cutoff**n, cutoff**n)
    rho = (rho + rho.conj().T) / 2
    deficit = 1 - float(np.trace(rho).real)
    return FockDensityMatrix(n, cutoff, rho, deficit).validate(budget)


def _ladder(n_modes, levels):
    ladder = []
    for k in range(n_modes):
        a = mode_operator(annihilation(levels), k, n_modes, levels)
        ladder += [a, a.conj().T.tocsr()]
    return ladder


def _project(operator, n_modes, levels, cutoff):
    operator = operator.toarray().reshape(2 * n_modes * (levels,))
    operator = operator[tuple(2 * n_modes * [slice(0, cutoff)])]
    return operator.reshape(cutoff**n_modes, cutoff**n_modes)


def observable_matrix(obs, cutoff, power=1):
    """
    The Fock matrix of M^power for a QuadraticObservable M, exact below the cutoff.

    Parameters
    ----------
    obs: QuadraticObservable
        m_{mu nu} a^mu a^nu + lin_mu a^mu + const_term.
    cutoff: int
        The number of levels D per mode.
    power: int
        1 for <M>, 2 for <M^2>.

    Example
    -------
    | rho = build_state(Recipe(1, 0.3), cutoff=40)
    | rho.expectation(observable_matrix(number_operator(1, 0), 40))  # -> 0.3
    """
    n = obs.n_modes
    # Every factor of M moves at most two levels.
    levels = cutoff + 2 * power + 1
    ladder = _ladder(n, levels)
    M = obs.const_term * scipy.sparse.identity(levels**n, dtype=complex, format='csr')
    for mu in range(2 * n):
        if obs.lin[mu] != 0:
            M = M + obs.lin[mu] * ladder[mu]
        for nu in range(2 * n):
            if obs.quad[mu, nu] != 0:
                M = M + obs.quad[mu, nu] * (ladder[mu] @ ladder[nu])
    result = M
    for _ in range(power - 1):
        result = result @ M
    return _project(result, n, levels, cutoff)


def fock_operator(coeffs, state, cutoff, padding=2):
    """
    The logarithmic-derivative operator A_{mu nu}(a~^mu a~^nu - Sigma^{mu nu}) + B_mu a~^mu
    of a set of engine coefficients, as a D^n x D^n matrix.

    The products are formed on cutoff + padding levels and projected onto the cutoff, so
    the matrix elements below the cutoff are exact.

    Parameters
    ----------
    coeffs: LogDerivativeCoefficients
        RLD or SLD coefficients.
    state: GaussianState
        The state they belong to (supplies lambda and Sigma).
    cutoff: int
        The number of levels D per mode.
    """
    n = state.n_modes
    levels = cutoff + padding
    identity = scipy.sparse.identity(levels**n, dtype=complex, format='csr')
    centered = [op - mu * identity for op, mu in zip(_ladder(n, levels), state.lam)]

    L = (np.sum(coeffs.A * state.sigma) * -1) * identity
    for mu in range(2 * n):
        L = L + coeffs.B[mu] * centered[mu]
        for nu in range(2 * n):
            if coeffs.A[mu, nu] != 0:
                L = L + coeffs.A[mu, nu] * (centered[mu] @ centered[nu])
    return _project(L, n, levels, cutoff)
