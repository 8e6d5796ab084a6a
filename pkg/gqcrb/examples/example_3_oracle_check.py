"""
Checks the Gaussian engine against brute-force Fock-space numerics for the damping and
temperature of an amplitude-damping channel, for a few cutoffs.
"""
import numpy as np

import gqcrb
from gqcrb.oracle.qfi import rld_qfi_oracle, sld_qfi_oracle

config = gqcrb.ScenarioConfig(
    'damping-temperature', probe='single', parameters={'r': 0.4, 'xi': 0.5, 'N': 0.9}
)
family = gqcrb.build_family(config)
theta = config.theta()

F_sld = gqcrb.qfi_matrix(family, theta, 'SLD')
F_rld = gqcrb.qfi_matrix(family, theta, 'RLD')

for cutoff in [15, 20, 30]:
    try:
        sld_gap = np.abs(sld_qfi_oracle(family, theta, cutoff) - F_sld).max()
        rld_gap = np.abs(rld_qfi_oracle(family, theta, cutoff) - F_rld).max()
    except gqcrb.IncreaseCutoffError as err:
        print(f'D = {cutoff}: {err}')
        continue
    print(f'D = {cutoff}: max |SLD gap| = {sld_gap:.2e}, max |RLD gap| = {rld_gap:.2e}')
