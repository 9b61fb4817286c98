"""Example usage of the krein_layers toolkit"""

from .usage_examples import *

__all__ = ['run_complete_example', 'demonstrate_exact_model', 'demonstrate_layer_operators',
           'demonstrate_dirichlet_spectrum', 'demonstrate_delta_bound_state', 'demonstrate_scattering',
           'demonstrate_svd_decay']
