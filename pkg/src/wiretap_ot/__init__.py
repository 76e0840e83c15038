"""Oblivious transfer over a wiretapped binary erasure broadcast channel."""

from .capacity import CapacityReport, c1p, c2p, capacity_report, maximize_over_input, outer_bounds
from .channel import ERASED, ChannelParams, DiscreteBroadcastChannel, bec_pair_as_broadcast, transmit_broadcast
from .errors import (
    BudgetExceeded,
    InsufficientErasures,
    InsufficientUnerasures,
    ProvisioningError,
    TooLarge,
    WiretapOTError,
)
from .keymat import HashSpec, LinearCode, derive_secret_key, expand, sample_code
from .protocol import (
    Privacy,
    ProtocolOutcome,
    ProtocolParams,
    Regime,
    bob_order_sets,
    bob_select_sets,
    run_protocol,
)

__version__ = "0.1.0"
