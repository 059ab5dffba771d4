"""
Adversary model: clone injection and misbehaving relays.
"""
from .behaviors import Action, MessageContext, apply_behavior, emits_claims, joins_overlay, perturb_location
from .injection import AdversaryConfig, AdversaryConfigError, CloneBehavior, Placement, inject_clones

__all__ = [
    "Action",
    "MessageContext",
    "apply_behavior",
    "emits_claims",
    "joins_overlay",
    "perturb_location",
    "AdversaryConfig",
    "AdversaryConfigError",
    "CloneBehavior",
    "Placement",
    "inject_clones",
]
