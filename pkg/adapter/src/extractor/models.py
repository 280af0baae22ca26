"""Model construction and weight resolution for the extractor."""

from __future__ import annotations

from pathlib import Path

import torch
from torch import nn
from torchvision import models

# model name -> (builder, pretrained weights enum, pool feature width)
_ZOO = {
    "inception_v3": (models.inception_v3, "Inception_V3_Weights", 2048),
    "resnet18": (models.resnet18, "ResNet18_Weights", 512),
}

LOGITS_WIDTH = 1000
_INIT_SEED = 0


def available_models() -> tuple[str, ...]:
    return tuple(sorted(_ZOO))


def pool_width(model_name: str) -> int:
    if model_name not in _ZOO:
        raise ValueError(
            f"unknown model {model_name!r}; choose from {available_models()}")
    return _ZOO[model_name][2]


def build_model(model_name: str, weights: str = "auto") -> tuple[nn.Module, dict]:
    """Construct the classifier in eval mode.

    weights:
        "auto" loads the ImageNet-pretrained checkpoint (network access or
        a warm cache required), "none" uses a fixed-seed random
        initialization (useful for offline pipeline testing; scores are
        meaningless), or a path to a local state-dict file.

    Returns the model and a provenance dict for the sidecar.
    """
    if model_name not in _ZOO:
        raise ValueError(
            f"unknown model {model_name!r}; choose from {available_models()}")
    builder, weights_enum_name, _ = _ZOO[model_name]
    extra = {"aux_logits": False, "init_weights": True} \
        if model_name == "inception_v3" else {}

    if weights == "auto":
        enum = getattr(models, weights_enum_name).IMAGENET1K_V1
        try:
            if model_name == "inception_v3":
                # pretrained checkpoints carry aux weights; drop the flag
                model = builder(weights=enum)
                model.aux_logits = False
                model.AuxLogits = None
            else:
                model = builder(weights=enum)
        except Exception as exc:
            raise ValueError(
                f"could not load pretrained weights for {model_name} "
                f"({exc}); pass --weights none for a seeded offline "
                f"initialization or --weights PATH for a local checkpoint"
            ) from exc
        provenance = {"weights": f"imagenet:{enum.name}"}
    elif weights == "none":
        torch.manual_seed(_INIT_SEED)
        model = builder(weights=None, **extra)
        provenance = {"weights": f"random:seed={_INIT_SEED}"}
    else:
        path = Path(weights)
        if not path.is_file():
            raise ValueError(f"no such weights file: {path}")
        model = builder(weights=None, **extra)
        state = torch.load(path, map_location="cpu", weights_only=True)
        model.load_state_dict(state, strict=False)
        provenance = {"weights": f"file:{path}"}

    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    return model, provenance


def forward_pool_and_logits(model: nn.Module, batch: torch.Tensor
                            ) -> tuple[torch.Tensor, torch.Tensor]:
    """One forward pass returning (pooled features, logits)."""
    fc = model.fc
    model.fc = nn.Identity()
    try:
        with torch.no_grad():
            features = model(batch)
            logits = fc(features)
    finally:
        model.fc = fc
    return features, logits
