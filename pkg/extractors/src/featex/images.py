"""Image feature extraction from a pretrained CNN.

resnet34 emits the 512-d average-pool output; vgg16 emits the 4096-d
second fully-connected activation. Images run through the network's
canonical preprocessing (resize shortest side to 256, center-crop 224,
ImageNet normalization), which the manifest records verbatim. Images that
fail to decode become zero rows and are listed in the manifest.
"""

import argparse
import sys

import numpy as np
import torch
from PIL import Image
from torchvision import models, transforms

from .fileio import write_vdf
from .manifest import build_manifest, write_manifest

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)

PREPROCESSING = (
    "resize shortest side to 256, center-crop 224x224, scale to [0,1], "
    f"normalize mean={IMAGENET_MEAN} std={IMAGENET_STD}"
)

EXTRACTOR_DIMS = {"resnet34": 512, "vgg16": 4096}


def _preprocess():
    return transforms.Compose([
        transforms.Resize(256),
        transforms.CenterCrop(224),
        transforms.ToTensor(),
        transforms.Normalize(IMAGENET_MEAN, IMAGENET_STD),
    ])


def build_extractor(name, weights="pretrained", seed=0):
    """Return an eval-mode module mapping a batch of images to features.

    weights: 'pretrained' for the torchvision checkpoint, 'random' for a
    fixed-seed random initialization (format and pipeline testing without
    network access), or a path to a state-dict file.
    """
    if name not in EXTRACTOR_DIMS:
        raise ValueError(f"unknown extractor {name!r}")
    pretrained = weights == "pretrained"
    if weights == "random":
        torch.manual_seed(seed)
    if name == "resnet34":
        net = models.resnet34(
            weights=models.ResNet34_Weights.IMAGENET1K_V1 if pretrained else None)
        if weights not in ("pretrained", "random"):
            net.load_state_dict(torch.load(weights, map_location="cpu"))
        # everything up to and including the average pool; flatten to 512
        net.fc = torch.nn.Identity()
    else:
        net = models.vgg16(
            weights=models.VGG16_Weights.IMAGENET1K_V1 if pretrained else None)
        if weights not in ("pretrained", "random"):
            net.load_state_dict(torch.load(weights, map_location="cpu"))
        # keep the classifier through the second fully-connected layer
        net.classifier = torch.nn.Sequential(*list(net.classifier.children())[:5])
    net.eval()
    return net


def extract_image_features(image_paths, extractor, weights="pretrained",
                           seed=0, batch_size=16, log=None):
    """Features for each image, in input order.

    Returns (matrix, failed_paths); failed images decode errors become zero
    rows so row order always matches the input list.
    """
    net = extractor if isinstance(extractor, torch.nn.Module) \
        else build_extractor(extractor, weights=weights, seed=seed)
    prep = _preprocess()
    tensors, failed = [], []
    for path in image_paths:
        try:
            with Image.open(path) as img:
                tensors.append(prep(img.convert("RGB")))
        except Exception as exc:
            if log is not None:
                print(f"failed to decode {path}: {exc}", file=log)
            failed.append(str(path))
            tensors.append(None)
    ok_index = [i for i, t in enumerate(tensors) if t is not None]
    dim = None
    feats = {}
    with torch.no_grad():
        for start in range(0, len(ok_index), batch_size):
            batch_idx = ok_index[start:start + batch_size]
            batch = torch.stack([tensors[i] for i in batch_idx])
            out = net(batch)
            out = torch.flatten(out, 1).cpu().numpy()
            dim = out.shape[1]
            for row, i in zip(out, batch_idx):
                feats[i] = row
    if dim is None:
        raise ValueError("no image could be decoded")
    M = np.zeros((len(tensors), dim), dtype=np.float32)
    for i, row in feats.items():
        M[i] = row
    return M, failed


def run(args):
    with open(args.input, "r", encoding="utf-8") as fh:
        paths = [line.strip() for line in fh if line.strip()]
    if not paths:
        raise ValueError("input list holds no image paths")
    M, failed = extract_image_features(
        paths, args.extractor, weights=args.weights, seed=args.seed,
        batch_size=args.batch_size, log=sys.stderr)
    write_vdf(args.output, M)
    manifest = build_manifest(
        source=args.input,
        extractor={"name": args.extractor, "weights": args.weights,
                   "torchvision": __import__("torchvision").__version__},
        outputs=[(args.output, int(M.shape[0]), int(M.shape[1]))],
        preprocessing=PREPROCESSING,
        failed_images=failed,
    )
    write_manifest(args.output, manifest)
    print(f"wrote {M.shape[0]}x{M.shape[1]} features to {args.output} "
          f"({len(failed)} decode failures)", file=sys.stderr)
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="extract-image-features",
        description="Export CNN image features as a VDF1 matrix + manifest.")
    parser.add_argument("--input", required=True,
                        help="text file listing one image path per line")
    parser.add_argument("--output", required=True, help="VDF1 output path")
    parser.add_argument("--extractor", choices=sorted(EXTRACTOR_DIMS),
                        default="resnet34")
    parser.add_argument("--weights", default="pretrained",
                        help="'pretrained', 'random', or a state-dict path")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for --weights random")
    parser.add_argument("--batch-size", type=int, default=16)
    args = parser.parse_args(argv)
    try:
        return run(args)
    except Exception as exc:
        print(f"extract-image-features: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
