import json
import subprocess
import sys
from pathlib import Path

import pytest
import torch
from transformers import BertConfig, BertForQuestionAnswering, BertTokenizerFast

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]


def generate_challenge(out_dir: Path, size: int, seed: int = 13) -> Path:
    """Produce a challenge set through the generator's own CLI."""
    subprocess.run(
        [sys.executable, "-m", "sammrc.cli", "generate", "--seed", str(seed),
         "--size", str(size), "--out", str(out_dir), "--jobs", "1"],
        check=True,
        capture_output=True,
    )
    return out_dir / "challenge.json"


def build_tiny_model(model_dir: Path, challenge_file: Path) -> Path:
    """A small randomly initialised extractive QA checkpoint whose vocabulary
    covers the challenge set (stand-in for a public model: the sandbox has
    no model-hub access)."""
    with open(challenge_file, encoding="utf-8") as fh:
        payload = json.load(fh)
    words = set()
    for article in payload["data"]:
        for para in article["paragraphs"]:
            words.update(para["context"].lower().replace(",", " , ").replace(".", " . ").split())
            for qa in para["qas"]:
                words.update(qa["question"].lower().replace("?", " ?").split())
    vocab = SPECIALS + sorted(words)
    model_dir.mkdir(parents=True, exist_ok=True)
    (model_dir / "vocab.txt").write_text("\n".join(vocab), encoding="utf-8")
    tokenizer = BertTokenizerFast(vocab_file=str(model_dir / "vocab.txt"), do_lower_case=True)
    torch.manual_seed(20260810)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=640,
    )
    model = BertForQuestionAnswering(config)
    model.save_pretrained(model_dir)
    tokenizer.save_pretrained(model_dir)
    return model_dir


@pytest.fixture(scope="session")
def challenge_100(tmp_path_factory):
    out = tmp_path_factory.mktemp("challenge") / "set"
    return generate_challenge(out, size=100)


@pytest.fixture(scope="session")
def tiny_model(tmp_path_factory, challenge_100):
    return build_tiny_model(tmp_path_factory.mktemp("model") / "tiny", challenge_100)
