"""Batch extractive-QA inference over a SQuAD-style challenge file.

Loads any Hugging Face extractive question-answering checkpoint, predicts
one answer span per instance, and writes the evaluator's prediction format
(a JSON object mapping instance id to answer string). Inference is
deterministic given fixed weights and configuration.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import AutoModelForQuestionAnswering, AutoTokenizer

log = logging.getLogger("sam_adapter")

MAX_ANSWER_TOKENS = 30


@dataclass(frozen=True)
class AdapterConfig:
    model: str
    challenge: Path
    output: Path
    max_length: int = 384
    batch_size: int = 16
    device: str = "cpu"


@dataclass(frozen=True)
class QAItem:
    id: str
    question: str
    context: str


def read_challenge(path: Path) -> list[QAItem]:
    """Flatten a SQuAD-style JSON file into (id, question, context) items."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    items = []
    for article in payload["data"]:
        for para in article["paragraphs"]:
            context = para["context"]
            for qa in para["qas"]:
                items.append(QAItem(id=qa["id"], question=qa["question"], context=context))
    return items


def decode_span(start_logits, end_logits, offsets, context_mask, context: str) -> str:
    """Best start/end pair with start <= end within the answer length cap,
    restricted to context tokens."""
    scores = []
    n = len(offsets)
    candidate_starts = [
        i for i in range(n) if context_mask[i] and offsets[i][1] > offsets[i][0]
    ]
    for i in candidate_starts:
        for j in range(i, min(i + MAX_ANSWER_TOKENS, n)):
            if not context_mask[j] or offsets[j][1] <= offsets[j][0]:
                continue
            scores.append((start_logits[i] + end_logits[j], i, j))
    if not scores:
        return ""
    _, i, j = max(scores, key=lambda t: (t[0], -(t[2] - t[1])))
    return context[offsets[i][0]:offsets[j][1]]


def predict(config: AdapterConfig) -> dict[str, str]:
    """Run the model over every instance; ids cover the challenge exactly."""
    items = read_challenge(config.challenge)
    if not items:
        return {}
    device = torch.device(config.device)
    tokenizer = AutoTokenizer.from_pretrained(config.model)
    model = AutoModelForQuestionAnswering.from_pretrained(config.model)
    model.to(device)
    model.eval()

    predictions: dict[str, str] = {}
    truncated = 0
    for batch_start in range(0, len(items), config.batch_size):
        batch = items[batch_start:batch_start + config.batch_size]
        encoded = tokenizer(
            [it.question for it in batch],
            [it.context for it in batch],
            truncation="only_second",
            max_length=config.max_length,
            padding=True,
            return_offsets_mapping=True,
            return_tensors="pt",
        )
        offsets = encoded.pop("offset_mapping")
        encoded = {k: v.to(device) for k, v in encoded.items()}
        with torch.no_grad():
            output = model(**encoded)
        for row, item in enumerate(batch):
            sequence_ids = tokenizer(
                item.question,
                item.context,
                truncation="only_second",
                max_length=config.max_length,
            ).sequence_ids()
            n = len(sequence_ids)
            context_mask = [sequence_ids[i] == 1 for i in range(n)]
            if not _context_fits(tokenizer, item, config.max_length, n, context_mask):
                truncated += 1
                log.warning("context of %s truncated to %d tokens", item.id, config.max_length)
            predictions[item.id] = decode_span(
                output.start_logits[row][:n].tolist(),
                output.end_logits[row][:n].tolist(),
                offsets[row][:n].tolist(),
                context_mask,
                item.context,
            )
    if truncated:
        log.warning("%d of %d instances were truncated", truncated, len(items))
    return predictions


def _context_fits(tokenizer, item: QAItem, max_length: int, n: int, context_mask) -> bool:
    if n < max_length:
        return True
    full = tokenizer(item.question, item.context, truncation=False)
    return len(full["input_ids"]) <= max_length


def write_predictions(predictions: dict[str, str], path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(predictions, fh, ensure_ascii=True, indent=0, sort_keys=True)


def run(config: AdapterConfig) -> dict[str, str]:
    predictions = predict(config)
    write_predictions(predictions, config.output)
    return predictions
