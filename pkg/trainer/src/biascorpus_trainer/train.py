"""Fine-tuning loop: Adam with the published betas, fixed epochs, best-val-F1
checkpoint selection.

``base_model`` is a hub id or local path of a pretrained encoder; the
sentinel ``tiny-random`` builds a small randomly initialized encoder with a
word-level vocabulary extracted from the training split, which keeps smoke
tests fast and fully offline.
"""

from __future__ import annotations

import json
import logging
import random
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import DataLoader, TensorDataset

from biascorpus_trainer.config import TrainerConfig
from biascorpus_trainer.data import read_split

logger = logging.getLogger(__name__)

TINY_SENTINEL = "tiny-random"


def set_all_seeds(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed % (2**32))
    torch.manual_seed(seed)


def _build_tiny(texts: list[str], config: TrainerConfig, work_dir: Path):
    from transformers import BertConfig, BertForSequenceClassification, BertTokenizerFast

    vocab: dict[str, None] = {}
    for special in ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"):
        vocab[special] = None
    for text in texts:
        for token in text.lower().split():
            vocab.setdefault(token, None)
    vocab_file = work_dir / "vocab.txt"
    vocab_file.write_text("\n".join(vocab) + "\n", encoding="utf-8")
    tokenizer = BertTokenizerFast(vocab_file=str(vocab_file), do_lower_case=True)
    model_config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=64,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=128,
        max_position_embeddings=config.max_length + 2,
        hidden_dropout_prob=config.dropout,
        attention_probs_dropout_prob=config.dropout,
        num_labels=2,
    )
    model = BertForSequenceClassification(model_config)
    return tokenizer, model


def _load_pretrained(config: TrainerConfig):
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(config.base_model)
    model = AutoModelForSequenceClassification.from_pretrained(
        config.base_model,
        num_labels=2,
        hidden_dropout_prob=config.dropout,
        attention_probs_dropout_prob=config.dropout,
    )
    return tokenizer, model


def _encode(tokenizer, texts: list[str], labels: list[int], max_length: int) -> TensorDataset:
    enc = tokenizer(
        texts, truncation=True, padding="max_length", max_length=max_length, return_tensors="pt"
    )
    return TensorDataset(enc["input_ids"], enc["attention_mask"], torch.tensor(labels))


def f1_positive(preds: list[int], gold: list[int]) -> float:
    tp = sum(1 for p, g in zip(preds, gold) if p == 1 and g == 1)
    fp = sum(1 for p, g in zip(preds, gold) if p == 1 and g == 0)
    fn = sum(1 for p, g in zip(preds, gold) if p == 0 and g == 1)
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


@torch.no_grad()
def _predict(model, dataset: TensorDataset, batch_size: int, device) -> list[int]:
    model.eval()
    out: list[int] = []
    for input_ids, attention_mask, _labels in DataLoader(dataset, batch_size=batch_size):
        logits = model(input_ids.to(device), attention_mask=attention_mask.to(device)).logits
        out.extend(logits.argmax(dim=-1).tolist())
    return out


def train(
    train_file: str | Path,
    val_file: str | Path,
    config: TrainerConfig,
    out_dir: str | Path,
) -> dict:
    """Fine-tune and save the best-val-F1 checkpoint; returns the run summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    set_all_seeds(config.seed)

    train_texts, train_labels = read_split(train_file)
    val_texts, val_labels = read_split(val_file)

    if config.base_model == TINY_SENTINEL:
        tokenizer, model = _build_tiny(train_texts, config, out_dir)
    else:
        tokenizer, model = _load_pretrained(config)

    device = torch.device("cuda" if torch.cuda.is_available() else "cpu")
    model.to(device)

    train_ds = _encode(tokenizer, train_texts, train_labels, config.max_length)
    val_ds = _encode(tokenizer, val_texts, val_labels, config.max_length)
    loader = DataLoader(train_ds, batch_size=config.batch_size, shuffle=True,
                        generator=torch.Generator().manual_seed(config.seed))

    optimizer = torch.optim.Adam(
        model.parameters(), lr=config.learning_rate, betas=(config.beta1, config.beta2)
    )

    log_path = out_dir / "training_log.jsonl"
    best = {"epoch": 0, "val_f1": -1.0}
    log_rows = []
    for epoch in range(1, config.epochs + 1):
        model.train()
        total_loss = 0.0
        n_batches = 0
        for input_ids, attention_mask, labels in loader:
            optimizer.zero_grad()
            output = model(
                input_ids.to(device),
                attention_mask=attention_mask.to(device),
                labels=labels.to(device),
            )
            output.loss.backward()
            optimizer.step()
            total_loss += float(output.loss.item())
            n_batches += 1

        val_preds = _predict(model, val_ds, config.batch_size, device)
        val_f1 = f1_positive(val_preds, val_labels)
        row = {"epoch": epoch, "train_loss": total_loss / max(n_batches, 1), "val_f1": val_f1}
        log_rows.append(row)
        logger.info("epoch %d: loss=%.4f val_f1=%.4f", epoch, row["train_loss"], val_f1)
        if val_f1 > best["val_f1"]:
            best = {"epoch": epoch, "val_f1": val_f1}
            model.save_pretrained(out_dir / "model")
            tokenizer.save_pretrained(out_dir / "model")

    with log_path.open("w", encoding="utf-8") as fh:
        for row in log_rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    config.save(out_dir / "trainer_config.json")
    summary = {
        "best_epoch": best["epoch"],
        "best_val_f1": best["val_f1"],
        "epochs": config.epochs,
        "train_size": len(train_texts),
        "val_size": len(val_texts),
    }
    (out_dir / "meta.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary
