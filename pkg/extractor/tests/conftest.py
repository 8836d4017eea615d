import json
from pathlib import Path

import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizerFast

VOCAB = (
    ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    + list("abcdefghijklmnopqrstuvwxyz")
    + [
        "what", "is", "the", "category", "of", "each", "pet", "##type", "##s",
        "pets", "weight", "age", "find", "type", "and", "youngest", "name",
        "owner", "##er",
    ]
)


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory) -> Path:
    """A small randomly initialized BERT with a handcrafted WordPiece vocab."""
    directory = tmp_path_factory.mktemp("tinybert")
    raw_vocab = directory / "raw_vocab.txt"
    raw_vocab.write_text("\n".join(VOCAB) + "\n", encoding="utf-8")
    tokenizer = BertTokenizerFast(vocab=str(raw_vocab), do_lower_case=True)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=48,
    )
    torch.manual_seed(1234)
    model = BertModel(config)
    model.eval()
    tokenizer.save_pretrained(str(directory))
    model.save_pretrained(str(directory))
    return directory


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> Path:
    """Schemas + examples files in the shared corpus formats."""
    directory = tmp_path_factory.mktemp("corpus")
    tables = [
        {
            "db_id": "pets_1",
            "table_names_original": ["Pets"],
            "column_names_original": [
                [-1, "*"],
                [0, "PetType"],
                [0, "pet_age"],
                [0, "weight"],
            ],
        }
    ]
    (directory / "tables.json").write_text(json.dumps(tables), encoding="utf-8")
    examples = [
        {
            "example_id": "pets-syn-0",
            "db_id": "pets_1",
            "question_tokens": ["what", "is", "the", "category", "of", "each", "pet"],
            "gold_links": [[3, 1]],
        },
        {
            "example_id": "pets-plain-0",
            "db_id": "pets_1",
            "question_tokens": ["find", "the", "type", "and", "weight"],
            "gold_links": [[2, 1], [4, 3]],
        },
    ]
    (directory / "examples.jsonl").write_text(
        "\n".join(json.dumps(e) for e in examples) + "\n", encoding="utf-8"
    )
    return directory
