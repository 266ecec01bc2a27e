"""The run directory: where every artifact of one configuration lives and how it is reloaded."""

from pathlib import Path

from dilma.checkpoint import load_checkpoint, save_checkpoint
from dilma.classifiers import Classifier, ClassifierConfig, build_classifier
from dilma.config import RunConfig
from dilma.deeplev import DeepLevConfig, DeepLevenshtein
from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.lm import MaskedLanguageModel, MLMConfig
from dilma.logger import get_logger
from dilma.textcore import (
    Corpus,
    DatasetSplit,
    Vocabulary,
    generate_from_settings,
    load_dataset,
    split_for_substitute,
    synthetic_vocabulary,
    write_dataset,
)

logger = get_logger(__name__)

MLM_KIND = "mlm"
CLASSIFIER_KIND = "classifier"
DEEPLEV_KIND = "deeplev"


class Workspace:
    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.root = config.run_dir()
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "data").mkdir(exist_ok=True)
        self.config_file.write_text(config.to_env_text(), encoding="utf-8")
        self._data: tuple[Corpus, Corpus] | None = None

    @property
    def config_file(self) -> Path:
        return self.root / "run.env"

    @property
    def vocab_file(self) -> Path:
        return self.root / "vocab.json"

    @property
    def train_file(self) -> Path:
        return self.config.train_path or self.root / "data" / "train.jsonl"

    @property
    def test_file(self) -> Path:
        return self.config.test_path or self.root / "data" / "test.jsonl"

    @property
    def mlm_file(self) -> Path:
        return self.root / "mlm.pt"

    @property
    def target_file(self) -> Path:
        return self.root / "target.pt"

    @property
    def substitute_file(self) -> Path:
        return self.root / "substitute.pt"

    @property
    def deeplev_file(self) -> Path:
        return self.root / "deeplev.pt"

    @property
    def pairs_file(self) -> Path:
        return self.root / "data" / "deeplev_pairs.jsonl"

    def attack_file(self, attack_name: str) -> Path:
        return self.root / f"attack-{attack_name}.jsonl"

    def report_file(self, kind: str, attack_name: str) -> Path:
        return self.root / f"{kind}-{attack_name}.json"

    def require(self, path: Path, subcommand: str) -> Path:
        if not path.exists():
            raise dilma_error(DilmaErrorCodes.MISSING_ARTIFACT, f"{path.name} is missing; run {subcommand} first")
        return path

    def _materialize_synthetic(self) -> None:
        if self.train_file.exists() and self.test_file.exists():
            return
        examples = generate_from_settings(self.config.synthetic_settings())
        n_train = self.config.synthetic_train_size
        write_dataset(self.train_file, examples[:n_train])
        write_dataset(self.test_file, examples[n_train:])
        logger.info("synthetic data written", train=n_train, test=len(examples) - n_train)

    def data(self) -> tuple[Corpus, Corpus]:
        """Train and test corpora; the vocabulary comes from the training file and is stored once."""
        if self._data is not None:
            return self._data
        if self.config.uses_synthetic_data:
            self._materialize_synthetic()
            vocab = synthetic_vocabulary(self.config.synthetic_vocab_size)
            train = load_dataset(self.train_file, vocab, self.config.synthetic_num_classes)
        else:
            train = load_dataset(self.train_file)
        if not self.vocab_file.exists():
            train.vocab.save(self.vocab_file)
        elif Vocabulary.load(self.vocab_file) != train.vocab:
            raise dilma_error(
                DilmaErrorCodes.VOCABULARY_MISMATCH, f"{self.vocab_file} does not match the training data"
            )
        test = load_dataset(self.test_file, train.vocab, train.num_classes)
        self._data = (train, test)
        return self._data

    def vocab(self) -> Vocabulary:
        """The stored vocabulary alone, without touching any dataset file."""
        return Vocabulary.load(self.require(self.vocab_file, "pretrain"))

    def split(self) -> DatasetSplit:
        train, _ = self.data()
        return split_for_substitute(train.examples, self.config.seed)

    def save_mlm(self, model: MaskedLanguageModel, vocab: Vocabulary, **manifest: object) -> None:
        save_checkpoint(
            self.mlm_file,
            model,
            kind=MLM_KIND,
            config=model.config.model_dump(mode="json"),
            vocab_hash=vocab.content_hash(),
            seed=self.config.seed,
            parameter_groups={group: [name for name, _ in members] for group, members in model.parameter_groups().items()},
            manifest=dict(manifest),
        )

    def load_mlm(self, vocab: Vocabulary) -> MaskedLanguageModel:
        payload = load_checkpoint(self.require(self.mlm_file, "pretrain"), kind=MLM_KIND, vocab_hash=vocab.content_hash())
        model = MaskedLanguageModel(vocab.size, MLMConfig.model_validate(payload["config"]))
        model.load_state_dict(payload["state_dict"])
        model.eval()
        return model

    def save_classifier(self, path: Path, model: Classifier, vocab: Vocabulary, *, trained_on: str, **manifest: object) -> None:
        save_checkpoint(
            path,
            model,
            kind=CLASSIFIER_KIND,
            config=model.config.model_dump(mode="json"),
            vocab_hash=vocab.content_hash(),
            seed=self.config.seed,
            manifest={"num_classes": model.num_classes, "trained_on": trained_on, **manifest},
        )

    def load_classifier(self, path: Path, vocab: Vocabulary, subcommand: str) -> Classifier:
        payload = load_checkpoint(self.require(path, subcommand), kind=CLASSIFIER_KIND, vocab_hash=vocab.content_hash())
        model = build_classifier(
            vocab.size, int(payload["manifest"]["num_classes"]), ClassifierConfig.model_validate(payload["config"])
        )
        model.load_state_dict(payload["state_dict"])
        model.eval()
        return model

    def save_deeplev(self, model: DeepLevenshtein, vocab: Vocabulary, **manifest: object) -> None:
        save_checkpoint(
            self.deeplev_file,
            model,
            kind=DEEPLEV_KIND,
            config=model.config.model_dump(mode="json"),
            vocab_hash=vocab.content_hash(),
            seed=self.config.seed,
            manifest=dict(manifest),
        )

    def load_deeplev(self, vocab: Vocabulary) -> DeepLevenshtein:
        payload = load_checkpoint(
            self.require(self.deeplev_file, "train-deeplev"), kind=DEEPLEV_KIND, vocab_hash=vocab.content_hash()
        )
        model = DeepLevenshtein(vocab.size, DeepLevConfig.model_validate(payload["config"]))
        model.load_state_dict(payload["state_dict"])
        model.eval()
        return model
