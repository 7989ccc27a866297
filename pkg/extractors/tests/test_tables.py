import json

import numpy as np
import pytest

# primary-package readers double as format validators
from mvcca import dataio

from featex import manifest, tables


def make_source(path, tokens, dim=300, header=None, seed=0):
    rng = np.random.default_rng(seed)
    lines = [] if header is None else [header]
    for token in tokens:
        values = " ".join(f"{v:.4f}" for v in rng.standard_normal(dim))
        lines.append(f"{token} {values}")
    path.write_text("\n".join(lines) + "\n")


class TestExport:
    def test_two_known_tokens(self, tmp_path):
        src = tmp_path / "vectors.txt"
        make_source(src, ["cat", "dog", "fish"])
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("dog\ncat\n")
        out = tmp_path / "table.txt"
        rc = tables.main(["--input", str(vocab), "--source", str(src),
                          "--vectors", "glove", "--output", str(out)])
        assert rc == 0
        table = dataio.load_embedding_table(out)
        assert table.dim == 300
        assert set(table.vectors) == {"cat", "dog"}
        # vocabulary order preserved in the file
        first = out.read_text().splitlines()[0].split(" ")[0]
        assert first == "dog"

    def test_oov_token_omitted_and_counted(self, tmp_path):
        src = tmp_path / "vectors.txt"
        make_source(src, ["cat"])
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("cat\nxylyl\n")
        out = tmp_path / "table.txt"
        assert tables.main(["--input", str(vocab), "--source", str(src),
                            "--vectors", "glove", "--output", str(out)]) == 0
        data = json.loads((tmp_path / "table.txt.manifest.json").read_text())
        assert data["oov_count"] == 1
        assert data["oov_tokens"] == ["xylyl"]
        assert "xylyl" not in out.read_text()

    def test_fasttext_header_skipped(self, tmp_path):
        src = tmp_path / "vectors.vec"
        make_source(src, ["cat", "dog"], header="2 300")
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("cat\n")
        out = tmp_path / "table.txt"
        assert tables.main(["--input", str(vocab), "--source", str(src),
                            "--vectors", "fasttext", "--output", str(out)]) == 0
        assert dataio.load_embedding_table(out).dim == 300

    def test_reexport_byte_identical(self, tmp_path):
        src = tmp_path / "vectors.txt"
        make_source(src, ["a", "b", "c"])
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("a\nc\n")
        payloads, digests = [], []
        for run in range(2):
            out = tmp_path / f"table{run}.txt"
            assert tables.main(["--input", str(vocab), "--source", str(src),
                                "--vectors", "glove", "--output", str(out)]) == 0
            payloads.append(out.read_bytes())
            digests.append(manifest.sha256_file(out))
        assert payloads[0] == payloads[1]
        assert digests[0] == digests[1]

    def test_wrong_dimension_errors(self, tmp_path):
        src = tmp_path / "vectors.txt"
        make_source(src, ["cat"], dim=50)
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("cat\n")
        rc = tables.main(["--input", str(vocab), "--source", str(src),
                          "--vectors", "glove",
                          "--output", str(tmp_path / "t.txt")])
        assert rc == 1

    def test_all_oov_errors(self, tmp_path):
        src = tmp_path / "vectors.txt"
        make_source(src, ["cat"])
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("zzz\n")
        rc = tables.main(["--input", str(vocab), "--source", str(src),
                          "--vectors", "glove",
                          "--output", str(tmp_path / "t.txt")])
        assert rc == 1

    def test_values_copied_verbatim(self, tmp_path):
        src = tmp_path / "vectors.txt"
        values = " ".join(["0.12345"] * 300)
        src.write_text(f"cat {values}\n")
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("cat\n")
        out = tmp_path / "table.txt"
        assert tables.main(["--input", str(vocab), "--source", str(src),
                            "--vectors", "glove", "--output", str(out)]) == 0
        assert out.read_text() == f"cat {values}\n"

    def test_checksum_verification(self, tmp_path):
        src = tmp_path / "vectors.txt"
        make_source(src, ["cat"])
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("cat\n")
        out = tmp_path / "table.txt"
        assert tables.main(["--input", str(vocab), "--source", str(src),
                            "--vectors", "glove", "--output", str(out)]) == 0
        manifest.verify_manifest(out)
        out.write_text(out.read_text() + "tampered\n")
        with pytest.raises(ValueError, match="checksum"):
            manifest.verify_manifest(out)
