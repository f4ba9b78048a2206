import json
import tempfile
import unittest
from pathlib import Path

from splitnet.config import PipelineConfig, config_from_mapping, load_config, write_config_snapshot
from splitnet.constants import DEFAULT_GAMMAS, MAX_SEED
from splitnet.graph import ContractViolation
from splitnet.rundir import RunEntry, RunReport, write_manifest
from splitnet.util import canonical_id_hash, format_gamma, parse_gammas
from splitnet.validate import ValidationError, raise_on_errors, validate_config


class ConfigTests(unittest.TestCase):
    def test_defaults(self) -> None:
        cfg = PipelineConfig()
        self.assertEqual(cfg.method, "Split")
        self.assertEqual(cfg.norm, "outnorm")
        self.assertEqual(cfg.top_m, 20)
        self.assertEqual(len(DEFAULT_GAMMAS), 20)
        self.assertEqual((DEFAULT_GAMMAS[0], DEFAULT_GAMMAS[-1]), (0.1, 2.0))
        self.assertEqual(PipelineConfig(method="CC").norm, "eq1")

    def test_load_resolves_paths_against_config_file(self) -> None:
        with tempfile.TemporaryDirectory() as td:
            root = Path(td)
            (root / "conf.toml").write_text(
                '[pipeline]\ninput_path = "data/e.tsv"\nseed = "0xffffffffffffffff"\nnormalization = "BiNorm"\n',
                encoding="utf-8",
            )
            cfg = load_config(root / "conf.toml")
            self.assertEqual(cfg.input_path, root / "data" / "e.tsv")
            self.assertEqual(cfg.seed, MAX_SEED)
            self.assertEqual(cfg.norm, "binorm")

    def test_missing_config(self) -> None:
        with self.assertRaises(FileNotFoundError):
            load_config("/nonexistent/conf.toml")

    def test_snapshot_round_trip(self) -> None:
        with tempfile.TemporaryDirectory() as td:
            root = Path(td)
            cfg = PipelineConfig(input_path=root / "e.tsv", method="BC", gammas=(0.5, 1.5), seed=MAX_SEED, output_dir=root)
            write_config_snapshot(root / "config.toml", cfg)
            text = (root / "config.toml").read_text(encoding="utf-8")
            self.assertNotIn("output_dir", text)
            loaded = load_config(root / "config.toml")
            self.assertEqual(loaded.method, "BC")
            self.assertEqual(loaded.gammas, (0.5, 1.5))
            self.assertEqual(loaded.seed, MAX_SEED)
            self.assertEqual(loaded.norm, "eq1")

    def test_unknown_keys_are_reported(self) -> None:
        cfg = config_from_mapping({"method": "DC", "colour": "red"})
        errors = validate_config(cfg, require_input=False)
        self.assertIn("Unknown pipeline key: colour", errors)


class ValidateConfigTests(unittest.TestCase):
    def test_valid_config(self) -> None:
        self.assertEqual(validate_config(PipelineConfig(), require_input=False), [])

    def test_collects_every_error(self) -> None:
        cfg = PipelineConfig(
            method="DC",
            normalization="outnorm",
            top_m=0,
            gammas=(1.0, 0.5),
            seed=-1,
            max_iterations=0,
            quality_epsilon=0.0,
            workers=0,
        )
        errors = validate_config(cfg)
        self.assertEqual(len(errors), 8)
        with self.assertRaises(ValidationError):
            raise_on_errors(errors)

    def test_gamma_grid_rules(self) -> None:
        self.assertIn("gammas must be a non-empty list", validate_config(PipelineConfig(gammas=()), False))
        self.assertIn("gammas must be positive numbers", validate_config(PipelineConfig(gammas=(0.0, 1.0)), False))

    def test_missing_input(self) -> None:
        errors = validate_config(PipelineConfig(input_path=Path("/nonexistent/e.tsv")))
        self.assertEqual(len(errors), 1)
        self.assertIn("does not exist", errors[0])


class UtilTests(unittest.TestCase):
    def test_parse_gammas(self) -> None:
        self.assertEqual(parse_gammas("0.5,1,1.5"), [0.5, 1.0, 1.5])
        self.assertEqual(parse_gammas("0.1:0.5:0.1"), [0.1, 0.2, 0.3, 0.4, 0.5])
        with self.assertRaises(ValueError):
            parse_gammas("1:2")
        with self.assertRaises(ValueError):
            parse_gammas("")

    def test_format_gamma(self) -> None:
        self.assertEqual(format_gamma(1.0), "1")
        self.assertEqual(format_gamma(0.5), "0.5")

    def test_canonical_hash_ignores_order(self) -> None:
        self.assertEqual(canonical_id_hash(["b", "a"]), canonical_id_hash(["a", "b"]))
        self.assertNotEqual(canonical_id_hash(["a"]), canonical_id_hash(["a", "b"]))


class RunDirectoryTests(unittest.TestCase):
    def _entry(self, **overrides) -> RunEntry:
        base = dict(
            method="DC",
            gamma=1.0,
            cluster_count=2,
            granularity=1 / 3,
            quality=0.123456789012345,
            singletons=0,
            nodes=6,
            edges=7,
            partition_file="partitions/DC_gamma-1.tsv",
            wall_time_ms=12.5,
        )
        base.update(overrides)
        return RunEntry(**base)

    def test_report_requires_partition_files(self) -> None:
        with tempfile.TemporaryDirectory() as td:
            with self.assertRaises(ContractViolation):
                RunReport(entries=[self._entry()]).write(Path(td))

    def test_timings_only_when_recorded(self) -> None:
        report = RunReport(entries=[self._entry()])
        self.assertNotIn("wall_time_ms", report.to_dict(record_timings=False)["entries"][0])
        row = report.to_dict(record_timings=True)["entries"][0]
        self.assertEqual(row["wall_time_ms"], 12.5)
        self.assertEqual(row["quality"], 0.123456789012)

    def test_manifest_hashes_every_file(self) -> None:
        with tempfile.TemporaryDirectory() as td:
            root = Path(td)
            (root / "partitions").mkdir()
            (root / "partitions" / "x.tsv").write_text("a\t0\n", encoding="utf-8")
            (root / "network.tsv").write_text("", encoding="utf-8")
            entries = write_manifest(root)
            self.assertEqual(sorted(entries), ["network.tsv", "partitions/x.tsv"])
            self.assertTrue(all(v.startswith("sha256:") for v in entries.values()))
            stored = json.loads((root / "manifest.json").read_text(encoding="utf-8"))
            self.assertEqual(stored["files"], entries)
            self.assertEqual(write_manifest(root), entries)


if __name__ == "__main__":
    unittest.main()
