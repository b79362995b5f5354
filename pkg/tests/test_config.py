#!/usr/bin/env python3
"""
Unit tests for ntos configuration.

Tests precedence between flags, environment, config file and defaults.
"""
from __future__ import annotations

import tempfile
import unittest
from pathlib import Path

from ntos.config import Config
from ntos.config import default_config_file
from ntos.config import load_config
from ntos.config import read_config_file
from ntos.errors import PreconditionError
from ntos.order import DEFAULT_WORK_BUDGET


class TestConfig(unittest.TestCase):
    """Test suite for load_config and read_config_file"""

    def setUp(self):
        """Write a config file into a scratch directory"""
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        self.config_file = self.root / 'config.toml'
        self.config_file.write_text(
            'cache_dir = "/from/file"\nthreads = 3\nwork_budget = 1000\noutput_format = "csv"\n')
        self.missing = self.root / 'missing.toml'

    def tearDown(self):
        """Remove the scratch directory"""
        self.tmp.cleanup()

    def test_defaults(self):
        """Test values with no file, environment or flags"""
        config = load_config({'threads': 1}, environ={}, config_file=self.missing)
        self.assertEqual(config.work_budget, DEFAULT_WORK_BUDGET)
        self.assertEqual(config.output_format, 'text')
        self.assertEqual(config.cache_dir.name, 'ntos')
        self.assertGreaterEqual(load_config(environ={}, config_file=self.missing).threads, 1)

    def test_file_layer(self):
        """Test that the config file overrides defaults"""
        config = load_config(environ={}, config_file=self.config_file)
        self.assertEqual(config, Config(Path('/from/file'), 1000, 3, 'csv'))

    def test_environment_beats_file(self):
        """Test that NTOS_* variables override the file"""
        environ = {'NTOS_THREADS': '5', 'NTOS_WORK_BUDGET': '2e6', 'NTOS_FORMAT': 'JSON'}
        config = load_config(environ=environ, config_file=self.config_file)
        self.assertEqual(config.threads, 5)
        self.assertEqual(config.work_budget, 2_000_000)
        self.assertEqual(config.output_format, 'json')
        self.assertEqual(config.cache_dir, Path('/from/file'))

    def test_flags_beat_environment(self):
        """Test that flags win and None flags are ignored"""
        environ = {'NTOS_THREADS': '5', 'NTOS_CACHE_DIR': '/from/env'}
        config = load_config({'threads': '2', 'cache_dir': None}, environ=environ, config_file=self.config_file)
        self.assertEqual(config.threads, 2)
        self.assertEqual(config.cache_dir, Path('/from/env'))

    def test_config_file_from_environment(self):
        """Test NTOS_CONFIG and XDG_CONFIG_HOME lookup"""
        self.assertEqual(default_config_file({'NTOS_CONFIG': str(self.config_file)}), self.config_file)
        self.assertEqual(default_config_file({'XDG_CONFIG_HOME': '/xdg'}), Path('/xdg/ntos/config.toml'))
        config = load_config(environ={'NTOS_CONFIG': str(self.config_file)})
        self.assertEqual(config.threads, 3)

    def test_invalid_values(self):
        """Test validation of every key"""
        with self.assertRaises(PreconditionError):
            load_config({'threads': 'many'}, environ={}, config_file=self.missing)
        with self.assertRaises(PreconditionError):
            load_config({'threads': 0}, environ={}, config_file=self.missing)
        with self.assertRaises(PreconditionError):
            load_config({'work_budget': '-5'}, environ={}, config_file=self.missing)
        with self.assertRaises(PreconditionError):
            load_config({'output_format': 'xml'}, environ={}, config_file=self.missing)

    def test_bad_files(self):
        """Test unknown keys and malformed TOML"""
        self.assertEqual(read_config_file(self.missing), {})
        unknown = self.root / 'unknown.toml'
        unknown.write_text('colour = "red"\n')
        with self.assertRaises(PreconditionError):
            read_config_file(unknown)
        broken = self.root / 'broken.toml'
        broken.write_text('threads = = 2\n')
        with self.assertRaises(PreconditionError):
            read_config_file(broken)


if __name__ == '__main__':
    unittest.main()
