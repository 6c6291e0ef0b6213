import io
import json
import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest import mock

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from pic2ha.cli.cache import ResolutionCache, cache_key
from pic2ha.cli.commands import EXIT_OK, Context, run
from pic2ha.cli.formats import dump_pic2
from pic2ha.cli.models import CacheEntry, Job
from pic2ha.pic2core import disc
from pic2ha.zlin import FgAbPresentation


class TestCacheKey(unittest.TestCase):
    def test_key_is_stable_under_dict_order(self):
        a = cache_key("resolve", {"input": "x", "length": 2, "seed": 1})
        b = cache_key("resolve", {"seed": 1, "length": 2, "input": "x"})
        self.assertEqual(a, b)
        self.assertEqual(len(a), 64)

    def test_key_changes_with_inputs(self):
        base = cache_key("resolve", {"input": "x", "length": 2, "seed": 1})
        self.assertNotEqual(base, cache_key("resolve", {"input": "x", "length": 2, "seed": 2}))
        self.assertNotEqual(base, cache_key("resolve", {"input": "x", "length": 3, "seed": 1}))


class TestResolutionCache(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.cache = ResolutionCache(os.path.join(self.tmp.name, "cache"))

    def tearDown(self):
        self.tmp.cleanup()

    def test_miss_then_hit(self):
        key = cache_key("resolve", {"input": "x"})
        self.assertIsNone(self.cache.get(key))
        entry = CacheEntry(key, "complex n=0\n", [{"index": 0, "exact": True}], {"length": 0})
        path = self.cache.put(entry)
        self.assertTrue(path.exists())
        self.assertEqual(self.cache.get(key), entry)

    def test_corrupt_entry_is_a_miss_and_is_overwritten(self):
        key = cache_key("resolve", {"input": "y"})
        self.cache.path(key).write_text("{not json", encoding="utf-8")
        with self.assertLogs("pic2ha.cache", level="WARNING") as logs:
            self.assertIsNone(self.cache.get(key))
        self.assertEqual(logs.records[0].msg, "CacheEntryCorrupt")
        entry = CacheEntry(key, "value")
        self.cache.put(entry)
        self.assertEqual(self.cache.get(key), entry)

    def test_entry_under_wrong_key_is_ignored(self):
        key = cache_key("resolve", {"input": "z"})
        other = CacheEntry("0" * 64, "value")
        self.cache.path(key).write_text(json.dumps(other.to_dict()), encoding="utf-8")
        self.assertIsNone(self.cache.get(key))

    def test_no_temporary_files_left_behind(self):
        self.cache.put(CacheEntry(cache_key("resolve", {}), "value"))
        self.assertEqual([p.suffix for p in self.cache.root.iterdir()], [".json"])


class TestCachedResolve(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.input = os.path.join(self.tmp.name, "z6.txt")
        with open(self.input, "w") as f:
            f.write(dump_pic2(disc(FgAbPresentation.cyclic(6))))
        self.context = Context({}, ResolutionCache(os.path.join(self.tmp.name, "cache")))

    def tearDown(self):
        self.tmp.cleanup()

    def run_resolve(self, length, seed):
        out = io.StringIO()
        status = run(Job("resolve", (self.input,), {"length": length, "seed": seed}), stream=out,
                     context=self.context, errors=io.StringIO())
        return status, out.getvalue()

    def _resolve(self, seed):
        return self.run_resolve(2, seed)

    def _derived(self, seed):
        out = io.StringIO()
        status = run(Job("derived", (self.input,), {"functor": "tensor:Z/4", "degree": 1, "seed": seed}),
                     stream=out, context=self.context, errors=io.StringIO())
        return status, out.getvalue()

    def test_derived_value_is_cached_with_its_resolution(self):
        first = self._derived(4)
        self.assertEqual(first[0], EXIT_OK)
        self.assertIn("pi0 = Z/2", first[1])
        self.assertEqual(len(list(self.context.cache.root.glob("*.json"))), 2)
        with mock.patch("pic2ha.cli.commands.projective_resolution", side_effect=AssertionError("recomputed")):
            self.assertEqual(self._derived(4), first)
            status, out = self.run_resolve(3, 4)
        self.assertEqual(status, EXIT_OK)
        resolution_hash = [line for line in first[1].splitlines() if line.startswith("resolution = ")][0]
        self.assertIn("hash = " + resolution_hash.split(" = ")[1], out)

    def test_derived_seed_change_misses(self):
        self._derived(4)
        self._derived(5)
        self.assertEqual(len(list(self.context.cache.root.glob("*.json"))), 4)

    def test_hit_reproduces_report_without_recomputing(self):
        first = self._resolve(4)
        self.assertEqual(first[0], EXIT_OK)
        with mock.patch("pic2ha.cli.commands.projective_resolution", side_effect=AssertionError("recomputed")):
            second = self._resolve(4)
        self.assertEqual(first, second)

    def test_corrupt_entry_is_recomputed(self):
        first = self._resolve(4)
        (entry,) = self.context.cache.root.glob("*.json")
        entry.write_text("garbage", encoding="utf-8")
        self.assertEqual(self._resolve(4), first)
        self.assertEqual(json.loads(entry.read_text(encoding="utf-8"))["key"], entry.stem)

    def test_seed_change_is_a_new_entry(self):
        self._resolve(4)
        self._resolve(5)
        self.assertEqual(len(list(self.context.cache.root.glob("*.json"))), 2)


if __name__ == "__main__":
    unittest.main()
