from .run_tracker import MANIFEST_SUFFIX, RunTracker, hash_file, manifest_path

__all__ = ["MANIFEST_SUFFIX", "RunTracker", "hash_file", "manifest_path"]
