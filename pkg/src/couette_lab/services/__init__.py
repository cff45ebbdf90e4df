"""Orchestration services: runs, sweeps, operator cache and artifacts."""
