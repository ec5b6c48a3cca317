"""Configuration, initial conditions, outputs and the run driver."""
from .analysis import count_components
from .config import ConfigError, RunConfig, load_config, load_config_file, preset_names
from .driver import EXIT_ABORT, EXIT_CONFIG, EXIT_OK, RunResult, build_mesh, run
from .ic import IC_PRESETS, ICPreset, sample_ic
from .io import CSV_COLUMNS, read_diagnostics, read_vtk_fields, write_vtk

__all__ = ["ConfigError", "RunConfig", "load_config", "load_config_file", "preset_names", "run", "RunResult",
           "build_mesh", "EXIT_OK", "EXIT_CONFIG", "EXIT_ABORT", "IC_PRESETS", "ICPreset", "sample_ic",
           "CSV_COLUMNS", "read_diagnostics", "read_vtk_fields", "write_vtk", "count_components"]
