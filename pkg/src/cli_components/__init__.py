# Package initializer for cli_components
__all__ = ["spec_parser", "report_manager", "table_view", "sweep_manager", "oracle_manager"]
